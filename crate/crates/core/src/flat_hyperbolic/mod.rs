//! Geometric structures on the genus-4 triangle map: its hyperbolic
//! `(pi/12, pi/3, pi/12)` structure and the four translation structures of the
//! holomorphic 1-forms.

mod flat;
mod hyperbolic;
mod svg;

pub use flat::{build_translation_structure, divisors, ConePoint, Divisor, FlatStructure, Gluing};
pub use hyperbolic::{
    develop_hyperbolic, retile_equilateral, DevelopedPolygon, HyperbolicTriangle,
};
pub use svg::{render_svg, Drawing};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Geometry {
    Hyperbolic,
    Euclidean,
}

/// A triangle with corner angles `angles[j] * pi / 12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TriangleShape {
    pub geometry: Geometry,
    pub angles: [u32; 3],
}

impl TriangleShape {
    pub fn new(geometry: Geometry, angles: [u32; 3]) -> Result<Self> {
        let sum: u32 = angles.iter().sum();
        let ok = angles.iter().all(|&a| a > 0)
            && match geometry {
                Geometry::Hyperbolic => sum < 12,
                Geometry::Euclidean => sum == 12,
            };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "{angles:?} is not a {geometry:?} triangle"
            )));
        }
        Ok(TriangleShape { geometry, angles })
    }

    pub fn euclidean(angles: [u32; 3]) -> Result<Self> {
        Self::new(Geometry::Euclidean, angles)
    }

    pub fn radians(&self) -> [f64; 3] {
        self.angles.map(|a| a as f64 * std::f64::consts::PI / 12.0)
    }
}

/// The Euclidean shapes of `omega_1 .. omega_4`.
pub const FORM_SHAPES: [[u32; 3]; 4] = [[1, 4, 7], [2, 8, 2], [4, 4, 4], [7, 4, 1]];
