use nalgebra::Vector3;
use serde::Serialize;

use super::patch::hexagon_potentials;
use super::{Mesh, Patch};
use crate::error::{Error, Result};
use crate::quadrature::IntegrationOptions;
use crate::weierstrass::BonnetAngle;

#[derive(Debug, Clone, Serialize)]
pub struct ArcReport {
    /// Largest distance from the chord divided by the chord length.
    pub straightness: f64,
    pub length: f64,
    pub direction: [f64; 3],
    /// `vertical`, `horizontal` or `diagonal` relative to the box.
    pub kind: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StessmannReport {
    pub theta: f64,
    pub n: usize,
    pub arcs: Vec<ArcReport>,
    pub max_straightness: f64,
    /// Vertical edge length over horizontal edge length.
    pub box_ratio: f64,
    /// Face diagonal length over horizontal edge length.
    pub diagonal_ratio: f64,
}

/// Max point-to-chord distance relative to the chord length.
pub fn straightness(points: &[Vector3<f64>]) -> f64 {
    let (a, b) = (points[0], points[points.len() - 1]);
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return f64::INFINITY;
    }
    let u = d / len;
    points
        .iter()
        .map(|p| {
            let r = p - a;
            (r - u * r.dot(&u)).norm()
        })
        .fold(0.0, f64::max)
        / len
}

/// Straightness and chord data of every boundary arc.
pub fn arc_reports(m: &Mesh) -> Vec<(f64, f64, Vector3<f64>)> {
    m.boundary_arcs
        .iter()
        .map(|arc| {
            let pts: Vec<_> = arc.iter().map(|&i| m.point(i)).collect();
            let d = pts[pts.len() - 1] - pts[0];
            (straightness(&pts), d.norm(), d / d.norm())
        })
        .collect()
}

/// Contour of the conjugate surface: the hexagon patch at `theta = 90` degrees.
pub fn stessmann_report(n: usize) -> Result<StessmannReport> {
    if n < 8 {
        return Err(Error::ResolutionTooLow(n));
    }
    let patch: Patch = hexagon_potentials(n, &IntegrationOptions::default())?;
    let theta = BonnetAngle::from_degrees(90.0);
    let m = patch.mesh(theta);
    let raw = arc_reports(&m);
    let vertical: Vec<f64> = raw
        .iter()
        .filter(|r| r.2.z.abs() > 0.99)
        .map(|r| r.1)
        .collect();
    let flat: Vec<f64> = raw
        .iter()
        .filter(|r| r.2.z.abs() < 0.01)
        .map(|r| r.1)
        .collect();
    let shortest = flat.iter().copied().fold(f64::INFINITY, f64::min);
    let is_edge = |l: f64| l < 1.2 * shortest;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let horizontal: Vec<f64> = flat.iter().copied().filter(|l| is_edge(*l)).collect();
    let diagonal: Vec<f64> = flat.iter().copied().filter(|l| !is_edge(*l)).collect();
    let arcs: Vec<ArcReport> = raw
        .iter()
        .map(|(s, l, d)| ArcReport {
            straightness: *s,
            length: *l,
            direction: [d.x, d.y, d.z],
            kind: if d.z.abs() > 0.99 {
                "vertical"
            } else if d.z.abs() < 0.01 && is_edge(*l) {
                "horizontal"
            } else if d.z.abs() < 0.01 {
                "diagonal"
            } else {
                "oblique"
            }
            .into(),
        })
        .collect();
    Ok(StessmannReport {
        theta: theta.degrees(),
        n,
        max_straightness: raw.iter().map(|r| r.0).fold(0.0, f64::max),
        arcs,
        box_ratio: mean(&vertical) / mean(&horizontal),
        diagonal_ratio: mean(&diagonal) / mean(&horizontal),
    })
}
