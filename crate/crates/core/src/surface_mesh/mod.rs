//! Triangulated patches of the associate-family surfaces.

mod export;
mod hexmap;
mod lattice;
mod metrics;
mod patch;
mod reflect;
mod stessmann;

pub use export::{export, read_obj, MeshFormat};
pub use lattice::{lattice_report, BccReduction, DualCycle, LatticeReport};
pub use metrics::{conformality_error, mean_curvature_error, normal_deviation, seam_mismatch};
pub use patch::{
    disk_integrand, dodecagon_patch, dodecagon_potentials, hexagon_patch, hexagon_potentials,
    integrate_disk_segment, Domain, Patch, TreeOrder,
};
pub use reflect::{extend_by_reflections, fit_plane, PlaneFit};
pub use stessmann::{stessmann_report, straightness, ArcReport, StessmannReport};

use nalgebra::Vector3;
use serde::Serialize;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::weierstrass::BonnetAngle;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshMeta {
    pub theta: BonnetAngle,
    pub domain: String,
    pub n: usize,
}

/// A consistently oriented triangle mesh with its boundary split into arcs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_arcs: Vec<Vec<usize>>,
    pub meta: MeshMeta,
}

pub(crate) fn v3(p: [f64; 3]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

impl Mesh {
    pub fn empty() -> Mesh {
        Mesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            boundary_arcs: Vec::new(),
            meta: MeshMeta {
                theta: BonnetAngle::new(0.0),
                domain: "empty".into(),
                n: 0,
            },
        }
    }

    pub fn point(&self, i: usize) -> Vector3<f64> {
        v3(self.vertices[i])
    }

    /// Largest distance between two vertices, from the bounding box diagonal
    /// refined by a sweep over extreme points.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Vector3<f64>> = self.vertices.iter().map(|p| v3(*p)).collect();
        if pts.len() < 2 {
            return 0.0;
        }
        let mut best = 0.0f64;
        let step = (pts.len() / 2000).max(1);
        for i in (0..pts.len()).step_by(step) {
            for q in &pts {
                best = best.max((pts[i] - q).norm());
            }
        }
        best
    }

    /// Directed edge counts keyed by unordered vertex pair.
    fn edge_uses(&self) -> HashMap<(usize, usize), (usize, usize)> {
        let mut uses: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = uses.entry((a.min(b), a.max(b))).or_default();
                if a < b {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        uses
    }

    /// Edges used by exactly one triangle, as unordered pairs.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .edge_uses()
            .into_iter()
            .filter(|(_, (f, b))| f + b == 1)
            .map(|(k, _)| k)
            .collect();
        out.sort_unstable();
        out
    }

    /// Checks index ranges, orientation consistency and that the boundary
    /// arcs cover the boundary edges exactly.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        for t in &self.triangles {
            if t.iter().any(|&i| i >= nv) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidArgument(
                    "triangle index out of range or degenerate".into(),
                ));
            }
        }
        for ((a, b), (f, r)) in self.edge_uses() {
            if f > 1 || r > 1 {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) is not consistently oriented"
                )));
            }
        }
        let mut arc_edges: Vec<(usize, usize)> = self
            .boundary_arcs
            .iter()
            .flat_map(|arc| arc.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
            .collect();
        arc_edges.sort_unstable();
        if arc_edges != self.boundary_edges() {
            return Err(Error::InvalidArgument(
                "boundary arcs do not cover the boundary".into(),
            ));
        }
        Ok(())
    }

    /// Area-weighted vertex normals.
    pub fn vertex_normals(&self) -> Vec<Vector3<f64>> {
        let mut acc = vec![Vector3::zeros(); self.vertices.len()];
        for t in &self.triangles {
            let (a, b, c) = (self.point(t[0]), self.point(t[1]), self.point(t[2]));
            let n = (b - a).cross(&(c - a));
            for &i in t {
                acc[i] += n;
            }
        }
        acc.into_iter()
            .map(|n| if n.norm() > 0.0 { n.normalize() } else { n })
            .collect()
    }

    /// Vertices on at least one boundary edge.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for (a, b) in self.boundary_edges() {
            on[a] = true;
            on[b] = true;
        }
        on
    }

    pub fn mean_edge_length(&self) -> f64 {
        let uses = self.edge_uses();
        let total: f64 = uses
            .keys()
            .map(|&(a, b)| (self.point(a) - self.point(b)).norm())
            .sum();
        total / uses.len().max(1) as f64
    }
}
