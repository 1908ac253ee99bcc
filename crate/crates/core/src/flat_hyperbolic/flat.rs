use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use super::{Geometry, TriangleShape};
use crate::combmaps::CyclicCover;
use crate::error::{Error, Result};

const ROTATION_TOL: f64 = 1e-9;
const EDGE_TOL: f64 = 1e-10;
const ORDER_TOL: f64 = 1e-8;

/// Identification of dart `dart` with `partner`, carrying the partner's copy of
/// the edge onto this one.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Gluing {
    pub dart: usize,
    pub partner: usize,
    /// Rotation part of the gluing, in `(-pi, pi]`.
    pub rotation: f64,
    pub translation: Complex64,
    /// Difference of the two edge vectors after reversing one of them.
    pub mismatch: f64,
    /// Whether the two triangles are adjacent in the developed layout.
    pub internal: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConePoint {
    pub vertex: usize,
    /// `0, 1, 2` for `p1, p2, p3`.
    pub class: usize,
    /// Sum of the corner angles of the shape.
    pub angle: f64,
    /// The same sum measured on the developed triangles.
    pub developed: f64,
}

/// Euclidean triangles glued along the cover map.
#[derive(Debug, Clone, Serialize)]
pub struct FlatStructure {
    pub shape: TriangleShape,
    /// Angles, in units of `pi/12`, placed at `p1, p2, p3`.
    pub assignment: [u32; 3],
    /// Every ordering of the shape's angles under which all gluings are translations.
    pub admissible: Vec<[u32; 3]>,
    /// Darts of each face in face order; dart `k` runs from corner `k` to `k + 1`.
    pub face_darts: Vec<[usize; 3]>,
    pub corners: Vec<[Complex64; 3]>,
    /// Vertex class of each corner.
    pub corner_class: Vec<[usize; 3]>,
    pub gluings: Vec<Gluing>,
    pub cone_points: Vec<ConePoint>,
}

impl FlatStructure {
    pub fn max_rotation(&self) -> f64 {
        self.gluings
            .iter()
            .map(|g| g.rotation.abs())
            .fold(0.0, f64::max)
    }

    pub fn max_mismatch(&self) -> f64 {
        self.gluings.iter().map(|g| g.mismatch).fold(0.0, f64::max)
    }

    /// `sum (cone angle - 2 pi) / 2 pi`, which is `2 g - 2`.
    pub fn total_excess(&self) -> f64 {
        self.cone_points.iter().map(|c| (c.angle - TAU) / TAU).sum()
    }

    /// Largest disagreement between the two ways of computing a cone angle.
    pub fn cone_angle_agreement(&self) -> f64 {
        self.cone_points
            .iter()
            .map(|c| (c.angle - c.developed).abs())
            .fold(0.0, f64::max)
    }

    /// `{"shape": [...], "cone_angles": {...}, "orders": {...}}`, keyed by vertex class.
    pub fn report_json(&self) -> Result<serde_json::Value> {
        let orders = divisors(self)?;
        let mut cones: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for c in &self.cone_points {
            cones
                .entry(format!("p{}", c.class + 1))
                .or_default()
                .push(c.angle);
        }
        let by_class: BTreeMap<String, i64> = (0..3)
            .map(|k| (format!("p{}", k + 1), orders.by_class[k]))
            .collect();
        Ok(json!({
            "shape": self.shape.angles,
            "assignment": self.assignment,
            "admissible": self.admissible,
            "cone_angles": cones,
            "orders": by_class,
        }))
    }
}

struct Faces {
    darts: Vec<[usize; 3]>,
    /// `(face, position)` of every dart.
    slot: Vec<(usize, usize)>,
}

fn faces_of(cover: &CyclicCover) -> Result<Faces> {
    let orbits = cover.map.faces();
    let mut slot = vec![(0, 0); cover.map.n_darts()];
    let mut darts = Vec::with_capacity(orbits.len());
    for (f, orbit) in orbits.iter().enumerate() {
        let tri: [usize; 3] = orbit.as_slice().try_into().map_err(|_| {
            Error::InvalidArgument("translation structures need a triangle map".into())
        })?;
        for (k, &d) in tri.iter().enumerate() {
            slot[d] = (f, k);
        }
        darts.push(tri);
    }
    Ok(Faces { darts, slot })
}

/// Lays every face out in the plane, each neighbour glued to its BFS parent.
fn develop(
    cover: &CyclicCover,
    faces: &Faces,
    angle: &dyn Fn(usize) -> f64,
) -> Vec<[Complex64; 3]> {
    // Law of sines: an edge is as long as the sine of the angle opposite.
    let canonical = |f: usize| {
        let [x0, x1, x2] = faces.darts[f];
        let q1 = Complex64::new(angle(x2).sin(), 0.0);
        let q2 = Complex64::from_polar(angle(x1).sin(), angle(x0));
        [Complex64::new(0.0, 0.0), q1, q2]
    };
    let n = faces.darts.len();
    let mut pos: Vec<Option<[Complex64; 3]>> = vec![None; n];
    pos[0] = Some(canonical(0));
    let mut queue = VecDeque::from([0]);
    while let Some(f) = queue.pop_front() {
        let here = pos[f].expect("queued faces are placed");
        for k in 0..3 {
            let y = cover.map.alpha()[faces.darts[f][k]];
            let (g, j) = faces.slot[y];
            if pos[g].is_some() {
                continue;
            }
            // y runs from the end of x back to its start.
            let (p, q) = (here[(k + 1) % 3], here[k]);
            let c = canonical(g);
            let (a0, a1) = (c[j], c[(j + 1) % 3]);
            let rot = (q - p) / (a1 - a0);
            pos[g] = Some(c.map(|z| p + rot * (z - a0)));
            queue.push_back(g);
        }
    }
    pos.into_iter()
        .map(|p| p.expect("cover map is connected"))
        .collect()
}

fn structure(
    cover: &CyclicCover,
    shape: TriangleShape,
    assignment: [u32; 3],
) -> Result<FlatStructure> {
    let faces = faces_of(cover)?;
    let rad = assignment.map(|a| a as f64 * PI / 12.0);
    let angle = |d: usize| rad[cover.vertex_class(d)];
    let corners = develop(cover, &faces, &angle);
    let edge = |d: usize| {
        let (f, k) = faces.slot[d];
        (corners[f][k], corners[f][(k + 1) % 3])
    };
    // Neighbours in the layout share their edge exactly.
    let internal: Vec<bool> = (0..cover.map.n_darts())
        .map(|d| {
            let (p, q) = edge(d);
            let (q2, p2) = edge(cover.map.alpha()[d]);
            (p - p2).norm() < 1e-12 && (q - q2).norm() < 1e-12
        })
        .collect();
    let gluings = (0..cover.map.n_darts())
        .map(|d| {
            let e = cover.map.alpha()[d];
            let (p, q) = edge(d);
            let (q2, p2) = edge(e);
            let (v, w) = (q - p, q2 - p2);
            Gluing {
                dart: d,
                partner: e,
                rotation: (v / w).arg(),
                translation: p - p2,
                mismatch: (v - w).norm(),
                internal: internal[d],
            }
        })
        .collect();
    let mut cone: BTreeMap<usize, ConePoint> = BTreeMap::new();
    let vertex = cover.map.vertex_of();
    for d in 0..cover.map.n_darts() {
        let (f, k) = faces.slot[d];
        let c = corners[f];
        let measured = ((c[(k + 2) % 3] - c[k]) / (c[(k + 1) % 3] - c[k]))
            .arg()
            .rem_euclid(TAU);
        let entry = cone.entry(vertex[d]).or_insert(ConePoint {
            vertex: vertex[d],
            class: cover.vertex_class(d),
            angle: 0.0,
            developed: 0.0,
        });
        entry.angle += angle(d);
        entry.developed += measured;
    }
    let corner_class = faces
        .darts
        .iter()
        .map(|ds| ds.map(|d| cover.vertex_class(d)))
        .collect();
    Ok(FlatStructure {
        shape,
        assignment,
        admissible: Vec::new(),
        corner_class,
        face_darts: faces.darts,
        corners,
        gluings,
        cone_points: cone.into_values().collect(),
    })
}

fn is_translation(fs: &FlatStructure) -> bool {
    fs.max_rotation() < ROTATION_TOL && fs.max_mismatch() < EDGE_TOL
}

fn permutations(a: [u32; 3]) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for p in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        let q = p.map(|i| a[i]);
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// Realizes every face of `cover` by the Euclidean triangle `shape`.
///
/// The shape's angles are placed at `p1, p2, p3` in the given order when that
/// makes every gluing a translation; otherwise the first admissible reordering
/// is used.
pub fn build_translation_structure(
    cover: &CyclicCover,
    shape: TriangleShape,
) -> Result<FlatStructure> {
    if shape.geometry != Geometry::Euclidean {
        return Err(Error::InvalidArgument(
            "translation structures need a Euclidean shape".into(),
        ));
    }
    let mut candidates = Vec::new();
    for a in permutations(shape.angles) {
        candidates.push(structure(cover, shape, a)?);
    }
    let admissible: Vec<[u32; 3]> = candidates
        .iter()
        .filter(|s| is_translation(s))
        .map(|s| s.assignment)
        .collect();
    let Some(pick) = candidates.iter().position(is_translation) else {
        let worst = candidates[0]
            .gluings
            .iter()
            .max_by(|a, b| a.rotation.abs().total_cmp(&b.rotation.abs()))
            .expect("maps have darts");
        return Err(Error::NotTranslation {
            edge: worst.dart,
            rotation: worst.rotation,
        });
    };
    let mut fs = candidates.swap_remove(pick);
    fs.admissible = admissible;
    Ok(fs)
}

/// Zero orders of the 1-form encoded by a translation structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divisor {
    /// `(vertex, class, order)` for every vertex.
    pub orders: Vec<(usize, usize, i64)>,
    /// Total order over the fiber of `p1, p2, p3`.
    pub by_class: [i64; 3],
}

impl Divisor {
    pub fn degree(&self) -> i64 {
        self.by_class.iter().sum()
    }
}

/// A cone angle `2 pi k` is a zero of order `k - 1`.
pub fn divisors(fs: &FlatStructure) -> Result<Divisor> {
    let mut orders = Vec::new();
    let mut by_class = [0; 3];
    for c in &fs.cone_points {
        let k = c.angle / TAU;
        if (k - k.round()).abs() > ORDER_TOL {
            return Err(Error::NonIntegralOrder { angle: c.angle });
        }
        let order = k.round() as i64 - 1;
        orders.push((c.vertex, c.class, order));
        by_class[c.class] += order;
    }
    Ok(Divisor { orders, by_class })
}
