use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::combmaps::{CombMap, CyclicCover};
use crate::error::{Error, Result};

/// Corner angles at `p1, p2, p3`. Each lift of `p2` meets six corners, so
/// `pi/3` there closes it up to `2 pi`.
pub const ANGLES: [f64; 3] = [PI / 12.0, PI / 3.0, PI / 12.0];

/// Orientation-preserving isometry of the unit disk as a normalized 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mobius([[Complex64; 2]; 2]);

impl Mobius {
    fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mobius([[one, zero], [zero, one]])
    }

    /// Sends `p` to the origin.
    fn to_origin(p: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Mobius([[one, -p], [-p.conj(), one]]).normalized()
    }

    fn rotation(phi: f64) -> Self {
        let h = Complex64::from_polar(1.0, phi / 2.0);
        Mobius([
            [h, Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), h.conj()],
        ])
    }

    fn normalized(self) -> Self {
        let [[a, b], [c, d]] = self.0;
        let s = (a * d - b * c).sqrt();
        Mobius([[a / s, b / s], [c / s, d / s]])
    }

    pub(crate) fn apply(&self, z: Complex64) -> Complex64 {
        let [[a, b], [c, d]] = self.0;
        (a * z + b) / (c * z + d)
    }

    fn then(&self, after: &Mobius) -> Mobius {
        let (x, y) = (after.0, self.0);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        Mobius(m).normalized()
    }

    fn inverse(&self) -> Mobius {
        let [[a, b], [c, d]] = self.0;
        Mobius([[d, -b], [-c, a]])
    }

    /// The isometry taking `p -> p2` and `q -> q2`; the two segments must have
    /// equal length.
    fn matching(p: Complex64, q: Complex64, p2: Complex64, q2: Complex64) -> Mobius {
        let (s, t) = (Mobius::to_origin(p), Mobius::to_origin(p2));
        let phi = (t.apply(q2) / s.apply(q)).arg();
        s.then(&Mobius::rotation(phi)).then(&t.inverse())
    }

    /// Distance to the identity, up to the sign ambiguity of `SU(1,1)`.
    fn identity_error(&self) -> f64 {
        let id = Mobius::identity().0;
        let diff = |sign: f64| {
            let mut e: f64 = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    e = e.max((self.0[i][j] - sign * id[i][j]).norm());
                }
            }
            e
        };
        diff(1.0).min(diff(-1.0))
    }
}

pub(crate) fn distance(p: Complex64, q: Complex64) -> f64 {
    let num = 2.0 * (p - q).norm_sqr();
    let den = (1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr());
    (1.0 + num / den).acosh()
}

/// Angle at `p` between the geodesics towards `q` and `r`.
fn angle_at(p: Complex64, q: Complex64, r: Complex64) -> f64 {
    let m = Mobius::to_origin(p);
    (m.apply(r) / m.apply(q)).arg().abs()
}

/// Side opposite each corner, from the angles alone.
fn side_lengths(angles: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| {
        let (a, b, c) = (angles[i], angles[(i + 1) % 3], angles[(i + 2) % 3]);
        ((a.cos() + b.cos() * c.cos()) / (b.sin() * c.sin())).acosh()
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicTriangle {
    /// Face of the cover map.
    pub face: usize,
    /// Centre, then the two boundary corners in counter-clockwise order.
    pub corners: [Complex64; 3],
}

/// The 24 triangles around `p1`, developed into the unit disk with `p1` at the
/// centre.
#[derive(Debug, Clone, Serialize)]
pub struct DevelopedPolygon {
    pub triangles: Vec<HyperbolicTriangle>,
    /// Boundary vertices in counter-clockwise order.
    pub boundary: Vec<Complex64>,
    /// Map vertex of each boundary vertex.
    pub boundary_vertex: Vec<usize>,
    pub center_vertex: usize,
    /// Side `k` joins boundary vertices `k` and `k + 1`; `pairing[k]` is the side
    /// glued to it.
    pub pairing: Vec<usize>,
    /// Hyperbolic side lengths opposite `p1, p2, p3`.
    pub lengths: [f64; 3],
}

impl DevelopedPolygon {
    fn next(&self, k: usize) -> usize {
        (k + 1) % self.boundary.len()
    }

    fn side(&self, k: usize) -> (Complex64, Complex64) {
        (self.boundary[k], self.boundary[self.next(k)])
    }

    pub fn side_length(&self, k: usize) -> f64 {
        let (p, q) = self.side(k);
        distance(p, q)
    }

    /// Largest difference in length between glued sides.
    pub fn pairing_error(&self) -> f64 {
        (0..self.pairing.len())
            .map(|k| (self.side_length(k) - self.side_length(self.pairing[k])).abs())
            .fold(0.0, f64::max)
    }

    /// Isometry carrying side `pairing[k]` onto side `k`, reversing its direction.
    fn glue(&self, k: usize) -> Mobius {
        let j = self.pairing[k];
        let (p, q) = self.side(k);
        let (pj, qj) = self.side(j);
        Mobius::matching(qj, pj, p, q)
    }

    /// Total angle of every map vertex, measured on the developed triangles.
    pub fn angle_sums(&self) -> Vec<(usize, f64)> {
        let mut sums = std::collections::BTreeMap::new();
        let n = self.boundary.len();
        for (k, t) in self.triangles.iter().enumerate() {
            let [c, p, q] = t.corners;
            *sums.entry(self.center_vertex).or_insert(0.0) += angle_at(c, p, q);
            *sums.entry(self.boundary_vertex[k]).or_insert(0.0) += angle_at(p, c, q);
            *sums.entry(self.boundary_vertex[(k + 1) % n]).or_insert(0.0) += angle_at(q, p, c);
        }
        sums.into_iter().collect()
    }

    /// For each cycle of boundary vertices glued together, the distance from the
    /// identity of the composed side gluings around it.
    pub fn holonomy_errors(&self) -> Vec<f64> {
        let n = self.boundary.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut h = Mobius::identity();
            let mut m = start;
            loop {
                seen[m] = true;
                h = self.glue(m).then(&h);
                m = self.next(self.pairing[m]);
                if m == start {
                    break;
                }
            }
            out.push(h.identity_error());
        }
        out
    }

    /// Whether rotating about the centre by `angle` maps the triangle set to itself.
    pub fn rotation_invariant(&self, angle: f64, tol: f64) -> bool {
        let r = Complex64::from_polar(1.0, angle);
        self.triangles.iter().all(|t| {
            let rotated = t.corners.map(|z| z * r);
            self.triangles
                .iter()
                .any(|s| (0..3).all(|i| (s.corners[i] - rotated[i]).norm() < tol))
        })
    }
}

/// Develops the `(1, 4, 7; 12)` cover with its `(pi/12, pi/3, pi/12)` metric
/// into the disk.
pub fn develop_hyperbolic(cover: &CyclicCover) -> Result<DevelopedPolygon> {
    let m = &cover.map;
    let vertex = m.vertex_of();
    let start = (0..m.n_darts())
        .find(|&d| cover.vertex_class(d) == 0)
        .ok_or_else(|| Error::InvalidArgument("cover has no vertex over p1".into()))?;
    let mut ray = vec![start];
    while m.sigma()[*ray.last().expect("nonempty")] != start {
        ray.push(m.sigma()[*ray.last().expect("nonempty")]);
    }
    let n = ray.len();
    if n != m.faces().len() {
        return Err(Error::InvalidArgument(
            "cover must have a single vertex over p1 meeting every face".into(),
        ));
    }
    let lengths = side_lengths(ANGLES);
    let phi = m.phi();
    let alpha = m.alpha();
    let boundary: Vec<Complex64> = ray
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let far = cover.vertex_class(alpha[d]);
            // Opposite corner of the edge p1 -> p_far.
            let len = lengths[3 - far];
            Complex64::from_polar((len / 2.0).tanh(), k as f64 * 2.0 * PI / n as f64)
        })
        .collect();
    let boundary_vertex: Vec<usize> = ray.iter().map(|&d| vertex[alpha[d]]).collect();
    let face_of = {
        let mut f = vec![0; m.n_darts()];
        for (i, orbit) in m.faces().iter().enumerate() {
            for &d in orbit {
                f[d] = i;
            }
        }
        f
    };
    let triangles: Vec<HyperbolicTriangle> = (0..n)
        .map(|k| HyperbolicTriangle {
            face: face_of[ray[(k + 1) % n]],
            corners: [Complex64::new(0.0, 0.0), boundary[k], boundary[(k + 1) % n]],
        })
        .collect();
    let mut faces: Vec<usize> = triangles.iter().map(|t| t.face).collect();
    faces.sort_unstable();
    faces.dedup();
    if faces.len() != n {
        return Err(Error::InvalidArgument(
            "triangles around p1 are not distinct faces".into(),
        ));
    }
    // The side opposite the centre in triangle k is the face successor of ray k+1.
    let side_dart: Vec<usize> = (0..n).map(|k| phi[ray[(k + 1) % n]]).collect();
    let pairing = side_dart
        .iter()
        .map(|&e| {
            side_dart
                .iter()
                .position(|&x| x == alpha[e])
                .ok_or_else(|| Error::InvalidArgument("boundary side has no partner".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DevelopedPolygon {
        triangles,
        boundary,
        boundary_vertex,
        center_vertex: vertex[start],
        pairing,
        lengths,
    })
}

/// Flips every edge joining the two `pi/12` corners, turning each pair of
/// `(pi/12, pi/3, pi/12)` triangles into two equilateral `pi/6` ones.
pub fn retile_equilateral(cover: &CyclicCover) -> Result<CombMap> {
    let mut m = cover.map.clone();
    let darts: Vec<usize> = (0..m.n_darts())
        .filter(|&d| cover.vertex_class(d) == 2 && cover.vertex_class(cover.map.alpha()[d]) == 0)
        .collect();
    if darts.len() != m.faces().len() / 2 {
        return Err(Error::PairingFailure);
    }
    for d in darts {
        m = m.flip(d)?;
    }
    if !m.is_triangulation() {
        return Err(Error::PairingFailure);
    }
    Ok(m)
}
