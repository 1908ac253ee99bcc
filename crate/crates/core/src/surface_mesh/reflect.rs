use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use std::collections::{HashMap, HashSet};

use super::{v3, Mesh};
use crate::error::{Error, Result};

/// Least-squares plane through a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFit {
    pub centroid: Vector3<f64>,
    pub normal: Vector3<f64>,
    /// Largest distance of an input point from the plane.
    pub max_deviation: f64,
}

impl PlaneFit {
    fn reflection(&self) -> (Matrix3<f64>, Vector3<f64>) {
        let n = self.normal;
        let r = Matrix3::identity() - 2.0 * n * n.transpose();
        (r, 2.0 * n.dot(&self.centroid) * n)
    }
}

/// Principal-component plane fit: the normal is the direction of least variance.
pub fn fit_plane(points: &[Vector3<f64>]) -> Result<PlaneFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: points.len(),
        });
    }
    let centroid = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let cov = points.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p - centroid;
        acc + d * d.transpose()
    });
    let eig = SymmetricEigen::new(cov);
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("three eigenvalues");
    let normal = eig.eigenvectors.column(imin).into_owned().normalize();
    let max_deviation = points
        .iter()
        .map(|p| (p - centroid).dot(&normal).abs())
        .fold(0.0, f64::max);
    Ok(PlaneFit {
        centroid,
        normal,
        max_deviation,
    })
}

type Motion = (Matrix3<f64>, Vector3<f64>);

fn arc_plane(m: &Mesh, arc: &[usize], limit: f64, index: usize) -> Result<PlaneFit> {
    let pts: Vec<_> = arc.iter().map(|&i| m.point(i)).collect();
    let fit = fit_plane(&pts)?;
    if fit.max_deviation > limit {
        return Err(Error::NonPlanarBoundary {
            arc: index,
            deviation: fit.max_deviation,
            limit,
        });
    }
    Ok(fit)
}

/// Extends a patch by repeatedly reflecting it across the planes of its boundary arcs.
///
/// Each level reflects every copy created by the previous level across the
/// planes of its own arcs. Copies related by the same rigid motion are kept
/// once, and coincident vertices are welded at `1e-6` of the patch diameter.
pub fn extend_by_reflections(m: &Mesh, depth: usize) -> Result<Mesh> {
    if depth == 0 {
        return Ok(m.clone());
    }
    let diam = m.diameter();
    let limit = 1e-4 * diam;
    let planes: Vec<PlaneFit> = m
        .boundary_arcs
        .iter()
        .enumerate()
        .map(|(i, arc)| arc_plane(m, arc, limit, i))
        .collect::<Result<_>>()?;

    let same =
        |a: &Motion, b: &Motion| (a.0 - b.0).abs().max() < 1e-6 && (a.1 - b.1).norm() < 1e-6 * diam;
    let mut copies: Vec<Motion> = vec![(Matrix3::identity(), Vector3::zeros())];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &c in &frontier {
            let (r, t) = copies[c];
            for plane in &planes {
                // Reflection through the image of the plane: M S M^{-1} applied after M.
                let (s, u) = plane.reflection();
                let motion = (r * s, r * u + t);
                if !copies.iter().any(|m| same(m, &motion)) {
                    copies.push(motion);
                    next.push(copies.len() - 1);
                }
            }
        }
        frontier = next;
    }

    let weld = 1e-6 * diam;
    let cell = |p: &Vector3<f64>| -> (i64, i64, i64) {
        (
            (p.x / weld).floor() as i64,
            (p.y / weld).floor() as i64,
            (p.z / weld).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut triangles = Vec::new();
    let mut arcs: Vec<Vec<usize>> = Vec::new();
    for (r, t) in &copies {
        let flip = r.determinant() < 0.0;
        let mut map = Vec::with_capacity(m.vertices.len());
        for p in &m.vertices {
            let q = r * v3(*p) + t;
            let (cx, cy, cz) = cell(&q);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                            if let Some(&id) =
                                list.iter().find(|&&id| (vertices[id] - q).norm() <= weld)
                            {
                                found = Some(id);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(q);
                grid.entry((cx, cy, cz))
                    .or_default()
                    .push(vertices.len() - 1);
                vertices.len() - 1
            });
            map.push(id);
        }
        for tri in &m.triangles {
            let t = tri.map(|i| map[i]);
            triangles.push(if flip { [t[0], t[2], t[1]] } else { t });
        }
        for arc in &m.boundary_arcs {
            arcs.push(arc.iter().map(|&i| map[i]).collect());
        }
    }

    let mut out = Mesh {
        vertices: vertices.iter().map(|p| [p.x, p.y, p.z]).collect(),
        triangles,
        boundary_arcs: Vec::new(),
        meta: m.meta.clone(),
    };
    let boundary: HashSet<(usize, usize)> = out.boundary_edges().into_iter().collect();
    let mut seen = HashSet::new();
    for arc in arcs {
        let on_boundary = arc
            .windows(2)
            .all(|w| boundary.contains(&(w[0].min(w[1]), w[0].max(w[1]))));
        let mut key = arc.clone();
        if key.first() > key.last() {
            key.reverse();
        }
        if on_boundary && seen.insert(key) {
            out.boundary_arcs.push(arc);
        }
    }
    for (i, arc) in out.boundary_arcs.iter().enumerate() {
        arc_plane(&out, arc, limit, i)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_mesh::{dodecagon_patch, hexagon_patch, MeshMeta};
    use crate::weierstrass::BonnetAngle;

    #[test]
    fn plane_fit_recovers_plane() {
        let n = Vector3::new(1.0, 2.0, 2.0) / 3.0;
        let pts: Vec<_> = (0..20)
            .map(|k| {
                let a = k as f64 * 0.3;
                let u = Vector3::new(2.0, -1.0, 0.0).normalize();
                let v = n.cross(&u);
                Vector3::new(1.0, 1.0, 1.0) + u * a.cos() * 3.0 + v * (2.0 * a).sin()
            })
            .collect();
        let fit = fit_plane(&pts).unwrap();
        assert!(fit.normal.dot(&n).abs() > 1.0 - 1e-12);
        assert!(fit.max_deviation < 1e-12);
    }

    #[test]
    fn square_reflects_into_plane_tiling() {
        // A unit square in the xy-plane split into two triangles; arcs are its sides lifted slightly off-plane is not needed.
        let mut m = Mesh {
            vertices: vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.5, 0.0, 0.3],
                [1.0, 0.5, 0.3],
                [0.5, 1.0, 0.3],
                [0.0, 0.5, 0.3],
            ],
            triangles: vec![],
            boundary_arcs: vec![],
            meta: MeshMeta {
                theta: BonnetAngle::new(0.0),
                domain: "test".into(),
                n: 1,
            },
        };
        // Sides bulge in z so each side is a planar curve in a vertical plane.
        m.triangles = vec![
            [0, 4, 7],
            [4, 1, 5],
            [5, 2, 6],
            [6, 3, 7],
            [4, 5, 7],
            [5, 6, 7],
        ];
        m.boundary_arcs = vec![vec![0, 4, 1], vec![1, 5, 2], vec![2, 6, 3], vec![3, 7, 0]];
        m.validate().unwrap();
        let e1 = extend_by_reflections(&m, 1).unwrap();
        e1.validate().unwrap();
        assert_eq!(e1.triangles.len(), 5 * 6);
        assert!(e1.vertices.len() <= 5 * m.vertices.len());
        let e2 = extend_by_reflections(&m, 2).unwrap();
        e2.validate().unwrap();
        assert_eq!(e2.triangles.len(), 13 * 6);
        assert_eq!(extend_by_reflections(&m, 0).unwrap(), m);
    }

    #[test]
    fn hexagon_extends_at_theta_zero() {
        let m = hexagon_patch(BonnetAngle::new(0.0), 6).unwrap();
        let e = extend_by_reflections(&m, 1).unwrap();
        e.validate().unwrap();
        // Two of the six arcs lie in the same diagonal plane, so one round
        // adds five copies.
        let normals: Vec<_> = m
            .boundary_arcs
            .iter()
            .map(|a| {
                fit_plane(&a.iter().map(|&i| m.point(i)).collect::<Vec<_>>())
                    .unwrap()
                    .normal
            })
            .collect();
        let shared = (0..6)
            .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
            .filter(|&(i, j)| normals[i].cross(&normals[j]).norm() < 1e-9);
        let diagonal: Vec<_> = shared
            .filter(|&(i, _)| {
                normals[i].z.abs() < 1e-9 && normals[i].x.abs() > 0.1 && normals[i].y.abs() > 0.1
            })
            .collect();
        assert_eq!(diagonal.len(), 1);
        assert!(e.vertices.len() <= 6 * m.vertices.len());
        assert_eq!(e.triangles.len(), 6 * m.triangles.len());
    }

    #[test]
    fn generic_angle_has_no_mirror_planes() {
        let m = hexagon_patch(BonnetAngle::from_degrees(20.0), 6).unwrap();
        assert!(matches!(
            extend_by_reflections(&m, 1),
            Err(Error::NonPlanarBoundary { .. })
        ));
        let d = dodecagon_patch(BonnetAngle::new(0.0), 6).unwrap();
        assert!(matches!(
            extend_by_reflections(&d, 1),
            Err(Error::NonPlanarBoundary { .. })
        ));
    }
}
