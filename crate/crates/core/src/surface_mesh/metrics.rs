use nalgebra::Vector3;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashSet};

use super::patch::{disk_integrand, integrate_disk_segment};
use super::{v3, Mesh, Patch};
use crate::curve::{arc_index, glue_to_lower, Disk};
use crate::error::Result;
use crate::quadrature::IntegrationOptions;
use crate::weierstrass::surface_normal;

/// Largest angle between area-weighted vertex normals and the analytic normal
/// at interior vertices.
pub fn normal_deviation(patch: &Patch, m: &Mesh) -> f64 {
    let normals = m.vertex_normals();
    let boundary = m.boundary_vertices();
    (0..m.vertices.len())
        .filter(|&v| !boundary[v])
        .map(|v| {
            let exact = v3(surface_normal(patch.gauss_value(v)));
            normals[v].dot(&exact).clamp(-1.0, 1.0).acos()
        })
        .fold(0.0, f64::max)
}

/// Max of `|H| * diameter` over interior vertices, with the cotangent
/// Laplacian and barycentric vertex areas.
pub fn mean_curvature_error(m: &Mesh) -> f64 {
    let nv = m.vertices.len();
    let mut lap = vec![Vector3::zeros(); nv];
    let mut area = vec![0.0; nv];
    for t in &m.triangles {
        let p = t.map(|i| m.point(i));
        let a2 = (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
        for k in 0..3 {
            let (i, j, o) = (k, (k + 1) % 3, (k + 2) % 3);
            let (u, w) = (p[i] - p[o], p[j] - p[o]);
            let cot = u.dot(&w) / u.cross(&w).norm();
            lap[t[i]] += 0.5 * cot * (p[j] - p[i]);
            lap[t[j]] += 0.5 * cot * (p[i] - p[j]);
            area[t[k]] += a2 / 6.0;
        }
    }
    let boundary = m.boundary_vertices();
    let diam = m.diameter();
    (0..nv)
        .filter(|&v| !boundary[v] && area[v] > 0.0)
        .map(|v| lap[v].norm() / (2.0 * area[v]) * diam)
        .fold(0.0, f64::max)
}

/// Worst relative mismatch between mesh edge lengths and the conformal
/// metric `|Phi(mid)| |dt| / sqrt 2`.
///
/// Edges touching the boundary or the one-ring of a boundary branch vertex
/// are skipped: the metric is singular there and the midpoint estimate does
/// not improve under refinement.
pub fn conformality_error(patch: &Patch, m: &Mesh) -> f64 {
    let mut skip = m.boundary_vertices();
    for tri in &patch.triangles {
        if tri.iter().any(|&v| patch.is_branch_vertex(v)) {
            for &v in tri {
                skip[v] = true;
            }
        }
    }
    let mut seen = HashSet::new();
    let mut worst = 0.0f64;
    for (f, tri) in patch.triangles.iter().enumerate() {
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            if skip[u] || skip[v] || !seen.insert((u.min(v), u.max(v))) {
                continue;
            }
            let (tu, tv) = (patch.corner_t[f][k], patch.corner_t[f][(k + 1) % 3]);
            let phi = disk_integrand(patch.tri_disk[f], 0.5 * (tu + tv));
            let speed = phi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let predicted = speed * (tv - tu).norm() / 2f64.sqrt();
            let actual = (m.point(u) - m.point(v)).norm();
            worst = worst.max((actual / predicted - 1.0).abs());
        }
    }
    worst
}

/// Compares potential differences along each upper boundary arc with the
/// same differences integrated through the lower disk.
pub fn seam_mismatch(patch: &Patch, opts: &IntegrationOptions) -> Result<f64> {
    let mut by_arc: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, p) in patch.params.iter().enumerate() {
        if p.disk == Disk::Upper && (p.t.norm() - 1.0).abs() < 1e-12 && !patch.is_branch_vertex(v) {
            by_arc.entry(arc_index(p.t)).or_default().push(v);
        }
    }
    let mut worst = 0.0f64;
    for verts in by_arc.values() {
        let anchor = verts[0];
        let ta = glue_to_lower(patch.params[anchor].t);
        for &v in &verts[1..] {
            let via_lower =
                integrate_disk_segment(Disk::Lower, ta, glue_to_lower(patch.params[v].t), opts)?;
            for i in 0..3 {
                let d: Complex64 = patch.potentials[v][i] - patch.potentials[anchor][i];
                worst = worst.max((d - via_lower[i]).norm());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_mesh::{dodecagon_potentials, hexagon_potentials};
    use crate::weierstrass::BonnetAngle;

    #[test]
    fn normals_match_gauss_map() {
        let p = dodecagon_potentials(16, &IntegrationOptions::default()).unwrap();
        let m = p.mesh(BonnetAngle::new(0.0));
        let dev = normal_deviation(&p, &m);
        assert!(dev < 0.02, "{dev}");
        // The normal does not depend on the Bonnet angle.
        let m2 = p.mesh(BonnetAngle::from_degrees(37.0));
        assert!(normal_deviation(&p, &m2) < 0.02);
    }

    #[test]
    fn conformal_within_five_percent() {
        let opts = IntegrationOptions::default();
        let e: Vec<f64> = [16, 32]
            .iter()
            .map(|&n| {
                let p = dodecagon_potentials(n, &opts).unwrap();
                conformality_error(&p, &p.mesh(BonnetAngle::new(0.0)))
            })
            .collect();
        assert!(e.iter().all(|&x| x < 0.05), "{e:?}");
    }

    #[test]
    fn mean_curvature_decreases() {
        let opts = IntegrationOptions::default();
        let h: Vec<f64> = [8, 16]
            .iter()
            .map(|&n| {
                mean_curvature_error(
                    &dodecagon_potentials(n, &opts)
                        .unwrap()
                        .mesh(BonnetAngle::new(0.0)),
                )
            })
            .collect();
        assert!(h[1] < h[0], "{h:?}");
    }

    #[test]
    fn seams_are_consistent() {
        let opts = IntegrationOptions::default();
        assert!(seam_mismatch(&dodecagon_potentials(6, &opts).unwrap(), &opts).unwrap() < 1e-8);
        assert!(seam_mismatch(&hexagon_potentials(6, &opts).unwrap(), &opts).unwrap() < 1e-8);
    }

    #[test]
    fn gauss_values_cycle_on_boundary_vertices() {
        let p = dodecagon_potentials(8, &IntegrationOptions::default()).unwrap();
        let targets = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for k in 0..12 {
            let t = Complex64::from_polar(1.0, k as f64 * std::f64::consts::PI / 6.0);
            let v = (0..p.params.len())
                .find(|&v| (p.params[v].t - t).norm() < 1e-12)
                .unwrap();
            let g = p.gauss_value(v).finite().unwrap();
            assert!((g - targets[k % 4]).norm() < 1e-12);
        }
    }
}
