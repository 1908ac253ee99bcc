use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::patch::integrate_disk_segment;
use crate::curve::{glue_to_lower, Disk};
use crate::error::{Error, Result};
use crate::quadrature::IntegrationOptions;

/// A closed cycle on the curve: a chord of the upper disk followed by a
/// chord of the lower disk joining the glued images of its endpoints.
#[derive(Debug, Clone, Serialize)]
pub struct DualCycle {
    /// Index of the boundary arc the cycle runs to from arc 0.
    pub arc: usize,
    pub upper: [[f64; 2]; 2],
    pub lower: [[f64; 2]; 2],
    /// Real part of the integral: the translation of the surface.
    pub period: [f64; 3],
    pub imaginary: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct BccReduction {
    /// Conventional cube edge length.
    pub a: f64,
    /// Number of lattice vectors in the first two length shells.
    pub shells: [usize; 2],
    /// `a e1`, `a e2`, `a/2 (e1 + e2 + e3)` in the computed frame.
    pub reduced: [[f64; 3]; 3],
    /// Max deviation of the reduced Gram matrix from the ideal one, relative to `a^2`.
    pub gram_error: f64,
    /// Whether the reduced basis is an integral, unimodular change of the generators.
    pub unimodular: bool,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub generators: [[f64; 3]; 3],
    pub gram: [[f64; 3]; 3],
    pub bcc_ok: bool,
    pub bcc: Option<BccReduction>,
    pub cycles: Vec<DualCycle>,
}

fn mid_arc(k: usize) -> Complex64 {
    Complex64::from_polar(1.0, (2 * k + 1) as f64 * PI / 12.0)
}

fn chord(
    disk: Disk,
    a: Complex64,
    b: Complex64,
    pieces: usize,
    opts: &IntegrationOptions,
) -> Result<[Complex64; 3]> {
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for j in 0..pieces {
        let p = a + (b - a) * (j as f64 / pieces as f64);
        let q = a + (b - a) * ((j + 1) as f64 / pieces as f64);
        let v = integrate_disk_segment(disk, p, q, opts)?;
        for i in 0..3 {
            acc[i] += v[i];
        }
    }
    Ok(acc)
}

/// Integral of the `theta = 0` integrand over the dual cycle through arcs 0 and `k`.
pub fn dual_cycle(k: usize, pieces: usize, opts: &IntegrationOptions) -> Result<DualCycle> {
    let (a, b) = (mid_arc(0), mid_arc(k));
    let (la, lb) = (glue_to_lower(b), glue_to_lower(a));
    let u = chord(Disk::Upper, a, b, pieces, opts)?;
    let l = chord(Disk::Lower, la, lb, pieces, opts)?;
    let c = |z: Complex64| [z.re, z.im];
    Ok(DualCycle {
        arc: k,
        upper: [c(a), c(b)],
        lower: [c(la), c(lb)],
        period: [0, 1, 2].map(|i| (u[i] + l[i]).re),
        imaginary: [0, 1, 2].map(|i| (u[i] + l[i]).im),
    })
}

/// A basis of the lattice generated by `vectors`.
pub fn lattice_basis(vectors: &[Vector3<f64>]) -> Result<Matrix3<f64>> {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut sorted: Vec<Vector3<f64>> = vectors
        .iter()
        .copied()
        .filter(|v| v.norm() > 1e-8 * scale)
        .collect();
    sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut picked: Vec<Vector3<f64>> = Vec::new();
    for v in &sorted {
        let independent = match picked.len() {
            0 => true,
            1 => picked[0].cross(v).norm() > 1e-6 * picked[0].norm() * v.norm(),
            2 => {
                picked[0].cross(&picked[1]).dot(v).abs()
                    > 1e-6 * picked[0].norm() * picked[1].norm() * v.norm()
            }
            _ => false,
        };
        if independent {
            picked.push(*v);
        }
    }
    if picked.len() < 3 {
        return Err(Error::RankDeficient);
    }
    let b = Matrix3::from_columns(&picked);
    let binv = b.try_inverse().ok_or(Error::RankDeficient)?;
    let coords: Vec<Vector3<f64>> = sorted.iter().map(|v| binv * v).collect();
    let denom = (1..=120)
        .find(|&d| {
            coords.iter().all(|c| {
                c.iter()
                    .all(|x| (x * d as f64 - (x * d as f64).round()).abs() < 1e-6)
            })
        })
        .ok_or(Error::RankDeficient)?;
    let mut cols: Vec<[i64; 3]> = (0..3)
        .map(|j| {
            let mut e = [0; 3];
            e[j] = denom;
            e
        })
        .collect();
    cols.extend(
        coords
            .iter()
            .map(|c| [0, 1, 2].map(|i| (c[i] * denom as f64).round() as i64)),
    );
    // Column-style Hermite reduction.
    for r in 0..3 {
        loop {
            let pivot = (r..cols.len())
                .filter(|&j| cols[j][r] != 0)
                .min_by_key(|&j| cols[j][r].abs());
            let Some(p) = pivot else {
                return Err(Error::RankDeficient);
            };
            cols.swap(r, p);
            let mut done = true;
            for j in r + 1..cols.len() {
                if cols[j][r] != 0 {
                    let q = cols[j][r] / cols[r][r];
                    for i in 0..3 {
                        cols[j][i] -= q * cols[r][i];
                    }
                    if cols[j][r] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
    }
    let h = Matrix3::from_fn(|i, j| cols[j][i] as f64 / denom as f64);
    Ok(lll(b * h))
}

/// LLL reduction (delta = 3/4) of the columns of a 3x3 basis.
pub fn lll(mut b: Matrix3<f64>) -> Matrix3<f64> {
    let gso = |b: &Matrix3<f64>| {
        let mut bs = [Vector3::zeros(); 3];
        let mut mu = [[0.0; 3]; 3];
        for i in 0..3 {
            let mut v: Vector3<f64> = b.column(i).into_owned();
            for j in 0..i {
                mu[i][j] = b.column(i).dot(&bs[j]) / bs[j].norm_squared();
                v -= mu[i][j] * bs[j];
            }
            bs[i] = v;
        }
        (bs, mu)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < 3 && guard < 1000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gso(&b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b.column(j).into_owned();
                let mut col = b.column_mut(k);
                col -= q * bj;
            }
        }
        let (bs, mu) = gso(&b);
        if bs[k].norm_squared() >= (0.75 - mu[k][k - 1].powi(2)) * bs[k - 1].norm_squared() {
            k += 1;
        } else {
            b.swap_columns(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Checks whether the lattice with basis `b` is body-centred cubic.
pub fn bcc_reduction(b: &Matrix3<f64>, tol: f64) -> Option<BccReduction> {
    let mut vs: Vec<Vector3<f64>> = Vec::new();
    for i in -2i32..=2 {
        for j in -2i32..=2 {
            for k in -2i32..=2 {
                if (i, j, k) != (0, 0, 0) {
                    vs.push(b * Vector3::new(i as f64, j as f64, k as f64));
                }
            }
        }
    }
    vs.sort_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()));
    let s1 = vs[0].norm_squared();
    let a2 = s1 * 4.0 / 3.0;
    let a = a2.sqrt();
    let shell = |target: f64| -> Vec<Vector3<f64>> {
        vs.iter()
            .copied()
            .filter(|v| (v.norm_squared() - target).abs() < tol * a2)
            .collect()
    };
    let (first, second) = (shell(s1), shell(a2));
    let e1 = *second.first()?;
    let e2 = *second.iter().find(|v| v.dot(&e1).abs() < tol * a2)?;
    let e3 = *second
        .iter()
        .find(|v| v.dot(&e1).abs() < tol * a2 && v.dot(&e2).abs() < tol * a2)?;
    let h = (e1 + e2 + e3) / 2.0;
    let reduced = Matrix3::from_columns(&[e1, e2, h]);
    let ideal = Matrix3::new(1.0, 0.0, 0.5, 0.0, 1.0, 0.5, 0.5, 0.5, 0.75) * a2;
    let gram_error = (reduced.transpose() * reduced - ideal).abs().max() / a2;
    let coords = b.try_inverse()? * reduced;
    let integral = coords.iter().all(|x| (x - x.round()).abs() < 1e-6);
    let unimodular = integral && (coords.map(|x| x.round()).determinant().abs() - 1.0).abs() < 1e-9;
    let ok = first.len() == 8 && second.len() == 6 && gram_error < tol && unimodular;
    let col = |i: usize| [reduced[(0, i)], reduced[(1, i)], reduced[(2, i)]];
    Some(BccReduction {
        a,
        shells: [first.len(), second.len()],
        reduced: [col(0), col(1), col(2)],
        gram_error,
        unimodular,
        ok,
    })
}

/// Period lattice of the `theta = 0` surface from the eleven dual cycles,
/// each chord integrated as `n` consecutive segments.
pub fn lattice_report(n: usize) -> Result<LatticeReport> {
    if n < 8 {
        return Err(Error::ResolutionTooLow(n));
    }
    let opts = IntegrationOptions::default();
    let cycles: Vec<DualCycle> = (1..12)
        .map(|k| dual_cycle(k, n, &opts))
        .collect::<Result<_>>()?;
    let periods: Vec<Vector3<f64>> = cycles.iter().map(|c| Vector3::from(c.period)).collect();
    let basis = lattice_basis(&periods)?;
    let gram = basis.transpose() * basis;
    let bcc = bcc_reduction(&basis, 1e-5);
    let col = |i: usize| [basis[(0, i)], basis[(1, i)], basis[(2, i)]];
    Ok(LatticeReport {
        generators: [col(0), col(1), col(2)],
        gram: [0, 1, 2].map(|i| [gram[(i, 0)], gram[(i, 1)], gram[(i, 2)]]),
        bcc_ok: bcc.as_ref().is_some_and(|r| r.ok),
        bcc,
        cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{continue_path, lift, SheetPath};
    use crate::quadrature::integrate_vec;
    use crate::weierstrass::base_integrand;

    #[test]
    fn synthetic_bcc_is_recognized() {
        let r = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 0.7);
        let a = 2.5;
        let gens = [
            Vector3::new(a, 0.0, 0.0),
            Vector3::new(0.0, a, 0.0),
            Vector3::new(a, a, a) / 2.0,
        ];
        let redundant: Vec<_> = [
            gens[0] + gens[1],
            gens[2],
            gens[0] - gens[2],
            gens[1],
            2.0 * gens[2] - gens[1],
        ]
        .iter()
        .map(|v| r * v)
        .collect();
        let b = lattice_basis(&redundant).unwrap();
        assert!((b.determinant().abs() - a.powi(3) / 2.0).abs() < 1e-9);
        let red = bcc_reduction(&b, 1e-9).unwrap();
        assert!(red.ok, "{red:?}");
        assert!((red.a - a).abs() < 1e-9);
    }

    #[test]
    fn simple_cubic_is_not_bcc() {
        let b = Matrix3::identity() * 3.0;
        assert!(!bcc_reduction(&b, 1e-6).map(|r| r.ok).unwrap_or(false));
    }

    #[test]
    fn coplanar_periods_are_rank_deficient() {
        let v = [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
        ];
        assert_eq!(lattice_basis(&v).unwrap_err(), Error::RankDeficient);
    }

    #[test]
    fn iwp_lattice_is_body_centred() {
        let r = lattice_report(8).unwrap();
        assert!(r.bcc_ok, "{:?}", r.bcc);
        let det = Matrix3::from(r.gram).determinant();
        assert!(det > 0.0);
        assert!(r
            .cycles
            .iter()
            .any(|c| c.imaginary.iter().any(|x| x.abs() > 1e-3)));
    }

    #[test]
    fn z_plane_loops_give_lattice_vectors() {
        let r = lattice_report(8).unwrap();
        let b = Matrix3::from_columns(&r.generators.map(Vector3::from));
        let binv = b.try_inverse().unwrap();
        let s = Complex64::new(0.8, 0.8);
        let start = lift(s, 0).unwrap();
        let pairs = [
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
            (Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)),
        ];
        let opts = IntegrationOptions::default();
        for (p, q) in pairs {
            let path = SheetPath::new(start).arc(p, 2.0 * PI).arc(q, -2.0 * PI);
            assert!(continue_path(&path).unwrap().distance(&start) < 1e-9);
            let v = integrate_vec(base_integrand, &path, &opts).unwrap();
            let period = Vector3::new(v[0].re, v[1].re, v[2].re);
            assert!(period.norm() > 1e-3);
            let c = binv * period;
            assert!(c.iter().all(|x| (x - x.round()).abs() < 1e-6), "{c:?}");
        }
    }
}
