//! Two closed disks that together cover the curve.
//!
//! The upper disk parametrizes `|z| >= 1` by `u = t^3`, `eta = t rho(t)` and
//! the lower disk parametrizes `|z| <= 1` by `z = t^3`, `w = -t rho(t)`, where
//! `rho(t)` is the principal cube root of `1 - t^12`. Since `Re(1 - t^12) >= 0`
//! on the closed unit disk, `rho` is continuous there and both maps are
//! single-valued. The twelve boundary points `e^{i k pi/6}` are the branch
//! points over `z in {1, -i, -1, i}`, and the boundaries are glued arc by arc.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{principal_cbrt, zeta3_pow, Chart, CurvePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Disk {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    pub disk: Disk,
    pub t: Complex64,
}

impl DiskPoint {
    pub fn upper(t: Complex64) -> Self {
        DiskPoint {
            disk: Disk::Upper,
            t,
        }
    }

    pub fn lower(t: Complex64) -> Self {
        DiskPoint {
            disk: Disk::Lower,
            t,
        }
    }

    pub fn deck(&self, j: i64) -> Self {
        DiskPoint {
            t: self.t * zeta3_pow(j),
            ..*self
        }
    }

    pub fn tau(&self) -> Self {
        let angle = match self.disk {
            Disk::Upper => 7.0 * PI / 6.0,
            Disk::Lower => PI / 6.0,
        };
        DiskPoint {
            t: self.t * Complex64::from_polar(1.0, angle),
            ..*self
        }
    }
}

pub fn disk_rho(t: Complex64) -> Complex64 {
    principal_cbrt(1.0 - t.powu(12))
}

pub fn from_disk(p: &DiskPoint) -> CurvePoint {
    let t = p.t;
    let t3 = t * t * t;
    match p.disk {
        Disk::Upper => CurvePoint::in_infinity_chart(t3, t * disk_rho(t)),
        Disk::Lower => CurvePoint::finite(t3, -t * disk_rho(t)),
    }
}

/// Inverse of [`from_disk`]. Points with `|z| = 1` go to the upper disk.
pub fn to_disk(p: &CurvePoint) -> DiskPoint {
    let upper = match p.chart {
        Chart::Infinity => p.x.norm() <= 1.0,
        Chart::Finite => p.x.norm() >= 1.0,
    };
    let (disk, chart, sign) = if upper {
        (Disk::Upper, Chart::Infinity, 1.0)
    } else {
        (Disk::Lower, Chart::Finite, -1.0)
    };
    let q = p
        .to_chart(chart)
        .expect("points with |z| in the disk range convert");
    let r = principal_cbrt(1.0 - q.x.powu(4));
    let t = if r.norm() < 1e-300 {
        principal_cbrt(q.x)
    } else {
        sign * q.y / r
    };
    DiskPoint { disk, t }
}

/// Index of the boundary arc `[k pi/6, (k+1) pi/6]` containing `e^{i phi}`.
pub fn arc_index(t: Complex64) -> usize {
    let phi = t.im.atan2(t.re).rem_euclid(2.0 * PI);
    ((phi / (PI / 6.0)).floor() as usize).min(11)
}

/// Lower-disk parameter of a point on the upper boundary.
pub fn glue_to_lower(t: Complex64) -> Complex64 {
    let k = arc_index(t) as i64;
    t.conj() * zeta3_pow(1 - k)
}

/// Upper-disk parameter of a point on the lower boundary.
pub fn glue_to_upper(t: Complex64) -> Complex64 {
    (0..3)
        .map(|m| t.conj() * zeta3_pow(m))
        .min_by(|a, b| {
            let da = (glue_to_lower(*a) - t).norm();
            let db = (glue_to_lower(*b) - t).norm();
            da.total_cmp(&db)
        })
        .expect("three candidates")
}

#[cfg(test)]
mod tests {
    use super::super::{deck, lift, tau};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_disk(rng: &mut ChaCha8Rng) -> Complex64 {
        Complex64::from_polar(
            rng.gen_range(0.0f64..1.0).sqrt(),
            rng.gen_range(0.0..2.0 * PI),
        )
    }

    #[test]
    fn disk_points_are_on_curve() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let t = random_disk(&mut rng);
            for d in [DiskPoint::upper(t), DiskPoint::lower(t)] {
                assert!(from_disk(&d).is_on_curve());
            }
        }
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let t = random_disk(&mut rng) * 0.999;
            for d in [DiskPoint::upper(t), DiskPoint::lower(t)] {
                let back = to_disk(&from_disk(&d));
                assert_eq!(back.disk, d.disk);
                assert!((back.t - t).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn boundary_gluing_is_consistent() {
        for i in 0..240 {
            let phi = (i as f64 + 0.37) * 2.0 * PI / 240.0;
            let t = Complex64::from_polar(1.0, phi);
            let a = from_disk(&DiskPoint::upper(t));
            let b = from_disk(&DiskPoint::lower(glue_to_lower(t)));
            assert!(a.distance(&b) < 1e-10, "phi = {phi}");
            assert!((glue_to_upper(glue_to_lower(t)) - t).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetries_match_curve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = random_disk(&mut rng);
            for d in [DiskPoint::upper(t), DiskPoint::lower(t)] {
                let p = from_disk(&d);
                assert!(from_disk(&d.deck(1)).distance(&deck(&p, 1)) < 1e-12);
                assert!(from_disk(&d.tau()).distance(&tau(&p)) < 1e-12);
            }
        }
    }

    #[test]
    fn base_point_location() {
        let z0 = Complex64::from_polar(1.0, PI / 4.0);
        let d = to_disk(&lift(z0, 0).unwrap());
        assert_eq!(d.disk, Disk::Upper);
        assert!((d.t - Complex64::from_polar(1.0, -3.0 * PI / 4.0)).norm() < 1e-12);
    }

    #[test]
    fn boundary_vertices_cycle_through_unit_roots() {
        let expected = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for k in 0..12 {
            let p = from_disk(&DiskPoint::upper(Complex64::from_polar(
                1.0,
                k as f64 * PI / 6.0,
            )));
            let z = p.z().finite().unwrap();
            assert!((z - expected[k % 4]).norm() < 1e-12);
            assert!(p.y.norm() < 1e-4);
        }
    }
}
