//! The genus-4 curve `w^3 = z(z^4 - 1)` underlying the I-WP surface.
//!
//! Points are stored in one of two affine charts. The finite chart holds
//! `(z, w)`. The infinity chart holds `(u, eta)` with `u = 1/z` and
//! `eta = w u^2`; there the curve reads `eta^3 = u(1 - u^4)`, which has the
//! same shape as the finite equation. Both charts have their branch values at
//! `{0, 1, -1, i, -i}`; `u = 0` is the single point over `z = infinity`.
//!
//! The coordinate `z` is the stereographically projected Gauss map, so the
//! projection `(z, w) -> z` is the degree-3 map of the surface onto the
//! sphere, totally branched over the six octahedron vertices.

mod disk;
mod path;

pub use disk::{
    arc_index, disk_rho, from_disk, glue_to_lower, glue_to_upper, to_disk, Disk, DiskPoint,
};
#[cfg(test)]
pub(crate) use path::PieceKind;
pub use path::{continue_path, Segment, SegmentShape, SheetPath};
pub(crate) use path::{Piece, Track};

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Primitive cube root of unity `e^{2 pi i/3}`.
pub const ZETA3: Complex64 = Complex64::new(-0.5, 0.866_025_403_784_438_6);

/// Branch values of either affine chart.
pub const BRANCH_VALUES: [Complex64; 5] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(0.0, -1.0),
];

/// Minimum clearance between an interior path point and a branch value.
pub const R_MIN: f64 = 1e-3;

/// Relative tolerance of the on-curve invariant.
pub const CURVE_EPS: f64 = 1e-10;

/// Radius beyond which points are normalized into the infinity chart.
pub const CHART_SWITCH_RADIUS: f64 = 2.0;

/// Principal cube root, argument in `(-pi/3, pi/3]`.
pub fn principal_cbrt(c: Complex64) -> Complex64 {
    if c == Complex64::new(0.0, 0.0) {
        return c;
    }
    let mut arg = c.im.atan2(c.re);
    if arg <= -PI {
        arg = PI;
    }
    // atan2 returns -pi for (-x, -0.0); the convention wants +pi there.
    if c.im == 0.0 && c.re < 0.0 {
        arg = PI;
    }
    Complex64::from_polar(c.norm().cbrt(), arg / 3.0)
}

pub(crate) fn zeta3_pow(j: i64) -> Complex64 {
    match j.rem_euclid(3) {
        0 => Complex64::new(1.0, 0.0),
        1 => ZETA3,
        _ => ZETA3.conj(),
    }
}

/// Affine chart of a [`CurvePoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Chart {
    /// Coordinates `(z, w)`.
    Finite,
    /// Coordinates `(u, eta) = (1/z, w/z^2)`.
    Infinity,
}

impl Chart {
    pub fn other(self) -> Chart {
        match self {
            Chart::Finite => Chart::Infinity,
            Chart::Infinity => Chart::Finite,
        }
    }

    /// Right-hand side of the chart equation `y^3 = P(x)`.
    pub fn poly(self, x: Complex64) -> Complex64 {
        let x4 = x * x * x * x;
        match self {
            Chart::Finite => x * (x4 - 1.0),
            Chart::Infinity => x * (1.0 - x4),
        }
    }

    /// `P(x) / (x - b)` for a branch value `b`, evaluated as a product so that
    /// it stays accurate when `x` is very close to `b`.
    pub fn deflated(self, b: Complex64, x: Complex64) -> Complex64 {
        let lead = match self {
            Chart::Finite => 1.0,
            Chart::Infinity => -1.0,
        };
        let mut acc = Complex64::new(lead, 0.0);
        let mut skipped = false;
        for root in BRANCH_VALUES {
            if !skipped && (root - b).norm() < 1e-12 {
                skipped = true;
                continue;
            }
            acc *= x - root;
        }
        acc
    }
}

/// Returns the branch value equal to `x` (within `1e-13`), if any.
pub fn branch_value_at(x: Complex64) -> Option<Complex64> {
    BRANCH_VALUES
        .iter()
        .copied()
        .find(|b| (x - *b).norm() < 1e-13)
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(Complex64),
    Infinity,
}

impl Extended {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Extended::Finite(z) => Some(z),
            Extended::Infinity => None,
        }
    }

    /// Inverse stereographic projection onto the unit sphere, north pole at infinity.
    pub fn to_sphere(self) -> [f64; 3] {
        match self {
            Extended::Infinity => [0.0, 0.0, 1.0],
            Extended::Finite(g) => {
                let n2 = g.norm_sqr();
                let d = 1.0 + n2;
                [2.0 * g.re / d, 2.0 * g.im / d, (n2 - 1.0) / d]
            }
        }
    }

    /// Stereographic projection of a unit vector.
    pub fn from_sphere(v: [f64; 3]) -> Extended {
        let d = 1.0 - v[2];
        if d.abs() < 1e-15 {
            Extended::Infinity
        } else {
            Extended::Finite(Complex64::new(v[0] / d, v[1] / d))
        }
    }
}

/// A point `(z, w)` of the curve in one of the two affine charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub chart: Chart,
    /// `z` in the finite chart, `u = 1/z` in the infinity chart.
    pub x: Complex64,
    /// `w` in the finite chart, `eta = w u^2` in the infinity chart.
    pub y: Complex64,
}

impl CurvePoint {
    pub fn finite(z: Complex64, w: Complex64) -> Self {
        CurvePoint {
            chart: Chart::Finite,
            x: z,
            y: w,
        }
    }

    pub fn in_infinity_chart(u: Complex64, eta: Complex64) -> Self {
        CurvePoint {
            chart: Chart::Infinity,
            x: u,
            y: eta,
        }
    }

    /// The single point over `z = infinity`.
    pub fn infinity() -> Self {
        Self::in_infinity_chart(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn z(&self) -> Extended {
        match self.chart {
            Chart::Finite => Extended::Finite(self.x),
            Chart::Infinity if self.x.norm() == 0.0 => Extended::Infinity,
            Chart::Infinity => Extended::Finite(self.x.inv()),
        }
    }

    pub fn residual(&self) -> f64 {
        (self.y * self.y * self.y - self.chart.poly(self.x)).norm()
    }

    /// Checks `|y^3 - P(x)| <= eps (1 + |x|^5)`.
    pub fn is_on_curve(&self) -> bool {
        self.residual() <= CURVE_EPS * (1.0 + self.x.norm().powi(5))
    }

    pub fn is_branch_point(&self) -> bool {
        self.y.norm() == 0.0 || branch_value_at(self.x).is_some()
    }

    /// Re-expresses the point in `chart`; `None` if it lies on the chart's line at infinity.
    pub fn to_chart(&self, chart: Chart) -> Option<CurvePoint> {
        if chart == self.chart {
            return Some(*self);
        }
        if self.x.norm() == 0.0 {
            return None;
        }
        let x = self.x.inv();
        Some(CurvePoint {
            chart,
            x,
            y: self.y * x * x,
        })
    }

    /// Moves points with `|z| > 2` to the infinity chart and the rest to the finite chart.
    pub fn normalized(&self) -> CurvePoint {
        let want = match self.chart {
            Chart::Finite if self.x.norm() > CHART_SWITCH_RADIUS => Chart::Infinity,
            Chart::Infinity if self.x.norm() < 1.0 / CHART_SWITCH_RADIUS && self.x.norm() > 0.0 => {
                Chart::Infinity
            }
            Chart::Infinity if self.x.norm() >= 1.0 / CHART_SWITCH_RADIUS => Chart::Finite,
            c => c,
        };
        self.to_chart(want).unwrap_or(*self)
    }

    /// Distance between two points, measured in the chart of `self`.
    pub fn distance(&self, other: &CurvePoint) -> f64 {
        match other.to_chart(self.chart) {
            Some(o) => (self.x - o.x).norm() + (self.y - o.y).norm(),
            None => f64::INFINITY,
        }
    }
}

/// Lifts `z` to the curve on the given sheet: `(z, zeta3^sheet * w0)` with
/// `w0` the principal cube root of `z(z^4 - 1)`.
pub fn lift(z: Complex64, sheet: i64) -> Result<CurvePoint> {
    if let Some(b) = branch_value_at(z) {
        return Err(Error::BranchPointLift(b));
    }
    let w0 = principal_cbrt(Chart::Finite.poly(z));
    Ok(CurvePoint::finite(z, w0 * zeta3_pow(sheet)))
}

/// Deck transformation `(z, w) -> (z, zeta3^j w)`.
pub fn deck(p: &CurvePoint, j: i64) -> CurvePoint {
    CurvePoint {
        y: p.y * zeta3_pow(j),
        ..*p
    }
}

/// The order-12 automorphism `(z, w) -> (i z, e^{i pi/6} w)`.
pub fn tau(p: &CurvePoint) -> CurvePoint {
    match p.chart {
        Chart::Finite => CurvePoint::finite(
            Complex64::i() * p.x,
            Complex64::from_polar(1.0, PI / 6.0) * p.y,
        ),
        // u -> -i u, eta -> e^{7 pi i/6} eta
        Chart::Infinity => CurvePoint::in_infinity_chart(
            -Complex64::i() * p.x,
            Complex64::from_polar(1.0, 7.0 * PI / 6.0) * p.y,
        ),
    }
}

/// Applies `tau` `k` times.
pub fn tau_pow(p: &CurvePoint, k: usize) -> CurvePoint {
    (0..k % 12).fold(*p, |q, _| tau(&q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_point(rng: &mut ChaCha8Rng) -> CurvePoint {
        loop {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if let Ok(p) = lift(z, rng.gen_range(0..3)) {
                return p;
            }
        }
    }

    #[test]
    fn principal_root_convention() {
        let r = principal_cbrt(c(-8.0, 0.0));
        assert!((r - Complex64::from_polar(2.0, PI / 3.0)).norm() < 1e-14);
        let r = principal_cbrt(c(-8.0, -0.0));
        assert!((r - Complex64::from_polar(2.0, PI / 3.0)).norm() < 1e-14);
        assert!((principal_cbrt(c(27.0, 0.0)) - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn lift_at_two() {
        let p = lift(c(2.0, 0.0), 0).unwrap();
        assert!((p.y - c(30f64.cbrt(), 0.0)).norm() < 1e-14);
        assert!((p.y.re - 3.107_232_505_953_859).abs() < 1e-12);
        let q = lift(c(2.0, 0.0), 1).unwrap();
        assert!((q.y - ZETA3 * 30f64.cbrt()).norm() < 1e-14);
    }

    #[test]
    fn lift_at_minus_two_cubes() {
        for k in 0..3 {
            let p = lift(c(-2.0, 0.0), k).unwrap();
            assert!((p.y * p.y * p.y - c(-30.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn lift_rejects_branch_values() {
        for b in BRANCH_VALUES {
            assert_eq!(lift(b, 0), Err(Error::BranchPointLift(b)));
        }
    }

    #[test]
    fn deck_has_order_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = lift(c(2.0, 0.0), 0).unwrap();
        assert_eq!(deck(&p, 1), lift(c(2.0, 0.0), 1).unwrap());
        for _ in 0..50 {
            let p = random_point(&mut rng);
            let q = deck(&deck(&p, 1), 2);
            assert!(p.distance(&q) < 1e-14);
            assert!(p.distance(&deck(&p, 3)) < 1e-14);
        }
    }

    #[test]
    fn deck_fixes_branch_points_only() {
        for b in BRANCH_VALUES {
            let p = CurvePoint::finite(b, c(0.0, 0.0));
            assert_eq!(deck(&p, 1), p);
        }
        assert_eq!(deck(&CurvePoint::infinity(), 1), CurvePoint::infinity());
        let p = lift(c(0.3, 0.2), 0).unwrap();
        assert!(p.distance(&deck(&p, 1)) > 1e-3);
    }

    #[test]
    fn tau_preserves_curve_and_has_order_twelve() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            let q = tau(&p);
            assert!(q.residual() < 1e-10 * (1.0 + q.x.norm().powi(5)));
            assert!(p.distance(&tau_pow(&p, 12)) < 1e-12);
            assert!(p.distance(&tau_pow(&p, 6)) > 1e-6);
            let pi = p.to_chart(Chart::Infinity).unwrap();
            let qi = tau(&pi);
            assert!(qi.is_on_curve());
            assert!(q.distance(&qi) < 1e-10);
        }
    }

    #[test]
    fn tau_cubed_rotates_gauss_sphere() {
        let p = lift(c(0.7, 0.4), 0).unwrap();
        let q = tau_pow(&p, 3);
        assert!((q.x - (-Complex64::i()) * p.x).norm() < 1e-14);
    }

    #[test]
    fn deck_commutes_with_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_point(&mut rng);
            let a = deck(&tau(&p), 1);
            let b = tau(&deck(&p, 1));
            assert!(a.distance(&b) < 1e-12);
        }
    }

    #[test]
    fn fibers_have_three_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let z = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let fiber: Vec<_> = (0..3).map(|k| lift(z, k).unwrap()).collect();
            for i in 0..3 {
                assert!(fiber[i].is_on_curve());
                for j in 0..i {
                    assert!(fiber[i].distance(&fiber[j]) > 1e-9);
                }
            }
        }
    }

    #[test]
    fn chart_round_trip() {
        let p = lift(c(2.5, -1.0), 2).unwrap();
        let q = p.to_chart(Chart::Infinity).unwrap();
        assert!(q.is_on_curve());
        let r = q.to_chart(Chart::Finite).unwrap();
        assert!(p.distance(&r) < 1e-13);
        assert_eq!(p.normalized().chart, Chart::Infinity);
        assert!(CurvePoint::infinity().to_chart(Chart::Finite).is_none());
    }

    #[test]
    fn deflated_polynomial_matches() {
        for chart in [Chart::Finite, Chart::Infinity] {
            for b in BRANCH_VALUES {
                let x = b + c(0.013, -0.021);
                let direct = chart.poly(x) / (x - b);
                assert!((direct - chart.deflated(b, x)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn stereographic_round_trip() {
        let g = Extended::Finite(c(0.3, -1.7));
        let back = Extended::from_sphere(g.to_sphere()).finite().unwrap();
        assert!((back - c(0.3, -1.7)).norm() < 1e-13);
        assert_eq!(Extended::from_sphere([0.0, 0.0, 1.0]), Extended::Infinity);
    }
}
