//! Gauss map, holomorphic forms and the Weierstrass integrand of the
//! associate family.
//!
//! Every form is `h(z) dz / w^k` for a polynomial `h`. In the infinity chart
//! the same form reads `-h(1/u) u^{2k-2} du / eta^k`, which is again a
//! polynomial over a power of `eta` for all forms used here.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::curve::{lift, principal_cbrt, Chart, CurvePoint, Extended, CHART_SWITCH_RADIUS, ZETA3};
use crate::error::{Error, Result};

/// Bonnet angle of a member of the associate family, normalized to `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct BonnetAngle(f64);

impl BonnetAngle {
    pub fn new(theta: f64) -> Self {
        let t = theta.rem_euclid(TAU);
        BonnetAngle(if t >= TAU { 0.0 } else { t })
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn phase(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }

    pub fn shifted(self, delta: f64) -> Self {
        Self::new(self.0 + delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FormId {
    Omega1,
    Omega2,
    Omega3,
    Omega4,
    Dh,
    GDh,
    GInvDh,
}

impl FormId {
    pub const ALL: [FormId; 7] = [
        FormId::Omega1,
        FormId::Omega2,
        FormId::Omega3,
        FormId::Omega4,
        FormId::Dh,
        FormId::GDh,
        FormId::GInvDh,
    ];

    /// Numerator coefficients of `h` (ascending powers of `z`) and the power of `w`.
    pub fn shape(self) -> (&'static [f64], i32) {
        match self {
            FormId::Omega1 => (&[4.0], 2),
            FormId::Omega2 => (&[4.0], 1),
            FormId::Omega3 => (&[0.0, 4.0], 2),
            FormId::Omega4 => (&[0.0, 0.0, 4.0], 2),
            FormId::Dh => (&[0.0, 1.0], 2),
            FormId::GDh => (&[0.0, 0.0, 1.0], 2),
            FormId::GInvDh => (&[1.0], 2),
        }
    }

    /// Order of vanishing at the points over `z = 0` and `z = infinity`.
    pub fn orders_at_poles(self) -> (i32, i32) {
        let (h, k) = self.shape();
        let low = h.iter().position(|c| *c != 0.0).unwrap_or(0) as i32;
        let deg = (h.len() - 1) as i32;
        (3 * low - k + 2, -3 * deg + 5 * k - 4)
    }

    /// Zero orders summed over the fibers of `z = 0`, `z^4 = 1` and `z = infinity`.
    pub fn divisor_classes(self) -> [i32; 3] {
        let (h, k) = self.shape();
        let (at_zero, at_infinity) = self.orders_at_poles();
        // With `z - b = t^3` and `w ~ t`, a root of `h` of order `m` at `b` gives `3 m + 2 - k`.
        let mut middle = 0;
        let i = Complex64::i();
        for b in [Complex64::new(1.0, 0.0), i, Complex64::new(-1.0, 0.0), -i] {
            let mut coeffs: Vec<Complex64> = h.iter().map(|&c| Complex64::new(c, 0.0)).collect();
            let mut m = 0;
            while coeffs.len() > 1 {
                let value = coeffs
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |acc, c| acc * b + c);
                if value.norm() > 1e-12 {
                    break;
                }
                let mut quotient = vec![Complex64::new(0.0, 0.0); coeffs.len() - 1];
                let mut carry = Complex64::new(0.0, 0.0);
                for j in (1..coeffs.len()).rev() {
                    carry = carry * b + coeffs[j];
                    quotient[j - 1] = carry;
                }
                coeffs = quotient;
                m += 1;
            }
            middle += 3 * m + 2 - k;
        }
        [at_zero, middle, at_infinity]
    }
}

/// Stereographically projected Gauss map; equals the `z`-coordinate.
pub fn gauss_map(p: &CurvePoint) -> Extended {
    p.z()
}

/// All points of the curve with Gauss-map value `g`, counted without multiplicity.
/// Values within `1e-12` of a root of the chart polynomial count as ramified.
pub fn gauss_fiber(g: Extended) -> Vec<CurvePoint> {
    let (chart, x) = match g {
        Extended::Infinity => (Chart::Infinity, Complex64::new(0.0, 0.0)),
        Extended::Finite(z) if z.norm() > CHART_SWITCH_RADIUS => (Chart::Infinity, z.inv()),
        Extended::Finite(z) => (Chart::Finite, z),
    };
    let c = chart.poly(x);
    if c.norm() < 1e-12 {
        return vec![CurvePoint {
            chart,
            x,
            y: Complex64::new(0.0, 0.0),
        }];
    }
    let r = principal_cbrt(c);
    let mut out: Vec<CurvePoint> = Vec::with_capacity(3);
    for k in 0..3 {
        let p = CurvePoint {
            chart,
            x,
            y: r * ZETA3.powi(k),
        };
        if out
            .iter()
            .all(|q| (q.y - p.y).norm() > 1e-12 * (1.0 + r.norm()))
        {
            out.push(p);
        }
    }
    out
}

/// Values where the fiber of `G = z` collapses: the zeros of `z^5 - z`, from
/// the companion matrix, together with infinity since 5 is prime to 3.
pub fn gauss_branch_values() -> Vec<Extended> {
    let coeffs = [0.0, -1.0, 0.0, 0.0, 0.0];
    let companion = nalgebra::Matrix5::from_fn(|i, j| {
        if j == 4 {
            -coeffs[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut out: Vec<Extended> = companion
        .complex_eigenvalues()
        .iter()
        .map(|e| Extended::Finite(Complex64::new(e.re, e.im)))
        .collect();
    out.push(Extended::Infinity);
    out
}

fn powi(x: Complex64, k: i32) -> Complex64 {
    x.powi(k)
}

/// Coefficient of `id` against `dx` in the chart of `p`.
pub fn eval_form(id: FormId, p: &CurvePoint) -> Result<Complex64> {
    if p.y.norm() == 0.0 {
        return Err(Error::ChartSingularity);
    }
    let (h, k) = id.shape();
    let num = match p.chart {
        Chart::Finite => h
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * p.x + c),
        Chart::Infinity => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in h.iter().enumerate() {
                if *c != 0.0 {
                    acc -= *c * powi(p.x, 2 * k - 2 - j as i32);
                }
            }
            acc
        }
    };
    Ok(num / powi(p.y, k))
}

/// `e^{i theta} (1/G - G, i (G + 1/G), 2) dh` as `dx`-coefficients.
pub fn associate_integrand(
    theta: BonnetAngle,
) -> impl Fn(&CurvePoint) -> Result<[Complex64; 3]> + Copy {
    let phase = theta.phase();
    move |p: &CurvePoint| {
        let v = base_integrand(p)?;
        Ok([v[0] * phase, v[1] * phase, v[2] * phase])
    }
}

/// The `theta = 0` integrand, written as `((1 - z^2), i (1 + z^2), 2 z) dz / w^2`
/// so that it stays finite over `z = infinity`.
pub fn base_integrand(p: &CurvePoint) -> Result<[Complex64; 3]> {
    let g_inv = eval_form(FormId::GInvDh, p)?;
    let g = eval_form(FormId::GDh, p)?;
    let dh = eval_form(FormId::Dh, p)?;
    Ok([g_inv - g, Complex64::i() * (g + g_inv), 2.0 * dh])
}

/// Unit normal for the Gauss-map value, matching the orientation of the
/// positions produced by [`associate_integrand`].
pub fn surface_normal(g: Extended) -> [f64; 3] {
    g.to_sphere()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationReport {
    pub samples: usize,
    /// Max of `|w3^2 - w1 w4| / (|w3|^2 + |w1 w4|)`.
    pub quadric: f64,
    /// Max of `|w2^3 - w3 (w4^2 - w1^2)| / (|w2|^3 + |w3| (|w4|^2 + |w1|^2))`.
    pub cubic: f64,
}

impl RelationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.quadric < tol && self.cubic < tol
    }
}

/// Relative residuals of the two polynomial relations at a point.
pub fn relation_residuals(p: &CurvePoint) -> Result<(f64, f64)> {
    let w1 = eval_form(FormId::Omega1, p)?;
    let w2 = eval_form(FormId::Omega2, p)?;
    let w3 = eval_form(FormId::Omega3, p)?;
    let w4 = eval_form(FormId::Omega4, p)?;
    let q = (w3 * w3 - w1 * w4).norm() / (w3.norm_sqr() + (w1 * w4).norm());
    let c = (w2 * w2 * w2 - w3 * (w4 * w4 - w1 * w1)).norm()
        / (w2.norm().powi(3) + w3.norm() * (w4.norm_sqr() + w1.norm_sqr()));
    Ok((q, c))
}

/// Evaluates both relations at `samples` random points with `|z| < 3`,
/// using the infinity chart for every other point.
pub fn check_relations(samples: usize, seed: u64) -> Result<RelationReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RelationReport {
        samples,
        quadric: 0.0,
        cubic: 0.0,
    };
    let mut taken = 0;
    while taken < samples {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let Ok(p) = lift(z, rng.gen_range(0..3)) else {
            continue;
        };
        let p = if taken % 2 == 1 {
            p.to_chart(Chart::Infinity).unwrap_or(p)
        } else {
            p
        };
        let (q, c) = relation_residuals(&p)?;
        report.quadric = report.quadric.max(q);
        report.cubic = report.cubic.max(c);
        taken += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{deck, principal_cbrt, tau};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_points(n: usize, seed: u64) -> Vec<CurvePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < n {
            let z = c(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
            if let Ok(p) = lift(z, rng.gen_range(0..3)) {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn gauss_map_is_sheet_independent() {
        for k in 0..3 {
            assert_eq!(
                gauss_map(&lift(c(2.0, 0.0), k).unwrap()),
                Extended::Finite(c(2.0, 0.0))
            );
        }
        assert_eq!(gauss_map(&CurvePoint::infinity()), Extended::Infinity);
    }

    #[test]
    fn relations_hold() {
        let r = check_relations(100, 7).unwrap();
        assert!(r.passes(1e-12), "{r:?}");
        let far = lift(c(10.0, 0.0), 0)
            .unwrap()
            .to_chart(Chart::Infinity)
            .unwrap();
        let (q, cu) = relation_residuals(&far).unwrap();
        assert!(q < 1e-10 && cu < 1e-10);
        assert!(check_relations(0, 0).is_err());
    }

    #[test]
    fn forms_are_chart_consistent() {
        for p in random_points(50, 3) {
            let q = p.to_chart(Chart::Infinity).unwrap();
            // dz = -du / u^2
            let dz_du = -1.0 / (q.x * q.x);
            for id in FormId::ALL {
                let a = eval_form(id, &p).unwrap() * dz_du;
                let b = eval_form(id, &q).unwrap();
                assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{id:?}");
            }
        }
    }

    #[test]
    fn dh_is_a_multiple_of_omega3_and_g_relations() {
        for p in random_points(50, 4) {
            let dh = eval_form(FormId::Dh, &p).unwrap();
            let z = p.x;
            assert!(
                (eval_form(FormId::Omega3, &p).unwrap() - 4.0 * dh).norm()
                    < 1e-12 * dh.norm().max(1.0)
            );
            assert!(
                (eval_form(FormId::GDh, &p).unwrap() - z * dh).norm()
                    < 1e-12 * (z * dh).norm().max(1.0)
            );
            assert!(
                (eval_form(FormId::GInvDh, &p).unwrap() - dh / z).norm()
                    < 1e-12 * (dh / z).norm().max(1.0)
            );
            let ratio =
                eval_form(FormId::Omega4, &p).unwrap() / eval_form(FormId::Omega1, &p).unwrap();
            assert!((ratio.norm() - z.norm_sqr()).abs() < 1e-12 * z.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn deck_and_tau_pullbacks() {
        let rot = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        for p in random_points(100, 5) {
            let dh = eval_form(FormId::Dh, &p).unwrap();
            let d = eval_form(FormId::Dh, &deck(&p, 1)).unwrap();
            assert!((d - rot * dh).norm() < 1e-12 * dh.norm().max(1.0));
            assert_eq!(gauss_map(&deck(&p, 1)), gauss_map(&p));
            let q = tau(&p);
            assert!((q.x - Complex64::i() * p.x).norm() < 1e-14);
            // tau multiplies z by i, so the pullback picks up d(iz)/dz = i.
            let pulled = eval_form(FormId::Dh, &q).unwrap() * Complex64::i();
            assert!((pulled - rot * dh).norm() < 1e-12 * dh.norm().max(1.0));
        }
    }

    #[test]
    fn tau_pullback_by_finite_differences() {
        // Integrate dh along a short chord and along its tau-image.
        let h = 1e-4;
        for p in random_points(20, 6) {
            let a = eval_form(FormId::Dh, &p).unwrap();
            let zb = p.x + h;
            let w = p.y;
            let wb = [0, 1, 2]
                .map(|k| principal_cbrt(Chart::Finite.poly(zb)) * crate::curve::zeta3_pow(k))
                .into_iter()
                .min_by(|x, y| (x - w).norm().total_cmp(&(y - w).norm()))
                .unwrap();
            let q = CurvePoint::finite(zb, wb);
            let direct = 0.5 * (a + eval_form(FormId::Dh, &q).unwrap()) * h;
            let (tp, tq) = (tau(&p), tau(&q));
            let image = 0.5
                * (eval_form(FormId::Dh, &tp).unwrap() + eval_form(FormId::Dh, &tq).unwrap())
                * (tq.x - tp.x);
            let rot = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
            assert!((image - rot * direct).norm() < 1e-6 * direct.norm().max(1e-3));
        }
    }

    #[test]
    fn associate_integrand_basic_identities() {
        let p = lift(Complex64::from_polar(1.0, 0.7), 1).unwrap();
        let v0 = associate_integrand(BonnetAngle::new(0.0))(&p).unwrap();
        let vpi = associate_integrand(BonnetAngle::new(PI))(&p).unwrap();
        for i in 0..3 {
            assert!((v0[i] + vpi[i]).norm() < 1e-13);
        }
        let z = p.x;
        assert!(((1.0 / z.conj() - z.conj()).norm() - (1.0 / z - z).norm()).abs() < 1e-13);
        // The integrand is an isotropic vector.
        let q: Complex64 = v0.iter().map(|c| c * c).sum();
        assert!(q.norm() < 1e-12 * v0.iter().map(|c| c.norm_sqr()).sum::<f64>());
    }

    #[test]
    fn matches_x_coordinate_formulas() {
        // x = z^4, G = x^{1/4}, dh = x^{-2/3} (x - 1)^{-2/3} dx; all roots real and positive at z = 2.
        let z = 2.0f64;
        let x = z.powi(4);
        let g = x.powf(0.25);
        let dh_dz = x.powf(-2.0 / 3.0) * (x - 1.0).powf(-2.0 / 3.0) * 4.0 * z.powi(3);
        let oracle = [(1.0 / g - g) * dh_dz, (g + 1.0 / g) * dh_dz, 2.0 * dh_dz];
        let v = associate_integrand(BonnetAngle::new(0.0))(&lift(c(z, 0.0), 0).unwrap()).unwrap();
        // The integrand uses the bare z/w^2, which is a quarter of the x-formula.
        assert!((4.0 * v[0] - c(oracle[0], 0.0)).norm() < 1e-12);
        assert!((4.0 * v[1] - c(0.0, oracle[1])).norm() < 1e-12);
        assert!((4.0 * v[2] - c(oracle[2], 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dh_real_on_negative_axis_on_real_sheet() {
        for x in [-0.2, -0.5, -1.7, -4.0] {
            let sheet = (0..3)
                .find(|k| lift(c(x, 0.0), *k).unwrap().y.im.abs() < 1e-12)
                .unwrap();
            let dh = eval_form(FormId::Dh, &lift(c(x, 0.0), sheet).unwrap()).unwrap();
            assert!(dh.im.abs() < 1e-12 * dh.norm());
        }
    }

    #[test]
    fn divisor_orders() {
        assert_eq!(FormId::Omega1.orders_at_poles(), (0, 6));
        assert_eq!(FormId::Omega4.orders_at_poles(), (6, 0));
        assert_eq!(FormId::Omega3.orders_at_poles(), (3, 3));
        assert_eq!(FormId::Omega2.orders_at_poles(), (1, 1));
        for id in [
            FormId::Omega1,
            FormId::Omega2,
            FormId::Omega3,
            FormId::Omega4,
        ] {
            let (a, b) = id.orders_at_poles();
            assert!(a >= 0 && b >= 0);
        }
    }

    #[test]
    fn divisors_of_the_basis_have_degree_six() {
        assert_eq!(FormId::Omega1.divisor_classes(), [0, 0, 6]);
        assert_eq!(FormId::Omega2.divisor_classes(), [1, 4, 1]);
        assert_eq!(FormId::Omega3.divisor_classes(), [3, 0, 3]);
        assert_eq!(FormId::Omega4.divisor_classes(), [6, 0, 0]);
    }

    #[test]
    fn gauss_fibers() {
        assert_eq!(gauss_fiber(Extended::Finite(c(0.3, -1.7))).len(), 3);
        assert_eq!(gauss_fiber(Extended::Finite(c(4.0, 2.0))).len(), 3);
        for b in gauss_branch_values() {
            assert_eq!(gauss_fiber(b).len(), 1, "{b:?}");
        }
        for p in gauss_fiber(Extended::Finite(c(-0.4, 0.9))) {
            assert!(p.is_on_curve());
        }
    }

    #[test]
    fn branch_values_sit_on_an_octahedron() {
        let mut v: Vec<[i64; 3]> = gauss_branch_values()
            .into_iter()
            .map(|b| b.to_sphere().map(|x| (x * 1e9).round() as i64))
            .collect();
        v.sort();
        let g = 1_000_000_000;
        let mut want = vec![
            [-g, 0, 0],
            [g, 0, 0],
            [0, -g, 0],
            [0, g, 0],
            [0, 0, -g],
            [0, 0, g],
        ];
        want.sort();
        assert_eq!(v, want);
    }

    #[test]
    fn singular_at_ramification_in_chart() {
        let p = CurvePoint::finite(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(eval_form(FormId::Omega1, &p), Err(Error::ChartSingularity));
    }

    #[test]
    fn bonnet_angle_normalizes() {
        assert!((BonnetAngle::new(-PI / 2.0).radians() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(BonnetAngle::new(TAU).radians(), 0.0);
        assert!((BonnetAngle::from_degrees(90.0).radians() - PI / 2.0).abs() < 1e-15);
    }
}
