use iwp::curve::{continue_path, lift, CurvePoint, SheetPath};
use iwp::quadrature::{integrate, integrate_vec, IntegrationOptions};
use iwp::weierstrass::{eval_form, FormId};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn omega(id: FormId) -> impl Fn(&CurvePoint) -> iwp::Result<Complex64> {
    move |p: &CurvePoint| eval_form(id, p)
}

/// A path in the upper half plane from `0.3 + 0.4i` to a far point and on to `end`.
fn path(via: Complex64, end: Complex64) -> SheetPath {
    SheetPath::polyline(lift(c(0.3, 0.4), 0).unwrap(), &[via, end])
}

fn opts() -> IntegrationOptions {
    IntegrationOptions::default()
}

/// `int_{stop}^{b} 4 dz / w^2` by `z = b + (stop - b) s^3` and composite
/// 5-point Gauss-Legendre. Near `b` the branch of `w` follows `w ~ w_stop s`.
fn tail_by_gauss(b: Complex64, stop: Complex64, w_stop: Complex64) -> Complex64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683,
        0.538_469_310_105_683,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_889,
        0.478_628_670_499_366,
        0.478_628_670_499_366,
        0.236_926_885_056_189,
        0.236_926_885_056_189,
    ];
    let pieces = 64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..pieces {
        let (lo, hi) = (k as f64 / pieces as f64, (k + 1) as f64 / pieces as f64);
        for (x, w) in X.iter().zip(W) {
            let s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
            let z = b + (stop - b) * s.powi(3);
            let r = (z.powu(5) - z).cbrt();
            let guess = w_stop * s;
            let root = (0..3)
                .map(|j| {
                    r * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 3.0)
                })
                .min_by(|a, c| (*a - guess).norm().total_cmp(&(*c - guess).norm()))
                .unwrap();
            sum += 0.5 * (hi - lo) * w * 3.0 * s * s * (stop - b) / (root * root);
        }
    }
    -4.0 * sum
}

#[test]
fn endpoint_substitution_matches_an_independent_tail() {
    let a = c(0.4, 0.5);
    let start = lift(a, 2).unwrap();
    let b = c(0.0, 1.0);
    let full = integrate(
        &omega(FormId::Omega1),
        &SheetPath::polyline(start, &[b]),
        &opts(),
    )
    .unwrap();
    let stop = b + (a - b) * (0.01 / (a - b).norm());
    let short = SheetPath::polyline(start, &[stop]);
    let near = integrate(&omega(FormId::Omega1), &short, &opts()).unwrap();
    let tail = tail_by_gauss(b, stop, continue_path(&short).unwrap().y);
    assert!(
        (near + tail - full).norm() < 1e-6 * full.norm().max(1.0),
        "{} vs {}",
        near + tail,
        full
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_in_the_form(a in (-3.0..3.0f64, -3.0..3.0f64), b in (-3.0..3.0f64, -3.0..3.0f64), x in 0.5..2.0f64) {
        let (a, b) = (c(a.0, a.1), c(b.0, b.1));
        let p = path(c(x, 1.5), c(-x, 0.8));
        let f = integrate(&omega(FormId::Omega2), &p, &opts()).unwrap();
        let g = integrate(&omega(FormId::Omega3), &p, &opts()).unwrap();
        let combined = move |q: &CurvePoint| Ok(a * eval_form(FormId::Omega2, q)? + b * eval_form(FormId::Omega3, q)?);
        let h = integrate(&combined, &p, &opts()).unwrap();
        prop_assert!((h - (a * f + b * g)).norm() < 1e-9 * (1.0 + h.norm()));
    }

    #[test]
    fn reversal_negates(x in 0.5..2.5f64, y in 0.3..2.0f64) {
        let p = path(c(x, y), c(-0.6, 0.3));
        let id = FormId::Omega4;
        let forward = integrate(&omega(id), &p, &opts()).unwrap();
        let backward = integrate(&omega(id), &p.reversed().unwrap(), &opts()).unwrap();
        prop_assert!((forward + backward).norm() < 1e-9 * (1.0 + forward.norm()));
    }

    #[test]
    fn concatenation_adds(x in 0.5..2.5f64, y in 0.3..2.0f64, s in 0.1..0.9f64) {
        let start = lift(c(0.3, 0.4), 1).unwrap();
        let (m, e) = (c(x, y), c(-0.7, 1.2));
        let split = m + (e - m) * s;
        let first = SheetPath::polyline(start, &[m, split]);
        let second = SheetPath::polyline(continue_path(&first).unwrap(), &[e]);
        let whole = SheetPath::polyline(start, &[m, split, e]);
        let form = |q: &CurvePoint| Ok([eval_form(FormId::Omega1, q)?, eval_form(FormId::Omega2, q)?]);
        let a = integrate_vec(form, &first, &opts()).unwrap();
        let b = integrate_vec(form, &second, &opts()).unwrap();
        let t = integrate_vec(form, &whole, &opts()).unwrap();
        for k in 0..2 {
            prop_assert!((a[k] + b[k] - t[k]).norm() < 1e-9 * (1.0 + t[k].norm()));
        }
    }
}
