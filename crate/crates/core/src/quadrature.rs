//! Adaptive Gauss–Kronrod integration of 1-forms along [`SheetPath`]s.
//!
//! A form is anything that returns its `dx`-coefficient at a curve point, in
//! the chart the point is expressed in. Segments that end on a branch value
//! are reparametrized by the cube-root substitution built into the path
//! pieces, which turns the `|x - b|^{-2/3}` endpoint singularities of the
//! holomorphic forms into smooth integrands. Gauss–Kronrod nodes never touch
//! the interval ends, so the form is never evaluated at the branch point
//! itself.

use num_complex::Complex64;

use crate::curve::{CurvePoint, Piece, SheetPath, Track};
use crate::error::{Error, Result};

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_depth: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_depth: 40,
        }
    }
}

impl IntegrationOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidArgument(
                "rtol and atol must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A holomorphic 1-form given by its coefficient against `dx` in the chart of the point.
pub trait FormEvaluator {
    fn coefficient(&self, p: &CurvePoint) -> Result<Complex64>;
}

impl<F> FormEvaluator for F
where
    F: Fn(&CurvePoint) -> Result<Complex64>,
{
    fn coefficient(&self, p: &CurvePoint) -> Result<Complex64> {
        self(p)
    }
}

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) with weights,
// and the embedded 7-point Gauss weights for the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<([Complex64; N], f64)>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let zero = Complex64::new(0.0, 0.0);
    let mut k = [zero; N];
    let mut g = [zero; N];
    let fc = f(c)?;
    for i in 0..N {
        k[i] = fc[i] * WGK[7];
        g[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..N {
        k[i] *= h;
        g[i] *= h;
        err = err.max((k[i] - g[i]).norm());
    }
    Ok((k, err))
}

/// Globally adaptive Gauss–Kronrod integration of a vector-valued function on `[a, b]`.
///
/// Returns the integral and the summed error estimate.
pub fn adaptive<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &IntegrationOptions,
) -> Result<([Complex64; N], f64)>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    struct Interval<const N: usize> {
        a: f64,
        b: f64,
        depth: usize,
        value: [Complex64; N],
        err: f64,
    }
    let (value, err) = gk15(&mut f, a, b)?;
    let mut intervals = vec![Interval {
        a,
        b,
        depth: 0,
        value,
        err,
    }];
    loop {
        let mut total = [Complex64::new(0.0, 0.0); N];
        let mut total_err = 0.0;
        for iv in &intervals {
            for i in 0..N {
                total[i] += iv.value[i];
            }
            total_err += iv.err;
        }
        let scale = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let noise = 50.0
            * f64::EPSILON
            * intervals
                .iter()
                .map(|iv| iv.value.iter().map(|v| v.norm()).fold(0.0, f64::max))
                .sum::<f64>();
        if total_err <= opts.atol.max(opts.rtol * scale) || total_err <= noise {
            return Ok((total, total_err));
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::Nonconvergence(opts.max_depth));
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("non-empty");
        let iv = intervals.swap_remove(worst);
        if iv.depth >= opts.max_depth {
            return Err(Error::Nonconvergence(opts.max_depth));
        }
        let m = 0.5 * (iv.a + iv.b);
        let (v1, e1) = gk15(&mut f, iv.a, m)?;
        let (v2, e2) = gk15(&mut f, m, iv.b)?;
        intervals.push(Interval {
            a: iv.a,
            b: m,
            depth: iv.depth + 1,
            value: v1,
            err: e1,
        });
        intervals.push(Interval {
            a: m,
            b: iv.b,
            depth: iv.depth + 1,
            value: v2,
            err: e2,
        });
    }
}

fn piece_integrand<'a, const N: usize, F>(
    piece: &'a Piece,
    track: &'a Track,
    form: &'a F,
) -> impl FnMut(f64) -> Result<[Complex64; N]> + 'a
where
    F: Fn(&CurvePoint) -> Result<[Complex64; N]>,
{
    move |s| {
        let p = CurvePoint {
            chart: piece.chart,
            x: piece.x(s),
            y: track.y(piece, s),
        };
        let dx = piece.dx(s);
        let mut v = form(&p)?;
        for c in v.iter_mut() {
            *c *= dx;
        }
        Ok(v)
    }
}

/// Integrates several forms at once along `path`. The closure returns all
/// `dx`-coefficients at a point.
pub fn integrate_vec<const N: usize, F>(
    form: F,
    path: &SheetPath,
    opts: &IntegrationOptions,
) -> Result<[Complex64; N]>
where
    F: Fn(&CurvePoint) -> Result<[Complex64; N]>,
{
    opts.validate()?;
    let mut total = [Complex64::new(0.0, 0.0); N];
    for (piece, track) in path.tracks()? {
        let (v, _) = adaptive(piece_integrand(&piece, &track, &form), 0.0, 1.0, opts)?;
        for i in 0..N {
            total[i] += v[i];
        }
    }
    Ok(total)
}

/// Contour integral of `form` along `path`.
pub fn integrate<F: FormEvaluator + ?Sized>(
    form: &F,
    path: &SheetPath,
    opts: &IntegrationOptions,
) -> Result<Complex64> {
    integrate_vec(|p| Ok([form.coefficient(p)?]), path, opts).map(|v| v[0])
}
