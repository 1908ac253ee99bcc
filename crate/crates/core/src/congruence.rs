//! Rigid registration with known correspondences, and the associate-family
//! congruences that follow from the deck transformation.

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curve::{continue_path, deck, lift, CurvePoint, SheetPath, BRANCH_VALUES};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, IntegrationOptions};
use crate::surface_mesh::{dodecagon_potentials, Patch};
use crate::weierstrass::{associate_integrand, BonnetAngle};

/// A rigid motion `x -> r x + t`, possibly improper, together with the residual
/// it achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidMotion {
    pub r: Matrix3<f64>,
    pub t: Vector3<f64>,
    pub rmsd: f64,
}

impl RigidMotion {
    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.r * p + self.t
    }

    pub fn is_proper(&self) -> bool {
        self.r.determinant() > 0.0
    }
}

fn centroid(points: &[Vector3<f64>]) -> Vector3<f64> {
    points.iter().sum::<Vector3<f64>>() / points.len() as f64
}

fn numerical_rank(m: &Matrix3<f64>, scale: f64) -> usize {
    m.singular_values()
        .iter()
        .filter(|s| **s > 1e-12 * scale)
        .count()
}

/// Least-squares alignment of `a` onto `b` over all of `O(3) x R^3`.
pub fn align(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> Result<RigidMotion> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "point sets differ in size: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 3 {
        return Err(Error::DegenerateConfiguration(0));
    }
    let (ca, cb) = (centroid(a), centroid(b));
    let mut cov_a = Matrix3::zeros();
    let mut cross = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        let (p, q) = (p - ca, q - cb);
        cov_a += p * p.transpose();
        cross += q * p.transpose();
    }
    let rank = numerical_rank(&cov_a, cov_a.norm().max(f64::MIN_POSITIVE));
    if rank < 2 {
        return Err(Error::DegenerateConfiguration(rank));
    }
    // Without the determinant constraint the optimum is the orthogonal polar factor.
    let svd = cross.svd(true, true);
    let r = svd.u.expect("u requested") * svd.v_t.expect("v_t requested");
    let t = cb - r * ca;
    let sq: f64 = a
        .iter()
        .zip(b)
        .map(|(p, q)| (r * p + t - q).norm_squared())
        .sum();
    Ok(RigidMotion {
        r,
        t,
        rmsd: (sq / a.len() as f64).sqrt(),
    })
}

pub fn diameter(points: &[Vector3<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftReport {
    pub theta_deg: f64,
    pub samples: usize,
    pub max_deviation: f64,
    pub diameter: f64,
    pub pass: bool,
}

impl ShiftReport {
    pub fn relative(&self) -> f64 {
        self.max_deviation / self.diameter
    }
}

const SHIFT_TOL: f64 = 1e-6;
const MIN_SAMPLES: usize = 10;

/// A closed loop in `z` from `p` to `deck(p, 1)`.
fn deck_loop(p: &CurvePoint) -> Result<SheetPath> {
    let once = SheetPath::circle(*p, Complex64::new(0.0, 0.0));
    let end = continue_path(&once)?;
    let shift = (0..3)
        .find(|&j| end.distance(&deck(p, j)) < 1e-8 * (1.0 + p.y.norm()))
        .ok_or_else(|| {
            Error::InvalidArgument("loop around 0 does not close on the fiber".into())
        })?;
    match shift {
        1 => Ok(once),
        2 => Ok(once.clone().then(&once)),
        _ => Err(Error::InvalidArgument(
            "loop around 0 has trivial monodromy from this base point".into(),
        )),
    }
}

fn real_part(phase: Complex64, v: [Complex64; 3]) -> Vector3<f64> {
    Vector3::new((phase * v[0]).re, (phase * v[1]).re, (phase * v[2]).re)
}

/// Checks that `f_theta(deck(p, 1)) - f_{theta + 120}(p)` is constant over the
/// endpoints of `samples`, which must all start at the same point.
///
/// `f_theta(deck p)` is integrated along a loop to `deck(p0, 1)` followed by the
/// sample path continued from there.
pub fn verify_shift_120(
    theta: BonnetAngle,
    samples: &[SheetPath],
    opts: &IntegrationOptions,
) -> Result<ShiftReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let p0 = samples[0].start;
    if samples.iter().any(|s| s.start.distance(&p0) > 1e-12) {
        return Err(Error::InvalidArgument(
            "samples do not share a base point".into(),
        ));
    }
    let lp = deck_loop(&p0)?;
    let base = associate_integrand(BonnetAngle::new(0.0));
    let (now, later) = (
        theta.phase(),
        theta.shifted(2.0 * std::f64::consts::PI / 3.0).phase(),
    );
    let mut diffs = Vec::with_capacity(samples.len());
    let mut cloud = Vec::with_capacity(samples.len());
    for s in samples {
        let shifted = SheetPath::from_segments(p0, lp.segments.clone()).then(s);
        let moved = integrate_vec(base, &shifted, opts)?;
        let here = integrate_vec(base, s, opts)?;
        let f_here = real_part(later, here);
        diffs.push(real_part(now, moved) - f_here);
        cloud.push(f_here);
    }
    let mean = centroid(&diffs);
    let max_deviation = diffs.iter().map(|d| (d - mean).norm()).fold(0.0, f64::max);
    let diameter = diameter(&cloud);
    Ok(ShiftReport {
        theta_deg: theta.degrees(),
        samples: samples.len(),
        max_deviation,
        diameter,
        pass: max_deviation < SHIFT_TOL * diameter,
    })
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let s = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (a + s * d - p).norm()
}

/// Random polylines from the common base point `lift(1/2, 0)`, each with one to
/// three legs keeping `clearance` away from every branch value.
pub fn sample_paths(count: usize, seed: u64, clearance: f64) -> Result<Vec<SheetPath>> {
    let z0 = Complex64::new(0.5, 0.0);
    let p0 = lift(z0, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let legs = rng.gen_range(1..=3);
        let mut pts = vec![z0];
        for _ in 0..legs {
            pts.push(Complex64::from_polar(
                rng.gen_range(0.2..1.8),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ));
        }
        let clear = pts.windows(2).all(|w| {
            BRANCH_VALUES
                .iter()
                .all(|b| segment_distance(w[0], w[1], *b) > clearance)
        });
        if clear {
            out.push(SheetPath::polyline(p0, &pts[1..]));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    #[serde(rename = "IWP")]
    Iwp,
    Stessmann,
}

impl Target {
    pub fn reference(self) -> BonnetAngle {
        match self {
            Target::Iwp => BonnetAngle::from_degrees(0.0),
            Target::Stessmann => BonnetAngle::from_degrees(90.0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceCase {
    pub theta_deg: f64,
    pub target: Target,
    /// Sheet shift applied to the reference side of the correspondence.
    pub deck_power: i64,
    /// The sign the rotation part should carry, `+1` or `-1`.
    pub sign: i32,
    pub rmsd_rel: f64,
    /// `|R - sign I|`.
    pub rotation_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictTable {
    pub n: usize,
    pub cases: Vec<CongruenceCase>,
    /// `theta = 45` against `theta = 0` with identity correspondence.
    pub control_rmsd_rel: f64,
    pub control_pass: bool,
}

impl VerdictTable {
    pub fn all_pass(&self) -> bool {
        self.control_pass && self.cases.iter().all(|c| c.pass)
    }
}

const CONGRUENCE_TOL: f64 = 1e-6;
const CONTROL_MIN: f64 = 1e-2;

fn deck_table(patch: &Patch) -> Result<Vec<usize>> {
    let key = |v: usize| {
        let p = &patch.params[v];
        (
            p.disk,
            (p.t.re * 1e9).round() as i64,
            (p.t.im * 1e9).round() as i64,
        )
    };
    let index: HashMap<_, _> = (0..patch.params.len()).map(|v| (key(v), v)).collect();
    (0..patch.params.len())
        .map(|v| {
            let q = patch.params[v].deck(1);
            let k = (
                q.disk,
                (q.t.re * 1e9).round() as i64,
                (q.t.im * 1e9).round() as i64,
            );
            index.get(&k).copied().ok_or_else(|| {
                Error::InvalidArgument("patch is not invariant under the deck rotation".into())
            })
        })
        .collect()
}

fn cloud(patch: &Patch, theta: BonnetAngle) -> Vec<Vector3<f64>> {
    patch
        .positions(theta)
        .into_iter()
        .map(Vector3::from)
        .collect()
}

/// `f_{ref + 60 m}(p) = (-1)^m f_ref(deck^{2m}(p)) + const`.
fn correspondence(m: i64) -> (i64, i32) {
    let m = m.rem_euclid(6);
    ((2 * m) % 3, if m % 2 == 0 { 1 } else { -1 })
}

/// Compares the associate surfaces at `60 k` with I-WP and at `30 + 60 k` with the
/// conjugate surface, `k = 0..5`, on the dodecagon patch of resolution `n`.
pub fn verify_main_theorem(n: usize, opts: &IntegrationOptions) -> Result<VerdictTable> {
    let patch = dodecagon_potentials(n, opts)?;
    let shift = deck_table(&patch)?;
    let mut cases = Vec::new();
    for target in [Target::Iwp, Target::Stessmann] {
        let reference = target.reference();
        let base = cloud(&patch, reference);
        for k in 0..6 {
            let m = k as i64;
            let theta = reference.shifted((60.0 * k as f64).to_radians());
            let (j, sign) = correspondence(m);
            let a: Vec<_> = (0..base.len())
                .map(|v| {
                    let mut w = v;
                    for _ in 0..j {
                        w = shift[w];
                    }
                    base[w]
                })
                .collect();
            let b = cloud(&patch, theta);
            let motion = align(&a, &b)?;
            let rmsd_rel = motion.rmsd / diameter(&b);
            let rotation_error = (motion.r - Matrix3::identity() * sign as f64).norm();
            cases.push(CongruenceCase {
                theta_deg: theta.degrees().rem_euclid(360.0),
                target,
                deck_power: j,
                sign,
                rmsd_rel,
                rotation_error,
                pass: rmsd_rel < CONGRUENCE_TOL,
            });
        }
    }
    let b = cloud(&patch, BonnetAngle::from_degrees(45.0));
    let control = align(&cloud(&patch, BonnetAngle::from_degrees(0.0)), &b)?;
    let control_rmsd_rel = control.rmsd / diameter(&b);
    Ok(VerdictTable {
        n: patch.n,
        cases,
        control_rmsd_rel,
        control_pass: control_rmsd_rel > CONTROL_MIN,
    })
}
