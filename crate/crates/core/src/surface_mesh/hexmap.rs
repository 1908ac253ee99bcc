//! Conformal map from a regular hexagon onto the unit disk.
//!
//! The Schwarz-Christoffel map `f(t) = int_0^t (1 - s^6)^{-1/3} ds` sends the
//! unit disk onto a regular hexagon with corners `f(1) e^{i k pi/3}`. A
//! triangular lattice on the hexagon pulled back through `f` gives a disk mesh
//! whose stars stay balanced across the sector rays.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::curve::principal_cbrt;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, IntegrationOptions};

const RK_STEPS: usize = 64;
const NEWTON_STEPS: usize = 8;
/// Radii of the graded regions, relative to the edge length.
const MIDPOINT_REACH: f64 = 0.35;
const CORNER_REACH: f64 = 0.15;

fn real(x: f64) -> [Complex64; 1] {
    [Complex64::new(x, 0.0)]
}

pub(crate) struct HexagonMap {
    /// Circumradius of the image hexagon, `f(1)`.
    pub radius: f64,
    opts: IntegrationOptions,
}

impl HexagonMap {
    pub fn new(opts: &IntegrationOptions) -> Result<Self> {
        // s = 1 - v^3 removes the endpoint singularity.
        let (r, _) = adaptive(
            |v| {
                let s = 1.0 - v * v * v;
                let sum: f64 = (0..6).map(|j| s.powi(j)).sum();
                Ok(real(3.0 * v / sum.cbrt()))
            },
            0.0,
            1.0,
            opts,
        )?;
        Ok(HexagonMap {
            radius: r[0].re,
            opts: *opts,
        })
    }

    /// Length of the boundary image of the arc `[0, phi]`, with `phi = v^3`.
    fn edge_length(&self, v: f64) -> Result<f64> {
        let (l, _) = adaptive(|x| Ok(real(Self::edge_density(x))), 0.0, v, &self.opts)?;
        Ok(l[0].re)
    }

    fn edge_density(v: f64) -> f64 {
        let p = v * v * v;
        if p == 0.0 {
            return 0.0;
        }
        3.0 * v * v / (2.0 * (3.0 * p).sin()).cbrt()
    }

    /// Boundary angle whose image lies at fraction `lambda` of the edge from
    /// the corner at angle 0.
    fn edge_angle(&self, lambda: f64) -> Result<f64> {
        if lambda > 0.5 {
            return Ok(PI / 3.0 - self.edge_angle(1.0 - lambda)?);
        }
        if lambda <= 0.0 {
            return Ok(0.0);
        }
        if lambda == 0.5 {
            return Ok(PI / 6.0);
        }
        let target = lambda * self.radius;
        let (mut lo, mut hi) = (0.0, (PI / 6.0).cbrt());
        let mut v = lambda.sqrt() * hi;
        for _ in 0..100 {
            let g = self.edge_length(v)? - target;
            if g.abs() < 1e-15 * self.radius {
                break;
            }
            if g > 0.0 {
                hi = v;
            } else {
                lo = v;
            }
            let next = v - g / Self::edge_density(v);
            v = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        Ok(v * v * v)
    }

    fn forward(&self, t: Complex64) -> Result<Complex64> {
        let (f, _) = adaptive(
            |s| Ok([t / principal_cbrt(1.0 - (t * s).powi(6))]),
            0.0,
            1.0,
            &self.opts,
        )?;
        Ok(f[0])
    }

    fn inverse_interior(&self, w: Complex64) -> Result<Complex64> {
        let rhs = |t: Complex64| w * principal_cbrt(1.0 - t.powi(6));
        let h = 1.0 / RK_STEPS as f64;
        let mut t = Complex64::new(0.0, 0.0);
        for _ in 0..RK_STEPS {
            let k1 = rhs(t);
            let k2 = rhs(t + 0.5 * h * k1);
            let k3 = rhs(t + 0.5 * h * k2);
            let k4 = rhs(t + h * k3);
            t += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if t.norm() >= 1.0 {
                t /= t.norm() * (1.0 + 1e-9);
            }
        }
        for _ in 0..NEWTON_STEPS {
            let step = (self.forward(t)? - w) * principal_cbrt(1.0 - t.powi(6));
            let mut next = t - step;
            if next.norm() >= 1.0 {
                next = 0.5 * (t + next / next.norm());
            }
            let done = step.norm() < 1e-14;
            t = next;
            if done {
                break;
            }
        }
        Ok(t)
    }

    /// Preimage of lattice point `m` on ring `i` of sector `k`, for a lattice
    /// with `n` rings. Ring `n` lands exactly on the unit circle.
    pub fn point(&self, k: usize, i: usize, m: usize, n: usize) -> Result<Complex64> {
        if m > i || i > n {
            return Err(Error::InvalidArgument(format!(
                "lattice point ({i}, {m}) outside ring range {n}"
            )));
        }
        let rot = Complex64::from_polar(1.0, k as f64 * PI / 3.0);
        if i == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let corner = |j: f64| Complex64::from_polar(self.radius, j * PI / 3.0);
        let w = self.graded(((i - m) as f64 * corner(0.0) + m as f64 * corner(1.0)) / n as f64);
        if i == n {
            let lambda = ((w - corner(0.0)).norm() / self.radius).clamp(0.0, 1.0);
            return Ok(rot * Complex64::from_polar(1.0, self.edge_angle(lambda)?));
        }
        Ok(rot * self.inverse_interior(w)?)
    }

    /// Pulls lattice points radially towards the nearest edge midpoint and,
    /// more gently, towards the nearest corner.
    ///
    /// All twelve are branch points where the surface metric blows up like
    /// `|t - t_k|^{-2/3}`. The corners are partly absorbed by the map itself,
    /// the midpoints not at all.
    fn graded(&self, w: Complex64) -> Complex64 {
        let apothem = self.radius * (PI / 6.0).cos();
        let k = ((w.arg() - PI / 6.0) / (PI / 3.0)).round();
        let mid = Complex64::from_polar(apothem, PI / 6.0 + k * PI / 3.0);
        let w = radial(w, mid, MIDPOINT_REACH * self.radius, 2.0);
        let j = (w.arg() / (PI / 3.0)).round();
        radial(
            w,
            Complex64::from_polar(self.radius, j * PI / 3.0),
            CORNER_REACH * self.radius,
            1.5,
        )
    }
}

/// Radial warp about `c` with profile `q(s) = p s^p - (p - 1) s^{p+1}`,
/// which has `q(1) = q'(1) = 1` and is the identity beyond `reach`.
fn radial(w: Complex64, c: Complex64, reach: f64, p: f64) -> Complex64 {
    let d = (w - c).norm();
    if d >= reach || d == 0.0 {
        return w;
    }
    let s = d / reach;
    let q = p * s.powf(p) - (p - 1.0) * s.powf(p + 1.0);
    c + (w - c) * (q / s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map() -> HexagonMap {
        HexagonMap::new(&IntegrationOptions::default()).unwrap()
    }

    #[test]
    fn radius_matches_beta_function() {
        // f(1) = B(1/6, 2/3) / 6.
        assert!(
            (map().radius - 1.11291267452231_f64).abs() < 1e-10,
            "{}",
            map().radius
        );
    }

    #[test]
    fn edge_has_hexagon_side_length() {
        let h = map();
        let half = h.edge_length((PI / 6.0).cbrt()).unwrap();
        assert!((2.0 * half - h.radius).abs() < 1e-10);
    }

    #[test]
    fn inverse_round_trips() {
        let h = map();
        for w in [
            Complex64::new(0.3, 0.2),
            Complex64::new(1.0, 0.05),
            Complex64::new(0.5, 0.8),
        ] {
            let t = h.inverse_interior(w).unwrap();
            assert!((h.forward(t).unwrap() - w).norm() < 1e-11);
        }
    }

    #[test]
    fn boundary_points_are_on_circle() {
        let h = map();
        for m in 0..=8 {
            let t = h.point(2, 8, m, 8).unwrap();
            assert!((t.norm() - 1.0).abs() < 1e-15);
        }
        let mid = h.point(0, 8, 4, 8).unwrap();
        assert!((mid - Complex64::from_polar(1.0, PI / 6.0)).norm() < 1e-15);
        let inner = h.point(0, 7, 3, 8).unwrap();
        assert!(inner.norm() < 1.0 && inner.norm() > 0.8);
    }
}
