use num_complex::Complex64;

use super::{branch_value_at, principal_cbrt, Chart, CurvePoint, BRANCH_VALUES, R_MIN, ZETA3};
use crate::error::{Error, Result};

const MIN_STEP: f64 = 1e-12;
const MAX_STEP: f64 = 1.0 / 16.0;
const SEPARATION_RATIO: f64 = 3.0;
const JOIN_TOL: f64 = 1e-9;

/// Geometric shape of a path segment in its chart's `x`-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentShape {
    Line {
        from: Complex64,
        to: Complex64,
    },
    /// `x(s) = center + radius * e^{i(start_angle + sweep s)}`.
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl SegmentShape {
    pub fn start(&self) -> Complex64 {
        match *self {
            SegmentShape::Line { from, .. } => from,
            SegmentShape::Arc {
                center,
                radius,
                start_angle,
                ..
            } => center + Complex64::from_polar(radius, start_angle),
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            SegmentShape::Line { to, .. } => to,
            SegmentShape::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => center + Complex64::from_polar(radius, start_angle + sweep),
        }
    }

    fn reversed(&self) -> SegmentShape {
        match *self {
            SegmentShape::Line { from, to } => SegmentShape::Line { from: to, to: from },
            SegmentShape::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => SegmentShape::Arc {
                center,
                radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
        }
    }

    /// Smallest distance from `b` to the segment.
    fn clearance(&self, b: Complex64) -> f64 {
        match *self {
            SegmentShape::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    ((b - from) * d.conj()).re / len2
                };
                (from + d * t.clamp(0.0, 1.0) - b).norm()
            }
            SegmentShape::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let rel = b - center;
                let ends = (self.start() - b).norm().min((self.end() - b).norm());
                if rel.norm() == 0.0 {
                    return radius;
                }
                let ang = rel.im.atan2(rel.re);
                let (lo, span) = if sweep >= 0.0 {
                    (start_angle, sweep)
                } else {
                    (start_angle + sweep, -sweep)
                };
                let off = (ang - lo).rem_euclid(std::f64::consts::TAU);
                if off <= span || span >= std::f64::consts::TAU {
                    (rel.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
        }
    }
}

/// One piece of a [`SheetPath`], drawn in the `x`-plane of `chart`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub chart: Chart,
    pub shape: SegmentShape,
}

/// A path on the curve: a starting point together with a sequence of line
/// and arc segments in the `x`-plane, each in a chosen chart.
///
/// Interior points must stay at least [`R_MIN`] away from every branch
/// value. Only the final segment may end on a branch value, and then it must
/// be a line.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetPath {
    pub start: CurvePoint,
    pub segments: Vec<Segment>,
    chart: Chart,
    cursor: Complex64,
}

impl SheetPath {
    pub fn new(start: CurvePoint) -> Self {
        SheetPath {
            start,
            segments: Vec::new(),
            chart: start.chart,
            cursor: start.x,
        }
    }

    pub fn from_segments(start: CurvePoint, segments: Vec<Segment>) -> Self {
        let (chart, cursor) = match segments.last() {
            Some(s) => (s.chart, s.shape.end()),
            None => (start.chart, start.x),
        };
        SheetPath {
            start,
            segments,
            chart,
            cursor,
        }
    }

    /// Straight path through the given `x`-values of the start point's chart.
    pub fn polyline(start: CurvePoint, waypoints: &[Complex64]) -> Self {
        waypoints
            .iter()
            .fold(Self::new(start), |p, &x| p.line_to(x))
    }

    /// Full counter-clockwise circle around `center`, starting and ending at the start point.
    pub fn circle(start: CurvePoint, center: Complex64) -> Self {
        Self::new(start).arc(center, std::f64::consts::TAU)
    }

    /// Chart the next segment will be drawn in.
    pub fn current_chart(&self) -> Chart {
        self.chart
    }

    /// Current endpoint in the `x`-plane of [`Self::current_chart`].
    pub fn cursor(&self) -> Complex64 {
        self.cursor
    }

    pub fn line_to(mut self, to: Complex64) -> Self {
        self.segments.push(Segment {
            chart: self.chart,
            shape: SegmentShape::Line {
                from: self.cursor,
                to,
            },
        });
        self.cursor = to;
        self
    }

    /// Arc around `center` through the current endpoint, sweeping `sweep` radians.
    pub fn arc(mut self, center: Complex64, sweep: f64) -> Self {
        let rel = self.cursor - center;
        let shape = SegmentShape::Arc {
            center,
            radius: rel.norm(),
            start_angle: rel.im.atan2(rel.re),
            sweep,
        };
        self.cursor = shape.end();
        self.segments.push(Segment {
            chart: self.chart,
            shape,
        });
        self
    }

    /// Continues in the other chart. The current endpoint must not be `x = 0`.
    pub fn switch_chart(mut self) -> Self {
        self.chart = self.chart.other();
        self.cursor = if self.cursor.norm() == 0.0 {
            self.cursor
        } else {
            self.cursor.inv()
        };
        self
    }

    /// Appends the segments of `other`, which should start where `self` ends.
    pub fn then(mut self, other: &SheetPath) -> Self {
        self.segments.extend(other.segments.iter().copied());
        self.chart = other.chart;
        self.cursor = other.cursor;
        self
    }

    /// The reversed path, starting from the continued endpoint.
    pub fn reversed(&self) -> Result<SheetPath> {
        let end = continue_path(self)?;
        if end.is_branch_point() && !self.segments.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot reverse a path ending at a branch point".into(),
            ));
        }
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment {
                chart: s.chart,
                shape: s.shape.reversed(),
            })
            .collect();
        Ok(SheetPath::from_segments(end, segments))
    }

    /// Checks connectivity and branch clearance and splits the path into pieces.
    pub(crate) fn pieces(&self) -> Result<Vec<Piece>> {
        let mut out = Vec::with_capacity(self.segments.len());
        let mut at: Option<(Chart, Complex64)> = Some((self.start.chart, self.start.x));
        let last = self.segments.len().saturating_sub(1);
        for (i, seg) in self.segments.iter().enumerate() {
            let (chart, x) = at.ok_or(Error::DisconnectedPath(seg.shape.start()))?;
            let prev =
                convert_x(chart, seg.chart, x).ok_or(Error::DisconnectedPath(seg.shape.start()))?;
            let s0 = seg.shape.start();
            if (prev - s0).norm() > JOIN_TOL * (1.0 + s0.norm()) {
                return Err(Error::DisconnectedPath(s0));
            }
            if let Some(b) = branch_value_at(s0) {
                return Err(Error::BranchProximity {
                    branch: b,
                    clearance: 0.0,
                });
            }
            let end_branch = branch_value_at(seg.shape.end());
            if let Some(b) = end_branch {
                let is_line = matches!(seg.shape, SegmentShape::Line { .. });
                if i != last || !is_line {
                    return Err(Error::BranchProximity {
                        branch: b,
                        clearance: 0.0,
                    });
                }
            }
            for b in BRANCH_VALUES {
                if end_branch.is_some_and(|e| (e - b).norm() < 1e-12) {
                    continue;
                }
                let clearance = seg.shape.clearance(b);
                if clearance < R_MIN {
                    return Err(Error::BranchProximity {
                        branch: b,
                        clearance,
                    });
                }
            }
            let kind = match (seg.shape, end_branch) {
                (SegmentShape::Line { from, .. }, Some(b)) => PieceKind::ToBranch { a: from, b },
                (SegmentShape::Line { from, to }, None) => PieceKind::Line { a: from, b: to },
                (
                    SegmentShape::Arc {
                        center,
                        radius,
                        start_angle,
                        sweep,
                    },
                    _,
                ) => PieceKind::Arc {
                    center,
                    radius,
                    phi0: start_angle,
                    sweep,
                },
            };
            out.push(Piece {
                chart: seg.chart,
                kind,
            });
            at = Some((seg.chart, seg.shape.end()));
        }
        Ok(out)
    }

    /// Tracks the fiber coordinate along every piece.
    pub(crate) fn tracks(&self) -> Result<Vec<(Piece, Track)>> {
        let pieces = self.pieces()?;
        let mut y_chart = self.start.chart;
        let mut y = self.start.y;
        let mut x = self.start.x;
        let mut out = Vec::with_capacity(pieces.len());
        for piece in pieces {
            if piece.chart != y_chart {
                let p = CurvePoint {
                    chart: y_chart,
                    x,
                    y,
                }
                .to_chart(piece.chart)
                .ok_or(Error::ChartSingularity)?;
                y = p.y;
                y_chart = piece.chart;
            }
            let track = Track::build(&piece, y)?;
            x = piece.x(1.0);
            y = track.y(&piece, 1.0);
            out.push((piece, track));
        }
        Ok(out)
    }
}

fn convert_x(from: Chart, to: Chart, x: Complex64) -> Option<Complex64> {
    if from == to {
        Some(x)
    } else if x.norm() == 0.0 {
        None
    } else {
        Some(x.inv())
    }
}

/// Endpoint of analytic continuation along `path`.
pub fn continue_path(path: &SheetPath) -> Result<CurvePoint> {
    let tracks = path.tracks()?;
    match tracks.last() {
        None => Ok(path.start),
        Some((piece, track)) => Ok(CurvePoint {
            chart: piece.chart,
            x: piece.x(1.0),
            y: track.y(piece, 1.0),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PieceKind {
    Line {
        a: Complex64,
        b: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        phi0: f64,
        sweep: f64,
    },
    /// Line from `a` to the branch value `b`, reparametrized as
    /// `x = b + (a - b)(1 - s)^3` so that `y = (1 - s) * yhat(s)` with `yhat` smooth.
    ToBranch {
        a: Complex64,
        b: Complex64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub chart: Chart,
    pub kind: PieceKind,
}

impl Piece {
    pub fn x(&self, s: f64) -> Complex64 {
        match self.kind {
            PieceKind::Line { a, b } => a + (b - a) * s,
            PieceKind::Arc {
                center,
                radius,
                phi0,
                sweep,
            } => center + Complex64::from_polar(radius, phi0 + sweep * s),
            PieceKind::ToBranch { a, b } => b + (a - b) * (1.0 - s).powi(3),
        }
    }

    pub fn dx(&self, s: f64) -> Complex64 {
        match self.kind {
            PieceKind::Line { a, b } => b - a,
            PieceKind::Arc {
                radius,
                phi0,
                sweep,
                ..
            } => Complex64::i() * sweep * Complex64::from_polar(radius, phi0 + sweep * s),
            PieceKind::ToBranch { a, b } => -3.0 * (a - b) * (1.0 - s).powi(2),
        }
    }

    /// Quantity whose cube root is tracked.
    pub fn cube(&self, s: f64) -> Complex64 {
        match self.kind {
            PieceKind::ToBranch { a, b } => (a - b) * self.chart.deflated(b, self.x(s)),
            _ => self.chart.poly(self.x(s)),
        }
    }

    /// Factor `y / yhat`.
    pub fn scale(&self, s: f64) -> f64 {
        match self.kind {
            PieceKind::ToBranch { .. } => 1.0 - s,
            _ => 1.0,
        }
    }
}

/// Cube root of `c` nearest to `q`, with its distance and the distance of the runner-up.
pub(crate) fn nearest_root(c: Complex64, q: Complex64) -> (Complex64, f64, f64) {
    let r0 = principal_cbrt(c);
    let roots = [r0, r0 * ZETA3, r0 * ZETA3.conj()];
    let mut d: Vec<(f64, Complex64)> = roots.iter().map(|r| ((r - q).norm(), *r)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0));
    (d[0].1, d[0].0, d[1].0)
}

/// Knots of the tracked cube-root branch along a piece.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Track {
    knots: Vec<(f64, Complex64)>,
}

impl Track {
    pub fn build(piece: &Piece, y0: Complex64) -> Result<Track> {
        let mut s = 0.0;
        let mut q = y0 / piece.scale(0.0);
        let mut h = MAX_STEP / 4.0;
        let mut knots = vec![(0.0, q)];
        while s < 1.0 {
            h = h.min(1.0 - s);
            loop {
                if h < MIN_STEP {
                    return Err(Error::StepCollapse {
                        near: piece.x(s),
                        min_step: MIN_STEP,
                    });
                }
                let s1 = if s + h >= 1.0 - 1e-15 { 1.0 } else { s + h };
                let (r1, d1, e1) = nearest_root(piece.cube(s1), q);
                let (_, dm, em) = nearest_root(piece.cube(0.5 * (s + s1)), 0.5 * (q + r1));
                if SEPARATION_RATIO * d1 <= e1 && SEPARATION_RATIO * dm <= em {
                    knots.push((s1, r1));
                    s = s1;
                    q = r1;
                    h = (h * 1.5).min(MAX_STEP);
                    break;
                }
                h *= 0.5;
            }
        }
        Ok(Track { knots })
    }

    /// The smooth fiber coordinate `yhat(s)`.
    pub fn hat(&self, piece: &Piece, s: f64) -> Complex64 {
        let k = self.knots.partition_point(|(t, _)| *t <= s);
        let guess = if k == 0 {
            self.knots[0].1
        } else if k >= self.knots.len() {
            self.knots[self.knots.len() - 1].1
        } else {
            let (t0, q0) = self.knots[k - 1];
            let (t1, q1) = self.knots[k];
            q0 + (q1 - q0) * ((s - t0) / (t1 - t0))
        };
        nearest_root(piece.cube(s), guess).0
    }

    pub fn y(&self, piece: &Piece, s: f64) -> Complex64 {
        self.hat(piece, s) * piece.scale(s)
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.knots.len()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{deck, lift};
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_circle_around_zero_advances_one_sheet() {
        let start = lift(c(0.5, 0.0), 0).unwrap();
        let end = continue_path(&SheetPath::circle(start, c(0.0, 0.0))).unwrap();
        assert!(end.distance(&lift(c(0.5, 0.0), 1).unwrap()) < 1e-9);
    }

    #[test]
    fn large_circle_advances_two_sheets() {
        let start = lift(c(3.0, 0.0), 0).unwrap();
        let end = continue_path(&SheetPath::circle(start, c(0.0, 0.0))).unwrap();
        assert!(end.distance(&lift(c(3.0, 0.0), 2).unwrap()) < 1e-9);
    }

    #[test]
    fn loops_around_unit_roots() {
        for b in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            let start = lift(b + 0.1, 0).unwrap();
            let end = continue_path(&SheetPath::circle(start, b)).unwrap();
            assert!(
                end.distance(&start) > 1e-3,
                "loop around {b} should change sheet"
            );
            let thrice = SheetPath::circle(start, b).arc(b, TAU).arc(b, TAU);
            assert!(continue_path(&thrice).unwrap().distance(&start) < 1e-9);
        }
    }

    #[test]
    fn continuation_is_deck_equivariant() {
        let p = lift(c(0.4, 0.3), 0).unwrap();
        let wp = [c(1.5, 0.6), c(1.5, -1.2), c(-0.7, -0.4)];
        let a = continue_path(&SheetPath::polyline(p, &wp)).unwrap();
        let b = continue_path(&SheetPath::polyline(deck(&p, 1), &wp)).unwrap();
        assert!(deck(&a, 1).distance(&b) < 1e-10);
    }

    #[test]
    fn homotopic_paths_agree() {
        let p = lift(c(0.5, 0.5), 0).unwrap();
        let a = continue_path(&SheetPath::polyline(p, &[c(0.5, 0.2), c(0.6, -0.4)])).unwrap();
        let b = continue_path(&SheetPath::polyline(
            p,
            &[c(0.8, 0.5), c(0.8, -0.3), c(0.6, -0.4)],
        ))
        .unwrap();
        assert!(a.distance(&b) < 1e-10);
    }

    #[test]
    fn chart_crossing_matches_direct_path() {
        let p = lift(c(1.5, 0.5), 0).unwrap();
        let direct = continue_path(&SheetPath::polyline(p, &[c(3.0, 1.0)])).unwrap();
        let crossing = SheetPath::new(p)
            .line_to(c(2.0, 2.0 / 3.0))
            .switch_chart()
            .line_to(c(3.0, 1.0).inv());
        let end = continue_path(&crossing).unwrap();
        assert_eq!(end.chart, Chart::Infinity);
        assert!(direct.distance(&end) < 1e-10);
    }

    #[test]
    fn reaches_infinity() {
        let p = lift(c(2.0, 0.0), 0).unwrap();
        let path = SheetPath::new(p).switch_chart().line_to(c(0.0, 0.0));
        let end = continue_path(&path).unwrap();
        assert_eq!(
            end,
            CurvePoint {
                chart: Chart::Infinity,
                x: c(0.0, 0.0),
                y: c(0.0, 0.0)
            }
        );
    }

    #[test]
    fn track_to_branch_is_smooth() {
        let p = lift(c(0.5, 0.5), 0).unwrap();
        let path = SheetPath::polyline(p, &[c(1.0, 0.0)]);
        let tracks = path.tracks().unwrap();
        let (piece, track) = &tracks[0];
        assert!(track.len() < 200);
        assert!(track.y(piece, 1.0).norm() == 0.0);
        let near = track.y(piece, 0.999);
        let x = piece.x(0.999);
        assert!((near * near * near - Chart::Finite.poly(x)).norm() < 1e-12);
    }

    #[test]
    fn rejects_close_approach() {
        let p = lift(c(0.5, 1e-4), 0).unwrap();
        let err = continue_path(&SheetPath::polyline(p, &[c(-0.5, 1e-4)])).unwrap_err();
        assert!(matches!(err, Error::BranchProximity { .. }));
    }

    #[test]
    fn rejects_interior_branch_endpoint() {
        let p = lift(c(0.5, 0.5), 0).unwrap();
        let err = continue_path(&SheetPath::polyline(p, &[c(1.0, 0.0), c(2.0, 0.0)])).unwrap_err();
        assert!(matches!(err, Error::BranchProximity { .. }));
    }

    #[test]
    fn rejects_disconnected_segments() {
        let p = lift(c(0.5, 0.5), 0).unwrap();
        let seg = Segment {
            chart: Chart::Finite,
            shape: SegmentShape::Line {
                from: c(0.6, 0.5),
                to: c(0.7, 0.5),
            },
        };
        let path = SheetPath::from_segments(p, vec![seg]);
        assert!(matches!(
            continue_path(&path),
            Err(Error::DisconnectedPath(_))
        ));
    }

    #[test]
    fn reversal_returns_to_start() {
        let p = lift(c(0.3, -0.6), 2).unwrap();
        let path = SheetPath::new(p)
            .line_to(c(1.4, -0.6))
            .arc(c(0.0, 0.0), PI / 3.0);
        let back = path.reversed().unwrap();
        assert!(continue_path(&back).unwrap().distance(&p) < 1e-10);
    }
}
