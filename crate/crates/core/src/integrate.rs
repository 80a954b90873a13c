//! Dormand–Prince 5(4) with FSAL, step-size control and continuous output.

use serde::{Deserialize, Serialize};

use crate::error::FlowError;
use crate::field::Point;

pub const MIN_STEP: f64 = 1e-14;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub s0: f64,
    pub h: f64,
    rcont: [[f64; 2]; 5],
    /// Produced by integrating backward in time; the polynomial runs from `s1` to `s0`.
    #[serde(default)]
    rev: bool,
}

impl Step {
    pub fn s1(&self) -> f64 {
        self.s0 + self.h
    }

    pub fn start(&self) -> Point {
        if self.rev {
            self.poly_end()
        } else {
            Point::from(self.rcont[0])
        }
    }

    pub fn end(&self) -> Point {
        if self.rev {
            Point::from(self.rcont[0])
        } else {
            self.poly_end()
        }
    }

    fn poly_end(&self) -> Point {
        Point::from(self.rcont[0]) + Point::from(self.rcont[1])
    }

    /// Continuous output, fourth order, at `s ∈ [s0, s0 + h]`.
    pub fn at(&self, s: f64) -> Point {
        let mut th = ((s - self.s0) / self.h).clamp(0.0, 1.0);
        if self.rev {
            th = 1.0 - th;
        }
        let th1 = 1.0 - th;
        let r = |i: usize| Point::from(self.rcont[i]);
        r(0) + (r(1) + (r(2) + (r(3) + r(4) * th1) * th) * th1) * th
    }

    /// Zero-length step pinning a point, used for constant lines.
    pub fn constant(s0: f64, h: f64, y: Point) -> Self {
        Self { s0, h, rcont: [[y.x, y.y], [0.0; 2], [0.0; 2], [0.0; 2], [0.0; 2]], rev: false }
    }

    /// Maps a step of the time-reversed equation `w(σ) = u(a − σ)` back to `s`.
    pub fn reversed_about(self, a: f64) -> Self {
        Self { s0: a - self.s0 - self.h, h: self.h, rcont: self.rcont, rev: !self.rev }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub tol: f64,
    pub h_max: f64,
}

impl Tolerance {
    pub fn new(tol: f64) -> Result<Self, FlowError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(FlowError::BadTolerance(tol));
        }
        Ok(Self { tol, h_max: 0.25 })
    }
}

/// Why a segment run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentEnd {
    Reached,
    Stopped,
}

pub struct SegmentRun {
    pub steps: Vec<Step>,
    pub end: SegmentEnd,
    pub y: Point,
    pub s: f64,
    pub h_next: f64,
}

/// Integrates `y' = f(s, y)` from `s0` to `s1 > s0`.
///
/// `stop(s, y)` is consulted after each accepted step and may end the run early.
/// `h_init` is a step-size hint (carried across segments by callers).
pub fn dopri5<F, S>(
    f: F,
    s0: f64,
    s1: f64,
    y0: Point,
    tol: Tolerance,
    h_init: f64,
    mut stop: S,
) -> Result<SegmentRun, FlowError>
where
    F: Fn(f64, Point) -> Point,
    S: FnMut(f64, Point) -> bool,
{
    let mut steps = Vec::new();
    let mut s = s0;
    let mut y = y0;
    if s1 <= s0 {
        return Ok(SegmentRun { steps, end: SegmentEnd::Reached, y, s, h_next: h_init });
    }
    let mut h = h_init.min(tol.h_max).min(s1 - s0).max(MIN_STEP);
    let mut k1 = f(s, y);
    let mut last_rejected = false;
    loop {
        let remaining = s1 - s;
        // avoid a sliver of a final step
        let hs = if h >= remaining * (1.0 - 1e-12) || remaining - h < 1e-3 * h { remaining } else { h };
        let k2 = f(s + C2 * hs, y + k1 * (hs * A21));
        let k3 = f(s + C3 * hs, y + (k1 * A31 + k2 * A32) * hs);
        let k4 = f(s + C4 * hs, y + (k1 * A41 + k2 * A42 + k3 * A43) * hs);
        let k5 = f(s + C5 * hs, y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * hs);
        let k6 = f(s + hs, y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * hs);
        let y1 = y + (k1 * A71 + k3 * A73 + k4 * A74 + k5 * A75 + k6 * A76) * hs;
        let k7 = f(s + hs, y1);
        let errv = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * hs;
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let sc = tol.tol * (1.0 + y[i].abs().max(y1[i].abs()));
            err = err.max(errv[i].abs() / sc);
        }
        if !err.is_finite() || !(y1.x.is_finite() && y1.y.is_finite()) {
            err = 1e10;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 {
            let r2 = y1 - y;
            let r3 = k1 * hs - r2;
            let r4 = r2 - k7 * hs - r3;
            let r5 = (k1 * D1 + k3 * D3 + k4 * D4 + k5 * D5 + k6 * D6 + k7 * D7) * hs;
            steps.push(Step {
                s0: s,
                h: hs,
                rcont: [[y.x, y.y], [r2.x, r2.y], [r3.x, r3.y], [r4.x, r4.y], [r5.x, r5.y]],
                rev: false,
            });
            s = if hs == remaining { s1 } else { s + hs };
            y = y1;
            k1 = k7;
            let grow = if last_rejected { fac.min(1.0) } else { fac };
            h = (hs * grow).min(tol.h_max);
            last_rejected = false;
            if h < MIN_STEP && s < s1 {
                return Err(FlowError::StepUnderflow { s, x: y.x, y: y.y });
            }
            if s >= s1 {
                return Ok(SegmentRun { steps, end: SegmentEnd::Reached, y, s, h_next: h });
            }
            if stop(s, y) {
                return Ok(SegmentRun { steps, end: SegmentEnd::Stopped, y, s, h_next: h });
            }
        } else {
            h = hs * fac.min(1.0);
            last_rejected = true;
            if h < MIN_STEP {
                return Err(FlowError::StepUnderflow { s, x: y.x, y: y.y });
            }
        }
    }
}

/// Piecewise-continuous solution assembled from accepted steps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<Step>,
}

impl Trajectory {
    pub fn s_start(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.s0)
    }

    pub fn s_end(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.s1())
    }

    pub fn start(&self) -> Point {
        self.steps.first().map_or(Point::zeros(), |s| s.start())
    }

    pub fn end(&self) -> Point {
        self.steps.last().map_or(Point::zeros(), |s| s.end())
    }

    pub fn at(&self, s: f64) -> Point {
        let i = self.steps.partition_point(|st| st.s1() < s).min(self.steps.len().saturating_sub(1));
        self.steps.get(i).map_or(Point::zeros(), |st| st.at(s))
    }

    /// Step nodes `(s, u(s))`, both endpoints included.
    pub fn samples(&self) -> Vec<(f64, Point)> {
        let mut out: Vec<(f64, Point)> = self.steps.iter().map(|st| (st.s0, st.start())).collect();
        if let Some(last) = self.steps.last() {
            out.push((last.s1(), last.end()));
        }
        out
    }

    pub fn append(&mut self, other: Trajectory) {
        self.steps.extend(other.steps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::pt;

    #[test]
    fn exponential_growth_and_dense_output() {
        let tol = Tolerance::new(1e-11).unwrap();
        let run = dopri5(|_, y| y, 0.0, 2.0, pt(1.0, -0.5), tol, 0.01, |_, _| false).unwrap();
        assert_eq!(run.end, SegmentEnd::Reached);
        assert!((run.y.x - 2f64.exp()).abs() < 1e-9 * 2f64.exp());
        let traj = Trajectory { steps: run.steps };
        for s in [0.013f64, 0.5, 1.234, 1.999] {
            let exact = s.exp();
            assert!((traj.at(s).x - exact).abs() < 1e-8 * exact, "s = {s}");
            assert!((traj.at(s).y + 0.5 * exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn linear_saddle_flow() {
        let tol = Tolerance::new(1e-10).unwrap();
        let run = dopri5(|_, u| pt(-2.0 * u.x, 2.0 * u.y), 0.0, 5.0, pt(0.7, 0.0), tol, 0.01, |_, _| false).unwrap();
        assert!((run.y.x - 0.7 * (-10f64).exp()).abs() < 1e-10);
        assert_eq!(run.y.y, 0.0);
    }

    #[test]
    fn stop_predicate_ends_early() {
        let tol = Tolerance::new(1e-9).unwrap();
        let run = dopri5(|_, u| pt(0.0, 2.0 * u.y), 0.0, 50.0, pt(0.0, 1e-3), tol, 0.01, |_, y| y.y > 10.0).unwrap();
        assert_eq!(run.end, SegmentEnd::Stopped);
        assert!(run.s < 6.0);
    }

    #[test]
    fn blow_up_reports_underflow() {
        let tol = Tolerance::new(1e-10).unwrap();
        let res = dopri5(|_, u| pt(u.x * u.x * u.x, 0.0), 0.0, 2.0, pt(1.0, 0.0), tol, 0.01, |_, _| false);
        assert!(matches!(res, Err(FlowError::StepUnderflow { .. })));
    }

    #[test]
    fn reversed_steps_read_forward() {
        let tol = Tolerance::new(1e-11).unwrap();
        // w' = w is u' = -u read backward from s = 1
        let run = dopri5(|_, w| w, 0.0, 1.0, pt(1.0, 0.0), tol, 0.01, |_, _| false).unwrap();
        let mut steps: Vec<Step> = run.steps.into_iter().map(|st| st.reversed_about(1.0)).collect();
        steps.reverse();
        let traj = Trajectory { steps };
        assert!((traj.s_start() - 0.0).abs() < 1e-15 && (traj.s_end() - 1.0).abs() < 1e-15);
        for s in [0.0f64, 0.3, 0.77, 1.0] {
            assert!((traj.at(s).x - (1.0 - s).exp()).abs() < 1e-9, "s = {s}");
        }
        assert!((traj.end().x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(Tolerance::new(0.0).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
    }
}
