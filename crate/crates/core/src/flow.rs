//! Negative gradient flow `u' = −∇q_{h^s}(u)` and the search for bounded lines.
//!
//! A bounded line leaves a critical point `c` of `q_h` as `s → −∞` and
//! settles on a critical point of the terminal field as `s → +∞`. Lines are
//! found by shooting from a small sphere around `c` in its unstable directions
//! and bisecting between shots that escape upward and downward.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::{find_critical_points, sorted_eigen, CriticalPoint, SearchBox, SpectrumReport};
use crate::error::FlowError;
use crate::family::DeformationFamily;
use crate::field::{pt, Point};
use crate::integrate::{dopri5, SegmentEnd, Step, Tolerance, Trajectory};

/// Relative distance (in units of `δ`) at which backward approach runs stop.
pub const APPROACH_FLOOR: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Radius of the seed sphere around each critical point.
    pub delta: f64,
    /// Frozen time before `s_minus` and after `s_plus`.
    pub t_tail: f64,
    pub r_esc: f64,
    pub omega_tol: f64,
    pub alpha_tol: f64,
    /// Largest accepted `|y(s_plus)|` before projecting a bisected line onto the stable axis.
    pub tail_tol: f64,
    pub bisection_budget: usize,
    pub integrator_tol: f64,
    /// Geometric seeds per branch of a one-dimensional unstable manifold.
    pub line_seeds: usize,
    pub circle_seeds: usize,
    pub degenerate_seeds: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            t_tail: 12.0,
            r_esc: 50.0,
            omega_tol: 1e-5,
            alpha_tol: 1e-4,
            tail_tol: 1e-6,
            bisection_budget: 200,
            integrator_tol: 1e-11,
            line_seeds: 40,
            circle_seeds: 32,
            degenerate_seeds: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShotClass {
    Up,
    Down,
    Bounded,
    /// Settled on the terminal critical point with this index.
    Converged(usize),
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowLine {
    #[serde(skip)]
    pub trajectory: Trajectory,
    pub bounded: bool,
    pub class: ShotClass,
    pub alpha_limit: Option<CriticalPoint>,
    pub omega_limit: Option<[f64; 2]>,
    pub start_value: f64,
    pub energy: f64,
    /// `q_h(u(S_lo)) − q_{h⁺}(u(S_hi))`.
    pub action_drop: f64,
    /// `∫ ∂_s h^s(u(s)) ds`.
    pub ds_integral: f64,
    pub constant: bool,
    /// Found by a sweep that does not certify completeness.
    pub heuristic: bool,
    /// Distance moved when projecting the line onto the terminal stable set.
    pub tail_defect: f64,
}

impl FlowLine {
    pub fn samples(&self) -> Vec<(f64, Point)> {
        self.trajectory.samples()
    }

    pub fn s_lo(&self) -> f64 {
        self.trajectory.s_start()
    }

    pub fn s_hi(&self) -> f64 {
        self.trajectory.s_end()
    }

    /// `|E − (action_drop + ds_integral)|`.
    pub fn energy_identity_defect(&self) -> f64 {
        (self.energy - (self.action_drop + self.ds_integral)).abs()
    }
}

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn gauss<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GL_NODES.iter().zip(GL_WEIGHTS).map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// Integral of `g(s, u(s))` along the trajectory, Gauss–Legendre per step.
fn along<G: Fn(f64, Point) -> f64>(traj: &Trajectory, family: &DeformationFamily, g: G) -> f64 {
    let bps = family.breakpoints();
    traj.steps
        .iter()
        .map(|st| {
            if st.h == 0.0 {
                return 0.0;
            }
            // split steps that straddle a schedule breakpoint (constant lines do)
            let mut cuts = vec![st.s0];
            cuts.extend(bps.iter().copied().filter(|b| *b > st.s0 && *b < st.s1()));
            cuts.push(st.s1());
            cuts.windows(2).map(|w| gauss(w[0], w[1], |s| g(s, st.at(s)))).sum::<f64>()
        })
        .sum()
}

/// `E(u) = ∫ |∇q_{h^s}(u(s))|² ds`.
pub fn energy(traj: &Trajectory, family: &DeformationFamily) -> f64 {
    along(traj, family, |s, u| family.grad(s, u).norm_squared())
}

/// `∫ ∂_s h^s(u(s)) ds`.
pub fn ds_integral(traj: &Trajectory, family: &DeformationFamily) -> f64 {
    along(traj, family, |s, u| family.ds_value(s, u))
}

fn run_segments<S: FnMut(f64, Point) -> bool>(
    family: &DeformationFamily,
    u0: Point,
    s0: f64,
    s1: f64,
    tol: Tolerance,
    mut stop: S,
) -> Result<(Trajectory, bool), FlowError> {
    let mut cuts = vec![s0];
    cuts.extend(family.breakpoints().into_iter().filter(|b| *b > s0 && *b < s1));
    cuts.push(s1);
    let mut traj = Trajectory::default();
    let mut u = u0;
    let mut h = 0.01;
    for w in cuts.windows(2) {
        let run = dopri5(|s, y| family.neg_grad(s, y), w[0], w[1], u, tol, h, &mut stop)?;
        traj.steps.extend(run.steps);
        u = run.y;
        h = run.h_next;
        if run.end == SegmentEnd::Stopped {
            return Ok((traj, true));
        }
    }
    Ok((traj, false))
}

/// Adaptive solution of `u' = −∇q_{h^s}(u)` on `[s0, s_hi]`.
pub fn integrate(
    family: &DeformationFamily,
    u0: Point,
    s0: f64,
    s_hi: f64,
    tol: f64,
) -> Result<Trajectory, FlowError> {
    let tol = Tolerance::new(tol)?;
    Ok(run_segments(family, u0, s0, s_hi, tol, |_, _| false)?.0)
}

#[derive(Debug, Clone)]
struct Shot {
    traj: Trajectory,
    class: ShotClass,
    /// `y(s_plus)` for unperturbed terminals.
    y_plus: f64,
}

/// How seeds around one critical point are parametrized.
#[derive(Debug, Clone, Copy)]
enum Frame {
    /// Along `±v`: `|t| = e^{−d}` leaves `c` at distance δ at time `s_lo + d` for
    /// `d ≤ t_tail`, and at distance `δ e^{t_tail − d}` at `s_minus` beyond that.
    Line(Point),
    /// `c + δ (cos θ, sin θ)`.
    Circle,
}

struct Shooter<'a> {
    family: &'a DeformationFamily,
    cfg: FlowConfig,
    tol: Tolerance,
    s_lo: f64,
    s_hi: f64,
    s_plus: f64,
    linear_terminal: bool,
    escape_y: f64,
    terminal_points: Vec<CriticalPoint>,
}

impl<'a> Shooter<'a> {
    fn new(family: &'a DeformationFamily, cfg: FlowConfig) -> Result<Self, FlowError> {
        let tol = Tolerance::new(cfg.integrator_tol)?;
        let support = family.components().iter().map(|h| h.support_radius()).fold(0.0, f64::max);
        let linear_terminal = family.terminal.bumps.is_empty();
        let terminal_points = if linear_terminal {
            vec![CriticalPoint::at(&family.terminal, Point::zeros())]
        } else {
            let bx = SearchBox::covering(&family.terminal, 1.0);
            find_critical_points(&family.terminal, &bx, 48)
                .map(|r| r.critical_points)
                .unwrap_or_default()
        };
        Ok(Self {
            family,
            cfg,
            tol,
            s_lo: family.s_minus() - cfg.t_tail,
            s_hi: family.s_plus() + cfg.t_tail,
            s_plus: family.s_plus(),
            linear_terminal,
            escape_y: cfg.r_esc.max(support + 1.0),
            terminal_points,
        })
    }

    fn run(&self, u0: Point) -> Result<Shot, FlowError> {
        self.run_from(u0, self.s_lo)
    }

    fn run_from(&self, u0: Point, s0: f64) -> Result<Shot, FlowError> {
        let esc = self.escape_y;
        let end = if self.linear_terminal { self.s_plus } else { self.s_hi };
        let (traj, stopped) = run_segments(self.family, u0, s0, end, self.tol, |_, u| u.y.abs() > esc)?;
        let last = traj.end();
        if stopped {
            let class = if last.y > 0.0 { ShotClass::Up } else { ShotClass::Down };
            return Ok(Shot { traj, class, y_plus: last.y.signum() * f64::INFINITY });
        }
        let class = if self.linear_terminal {
            if last.y > 0.0 {
                ShotClass::Up
            } else if last.y < 0.0 {
                ShotClass::Down
            } else {
                ShotClass::Bounded
            }
        } else {
            match self
                .terminal_points
                .iter()
                .position(|c| (c.point() - last).norm() < self.cfg.omega_tol)
            {
                Some(i) => ShotClass::Converged(i),
                None => ShotClass::Unresolved,
            }
        };
        Ok(Shot { traj, class, y_plus: last.y })
    }

    /// A shot that settles back on a stationary `c` is the constant line again.
    fn returns_home(&self, c: &CriticalPoint, class: ShotClass) -> bool {
        match class {
            ShotClass::Converged(i) => {
                (self.terminal_points[i].point() - c.point()).norm() < self.cfg.omega_tol && is_stationary(self.family, c)
            }
            _ => false,
        }
    }

    fn launch(&self, c: &CriticalPoint, frame: Frame, t: f64) -> Result<Shot, FlowError> {
        let delta = self.cfg.delta;
        let v = match frame {
            Frame::Circle => return self.run(c.point() + pt(t.cos(), t.sin()) * delta),
            Frame::Line(v) => v,
        };
        let s_minus = self.family.s_minus();
        let d = if t == 0.0 { f64::INFINITY } else { -t.abs().ln() };
        let (s0, offset) = if d <= self.cfg.t_tail {
            (self.s_lo + d, delta)
        } else {
            (s_minus, delta * (self.cfg.t_tail - d).exp())
        };
        let u0 = c.point() + v * (offset * t.signum());
        let mut traj = self.approach(c.point(), u0, s0)?;
        let mut shot = self.run_from(u0, s0)?;
        traj.append(shot.traj);
        shot.traj = traj;
        Ok(shot)
    }

    /// The frozen unstable manifold through `u0` on `[s_lo, s0]`, integrated backward.
    ///
    /// Backward flow amplifies any component off the unstable manifold, so the
    /// run stops once it is within `APPROACH_FLOOR · δ` of `c`; the rest of the
    /// window is spent at that point.
    fn approach(&self, c: Point, u0: Point, s0: f64) -> Result<Trajectory, FlowError> {
        let len = s0 - self.s_lo;
        if len <= 0.0 {
            return Ok(Trajectory::default());
        }
        let floor = APPROACH_FLOOR * self.cfg.delta;
        let run = dopri5(|sig, w| self.family.grad(s0 - sig, w), 0.0, len, u0, self.tol, 0.01, |_, w| (w - c).norm() <= floor)?;
        let mut steps: Vec<Step> = run.steps.into_iter().map(|st| st.reversed_about(s0)).collect();
        steps.reverse();
        if let Some(first) = steps.first_mut() {
            // the last backward step lands on s_lo up to round-off
            let gap = first.s0 - self.s_lo;
            if gap > 1e-9 * (1.0 + len) {
                steps.insert(0, Step::constant(self.s_lo, gap, run.y));
            } else {
                first.s0 = self.s_lo;
                first.h += gap;
            }
        }
        Ok(Trajectory { steps })
    }

    fn finish_line(&self, c: &CriticalPoint, mut traj: Trajectory, class: ShotClass, heuristic: bool, tail_defect: f64) -> Result<FlowLine, FlowError> {
        let mut omega = traj.end();
        if self.linear_terminal && traj.s_end() < self.s_hi {
            let start = pt(traj.end().x, 0.0);
            let tail = integrate(self.family, start, traj.s_end(), self.s_hi, self.tol.tol)?;
            omega = tail.end();
            traj.append(tail);
        }
        Ok(self.assemble(c, traj, class, omega, heuristic, tail_defect))
    }

    fn assemble(&self, c: &CriticalPoint, traj: Trajectory, class: ShotClass, omega: Point, heuristic: bool, tail_defect: f64) -> FlowLine {
        let e = energy(&traj, self.family);
        let ds = ds_integral(&traj, self.family);
        let drop = self.family.value(traj.s_start(), traj.start()) - self.family.value(traj.s_end(), traj.end());
        FlowLine {
            bounded: true,
            class,
            alpha_limit: Some(c.clone()),
            omega_limit: Some([omega.x, omega.y]),
            start_value: c.value,
            energy: e,
            action_drop: drop,
            ds_integral: ds,
            constant: false,
            heuristic,
            tail_defect,
            trajectory: traj,
        }
    }

    fn constant_line(&self, c: &CriticalPoint) -> FlowLine {
        let traj = Trajectory { steps: vec![Step::constant(self.s_lo, self.s_hi - self.s_lo, c.point())] };
        let mut line = self.assemble(c, traj, ShotClass::Bounded, c.point(), false, 0.0);
        line.constant = true;
        line
    }

    /// Unbounded shot kept for plotting.
    fn escaping_line(&self, c: &CriticalPoint, shot: Shot) -> FlowLine {
        let mut line = self.assemble(c, shot.traj, shot.class, Point::zeros(), false, 0.0);
        line.bounded = false;
        line.omega_limit = None;
        line
    }

    /// Bisects between two shots of different escape classes.
    fn bisect(
        &self,
        c: &CriticalPoint,
        frame: Frame,
        (mut a, mut sa): (f64, Shot),
        (mut b, mut sb): (f64, Shot),
        heuristic: bool,
    ) -> Result<Option<FlowLine>, FlowError> {
        for _ in 0..self.cfg.bisection_budget {
            let mid = if matches!(frame, Frame::Line(_)) && a * b > 0.0 {
                a.signum() * (a.abs() * b.abs()).sqrt()
            } else {
                0.5 * (a + b)
            };
            if mid == a || mid == b || (mid - a).abs() <= 1e-16 * a.abs().max(b.abs()) {
                break;
            }
            let sm = self.launch(c, frame, mid)?;
            if self.returns_home(c, sm.class) {
                return Ok(None);
            }
            match sm.class {
                ShotClass::Bounded | ShotClass::Converged(_) => {
                    return self.finish_line(c, sm.traj, sm.class, heuristic, 0.0).map(Some);
                }
                ShotClass::Unresolved => {
                    return self.closest_approach(c, sm, true);
                }
                cls if cls == sa.class => {
                    a = mid;
                    sa = sm;
                }
                _ => {
                    b = mid;
                    sb = sm;
                }
            }
        }
        let best = if sa.y_plus.abs() <= sb.y_plus.abs() { sa } else { sb };
        if self.linear_terminal {
            let defect = best.y_plus.abs();
            if defect <= self.cfg.tail_tol {
                let class = ShotClass::Bounded;
                return self.finish_line(c, best.traj, class, heuristic, defect).map(Some);
            }
            return Ok(None);
        }
        self.closest_approach(c, best, true)
    }

    /// For bumped terminals: truncates `shot` where it comes closest to a terminal
    /// critical point after `s_plus`, accepting it when that distance is below 1e-3.
    fn closest_approach(&self, c: &CriticalPoint, shot: Shot, _heuristic: bool) -> Result<Option<FlowLine>, FlowError> {
        if self.linear_terminal {
            return Ok(None);
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for (k, st) in shot.traj.steps.iter().enumerate() {
            if st.s1() < self.s_plus {
                continue;
            }
            for (i, p) in self.terminal_points.iter().enumerate() {
                let d = (st.end() - p.point()).norm();
                if best.map_or(true, |b| d < b.0) {
                    best = Some((d, k, i));
                }
            }
        }
        let Some((d, k, i)) = best else { return Ok(None) };
        if d > 1e-3 {
            return Ok(None);
        }
        let mut traj = Trajectory { steps: shot.traj.steps[..=k].to_vec() };
        let s_cut = traj.s_end();
        let target = self.terminal_points[i].point();
        if s_cut < self.s_hi {
            traj.steps.push(Step::constant(s_cut, self.s_hi - s_cut, target));
        }
        let line = self.assemble(c, traj, ShotClass::Converged(i), target, true, d);
        Ok(Some(line))
    }

    fn sweep_point(&self, c: &CriticalPoint, keep_shots: bool) -> Result<(Vec<FlowLine>, Vec<FlowLine>), FlowError> {
        let mut lines = Vec::new();
        let mut shots = Vec::new();
        let constant = is_stationary(self.family, c);
        if constant {
            lines.push(self.constant_line(c));
        }
        let hess = self.family.base.hessian(c.point());
        let (_, vecs) = sorted_eigen(&hess);
        let delta = self.cfg.delta;
        let (frame, params, cyclic, heuristic): (Frame, Vec<f64>, bool, bool) = if c.degenerate {
            let n = self.cfg.degenerate_seeds;
            let outward: Vec<f64> = (0..n)
                .map(|j| std::f64::consts::TAU * j as f64 / n as f64)
                .filter(|th| {
                    let off = pt(th.cos(), th.sin()) * delta;
                    self.family.base.grad(c.point() + off).dot(&off) < 0.0
                })
                .collect();
            (Frame::Circle, outward, true, true)
        } else {
            match c.morse_index {
                0 => (Frame::Circle, Vec::new(), false, false),
                1 => {
                    let v: Point = vecs.column(0).into();
                    let n = self.cfg.line_seeds.max(2);
                    let t_tail = self.cfg.t_tail;
                    // late departures, down to offsets at round-off level of |c|
                    let late = (delta / (1e-16 * (1.0 + c.point().norm()))).ln().max(0.0);
                    let m = n / 2;
                    let mut ds: Vec<f64> = (0..n).map(|j| t_tail * j as f64 / (n - 1) as f64).collect();
                    ds.extend((1..=m).map(|j| t_tail + late * j as f64 / m as f64));
                    let mut ts: Vec<f64> = ds.into_iter().map(|d| (-d).exp()).collect();
                    ts.extend(ts.clone().into_iter().map(|t| -t));
                    if !constant {
                        ts.push(0.0);
                    }
                    ts.sort_by(f64::total_cmp);
                    (Frame::Line(v), ts, false, false)
                }
                _ => {
                    let n = self.cfg.circle_seeds;
                    let th = (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect();
                    (Frame::Circle, th, true, false)
                }
            }
        };
        // the centre itself, unless the constant line already covers it
        if !constant && !matches!(frame, Frame::Line(_)) {
            let shot = self.run(c.point())?;
            match shot.class {
                ShotClass::Bounded | ShotClass::Converged(_) => {
                    lines.push(self.finish_line(c, shot.traj, shot.class, heuristic, 0.0)?)
                }
                _ if keep_shots => shots.push(self.escaping_line(c, shot)),
                _ => {}
            }
        }
        let mut results: Vec<(f64, Shot)> = Vec::with_capacity(params.len());
        for &t in &params {
            results.push((t, self.launch(c, frame, t)?));
        }
        let n = self.cfg.degenerate_seeds as f64;
        let adjacent = |a: f64, b: f64| -> bool {
            if !c.degenerate {
                return true;
            }
            let step = std::f64::consts::TAU / n;
            let gap = (b - a).rem_euclid(std::f64::consts::TAU);
            (gap - step).abs() < 1e-9
        };
        let autonomous = self.family.is_autonomous();
        let mut prev: Option<(f64, ShotClass)> = None;
        for (t, shot) in &results {
            let repeat = match (prev, shot.class) {
                // time translates of one autonomous line
                (Some((pt_, pc)), ShotClass::Converged(_)) => {
                    autonomous && pc == shot.class && (matches!(frame, Frame::Circle) || pt_ * t > 0.0)
                }
                _ => false,
            };
            let returns_home = self.returns_home(c, shot.class);
            prev = Some((*t, shot.class));
            match shot.class {
                ShotClass::Bounded | ShotClass::Converged(_) if repeat || returns_home => {}
                ShotClass::Bounded | ShotClass::Converged(_) => {
                    lines.push(self.finish_line(c, shot.traj.clone(), shot.class, heuristic, 0.0)?);
                }
                _ if keep_shots => shots.push(self.escaping_line(c, shot.clone())),
                _ => {}
            }
        }
        let m = results.len();
        let pairs = if cyclic && m > 1 { m } else { m.saturating_sub(1) };
        for k in 0..pairs {
            let (ta, sa) = &results[k];
            let (tb, sb) = &results[(k + 1) % m];
            let escape = |s: &Shot| matches!(s.class, ShotClass::Up | ShotClass::Down);
            // with the constant line present, the t → 0 limit is that line again
            let across_centre = constant && matches!(frame, Frame::Line(_)) && ta * tb <= 0.0;
            if !(escape(sa) && escape(sb)) || sa.class == sb.class || !adjacent(*ta, *tb) || across_centre {
                continue;
            }
            let tb = if k + 1 == m { tb + std::f64::consts::TAU } else { *tb };
            if let Some(line) = self.bisect(c, frame, (*ta, sa.clone()), (tb, sb.clone()), heuristic)? {
                lines.push(line);
            }
        }
        Ok((lines, shots))
    }
}

/// Whether `c` is critical with the same value for every `h^s`.
pub fn is_stationary(family: &DeformationFamily, c: &CriticalPoint) -> bool {
    let p = c.point();
    let comps = family.components();
    let v0 = comps[0].eval(p);
    comps.iter().all(|h| h.grad(p).norm() < crate::critical::NEWTON_TOL && (h.eval(p) - v0).abs() <= 1e-14 * (1.0 + v0.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSweep {
    pub lines: Vec<FlowLine>,
    /// Escaping shots, only when requested.
    pub shots: Vec<FlowLine>,
    pub s_lo: f64,
    pub s_hi: f64,
}

/// Shooting sweep over every critical point in `report` (critical points of the family's base).
pub fn sweep(
    family: &DeformationFamily,
    report: &SpectrumReport,
    cfg: &FlowConfig,
    keep_shots: bool,
) -> Result<FlowSweep, FlowError> {
    let shooter = Shooter::new(family, *cfg)?;
    let per_point: Vec<Result<(Vec<FlowLine>, Vec<FlowLine>), FlowError>> = report
        .critical_points
        .par_iter()
        .map(|c| shooter.sweep_point(c, keep_shots))
        .collect();
    let mut out = FlowSweep { lines: Vec::new(), shots: Vec::new(), s_lo: shooter.s_lo, s_hi: shooter.s_hi };
    for r in per_point {
        let (lines, shots) = r?;
        out.lines.extend(lines);
        out.shots.extend(shots);
    }
    Ok(out)
}

pub fn find_bounded_flow_lines(
    family: &DeformationFamily,
    report: &SpectrumReport,
    cfg: &FlowConfig,
) -> Result<Vec<FlowLine>, FlowError> {
    Ok(sweep(family, report, cfg, false)?.lines)
}

/// `max spec(q_h) − min spec(q_{h⁺}) + L · max_s ‖∂_s h^s‖_∞`.
pub fn uniform_energy_bound(family: &DeformationFamily, report: &SpectrumReport, terminal: &SpectrumReport) -> f64 {
    let top = report.max_value().unwrap_or(0.0);
    let bottom = terminal.min_value().unwrap_or(0.0);
    top - bottom + family.window_length() * family.max_ds_sup_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Bump, PerturbedQuadratic};

    fn fig2() -> PerturbedQuadratic {
        PerturbedQuadratic::new(vec![
            Bump::new([1.0, 0.0], 0.8, 0.4).unwrap(),
            Bump::new([0.0, 1.0], 0.8, 0.4).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn pure_q_flow_is_explicit() {
        let fam = DeformationFamily::cutoff(&PerturbedQuadratic::zero(), -1.0, 0.0).unwrap();
        let traj = integrate(&fam, pt(0.8, 0.0), 0.0, 5.0, 1e-11).unwrap();
        for (s, u) in traj.samples() {
            assert!((u.x - 0.8 * (-2.0 * s).exp()).abs() < 1e-10);
            assert_eq!(u.y, 0.0);
        }
        let up = integrate(&fam, pt(0.0, 1e-3), 0.0, 3.0, 1e-11).unwrap();
        assert!((up.end().y - 1e-3 * 6f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn energy_of_decaying_line() {
        let fam = DeformationFamily::cutoff(&PerturbedQuadratic::zero(), -1.0, 0.0).unwrap();
        let traj = integrate(&fam, pt(1.0, 0.0), 0.0, 10.0, 1e-12).unwrap();
        let e = energy(&traj, &fam);
        assert!((e - (1.0 - (-40f64).exp())).abs() < 1e-9, "{e}");
    }

    #[test]
    fn unperturbed_has_only_the_constant() {
        let h = PerturbedQuadratic::zero();
        let fam = DeformationFamily::autonomous(&h);
        let rep = find_critical_points(&h, &SearchBox::square(2.0), 16).unwrap();
        let lines = find_bounded_flow_lines(&fam, &rep, &FlowConfig::default()).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].constant);
        assert_eq!(lines[0].start_value, 0.0);
        assert_eq!(lines[0].energy, 0.0);
    }

    #[test]
    fn origin_is_fixed_under_fig2_cutoff() {
        let fam = DeformationFamily::cutoff(&fig2(), -1.0, 0.0).unwrap();
        let coarse = integrate(&fam, Point::zeros(), -13.0, 12.0, 1e-9).unwrap();
        let fine = integrate(&fam, Point::zeros(), -13.0, 12.0, 1e-12).unwrap();
        assert!(coarse.end().norm() < 1e-6 && fine.end().norm() < 1e-6);
    }

    #[test]
    fn fig2_cutoff_lines_satisfy_energy_identity() {
        let h = fig2();
        let fam = DeformationFamily::cutoff(&h, -1.0, 0.0).unwrap();
        let rep = find_critical_points(&h, &SearchBox::square(2.0), 32).unwrap();
        let lines = find_bounded_flow_lines(&fam, &rep, &FlowConfig::default()).unwrap();
        assert!(lines.iter().any(|l| l.constant && l.start_value == 0.0));
        for l in &lines {
            assert!(l.energy_identity_defect() < 1e-6 * (1.0 + l.energy), "{l:?}");
            let a = l.alpha_limit.as_ref().unwrap();
            assert!(a.point()[1] < 0.5 || a.point()[0].abs() > 1e-6, "bounded line from the upper bump");
        }
    }

    #[test]
    fn translation_covariance() {
        let fam = DeformationFamily::cutoff(&fig2(), -1.0, 0.0).unwrap();
        let moved = fam.translated(0.75);
        let u0 = pt(0.9, 0.05);
        let a = integrate(&fam, u0, -2.0, 2.0, 1e-11).unwrap();
        let b = integrate(&moved, u0, -1.25, 2.75, 1e-11).unwrap();
        for s in [-1.5, -0.3, 0.0, 1.0, 2.0] {
            assert!((a.at(s) - b.at(s + 0.75)).norm() < 1e-8);
        }
    }
}
