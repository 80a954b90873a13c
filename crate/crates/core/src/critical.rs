//! Critical points of `q_h` inside a search box.
//!
//! Damped Newton from a regular seed grid, with a Levenberg–Marquardt fallback
//! where the Hessian is nearly singular and a fold-refinement pass that lands
//! exactly on degenerate critical points.

use nalgebra::{Matrix2, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SpectrumError;
use crate::field::{pt, Point, PerturbedQuadratic};

pub const NEWTON_TOL: f64 = 1e-10;
pub const DEGENERACY_TOL: f64 = 1e-8;
pub const LOCATION_DEDUPE_TOL: f64 = 1e-7;
pub const SPEC_DEDUPE_TOL: f64 = 1e-9;

const MAX_ITER: usize = 200;
const FOLD_TRIGGER: f64 = 1e-3;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl SearchBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn square(half: f64) -> Self {
        Self::new(-half, -half, half, half)
    }

    /// Smallest square box centred at the origin with margin `pad` around every bump.
    pub fn covering(h: &PerturbedQuadratic, pad: f64) -> Self {
        Self::square((h.support_radius() + pad).max(1.0))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn diameter(&self) -> f64 {
        (self.x1 - self.x0).hypot(self.y1 - self.y0)
    }

    /// Parses `"x0,y0,x1,y1"`.
    pub fn parse(s: &str) -> Option<Self> {
        let v: Vec<f64> = s.split(',').map(|t| t.trim().parse().ok()).collect::<Option<_>>()?;
        match v[..] {
            [x0, y0, x1, y1] if x0 < x1 && y0 < y1 => Some(Self::new(x0, y0, x1, y1)),
            _ => None,
        }
    }

    fn covers_model(&self, h: &PerturbedQuadratic) -> bool {
        self.contains(Point::zeros())
            && h.bumps.iter().all(|b| {
                let c = b.center_point();
                c.x - b.radius >= self.x0
                    && c.x + b.radius <= self.x1
                    && c.y - b.radius >= self.y0
                    && c.y + b.radius <= self.y1
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: [f64; 2],
    pub value: f64,
    /// Number of negative Hessian eigenvalues.
    pub morse_index: u8,
    pub degenerate: bool,
    /// Ascending.
    pub hessian_eigenvalues: [f64; 2],
}

impl CriticalPoint {
    pub fn point(&self) -> Point {
        pt(self.location[0], self.location[1])
    }

    /// Builds the record at `p`, classifying by the Hessian spectrum.
    pub fn at(h: &PerturbedQuadratic, p: Point) -> Self {
        let (eig, _) = sorted_eigen(&h.hessian(p));
        let degenerate = eig.iter().any(|e| e.abs() <= DEGENERACY_TOL);
        Self {
            location: [p.x, p.y],
            value: h.eval(p),
            morse_index: eig.iter().filter(|e| **e < 0.0).count() as u8,
            degenerate,
            hessian_eigenvalues: eig,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub critical_points: Vec<CriticalPoint>,
    pub values: Vec<f64>,
    /// Seeds whose Newton run did not converge.
    pub nonconverged_seeds: usize,
}

impl SpectrumReport {
    pub fn from_points(critical_points: Vec<CriticalPoint>, nonconverged_seeds: usize) -> Self {
        let values = dedupe_values(critical_points.iter().map(|c| c.value).collect());
        Self { critical_points, values, nonconverged_seeds }
    }

    pub fn min_value(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// The critical point nearest to `p`.
    pub fn nearest(&self, p: Point) -> Option<&CriticalPoint> {
        self.critical_points
            .iter()
            .min_by(|a, b| (a.point() - p).norm().total_cmp(&(b.point() - p).norm()))
    }
}

/// Sorts and merges values closer than [`SPEC_DEDUPE_TOL`], keeping the lowest of a cluster.
pub fn dedupe_values(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for v in values {
        match out.last() {
            Some(&last) if (v - last).abs() <= SPEC_DEDUPE_TOL => {}
            _ => out.push(v),
        }
    }
    out
}

/// Eigenvalues in ascending order with their unit eigenvectors as columns.
pub fn sorted_eigen(m: &Matrix2<f64>) -> ([f64; 2], Matrix2<f64>) {
    let sym = SymmetricEigen::new(0.5 * (m + m.transpose()));
    let (a, b) = (sym.eigenvalues[0], sym.eigenvalues[1]);
    if a <= b {
        ([a, b], sym.eigenvectors)
    } else {
        let v = &sym.eigenvectors;
        ([b, a], Matrix2::from_columns(&[v.column(1).clone_owned(), v.column(0).clone_owned()]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NewtonOutcome {
    Converged(Point),
    NonConvergence(Point),
}

/// Damped Newton on `∇q_h = 0` with Armijo backtracking on `‖∇q_h‖²`.
pub fn newton(h: &PerturbedQuadratic, seed: Point, escape_radius: f64) -> NewtonOutcome {
    let phi = |p: Point| h.grad(p).norm_squared();
    let mut p = seed;
    let mut mu = 1e-6;
    for _ in 0..MAX_ITER {
        let g = h.grad(p);
        if g.norm() < NEWTON_TOL {
            return NewtonOutcome::Converged(polish(h, p));
        }
        if !(p.norm() < escape_radius) {
            return NewtonOutcome::NonConvergence(p);
        }
        let hess = h.hessian(p);
        let scale = 1.0 + hess.norm();
        let newton_dir = if hess.determinant().abs() > 1e-12 * scale * scale {
            hess.lu().solve(&(-g))
        } else {
            None
        };
        let f0 = g.norm_squared();
        let mut accepted = false;
        if let Some(d) = newton_dir {
            let mut t = 1.0;
            for _ in 0..40 {
                let cand = p + d * t;
                if phi(cand) <= f0 * (1.0 - 2e-4 * t) {
                    p = cand;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
        }
        if !accepted {
            // Levenberg–Marquardt on the same merit function
            let jt = hess.transpose();
            for _ in 0..40 {
                let sys = jt * hess + Matrix2::identity() * (mu * scale * scale);
                let Some(d) = sys.lu().solve(&(-(jt * g))) else {
                    mu *= 10.0;
                    continue;
                };
                let cand = p + d;
                if phi(cand) < f0 {
                    p = cand;
                    mu = (mu * 0.1).max(1e-12);
                    accepted = true;
                    break;
                }
                mu *= 10.0;
            }
        }
        if !accepted {
            return NewtonOutcome::NonConvergence(p);
        }
    }
    if h.grad(p).norm() < NEWTON_TOL {
        NewtonOutcome::Converged(polish(h, p))
    } else {
        NewtonOutcome::NonConvergence(p)
    }
}

fn polish(h: &PerturbedQuadratic, mut p: Point) -> Point {
    for _ in 0..3 {
        let g = h.grad(p);
        let Some(d) = h.hessian(p).lu().solve(&(-g)) else { break };
        let cand = p + d;
        if h.grad(cand).norm() <= g.norm() {
            p = cand;
        } else {
            break;
        }
    }
    if h.grad(p).norm() < FOLD_TRIGGER.min(1.0) {
        let (eig, _) = sorted_eigen(&h.hessian(p));
        if eig[0].abs().min(eig[1].abs()) < FOLD_TRIGGER {
            if let Some(z) = refine_fold(h, p) {
                return z;
            }
        }
    }
    p
}

/// Newton on `(∇q_h · w, det Hess q_h) = 0`, where `w` is the stiff eigendirection.
///
/// A degenerate critical point solves this square system with a regular
/// Jacobian, so the iteration converges quadratically where plain Newton on
/// the gradient only halves the error each step.
fn refine_fold(h: &PerturbedQuadratic, p0: Point) -> Option<Point> {
    let (eig, vecs) = sorted_eigen(&h.hessian(p0));
    let w: Point = if eig[0].abs() >= eig[1].abs() { vecs.column(0).into() } else { vecs.column(1).into() };
    let f = |p: Point| pt(h.grad(p).dot(&w), h.hessian(p).determinant());
    let mut p = p0;
    let e = 1e-7;
    for _ in 0..30 {
        let fp = f(p);
        if fp.norm() < 1e-15 {
            break;
        }
        let cx = (f(p + pt(e, 0.0)) - f(p - pt(e, 0.0))) / (2.0 * e);
        let cy = (f(p + pt(0.0, e)) - f(p - pt(0.0, e))) / (2.0 * e);
        let jac = Matrix2::from_columns(&[cx, cy]);
        let d = jac.lu().solve(&(-fp))?;
        p += d;
        if d.norm() < 1e-16 * (1.0 + p.norm()) {
            break;
        }
    }
    let before = sorted_eigen(&h.hessian(p0)).0;
    let after = sorted_eigen(&h.hessian(p)).0;
    let min_abs = |e: [f64; 2]| e[0].abs().min(e[1].abs());
    let ok = p.iter().all(|c| c.is_finite())
        && h.grad(p).norm() < NEWTON_TOL
        && (p - p0).norm() < FOLD_TRIGGER
        && min_abs(after) <= min_abs(before);
    ok.then_some(p)
}

/// Every critical point reachable by Newton from a `grid_n × grid_n` cell-centred
/// seed grid on `bx`, plus an explicit seed at the origin.
pub fn find_critical_points(
    h: &PerturbedQuadratic,
    bx: &SearchBox,
    grid_n: usize,
) -> Result<SpectrumReport, SpectrumError> {
    if grid_n < 16 {
        return Err(SpectrumError::GridTooCoarse(grid_n));
    }
    if !bx.covers_model(h) {
        return Err(SpectrumError::BoxTooSmall);
    }
    let mut seeds = Vec::with_capacity(grid_n * grid_n + 1);
    seeds.push(Point::zeros());
    let (dx, dy) = ((bx.x1 - bx.x0) / grid_n as f64, (bx.y1 - bx.y0) / grid_n as f64);
    for i in 0..grid_n {
        for j in 0..grid_n {
            seeds.push(pt(bx.x0 + (i as f64 + 0.5) * dx, bx.y0 + (j as f64 + 0.5) * dy));
        }
    }
    let escape = 10.0 * bx.diameter();
    let outcomes: Vec<NewtonOutcome> = seeds.par_iter().map(|s| newton(h, *s, escape)).collect();
    let mut found: Vec<Point> = Vec::new();
    let mut failures = 0;
    for o in outcomes {
        match o {
            NewtonOutcome::Converged(p) => found.push(p),
            NewtonOutcome::NonConvergence(_) => failures += 1,
        }
    }
    found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut kept: Vec<Point> = Vec::new();
    for p in found {
        if !kept.iter().any(|k| (k - p).norm() <= LOCATION_DEDUPE_TOL) {
            kept.push(p);
        }
    }
    let points = kept.into_iter().map(|p| CriticalPoint::at(h, p)).collect();
    Ok(SpectrumReport::from_points(points, failures))
}

pub fn spectrum(h: &PerturbedQuadratic, bx: &SearchBox, grid_n: usize) -> Result<Vec<f64>, SpectrumError> {
    Ok(find_critical_points(h, bx, grid_n)?.values)
}

/// `min spec`, the selector that turns out to be neither continuous nor monotone.
pub fn naive_min_selector(spectrum: &[f64]) -> Result<f64, SpectrumError> {
    spectrum.iter().copied().min_by(f64::total_cmp).ok_or(SpectrumError::EmptySpectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Bump;

    #[test]
    fn unperturbed_saddle() {
        let rep = find_critical_points(&PerturbedQuadratic::zero(), &SearchBox::square(3.0), 16).unwrap();
        assert_eq!(rep.critical_points.len(), 1);
        let c = &rep.critical_points[0];
        assert_eq!(c.location, [0.0, 0.0]);
        assert_eq!(c.value, 0.0);
        assert_eq!(c.morse_index, 1);
        assert!(!c.degenerate);
        assert_eq!(rep.values, vec![0.0]);
    }

    #[test]
    fn centred_negative_bump_keeps_origin() {
        let h = PerturbedQuadratic::new(vec![Bump::new([0.0, 0.0], -0.3, 0.5).unwrap()]).unwrap();
        let rep = find_critical_points(&h, &SearchBox::square(2.0), 32).unwrap();
        let origin = rep.nearest(Point::zeros()).unwrap();
        assert!(origin.point().norm() < 1e-12);
        assert!((origin.value + 0.3).abs() < 1e-15);
        assert!(rep.values.iter().any(|v| (v + 0.3).abs() < 1e-12));
    }

    #[test]
    fn preconditions() {
        let h = PerturbedQuadratic::new(vec![Bump::new([2.5, 0.0], 1.0, 1.0).unwrap()]).unwrap();
        assert_eq!(find_critical_points(&h, &SearchBox::square(3.0), 16), Err(SpectrumError::BoxTooSmall));
        assert_eq!(
            find_critical_points(&PerturbedQuadratic::zero(), &SearchBox::square(3.0), 8),
            Err(SpectrumError::GridTooCoarse(8))
        );
    }

    #[test]
    fn naive_selector() {
        assert_eq!(naive_min_selector(&[0.0]), Ok(0.0));
        assert_eq!(naive_min_selector(&[-0.3, 0.0, 0.1]), Ok(-0.3));
        assert_eq!(naive_min_selector(&[]), Err(SpectrumError::EmptySpectrum));
    }

    #[test]
    fn value_dedupe() {
        assert_eq!(dedupe_values(vec![1.0, 0.0, 1.0 + 1e-10, -2.0]), vec![-2.0, 0.0, 1.0]);
    }

    #[test]
    fn box_parse() {
        assert_eq!(SearchBox::parse("-3,-3,3,3"), Some(SearchBox::square(3.0)));
        assert_eq!(SearchBox::parse("1,0,0,1"), None);
        assert_eq!(SearchBox::parse("1,2"), None);
    }
}
