//! Model functions of the toy problem: the indefinite form `q(x, y) = x² − y²`,
//! its compactly supported perturbations built from polynomial bumps, and
//! radial profiles `f` representing `H_f(z) = f(π|z|²)`.
//!
//! Everything here is evaluated in closed form, including gradients and
//! Hessians, so the critical-point search and the flow integrator never rely
//! on finite differences.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

pub type Point = Vector2<f64>;

#[inline]
pub fn pt(x: f64, y: f64) -> Point {
    Vector2::new(x, y)
}

/// `amplitude · (1 − (|p − center| / radius)²)³` inside the disk, zero outside.
///
/// The bump is C² everywhere: the cubed factor kills value, gradient and
/// Hessian on the boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub amplitude: f64,
    pub radius: f64,
}

impl Bump {
    pub fn new(center: [f64; 2], amplitude: f64, radius: f64) -> Result<Self, ModelError> {
        let bump = Self { center, amplitude, radius };
        bump.validate()?;
        Ok(bump)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(ModelError::NonPositiveRadius(self.radius));
        }
        if !(self.amplitude.is_finite() && self.center.iter().all(|c| c.is_finite())) {
            return Err(ModelError::NonFinite("bump"));
        }
        Ok(())
    }

    #[inline]
    pub fn center_point(&self) -> Point {
        pt(self.center[0], self.center[1])
    }

    /// Whether `p` lies in the closed support disk.
    pub fn covers(&self, p: Point) -> bool {
        (p - self.center_point()).norm() <= self.radius
    }

    #[inline]
    fn offset(&self, p: Point) -> Option<(Point, f64)> {
        let d = p - self.center_point();
        let r2 = d.norm_squared() / (self.radius * self.radius);
        if r2 >= 1.0 {
            None
        } else {
            Some((d, 1.0 - r2))
        }
    }

    pub fn value(&self, p: Point) -> f64 {
        match self.offset(p) {
            Some((_, w)) => self.amplitude * w * w * w,
            None => 0.0,
        }
    }

    pub fn grad(&self, p: Point) -> Point {
        match self.offset(p) {
            Some((d, w)) => d * (-6.0 * self.amplitude * w * w / (self.radius * self.radius)),
            None => Point::zeros(),
        }
    }

    pub fn hessian(&self, p: Point) -> Matrix2<f64> {
        match self.offset(p) {
            Some((d, w)) => {
                let r2 = self.radius * self.radius;
                let outer = d * d.transpose();
                outer * (24.0 * self.amplitude * w / (r2 * r2))
                    - Matrix2::identity() * (6.0 * self.amplitude * w * w / r2)
            }
            None => Matrix2::zeros(),
        }
    }
}

/// `q_h(x, y) = x² − y² + offset + Σ bumps`.
///
/// The constant `offset` carries shifts `h ↦ h + c`; it has no effect on the
/// gradient field and is zero for every fixture.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PerturbedQuadratic {
    #[serde(default)]
    pub bumps: Vec<Bump>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub offset: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl PerturbedQuadratic {
    /// The unperturbed form `q`.
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(bumps: Vec<Bump>) -> Result<Self, ModelError> {
        let model = Self { bumps, offset: 0.0 };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for b in &self.bumps {
            b.validate()?;
        }
        if !self.offset.is_finite() {
            return Err(ModelError::NonFinite("offset"));
        }
        Ok(())
    }

    pub fn is_unperturbed(&self) -> bool {
        self.bumps.is_empty() && self.offset == 0.0
    }

    /// The perturbation `h = q_h − q` at `p`.
    pub fn perturbation(&self, p: Point) -> f64 {
        self.offset + self.bumps.iter().map(|b| b.value(p)).sum::<f64>()
    }

    pub fn perturbation_grad(&self, p: Point) -> Point {
        self.bumps.iter().fold(Point::zeros(), |acc, b| acc + b.grad(p))
    }

    pub fn perturbation_hessian(&self, p: Point) -> Matrix2<f64> {
        self.bumps.iter().fold(Matrix2::zeros(), |acc, b| acc + b.hessian(p))
    }

    pub fn eval(&self, p: Point) -> f64 {
        p.x * p.x - p.y * p.y + self.perturbation(p)
    }

    pub fn grad(&self, p: Point) -> Point {
        pt(2.0 * p.x, -2.0 * p.y) + self.perturbation_grad(p)
    }

    pub fn hessian(&self, p: Point) -> Matrix2<f64> {
        Matrix2::new(2.0, 0.0, 0.0, -2.0) + self.perturbation_hessian(p)
    }

    /// Radius of a disk around the origin containing every bump support.
    pub fn support_radius(&self) -> f64 {
        self.bumps
            .iter()
            .map(|b| b.center_point().norm() + b.radius)
            .fold(0.0, f64::max)
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { bumps: self.bumps.clone(), offset: self.offset + c }
    }

    /// Conformal rescaling `h_τ(p) = e^τ h(e^{−τ/2} p)`, so that
    /// `q_{h_τ}(p) = e^τ q_h(e^{−τ/2} p)`.
    pub fn scaled(&self, tau: f64) -> Self {
        let lin = (0.5 * tau).exp();
        let amp = tau.exp();
        Self {
            bumps: self
                .bumps
                .iter()
                .map(|b| Bump {
                    center: [b.center[0] * lin, b.center[1] * lin],
                    amplitude: b.amplitude * amp,
                    radius: b.radius * lin,
                })
                .collect(),
            offset: self.offset * amp,
        }
    }

    /// `h ∘ ψ` for the reflection `ψ(x, y) = (sx·x, sy·y)` with `sx, sy = ±1`.
    pub fn reflected(&self, sx: f64, sy: f64) -> Self {
        Self {
            bumps: self
                .bumps
                .iter()
                .map(|b| Bump { center: [sx * b.center[0], sy * b.center[1]], ..*b })
                .collect(),
            offset: self.offset,
        }
    }

    /// `k · h`, amplitudes and offset multiplied by `k`.
    pub fn times(&self, k: f64) -> Self {
        Self {
            bumps: self
                .bumps
                .iter()
                .map(|b| Bump { amplitude: k * b.amplitude, ..*b })
                .collect(),
            offset: k * self.offset,
        }
    }

    pub fn with_bump(&self, bump: Bump) -> Self {
        let mut out = self.clone();
        out.bumps.push(bump);
        out
    }

    pub fn without_bump(&self, index: usize) -> Self {
        let mut out = self.clone();
        if index < out.bumps.len() {
            out.bumps.remove(index);
        }
        out
    }

    /// The perturbation `self − other` as a bump sum (the `q` parts cancel).
    pub fn difference(&self, other: &Self) -> Self {
        let mut bumps = self.bumps.clone();
        bumps.extend(other.bumps.iter().map(|b| Bump { amplitude: -b.amplitude, ..*b }));
        Self { bumps, offset: self.offset - other.offset }
    }

    /// `sup_p |h(p)|` of the perturbation part.
    ///
    /// Dense sampling over the bump supports followed by Newton polishing of
    /// the best samples; the result is a lower estimate that is tight to
    /// roughly 1e-12 for sums of a handful of bumps.
    pub fn perturbation_sup_norm(&self) -> f64 {
        let mut best = self.offset.abs();
        if self.bumps.is_empty() {
            return best;
        }
        let min_r = self.bumps.iter().map(|b| b.radius).fold(f64::INFINITY, f64::min);
        let (mut lo, mut hi) = (pt(f64::INFINITY, f64::INFINITY), pt(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for b in &self.bumps {
            let c = b.center_point();
            lo = lo.inf(&(c - pt(b.radius, b.radius)));
            hi = hi.sup(&(c + pt(b.radius, b.radius)));
        }
        let step = min_r / 24.0;
        let nx = (((hi.x - lo.x) / step).ceil() as usize).clamp(2, 2000);
        let ny = (((hi.y - lo.y) / step).ceil() as usize).clamp(2, 2000);
        let mut samples: Vec<(f64, Point)> = Vec::with_capacity(nx * ny);
        for i in 0..=nx {
            for j in 0..=ny {
                let p = pt(
                    lo.x + (hi.x - lo.x) * i as f64 / nx as f64,
                    lo.y + (hi.y - lo.y) * j as f64 / ny as f64,
                );
                samples.push((self.perturbation(p).abs(), p));
            }
        }
        samples.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(v, p0) in samples.iter().take(16) {
            best = best.max(v);
            let sign = self.perturbation(p0).signum();
            let mut p = p0;
            for _ in 0..30 {
                let g = self.perturbation_grad(p) * sign;
                let h = self.perturbation_hessian(p) * sign;
                let step = match h.try_inverse() {
                    Some(inv) if h.determinant() > 0.0 && h[(0, 0)] < 0.0 => -(inv * g),
                    _ => g * (0.1 * min_r / (1.0 + g.norm())),
                };
                let cand = p + step;
                if self.perturbation(cand) * sign >= self.perturbation(p) * sign {
                    p = cand;
                } else {
                    break;
                }
                if step.norm() < 1e-15 {
                    break;
                }
            }
            best = best.max(self.perturbation(p).abs());
        }
        best
    }
}

/// Cubic Hermite profile `f: [0, ∞) → ℝ`, knots `0 = s_0 < … < s_k = s_max`,
/// extended by zero beyond `s_max`.
///
/// Serialized as `{"knots": [...], "values": [...], "derivs": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileData", into = "ProfileData")]
pub struct RadialProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    // (c0, c1, c2, c3) in the local variable t = s − s_i
    coeffs: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProfileData {
    knots: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl TryFrom<ProfileData> for RadialProfile {
    type Error = ModelError;
    fn try_from(d: ProfileData) -> Result<Self, Self::Error> {
        RadialProfile::from_hermite(d.knots, d.values, d.derivs)
    }
}

impl From<RadialProfile> for ProfileData {
    fn from(p: RadialProfile) -> Self {
        ProfileData { knots: p.knots, values: p.values, derivs: p.derivs }
    }
}

impl RadialProfile {
    pub fn from_hermite(knots: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self, ModelError> {
        if knots.len() < 2 || values.len() != knots.len() || derivs.len() != knots.len() {
            return Err(ModelError::BadProfile("knots, values and derivs must have equal length ≥ 2".into()));
        }
        if knots[0] != 0.0 {
            return Err(ModelError::BadProfile("first knot must be 0".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ModelError::BadProfile("knots must be strictly increasing".into()));
        }
        if knots.iter().chain(&values).chain(&derivs).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("profile"));
        }
        let coeffs = (0..knots.len() - 1)
            .map(|i| {
                let h = knots[i + 1] - knots[i];
                let (v0, v1, d0, d1) = (values[i], values[i + 1], derivs[i], derivs[i + 1]);
                let slope = (v1 - v0) / h;
                [v0, d0, (3.0 * slope - 2.0 * d0 - d1) / h, (d0 + d1 - 2.0 * slope) / (h * h)]
            })
            .collect();
        Ok(Self { knots, values, derivs, coeffs })
    }

    /// The zero profile supported on `[0, s_max]`.
    pub fn zero(s_max: f64) -> Self {
        Self::from_hermite(vec![0.0, s_max], vec![0.0; 2], vec![0.0; 2]).expect("valid zero profile")
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn s_max(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn pieces(&self) -> usize {
        self.coeffs.len()
    }

    /// Interval `[s_i, s_{i+1}]` and local coefficients of piece `i`.
    pub fn piece(&self, i: usize) -> (f64, f64, [f64; 4]) {
        (self.knots[i], self.knots[i + 1], self.coeffs[i])
    }

    fn locate(&self, s: f64) -> Option<usize> {
        if s > self.s_max() {
            return None;
        }
        let i = self.knots.partition_point(|&k| k <= s);
        Some(i.saturating_sub(1).min(self.coeffs.len() - 1))
    }

    /// `(f(s), f'(s))`; pieces are closed on the right at `s_max`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let (f, d, _) = self.eval2(s);
        (f, d)
    }

    /// `(f, f', f'')` at `s`.
    pub fn eval2(&self, s: f64) -> (f64, f64, f64) {
        match self.locate(s.max(0.0)) {
            None => (0.0, 0.0, 0.0),
            Some(i) => {
                let [c0, c1, c2, c3] = self.coeffs[i];
                let t = s.max(0.0) - self.knots[i];
                if t == 0.0 || s == self.knots[i + 1] {
                    // knots return the stored Hermite data exactly
                    let j = if t == 0.0 { i } else { i + 1 };
                    return (self.values[j], self.derivs[j], 2.0 * c2 + 6.0 * c3 * t);
                }
                (
                    c0 + t * (c1 + t * (c2 + t * c3)),
                    c1 + t * (2.0 * c2 + t * 3.0 * c3),
                    2.0 * c2 + 6.0 * c3 * t,
                )
            }
        }
    }

    /// Largest jump of `f''` across an interior knot, together with the jump of
    /// `(f, f', f'')` against the zero extension at `s_max`. Zero for a C²
    /// compactly supported profile.
    pub fn smoothness_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 1..self.coeffs.len() {
            let h = self.knots[i] - self.knots[i - 1];
            let [_, _, c2, c3] = self.coeffs[i - 1];
            let left = 2.0 * c2 + 6.0 * c3 * h;
            let right = 2.0 * self.coeffs[i][2];
            defect = defect.max((left - right).abs());
        }
        let n = self.coeffs.len() - 1;
        let h = self.knots[n + 1] - self.knots[n];
        let [_, _, c2, c3] = self.coeffs[n];
        defect
            .max(self.values[n + 1].abs())
            .max(self.derivs[n + 1].abs())
            .max((2.0 * c2 + 6.0 * c3 * h).abs())
    }

    pub fn is_c2(&self, tol: f64) -> bool {
        self.smoothness_defect() <= tol
    }

    /// `e^τ f(e^{−τ} s)`.
    pub fn rescaled(&self, tau: f64) -> Self {
        let k = tau.exp();
        Self::from_hermite(
            self.knots.iter().map(|s| s * k).collect(),
            self.values.iter().map(|v| v * k).collect(),
            self.derivs.clone(),
        )
        .expect("rescaling preserves validity")
    }

    /// `f(s / λ)` for `λ > 0`.
    pub fn stretched(&self, lambda: f64) -> Self {
        Self::from_hermite(
            self.knots.iter().map(|s| s * lambda).collect(),
            self.values.clone(),
            self.derivs.iter().map(|d| d / lambda).collect(),
        )
        .expect("stretching preserves validity")
    }

    /// `k · f`.
    pub fn times(&self, k: f64) -> Self {
        Self::from_hermite(
            self.knots.clone(),
            self.values.iter().map(|v| v * k).collect(),
            self.derivs.iter().map(|d| d * k).collect(),
        )
        .expect("scaling preserves validity")
    }

    /// Roots of `f'(s) = target` on piece `i`, as global `s` values.
    pub(crate) fn derivative_roots(&self, i: usize, target: f64) -> Vec<f64> {
        let (s0, s1, [_, c1, c2, c3]) = self.piece(i);
        let h = s1 - s0;
        // f'(t) − target = a t² + b t + c on [0, h]
        let (a, b, c) = (3.0 * c3, 2.0 * c2, c1 - target);
        let scale = 1.0 + target.abs() + c1.abs() + b.abs() * h + a.abs() * h * h;
        let resid = |t: f64| a * t * t + b * t + c;
        let mut roots: Vec<f64> = Vec::new();
        if a.abs() * h * h <= 1e-14 * scale && b.abs() * h <= 1e-14 * scale {
            if c.abs() <= 1e-12 * scale {
                // f' ≡ target on the whole piece
                roots.push(0.0);
                roots.push(h);
            }
        } else if a.abs() * h * h <= 1e-14 * scale {
            roots.push(-c / b);
        } else {
            let disc = b * b - 4.0 * a * c;
            let vertex = -b / (2.0 * a);
            if resid(vertex).abs() <= 1e-12 * scale {
                // a tangency: the two computed roots straddle it at √ε distance
                roots.push(vertex);
            } else if disc >= 0.0 {
                let sq = disc.sqrt();
                let qq = -0.5 * (b + b.signum() * sq);
                if qq != 0.0 {
                    roots.push(qq / a);
                    roots.push(c / qq);
                } else {
                    roots.push(vertex);
                }
            }
        }
        for end in [0.0, h] {
            if resid(end).abs() <= 1e-12 * scale {
                roots.push(end);
            }
        }
        let mut out: Vec<f64> = roots
            .into_iter()
            .filter(|t| t.is_finite() && *t >= -1e-12 * h && *t <= h * (1.0 + 1e-12))
            .map(|t| {
                // Newton polish; tangential roots have a vanishing slope and stay put
                let mut t = t.clamp(0.0, h);
                for _ in 0..3 {
                    let slope = 2.0 * a * t + b;
                    if slope.abs() < 1e-9 {
                        break;
                    }
                    let next = (t - resid(t) / slope).clamp(0.0, h);
                    if resid(next).abs() < resid(t).abs() {
                        t = next;
                    } else {
                        break;
                    }
                }
                s0 + t
            })
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (1.0 + s1));
        out
    }

    /// Range `[min f', max f']` over piece `i`.
    pub(crate) fn derivative_range(&self, i: usize) -> (f64, f64) {
        let (s0, s1, [_, c1, c2, c3]) = self.piece(i);
        let h = s1 - s0;
        let d = |t: f64| c1 + t * (2.0 * c2 + t * 3.0 * c3);
        let mut lo = d(0.0).min(d(h));
        let mut hi = d(0.0).max(d(h));
        if c3 != 0.0 {
            let tv = -c2 / (3.0 * c3);
            if tv > 0.0 && tv < h {
                lo = lo.min(d(tv));
                hi = hi.max(d(tv));
            }
        }
        (lo, hi)
    }

    /// `(min f, max f)` over `[0, ∞)`, the zero extension included.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo: f64 = 0.0;
        let mut hi: f64 = 0.0;
        for i in 0..self.pieces() {
            let (s0, s1, _) = self.piece(i);
            let mut cands = vec![s0, s1];
            cands.extend(self.derivative_roots(i, 0.0));
            for s in cands {
                let v = self.eval2_piece(i, s);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    fn eval2_piece(&self, i: usize, s: f64) -> f64 {
        let [c0, c1, c2, c3] = self.coeffs[i];
        let t = s - self.knots[i];
        c0 + t * (c1 + t * (c2 + t * c3))
    }

    /// `sup_s |self(s) − other(s)|`, exact up to root-finding round-off.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let mut knots: Vec<f64> = self.knots.iter().chain(other.knots.iter()).copied().collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mut best: f64 = 0.0;
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            // the difference is a cubic on [a, b]; sample densely, then polish with golden section
            let n = 64;
            let diff = |s: f64| (self.eval(s).0 - other.eval(s).0).abs();
            let mut arg = a;
            for j in 0..=n {
                let s = a + (b - a) * j as f64 / n as f64;
                if diff(s) > diff(arg) {
                    arg = s;
                }
            }
            let h = (b - a) / n as f64;
            let (mut lo, mut hi) = ((arg - h).max(a), (arg + h).min(b));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                if diff(m1) > diff(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            best = best.max(diff(arg)).max(diff(0.5 * (lo + hi))).max(diff(a)).max(diff(b));
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> PerturbedQuadratic {
        PerturbedQuadratic::new(vec![
            Bump::new([1.0, 0.0], 0.8, 0.4).unwrap(),
            Bump::new([0.0, 1.0], 0.8, 0.4).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let q = PerturbedQuadratic::zero();
        assert_eq!(q.eval(pt(0.0, 0.0)), 0.0);
        assert_eq!(q.eval(pt(1.0, 2.0)), -3.0);
        let one = PerturbedQuadratic::new(vec![Bump::new([1.0, 0.0], 0.2, 0.5).unwrap()]).unwrap();
        assert!((one.eval(pt(1.0, 0.0)) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn grad_examples() {
        let q = PerturbedQuadratic::zero();
        assert_eq!(q.grad(pt(1.0, 2.0)), pt(2.0, -4.0));
        assert_eq!(q.grad(pt(0.0, 0.0)), pt(0.0, 0.0));
        assert_eq!(fig2().grad(pt(1.0, 0.0)), pt(2.0, 0.0));
    }

    #[test]
    fn bump_vanishes_on_boundary_and_outside() {
        let b = Bump::new([0.5, -0.25], 1.3, 0.7).unwrap();
        let edge = b.center_point() + pt(0.7, 0.0);
        assert_eq!(b.value(edge), 0.0);
        assert_eq!(b.grad(edge), Point::zeros());
        assert_eq!(b.hessian(edge), Matrix2::zeros());
        assert_eq!(b.value(pt(3.0, 3.0)), 0.0);
        assert_eq!(b.value(b.center_point()), 1.3);
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(Bump::new([0.0, 0.0], 1.0, 0.0).is_err());
        assert!(Bump::new([0.0, 0.0], 1.0, -1.0).is_err());
        assert!(Bump::new([0.0, f64::NAN], 1.0, 1.0).is_err());
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let h = fig2();
        let p = pt(0.93, 0.12);
        let e = 1e-6;
        let hx = (h.grad(p + pt(e, 0.0)) - h.grad(p - pt(e, 0.0))) / (2.0 * e);
        let hy = (h.grad(p + pt(0.0, e)) - h.grad(p - pt(0.0, e))) / (2.0 * e);
        let hess = h.hessian(p);
        assert!((hess.column(0) - hx).norm() < 1e-7);
        assert!((hess.column(1) - hy).norm() < 1e-7);
    }

    #[test]
    fn scaling_is_conformal() {
        let h = fig2().shifted(0.3);
        let tau = 0.5f64.ln();
        let s = h.scaled(tau);
        for p in [pt(0.3, 0.2), pt(0.7, 0.05), pt(-0.1, 0.6)] {
            let lhs = s.eval(p);
            let rhs = tau.exp() * h.eval(p * (-0.5 * tau).exp());
            assert!((lhs - rhs).abs() < 1e-14, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn sup_norm_of_single_bump_is_amplitude() {
        let h = PerturbedQuadratic::new(vec![Bump::new([0.2, 0.1], -0.37, 0.6).unwrap()]).unwrap();
        assert!((h.perturbation_sup_norm() - 0.37).abs() < 1e-12);
        let d = fig2().difference(&fig2());
        assert!(d.perturbation_sup_norm() < 1e-15);
    }

    #[test]
    fn profile_single_piece_eval() {
        // f(s) = −1 + s²/16 on [0, 4]
        let f = RadialProfile::from_hermite(vec![0.0, 4.0], vec![-1.0, 0.0], vec![0.0, 0.5]).unwrap();
        let (v, d) = f.eval(4.0);
        assert!(v.abs() < 1e-15 && (d - 0.5).abs() < 1e-15);
        let (v, d) = f.eval(2.0);
        assert!((v + 0.75).abs() < 1e-15 && (d - 0.25).abs() < 1e-15);
        assert_eq!(f.eval(4.0 + 1e-12), (0.0, 0.0));
        assert_eq!(RadialProfile::zero(3.0).eval(1.0), (0.0, 0.0));
    }

    #[test]
    fn profile_validation() {
        assert!(RadialProfile::from_hermite(vec![0.5, 1.0], vec![0.0; 2], vec![0.0; 2]).is_err());
        assert!(RadialProfile::from_hermite(vec![0.0, 1.0, 1.0], vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(RadialProfile::from_hermite(vec![0.0, 1.0], vec![0.0; 3], vec![0.0; 2]).is_err());
        let json = r#"{"knots":[0,1,3,4],"values":[-1,-1,0,0],"derivs":[0,0,0,0]}"#;
        let f: RadialProfile = serde_json::from_str(json).unwrap();
        assert_eq!(f.pieces(), 3);
        let bad = r#"{"knots":[0,2,1],"values":[0,0,0],"derivs":[0,0,0]}"#;
        assert!(serde_json::from_str::<RadialProfile>(bad).is_err());
    }

    #[test]
    fn perturbed_quadratic_json_schema() {
        let json = r#"{"bumps":[{"center":[1.0,0.0],"amplitude":0.2,"radius":0.5}]}"#;
        let h: PerturbedQuadratic = serde_json::from_str(json).unwrap();
        assert_eq!(h.bumps.len(), 1);
        assert_eq!(serde_json::to_string(&h).unwrap(), json);
    }
}
