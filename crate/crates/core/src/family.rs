//! Deformation families `s ↦ h^s`.
//!
//! Every schedule is a finite combination `h^s = Σ w_i(s) h_i` of fixed
//! perturbations with weights summing to one, so `q_{h^s}` and `∂_s h^s` are
//! evaluated without materializing `h^s`.

use serde::{Deserialize, Serialize};

use crate::error::FlowError;
use crate::field::{Point, PerturbedQuadratic};

/// `6t⁵ − 15t⁴ + 10t³` clamped to `[0, 1]`: monotone, C² at both ends.
#[inline]
pub fn bridge(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

#[inline]
pub fn bridge_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let u = t * (1.0 - t);
        30.0 * u * u
    }
}

/// `max φ'`, attained at `t = 1/2`.
pub const BRIDGE_MAX_SLOPE: f64 = 1.875;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FamilyKind {
    Cutoff,
    Interpolate,
    Composite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "snake_case")]
pub enum Schedule {
    /// Bridges `frames[j] → frames[j+1]` over `[times[j], times[j+1]]`.
    Keyframes { times: Vec<f64>, frames: Vec<PerturbedQuadratic> },
    /// `φ(s − λ) inner(s) + (1 − φ(s − λ)) base`.
    Interpolate { inner: Box<DeformationFamily>, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationFamily {
    pub kind: FamilyKind,
    pub base: PerturbedQuadratic,
    pub terminal: PerturbedQuadratic,
    pub schedule: Schedule,
    /// Time translation: the family evaluates its schedule at `s − shift`.
    #[serde(default)]
    pub shift: f64,
}

impl DeformationFamily {
    /// `h^s = β(s) h`, β dropping from 1 at `s_minus` to 0 at `s_plus`.
    pub fn cutoff(h: &PerturbedQuadratic, s_minus: f64, s_plus: f64) -> Result<Self, FlowError> {
        Self::cutoff_to(h, &PerturbedQuadratic::zero(), s_minus, s_plus)
    }

    /// `h^s = β(s) h + (1 − β(s)) terminal`.
    pub fn cutoff_to(
        h: &PerturbedQuadratic,
        terminal: &PerturbedQuadratic,
        s_minus: f64,
        s_plus: f64,
    ) -> Result<Self, FlowError> {
        if !(s_minus < s_plus) {
            return Err(FlowError::BadWindow(s_minus, s_plus));
        }
        Ok(Self {
            kind: FamilyKind::Cutoff,
            base: h.clone(),
            terminal: terminal.clone(),
            schedule: Schedule::Keyframes { times: vec![s_minus, s_plus], frames: vec![h.clone(), terminal.clone()] },
            shift: 0.0,
        })
    }

    /// `h^s ≡ h`.
    pub fn autonomous(h: &PerturbedQuadratic) -> Self {
        Self {
            kind: FamilyKind::Composite,
            base: h.clone(),
            terminal: h.clone(),
            schedule: Schedule::Keyframes { times: vec![-1.0, 0.0], frames: vec![h.clone(), h.clone()] },
            shift: 0.0,
        }
    }

    /// Concatenated bridges through `frames` at increasing `times`.
    pub fn composite(times: Vec<f64>, frames: Vec<PerturbedQuadratic>) -> Result<Self, FlowError> {
        if times.len() < 2 || times.len() != frames.len() {
            return Err(FlowError::BadWindow(f64::NAN, f64::NAN));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(FlowError::BadWindow(w[0], w[1]));
        }
        Ok(Self {
            kind: FamilyKind::Composite,
            base: frames[0].clone(),
            terminal: frames.last().unwrap().clone(),
            schedule: Schedule::Keyframes { times, frames },
            shift: 0.0,
        })
    }

    /// Blends from `h0` into `k1` across `[λ, λ + 1]`.
    ///
    /// Requires `k1` to be constant for `s ≤ 0` and `λ ≤ −1`, so that `k1` is
    /// still frozen at its base while the blend runs.
    pub fn interpolation(k1: &DeformationFamily, h0: &PerturbedQuadratic, lambda: f64) -> Result<Self, FlowError> {
        if k1.s_minus() < 0.0 {
            return Err(FlowError::NotNormalized);
        }
        if !(lambda <= -1.0) {
            return Err(FlowError::BadLambda(lambda));
        }
        Ok(Self {
            kind: FamilyKind::Composite,
            base: h0.clone(),
            terminal: k1.terminal.clone(),
            schedule: Schedule::Interpolate { inner: Box::new(k1.clone()), lambda },
            shift: 0.0,
        })
    }

    /// `s ↦ h^{s − σ}`.
    pub fn translated(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        out.shift += sigma;
        out
    }

    /// Translated so that the family is frozen at its base for all `s ≤ 0`.
    pub fn normalized(&self) -> Self {
        let lead = self.s_minus();
        if lead >= 0.0 {
            self.clone()
        } else {
            self.translated(-lead)
        }
    }

    pub fn s_minus(&self) -> f64 {
        self.shift
            + match &self.schedule {
                Schedule::Keyframes { times, .. } => times[0],
                Schedule::Interpolate { lambda, .. } => *lambda,
            }
    }

    pub fn s_plus(&self) -> f64 {
        self.shift
            + match &self.schedule {
                Schedule::Keyframes { times, .. } => *times.last().unwrap(),
                Schedule::Interpolate { inner, lambda } => (lambda + 1.0).max(inner.s_plus()),
            }
    }

    pub fn window_length(&self) -> f64 {
        self.s_plus() - self.s_minus()
    }

    /// Whether `h^s` is independent of `s`.
    pub fn is_autonomous(&self) -> bool {
        let comps = self.components();
        comps.iter().all(|c| *c == comps[0])
    }

    /// Times where the schedule stops being smooth in `s`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match &self.schedule {
            Schedule::Keyframes { times, .. } => times.clone(),
            Schedule::Interpolate { inner, lambda } => {
                let mut b = inner.breakpoints();
                b.push(*lambda);
                b.push(lambda + 1.0);
                b
            }
        };
        for b in &mut out {
            *b += self.shift;
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Distinct fixed perturbations the schedule combines.
    pub fn components(&self) -> Vec<&PerturbedQuadratic> {
        let mut out: Vec<&PerturbedQuadratic> = Vec::new();
        self.collect_components(&mut out);
        out
    }

    fn collect_components<'a>(&'a self, out: &mut Vec<&'a PerturbedQuadratic>) {
        match &self.schedule {
            Schedule::Keyframes { frames, .. } => {
                for f in frames {
                    if !out.contains(&f) {
                        out.push(f);
                    }
                }
            }
            Schedule::Interpolate { inner, .. } => {
                if !out.contains(&&self.base) {
                    out.push(&self.base);
                }
                inner.collect_components(out);
            }
        }
    }

    /// Calls `visit(w, dw, field)` for every term of `h^s = Σ w_i h_i`,
    /// with `dw = ∂_s w`. Terms with `w = dw = 0` may be skipped.
    pub fn for_each_component<F: FnMut(f64, f64, &PerturbedQuadratic)>(&self, s: f64, mut visit: F) {
        self.visit(s - self.shift, 1.0, 0.0, &mut visit);
    }

    fn visit<F: FnMut(f64, f64, &PerturbedQuadratic)>(&self, s: f64, scale: f64, dscale: f64, visit: &mut F) {
        match &self.schedule {
            Schedule::Keyframes { times, frames } => {
                if s <= times[0] {
                    visit(scale, dscale, &frames[0]);
                    return;
                }
                let last = times.len() - 1;
                if s >= times[last] {
                    visit(scale, dscale, &frames[last]);
                    return;
                }
                let j = times.partition_point(|t| *t <= s) - 1;
                let dt = times[j + 1] - times[j];
                let tau = (s - times[j]) / dt;
                let (p, dp) = (bridge(tau), bridge_deriv(tau) / dt);
                visit(scale * (1.0 - p), dscale * (1.0 - p) - scale * dp, &frames[j]);
                visit(scale * p, dscale * p + scale * dp, &frames[j + 1]);
            }
            Schedule::Interpolate { inner, lambda } => {
                let t = s - lambda;
                let (p, dp) = (bridge(t), bridge_deriv(t));
                if p < 1.0 {
                    visit(scale * (1.0 - p), dscale * (1.0 - p) - scale * dp, &self.base);
                }
                if p > 0.0 {
                    inner.visit(s - inner.shift, scale * p, dscale * p + scale * dp, visit);
                }
            }
        }
    }

    /// `−∇q_{h^s}(u)`.
    pub fn neg_grad(&self, s: f64, u: Point) -> Point {
        let mut g = Point::new(2.0 * u.x, -2.0 * u.y);
        self.for_each_component(s, |w, _, h| {
            if w != 0.0 {
                g += h.perturbation_grad(u) * w;
            }
        });
        -g
    }

    pub fn grad(&self, s: f64, u: Point) -> Point {
        -self.neg_grad(s, u)
    }

    /// `q_{h^s}(u)`.
    pub fn value(&self, s: f64, u: Point) -> f64 {
        let mut v = u.x * u.x - u.y * u.y;
        self.for_each_component(s, |w, _, h| {
            if w != 0.0 {
                v += w * h.perturbation(u);
            }
        });
        v
    }

    /// `∂_s h^s(u)`.
    pub fn ds_value(&self, s: f64, u: Point) -> f64 {
        let mut v = 0.0;
        self.for_each_component(s, |_, dw, h| {
            if dw != 0.0 {
                v += dw * h.perturbation(u);
            }
        });
        v
    }

    /// `h^s` as an explicit bump sum.
    pub fn at(&self, s: f64) -> PerturbedQuadratic {
        self.combine(s, false)
    }

    /// `∂_s h^s` as an explicit bump sum.
    pub fn ds_at(&self, s: f64) -> PerturbedQuadratic {
        self.combine(s, true)
    }

    fn combine(&self, s: f64, derivative: bool) -> PerturbedQuadratic {
        let mut out = PerturbedQuadratic::zero();
        self.for_each_component(s, |w, dw, h| {
            let k = if derivative { dw } else { w };
            if k != 0.0 {
                let scaled = h.times(k);
                out.offset += scaled.offset;
                out.bumps.extend(scaled.bumps);
            }
        });
        merge_bumps(out)
    }

    /// `max_s ‖∂_s h^s‖_∞`.
    ///
    /// Exact for keyframe schedules; for interpolations the blend window is
    /// sampled finely (the sup over `s` is then a lower estimate, tight to the
    /// sampling resolution).
    pub fn max_ds_sup_norm(&self) -> f64 {
        match &self.schedule {
            Schedule::Keyframes { times, frames } => times
                .windows(2)
                .zip(frames.windows(2))
                .map(|(t, f)| BRIDGE_MAX_SLOPE / (t[1] - t[0]) * f[1].difference(&f[0]).perturbation_sup_norm())
                .fold(0.0, f64::max),
            Schedule::Interpolate { .. } => {
                let bps = self.breakpoints();
                let mut best: f64 = 0.0;
                for w in bps.windows(2) {
                    let n = 96;
                    for j in 0..=n {
                        let s = w[0] + (w[1] - w[0]) * j as f64 / n as f64;
                        best = best.max(self.ds_at(s).perturbation_sup_norm());
                    }
                }
                best
            }
        }
    }
}

/// Merges bumps with identical centre and radius.
fn merge_bumps(mut h: PerturbedQuadratic) -> PerturbedQuadratic {
    let mut out: Vec<crate::field::Bump> = Vec::with_capacity(h.bumps.len());
    for b in h.bumps.drain(..) {
        match out.iter_mut().find(|o| o.center == b.center && o.radius == b.radius) {
            Some(o) => o.amplitude += b.amplitude,
            None => out.push(b),
        }
    }
    out.retain(|b| b.amplitude != 0.0);
    PerturbedQuadratic { bumps: out, offset: h.offset }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{pt, Bump};

    fn h() -> PerturbedQuadratic {
        PerturbedQuadratic::new(vec![
            Bump::new([1.0, 0.0], 0.8, 0.4).unwrap(),
            Bump::new([0.0, 1.0], 0.8, 0.4).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn bridge_shape() {
        assert_eq!(bridge(0.0), 0.0);
        assert_eq!(bridge(1.0), 1.0);
        assert_eq!(bridge(0.5), 0.5);
        assert_eq!(bridge_deriv(0.5), BRIDGE_MAX_SLOPE);
        for i in 1..100 {
            let t = i as f64 / 100.0;
            assert!(bridge(t) > bridge(t - 0.01));
        }
    }

    #[test]
    fn cutoff_boundary_values() {
        let f = DeformationFamily::cutoff(&h(), -1.0, 0.0).unwrap();
        assert_eq!(f.at(-1.0), h());
        assert_eq!(f.at(-7.0), h());
        assert!(f.at(1.0).is_unperturbed());
        assert_eq!(f.grad(1.0, pt(0.3, 0.2)), pt(0.6, -0.4));
        assert!(DeformationFamily::cutoff(&h(), 0.0, 0.0).is_err());
        let zero = DeformationFamily::cutoff(&PerturbedQuadratic::zero(), -1.0, 0.0).unwrap();
        for s in [-2.0, -0.5, 0.3] {
            assert!(zero.at(s).is_unperturbed());
        }
    }

    #[test]
    fn ds_matches_finite_difference() {
        let k1 = DeformationFamily::cutoff(&h(), 0.0, 1.0).unwrap();
        let fam = DeformationFamily::interpolation(&k1, &h().times(0.5), -2.0).unwrap();
        let p = pt(0.9, 0.15);
        for s in [-1.7, -1.2, 0.4, 0.75] {
            let e = 1e-6;
            let fd = (fam.value(s + e, p) - fam.value(s - e, p)) / (2.0 * e);
            assert!((fd - fam.ds_value(s, p)).abs() < 1e-7, "s = {s}");
        }
    }

    #[test]
    fn interpolation_endpoints() {
        let h1 = h();
        let h0 = h().times(1.3);
        let k1 = DeformationFamily::cutoff(&h1, 0.0, 1.0).unwrap();
        let fam = DeformationFamily::interpolation(&k1, &h0, -2.0).unwrap();
        assert_eq!(fam.at(-2.0), h0);
        assert_eq!(fam.at(-1.0), h1);
        assert_eq!(fam.at(0.5), k1.at(0.5));
        assert_eq!((fam.s_minus(), fam.s_plus()), (-2.0, 1.0));
        let self_blend = DeformationFamily::interpolation(&DeformationFamily::autonomous(&h1).normalized(), &h1, -1.0).unwrap();
        for s in [-3.0, -0.5, 0.0, 2.0] {
            assert_eq!(self_blend.at(s), h1);
        }
        let unnormalized = DeformationFamily::cutoff(&h1, -1.0, 0.0).unwrap();
        assert_eq!(DeformationFamily::interpolation(&unnormalized, &h0, -2.0), Err(FlowError::NotNormalized));
        assert_eq!(DeformationFamily::interpolation(&k1, &h0, -0.5), Err(FlowError::BadLambda(-0.5)));
    }

    #[test]
    fn translation() {
        let f = DeformationFamily::cutoff(&h(), -1.0, 0.0).unwrap();
        let g = f.translated(2.5);
        assert_eq!((g.s_minus(), g.s_plus()), (1.5, 2.5));
        assert_eq!(g.at(2.0), f.at(-0.5));
        assert_eq!(f.normalized().s_minus(), 0.0);
    }

    #[test]
    fn max_ds_norm_for_cutoff() {
        let f = DeformationFamily::cutoff(&h(), -1.0, 0.0).unwrap();
        assert!((f.max_ds_sup_norm() - BRIDGE_MAX_SLOPE * 0.8).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let k1 = DeformationFamily::cutoff(&h(), 0.0, 1.0).unwrap();
        let fam = DeformationFamily::interpolation(&k1, &h(), -2.0).unwrap();
        let text = serde_json::to_string(&fam).unwrap();
        let back: DeformationFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fam);
    }
}
