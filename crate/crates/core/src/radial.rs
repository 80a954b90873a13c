//! Action spectra of radial Hamiltonians `H_f(z) = f(π|z|²)`.
//!
//! On the sphere of area `s` the flow rotates with angular speed `2π f'(s)`,
//! so it closes up at time one exactly when `f'(s) = k ∈ ℤ`, with action
//! `f(s) − s k`. Because `f'` is quadratic on every spline piece, the levels
//! are found in closed form.

use serde::{Deserialize, Serialize};

use crate::critical::dedupe_values;
use crate::error::RadialError;
use crate::field::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// The fixed point at the origin.
    Origin,
    Sphere,
    /// Everything outside the support, where `H_f ≡ 0`.
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialEntry {
    pub s: f64,
    pub k: i64,
    pub action: f64,
    pub kind: EntryKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSpectrum {
    /// Sorted by `(s, k)`.
    pub entries: Vec<RadialEntry>,
}

impl RadialSpectrum {
    /// Distinct actions, ascending.
    pub fn actions(&self) -> Vec<f64> {
        dedupe_values(self.entries.iter().map(|e| e.action).collect())
    }

    pub fn min_action(&self) -> f64 {
        self.actions()[0]
    }
}

pub fn radial_spectrum(f: &RadialProfile) -> RadialSpectrum {
    let mut entries = vec![RadialEntry { s: 0.0, k: 0, action: f.eval(0.0).0, kind: EntryKind::Origin }];
    // f' meets zero tangentially at the support end, and the double root only
    // carries half the digits; anything this close is the exterior level
    let edge = f.s_max() - 1e-7 * (1.0 + f.s_max());
    for i in 0..f.pieces() {
        let (lo, hi) = f.derivative_range(i);
        let k_lo = (lo - 1e-12).ceil() as i64;
        let k_hi = (hi + 1e-12).floor() as i64;
        for k in k_lo..=k_hi {
            for s in f.derivative_roots(i, k as f64) {
                let kind = if s == 0.0 {
                    EntryKind::Origin
                } else if s >= edge {
                    EntryKind::Exterior
                } else {
                    EntryKind::Sphere
                };
                let value = f.eval(s).0;
                let action = if s >= edge { 0.0 } else { value - s * k as f64 };
                entries.push(RadialEntry { s, k, action, kind });
            }
        }
    }
    entries.push(RadialEntry { s: f.s_max(), k: 0, action: 0.0, kind: EntryKind::Exterior });
    entries.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.k.cmp(&b.k)));
    let mut out: Vec<RadialEntry> = Vec::with_capacity(entries.len());
    for e in entries {
        match out.last() {
            Some(l) if l.k == e.k && (e.s - l.s).abs() <= 1e-12 * (1.0 + e.s) => {}
            _ => out.push(e),
        }
    }
    RadialSpectrum { entries: out }
}

/// Levels carrying non-constant one-periodic orbits.
pub fn periodic_levels(f: &RadialProfile) -> Vec<(f64, i64)> {
    radial_spectrum(f)
        .entries
        .into_iter()
        .filter(|e| e.k != 0 && e.kind == EntryKind::Sphere)
        .map(|e| (e.s, e.k))
        .collect()
}

/// `E⁺ − E⁻`.
pub fn hofer_norm(e_plus: f64, e_minus: f64) -> f64 {
    e_plus - e_minus
}

/// Hofer norm of the autonomous `H_f`: `max f − min f`, the zero extension included.
pub fn profile_hofer_norm(f: &RadialProfile) -> f64 {
    let (lo, hi) = f.value_range();
    hofer_norm(hi, lo)
}

/// Cubic spline with `f(0) = f0` whose second derivative is the continuous
/// piecewise-linear function interpolating `curvature` at `knots`.
///
/// The pieces are integrated exactly, so the result is C² by construction.
pub fn from_curvature(f0: f64, knots: &[f64], curvature: &[f64]) -> Result<RadialProfile, RadialError> {
    if knots.len() != curvature.len() || knots.len() < 2 {
        return Err(RadialError::Infeasible("knots and curvature must have equal length ≥ 2".into()));
    }
    let mut values = vec![f0];
    let mut derivs = vec![0.0];
    for i in 0..knots.len() - 1 {
        let h = knots[i + 1] - knots[i];
        let (e0, e1) = (curvature[i], curvature[i + 1]);
        let (v, d) = (values[i], derivs[i]);
        derivs.push(d + h * (e0 + e1) / 2.0);
        values.push(v + h * d + h * h * (2.0 * e0 + e1) / 6.0);
    }
    RadialProfile::from_hermite(knots.to_vec(), values, derivs).map_err(|e| RadialError::Infeasible(e.to_string()))
}

/// Replaces the last knot's value and slope by exact zeros (they are zero up to round-off).
pub(crate) fn pin_support_end(f: RadialProfile) -> RadialProfile {
    let mut values = f.values().to_vec();
    let mut derivs = f.derivs().to_vec();
    *values.last_mut().unwrap() = 0.0;
    *derivs.last_mut().unwrap() = 0.0;
    RadialProfile::from_hermite(f.knots().to_vec(), values, derivs).expect("same knots")
}

/// Slopes below `1 − MIN_SLOPE_MARGIN` are required for a two-valued spectrum.
pub const MIN_SLOPE_MARGIN: f64 = 1e-6;
/// Depths below this are indistinguishable from the zero profile at spectrum resolution.
pub const MIN_DEPTH: f64 = 1e-6;

/// Non-positive profile with `f(0) = −(π r² − gap)`, `0 ≤ f' < 1`, flat where
/// `f` is minimal and supported in `[0, π r² − gap/2]`; its spectrum is `{f(0), 0}`.
///
/// Shape: flat bottom on `[0, gap/8]`, a C¹ ramp of width `gap/8` up to slope
/// `v`, a straight stretch, and a symmetric ramp back to slope zero.
pub fn min_negative_profile(r_target: f64, gap: f64) -> Result<RadialProfile, RadialError> {
    if !(r_target > 0.0) {
        return Err(RadialError::Infeasible(format!("radius {r_target} must be positive")));
    }
    let area = std::f64::consts::PI * r_target * r_target;
    if !(gap > 0.0 && gap < area) {
        return Err(RadialError::Infeasible(format!("gap {gap} outside (0, {area})")));
    }
    let depth = area - gap;
    if depth <= MIN_DEPTH {
        return Err(RadialError::Infeasible(format!("depth {depth:e} below resolution {MIN_DEPTH:e}")));
    }
    let slope = depth / (area - 0.75 * gap);
    if 1.0 - slope < MIN_SLOPE_MARGIN {
        return Err(RadialError::Infeasible(format!("slope margin {:e} too small", 1.0 - slope)));
    }
    let s1 = gap / 8.0;
    let w = gap / 8.0;
    let s_max = area - 0.5 * gap;
    let p = s_max - s1 - 2.0 * w;
    let knots = [0.0, s1, s1 + 0.5 * w, s1 + w, s1 + w + p, s1 + 1.5 * w + p, s_max];
    let peak = 2.0 * slope / w;
    let curv = [0.0, 0.0, peak, 0.0, 0.0, -peak, 0.0];
    Ok(pin_support_end(from_curvature(-depth, &knots, &curv)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn zero_profile_spectrum() {
        let f = RadialProfile::zero(2.0);
        assert_eq!(radial_spectrum(&f).actions(), vec![0.0]);
        assert!(periodic_levels(&f).is_empty());
        assert_eq!(profile_hofer_norm(&f), 0.0);
    }

    #[test]
    fn hofer_examples() {
        assert_eq!(hofer_norm(0.0, 0.0), 0.0);
        assert_eq!(hofer_norm(0.0, -1.0), 1.0);
    }

    #[test]
    fn shallow_profile_is_two_valued() {
        // f(0) = -1, f' in [0, 1), support [0, 4]
        let f = from_curvature(-1.0, &[0.0, 1.0, 1.5, 2.0, 2.25, 2.75, 3.25, 4.0], &[0.0, 0.0, 1.6, 0.0, 0.0, -1.6, 0.0, 0.0]).unwrap();
        assert!(f.eval(4.0).0.abs() < 1e-12);
        let spec = radial_spectrum(&f);
        assert!(close(&spec.actions(), &[-1.0, 0.0], 1e-9), "{:?}", spec.actions());
        assert!(periodic_levels(&f).is_empty());
    }

    #[test]
    fn two_transversal_crossings() {
        // f' rises to 1.5 and returns to 0: crosses 1 twice
        let f = from_curvature(-1.2, &[0.0, 0.2, 0.6, 1.0, 1.4, 1.8], &[0.0, 0.0, 3.75, 0.0, -3.75, 0.0]).unwrap();
        let levels = periodic_levels(&f);
        assert_eq!(levels.len(), 2);
        assert!(levels.iter().all(|(_, k)| *k == 1));
        for (s, _) in levels {
            assert!((f.eval(s).1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn min_negative_examples() {
        let pi = std::f64::consts::PI;
        let f = min_negative_profile(1.0, pi / 2.0).unwrap();
        assert!((f.eval(0.0).0 + pi / 2.0).abs() < 1e-15);
        assert!(close(&radial_spectrum(&f).actions(), &[-pi / 2.0, 0.0], 1e-12));
        assert!(f.smoothness_defect() < 1e-9);
        let g = min_negative_profile(2.0, 0.1).unwrap();
        assert!((g.eval(0.0).0 + (4.0 * pi - 0.1)).abs() < 1e-12);
        assert_eq!(radial_spectrum(&g).actions().len(), 2);
        assert!(matches!(min_negative_profile(1.0, pi - 1e-9), Err(RadialError::Infeasible(_))));
        assert!(min_negative_profile(1.0, 0.0).is_err());
        assert!(min_negative_profile(1.0, 4.0).is_err());
    }

    #[test]
    fn entries_satisfy_level_equation() {
        let f = from_curvature(-1.0, &[0.0, 1.0, 1.5, 2.0, 2.5, 3.0], &[0.0, 0.0, 2.0, 0.0, -2.0, 0.0]).unwrap();
        for e in radial_spectrum(&f).entries {
            let (v, d) = f.eval(e.s);
            if e.kind != EntryKind::Origin {
                assert!((d - e.k as f64).abs() < 1e-10, "{e:?}");
            }
            if e.kind == EntryKind::Sphere {
                assert!((e.action - (v - e.s * e.k as f64)).abs() < 1e-10);
            }
        }
    }
}
