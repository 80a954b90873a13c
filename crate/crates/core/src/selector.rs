//! Minimax selector `σ(h) = sup_{h^s} min_{u bounded} q_h^−(u)` over a finite,
//! explicitly enumerated class of deformation families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::SpectrumReport;
use crate::error::FlowError;
use crate::family::DeformationFamily;
use crate::field::{Bump, PerturbedQuadratic};
use crate::flow::{find_bounded_flow_lines, FlowConfig, FlowLine};

pub const SNAP_TOL: f64 = 1e-4;

pub const DEFAULT_TILT: Bump = Bump { center: [0.6, 0.3], amplitude: 0.1, radius: 1.5 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySearchConfig {
    pub cutoff_windows: Vec<(f64, f64)>,
    pub interpolation_lambdas: Vec<f64>,
    /// Intermediate perturbations; `None` means "h with one bump removed, for each bump".
    #[serde(default)]
    pub intermediate_targets: Option<Vec<PerturbedQuadratic>>,
    pub budget: usize,
    /// Extra intermediate target `h + tilt`, breaking symmetries that pin
    /// critical points in place for every cutoff of `h`.
    #[serde(default)]
    pub tilt: Option<Bump>,
    #[serde(default)]
    pub extra_families: Vec<DeformationFamily>,
    #[serde(default)]
    pub flow: FlowConfig,
}

impl Default for FamilySearchConfig {
    fn default() -> Self {
        Self {
            cutoff_windows: vec![(-1.0, 0.0), (-3.0, 0.0)],
            interpolation_lambdas: vec![-1.0, -2.0],
            intermediate_targets: None,
            budget: 24,
            tilt: Some(DEFAULT_TILT),
            extra_families: Vec::new(),
            flow: FlowConfig::default(),
        }
    }
}

impl FamilySearchConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        if self.budget == 0 {
            return Err(FlowError::BadWindow(0.0, 0.0));
        }
        for &(a, b) in &self.cutoff_windows {
            if !(a < b) {
                return Err(FlowError::BadWindow(a, b));
            }
        }
        for &l in &self.interpolation_lambdas {
            if !(l <= -1.0) {
                return Err(FlowError::BadLambda(l));
            }
        }
        Ok(())
    }

    pub fn targets(&self, h: &PerturbedQuadratic) -> Vec<PerturbedQuadratic> {
        let mut out = match &self.intermediate_targets {
            Some(t) => t.clone(),
            None => (0..h.bumps.len()).map(|i| h.without_bump(i)).collect(),
        };
        if let Some(b) = self.tilt {
            out.push(h.with_bump(b));
        }
        out
    }

    /// The searched class, in evaluation order, truncated at `budget`:
    /// cutoffs, then interpolations through each target, then composites
    /// `h → target → 0`, then any explicitly listed families.
    pub fn families(&self, h: &PerturbedQuadratic) -> Result<Vec<DeformationFamily>, FlowError> {
        self.validate()?;
        let mut out = Vec::new();
        for &(a, b) in &self.cutoff_windows {
            out.push(DeformationFamily::cutoff(h, a, b)?);
        }
        let targets = self.targets(h);
        for t in &targets {
            let k1 = DeformationFamily::cutoff(t, 0.0, 1.0)?;
            for &l in &self.interpolation_lambdas {
                out.push(DeformationFamily::interpolation(&k1, h, l)?);
            }
        }
        for t in &targets {
            for &(a, b) in &self.cutoff_windows {
                let mid = 0.5 * (a + b);
                out.push(DeformationFamily::composite(vec![a, mid, b], vec![h.clone(), t.clone(), PerturbedQuadratic::zero()])?);
            }
        }
        out.truncate(self.budget);
        out.extend(self.extra_families.iter().filter(|f| f.base == *h).cloned());
        Ok(out)
    }
}

/// `min start_value` over the bounded lines of `family`, with the line attaining it.
pub fn selector_lower_bound(
    family: &DeformationFamily,
    spectrum: &SpectrumReport,
    cfg: &FlowConfig,
) -> Result<(f64, FlowLine), FlowError> {
    let lines = find_bounded_flow_lines(family, spectrum, cfg)?;
    lines
        .into_iter()
        .filter(|l| l.bounded)
        .min_by(|a, b| a.start_value.total_cmp(&b.start_value))
        .map(|l| (l.start_value, l))
        .ok_or(FlowError::NoBoundedLines)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum SnapStatus {
    Snapped,
    FailedSpectrality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorResult {
    pub value: f64,
    pub raw_minimax: f64,
    pub witness_family: DeformationFamily,
    pub witness_line: FlowLine,
    pub snapped: bool,
    pub spectral_distance: f64,
    pub status: SnapStatus,
    /// Lower bound contributed by each evaluated family, in order.
    pub family_bounds: Vec<f64>,
}

/// Nearest spectral value to `raw`; equidistant candidates resolve downward.
pub fn snap(raw: f64, values: &[f64]) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &v in values {
        let d = (raw - v).abs();
        match best {
            Some((bv, bd)) if d > bd || (d == bd && v >= bv) => {}
            _ => best = Some((v, d)),
        }
    }
    best
}

pub fn selector(
    h: &PerturbedQuadratic,
    config: &FamilySearchConfig,
    spectrum: &SpectrumReport,
) -> Result<SelectorResult, FlowError> {
    let families = config.families(h)?;
    let bounds: Vec<Result<(f64, FlowLine), FlowError>> = families
        .par_iter()
        .map(|f| selector_lower_bound(f, spectrum, &config.flow))
        .collect();
    let mut best: Option<(usize, f64, FlowLine)> = None;
    let mut family_bounds = Vec::with_capacity(families.len());
    for (i, b) in bounds.into_iter().enumerate() {
        let (v, line) = b?;
        family_bounds.push(v);
        if best.as_ref().map_or(true, |(_, bv, _)| v > *bv) {
            best = Some((i, v, line));
        }
    }
    let (i, raw, line) = best.ok_or(FlowError::NoBoundedLines)?;
    let (value, dist, status) = match snap(raw, &spectrum.values) {
        Some((v, d)) if d < SNAP_TOL => (v, d, SnapStatus::Snapped),
        Some((_, d)) => (raw, d, SnapStatus::FailedSpectrality),
        None => (raw, f64::INFINITY, SnapStatus::FailedSpectrality),
    };
    Ok(SelectorResult {
        value,
        raw_minimax: raw,
        witness_family: families[i].clone(),
        witness_line: line,
        snapped: status == SnapStatus::Snapped && value != raw,
        spectral_distance: dist,
        status,
        family_bounds,
    })
}

/// `h + c`.
pub fn shift(h: &PerturbedQuadratic, c: f64) -> PerturbedQuadratic {
    h.shifted(c)
}

/// `h_τ(p) = e^τ h(e^{−τ/2} p)`.
pub fn scale(h: &PerturbedQuadratic, tau: f64) -> PerturbedQuadratic {
    h.scaled(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{find_critical_points, SearchBox};

    #[test]
    fn snapping_rules() {
        assert_eq!(snap(0.5, &[0.0, 1.0]), Some((0.0, 0.5)));
        let (v, d) = snap(0.9, &[0.0, 1.0]).unwrap();
        assert_eq!(v, 1.0);
        assert!((d - 0.1).abs() < 1e-12);
        assert_eq!(snap(0.0, &[]), None);
    }

    #[test]
    fn zero_model() {
        let h = PerturbedQuadratic::zero();
        let rep = find_critical_points(&h, &SearchBox::square(2.0), 16).unwrap();
        let r = selector(&h, &FamilySearchConfig::default(), &rep).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.status, SnapStatus::Snapped);
        let fam = DeformationFamily::autonomous(&h);
        assert_eq!(selector_lower_bound(&fam, &rep, &FlowConfig::default()).unwrap().0, 0.0);
    }

    #[test]
    fn config_validation() {
        let mut c = FamilySearchConfig::default();
        c.cutoff_windows.push((1.0, 0.0));
        assert!(c.validate().is_err());
        let mut c = FamilySearchConfig::default();
        c.interpolation_lambdas = vec![-0.5];
        assert!(c.validate().is_err());
    }
}
