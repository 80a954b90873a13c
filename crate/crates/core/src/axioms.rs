//! Black-box checks of the selector axioms and their formal consequences.
//!
//! A selector is anything implementing [`ActionSelector`]. The harness computes
//! spectra itself, evaluates every distinct input once (in parallel, keyed by
//! a content digest), then judges each axiom and property in a fixed order.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::critical::{find_critical_points, naive_min_selector, SearchBox};
use crate::error::{Error, Result};
use crate::field::{PerturbedQuadratic, RadialProfile};
use crate::radial::radial_spectrum;
use crate::selector::{selector, FamilySearchConfig, SNAP_TOL};

/// Seed grid used whenever the harness needs a toy spectrum.
pub const SPECTRUM_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hamiltonian {
    Toy(PerturbedQuadratic),
    Radial(RadialProfile),
}

impl Hamiltonian {
    pub fn same_kind(&self, other: &Self) -> bool {
        matches!((self, other), (Self::Toy(_), Self::Toy(_)) | (Self::Radial(_), Self::Radial(_)))
    }

    /// Critical values of `q_h`, or the action set of `H_f`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        match self {
            Self::Toy(h) => Ok(find_critical_points(h, &SearchBox::covering(h, 1.0), SPECTRUM_GRID)?.values),
            Self::Radial(f) => Ok(radial_spectrum(f).actions()),
        }
    }

    /// Sup distance between two inputs of the same kind.
    pub fn distance(&self, other: &Self) -> Option<f64> {
        match (self, other) {
            (Self::Toy(a), Self::Toy(b)) => Some(a.difference(b).perturbation_sup_norm()),
            (Self::Radial(a), Self::Radial(b)) => Some(a.sup_distance(b)),
            _ => None,
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("hamiltonians serialize");
        hex::encode(Sha256::digest(&json))
    }
}

pub trait ActionSelector: Sync {
    fn name(&self) -> String;
    /// `Err(Error::Unsupported)` marks inputs outside the selector's domain.
    fn select(&self, h: &Hamiltonian) -> Result<f64>;
}

/// The minimax selector over the configured family class; toy inputs only.
#[derive(Debug, Clone, Default)]
pub struct MinimaxSelector {
    pub search: FamilySearchConfig,
}

impl ActionSelector for MinimaxSelector {
    fn name(&self) -> String {
        "minimax".into()
    }

    fn select(&self, h: &Hamiltonian) -> Result<f64> {
        match h {
            Hamiltonian::Toy(q) => {
                let report = find_critical_points(q, &SearchBox::covering(q, 1.0), SPECTRUM_GRID)?;
                Ok(selector(q, &self.search, &report)?.value)
            }
            Hamiltonian::Radial(_) => Err(Error::Unsupported),
        }
    }
}

/// `min spec`, spectral but discontinuous.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveMinSelector;

impl ActionSelector for NaiveMinSelector {
    fn name(&self) -> String {
        "naive-min".into()
    }

    fn select(&self, h: &Hamiltonian) -> Result<f64> {
        Ok(naive_min_selector(&h.spectrum()?)?)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroSelector;

impl ActionSelector for ZeroSelector {
    fn name(&self) -> String {
        "zero".into()
    }

    fn select(&self, _: &Hamiltonian) -> Result<f64> {
        Ok(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Spectrality,
    Lipschitz,
    Nontriviality,
    Zero,
    Shift,
    Scaling,
    Reflection,
    Monotonicity,
}

impl CheckId {
    pub const ALL: [CheckId; 8] = [
        Self::Spectrality,
        Self::Lipschitz,
        Self::Nontriviality,
        Self::Zero,
        Self::Shift,
        Self::Scaling,
        Self::Reflection,
        Self::Monotonicity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Spectrality => "spectrality",
            Self::Lipschitz => "lipschitz",
            Self::Nontriviality => "nontriviality",
            Self::Zero => "zero",
            Self::Shift => "shift",
            Self::Scaling => "scaling",
            Self::Reflection => "reflection",
            Self::Monotonicity => "monotonicity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub spectral_tol: f64,
    pub lipschitz_slack: f64,
    pub nontriviality_margin: f64,
    pub property_tol: f64,
    pub shifts: Vec<f64>,
    pub taus: Vec<f64>,
    pub reflections: Vec<(f64, f64)>,
    pub checks: Vec<CheckId>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            spectral_tol: 1e-4,
            lipschitz_slack: 2e-4,
            nontriviality_margin: 1e-3,
            property_tol: 2.0 * SNAP_TOL,
            shifts: vec![-1.0, 0.5],
            taus: vec![0.5f64.ln(), 0.25f64.ln()],
            reflections: vec![(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)],
            checks: CheckId::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing in the corpus was in the selector's domain.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub inputs: Vec<Hamiltonian>,
    pub values: Vec<f64>,
    /// The bound that was violated; absent when the selector failed to return a value.
    pub bound: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: CheckId,
    pub status: Status,
    pub checked: usize,
    pub skipped: usize,
    /// Largest observed `lhs − bound`; negative means slack.
    pub worst: Option<f64>,
    pub counterexamples: Vec<Counterexample>,
}

impl Verdict {
    fn new(check: CheckId) -> Self {
        Self { check, status: Status::Skipped, checked: 0, skipped: 0, worst: None, counterexamples: Vec::new() }
    }

    fn finish(mut self) -> Self {
        self.status = if !self.counterexamples.is_empty() {
            Status::Fail
        } else if self.checked > 0 {
            Status::Pass
        } else {
            Status::Skipped
        };
        self
    }

    /// Records `excess = lhs − bound`; positive excess is a counterexample.
    fn record(&mut self, excess: f64, cx: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        self.worst = Some(self.worst.map_or(excess, |w| w.max(excess)));
        if excess > 0.0 {
            self.counterexamples.push(cx());
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub selector: String,
    pub verdicts: Vec<Verdict>,
}

impl AxiomReport {
    pub fn verdict(&self, check: CheckId) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    /// No verdict failed.
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Value(f64),
    Unsupported,
    Failed(String),
}

struct Evaluations {
    values: HashMap<String, Outcome>,
}

impl Evaluations {
    fn get(&self, h: &Hamiltonian) -> &Outcome {
        &self.values[&h.digest()]
    }
}

fn evaluate(sel: &dyn ActionSelector, inputs: Vec<Hamiltonian>) -> Evaluations {
    let mut unique: Vec<(String, Hamiltonian)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for h in inputs {
        let d = h.digest();
        if seen.insert(d.clone()) {
            unique.push((d, h));
        }
    }
    let values = unique
        .into_par_iter()
        .map(|(d, h)| {
            let out = match sel.select(&h) {
                Ok(v) => Outcome::Value(v),
                Err(Error::Unsupported) => Outcome::Unsupported,
                Err(e) => Outcome::Failed(e.to_string()),
            };
            (d, out)
        })
        .collect();
    Evaluations { values }
}

/// Applies `f` to the selector values of `inputs` when all are available.
/// Unsupported inputs count as skipped, selector errors as counterexamples.
fn with_values(
    v: &mut Verdict,
    evals: &Evaluations,
    inputs: &[&Hamiltonian],
    f: impl FnOnce(&mut Verdict, Vec<f64>),
) {
    let mut vals = Vec::with_capacity(inputs.len());
    for h in inputs {
        match evals.get(h) {
            Outcome::Value(x) => vals.push(*x),
            Outcome::Unsupported => {
                v.skipped += 1;
                return;
            }
            Outcome::Failed(msg) => {
                v.checked += 1;
                v.counterexamples.push(Counterexample {
                    inputs: inputs.iter().map(|h| (*h).clone()).collect(),
                    values: Vec::new(),
                    bound: None,
                    detail: format!("selector error: {msg}"),
                });
                return;
            }
        }
    }
    f(v, vals)
}

fn toy_transforms(h: &PerturbedQuadratic, cfg: &HarnessConfig, check: CheckId) -> Vec<(f64, PerturbedQuadratic)> {
    match check {
        CheckId::Shift => cfg.shifts.iter().map(|&c| (c, h.shifted(c))).collect(),
        CheckId::Scaling => cfg.taus.iter().map(|&t| (t, h.scaled(t))).collect(),
        CheckId::Reflection => cfg.reflections.iter().map(|&(sx, sy)| (sx + 2.0 * sy, h.reflected(sx, sy))).collect(),
        _ => Vec::new(),
    }
}

/// Runs every enabled check of `cfg` on `corpus`.
pub fn check_axioms(sel: &dyn ActionSelector, corpus: &Corpus, cfg: &HarnessConfig) -> AxiomReport {
    let on = |c: CheckId| cfg.checks.contains(&c);
    let property_toys: Vec<&PerturbedQuadratic> = corpus.property_elements.iter().filter_map(|&i| corpus.toy(i)).collect();
    let zero = Hamiltonian::Toy(PerturbedQuadratic::zero());

    let mut inputs: Vec<Hamiltonian> = Vec::new();
    if on(CheckId::Spectrality) {
        inputs.extend(corpus.elements.iter().cloned());
    }
    if on(CheckId::Lipschitz) {
        inputs.extend(corpus.lipschitz_pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
    }
    if on(CheckId::Nontriviality) {
        inputs.extend(corpus.witness.and_then(|i| corpus.elements.get(i)).cloned());
    }
    if on(CheckId::Zero) {
        inputs.push(zero.clone());
    }
    for check in [CheckId::Shift, CheckId::Scaling, CheckId::Reflection] {
        if on(check) {
            for h in &property_toys {
                inputs.push(Hamiltonian::Toy((*h).clone()));
                inputs.extend(toy_transforms(h, cfg, check).into_iter().map(|(_, t)| Hamiltonian::Toy(t)));
            }
        }
    }
    if on(CheckId::Monotonicity) {
        inputs.extend(corpus.monotone_pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
    }
    let evals = evaluate(sel, inputs);

    let mut verdicts = Vec::new();
    if on(CheckId::Spectrality) {
        let spectra: Vec<Result<Vec<f64>>> = corpus.elements.par_iter().map(|h| h.spectrum()).collect();
        let mut v = Verdict::new(CheckId::Spectrality);
        for (h, spec) in corpus.elements.iter().zip(spectra) {
            with_values(&mut v, &evals, &[h], |v, vals| {
                let sigma = vals[0];
                let (nearest, dist) = match &spec {
                    Ok(s) => s
                        .iter()
                        .map(|&x| (x, (x - sigma).abs()))
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap_or((f64::NAN, f64::INFINITY)),
                    Err(_) => (f64::NAN, f64::INFINITY),
                };
                v.record(dist - cfg.spectral_tol, || Counterexample {
                    inputs: vec![h.clone()],
                    values: vec![sigma, nearest],
                    bound: Some(cfg.spectral_tol),
                    detail: format!("distance {dist:e} from the spectrum"),
                });
            });
        }
        verdicts.push(v.finish());
    }
    if on(CheckId::Lipschitz) {
        let mut v = Verdict::new(CheckId::Lipschitz);
        for (a, b) in &corpus.lipschitz_pairs {
            let Some(d) = a.distance(b) else {
                v.skipped += 1;
                continue;
            };
            with_values(&mut v, &evals, &[a, b], |v, vals| {
                let jump = (vals[1] - vals[0]).abs();
                let bound = d + cfg.lipschitz_slack;
                v.record(jump - bound, || Counterexample {
                    inputs: vec![a.clone(), b.clone()],
                    values: vec![vals[0], vals[1], d],
                    bound: Some(bound),
                    detail: format!("|Δσ| = {jump:.6} against sup distance {d:.6} (ratio {:.3})", jump / d),
                });
            });
        }
        verdicts.push(v.finish());
    }
    if on(CheckId::Nontriviality) {
        let mut v = Verdict::new(CheckId::Nontriviality);
        if let Some(w) = corpus.witness.and_then(|i| corpus.elements.get(i)) {
            with_values(&mut v, &evals, &[w], |v, vals| {
                let bound = -cfg.nontriviality_margin;
                v.record(vals[0] - bound, || Counterexample {
                    inputs: vec![w.clone()],
                    values: vals.clone(),
                    bound: Some(bound),
                    detail: format!("σ = {} is not below {bound}", vals[0]),
                });
            });
        }
        verdicts.push(v.finish());
    }
    if on(CheckId::Zero) {
        let mut v = Verdict::new(CheckId::Zero);
        with_values(&mut v, &evals, &[&zero], |v, vals| {
            v.record(vals[0].abs() - cfg.property_tol, || Counterexample {
                inputs: vec![zero.clone()],
                values: vals.clone(),
                bound: Some(cfg.property_tol),
                detail: "σ(0) ≠ 0".into(),
            });
        });
        verdicts.push(v.finish());
    }
    for check in [CheckId::Shift, CheckId::Scaling, CheckId::Reflection] {
        if !on(check) {
            continue;
        }
        let mut v = Verdict::new(check);
        for h in &property_toys {
            let base = Hamiltonian::Toy((*h).clone());
            for (param, t) in toy_transforms(h, cfg, check) {
                let th = Hamiltonian::Toy(t);
                with_values(&mut v, &evals, &[&base, &th], |v, vals| {
                    let expected = match check {
                        CheckId::Shift => vals[0] + param,
                        CheckId::Scaling => param.exp() * vals[0],
                        _ => vals[0],
                    };
                    v.record((vals[1] - expected).abs() - cfg.property_tol, || Counterexample {
                        inputs: vec![base.clone(), th.clone()],
                        values: vec![vals[0], vals[1], expected],
                        bound: Some(cfg.property_tol),
                        detail: format!("{} with parameter {param}", check.as_str()),
                    });
                });
            }
        }
        verdicts.push(v.finish());
    }
    if on(CheckId::Monotonicity) {
        let mut v = Verdict::new(CheckId::Monotonicity);
        for (lo, hi) in &corpus.monotone_pairs {
            with_values(&mut v, &evals, &[lo, hi], |v, vals| {
                v.record(vals[0] - vals[1] - cfg.property_tol, || Counterexample {
                    inputs: vec![lo.clone(), hi.clone()],
                    values: vals.clone(),
                    bound: Some(cfg.property_tol),
                    detail: "σ(h0) > σ(h1) although h0 ≤ h1".into(),
                });
            });
        }
        verdicts.push(v.finish());
    }
    AxiomReport { selector: sel.name(), verdicts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn digest_is_content_based() {
        let a = Hamiltonian::Toy(fixtures::fig2_saddle());
        let b = Hamiltonian::Toy(fixtures::fig2_saddle());
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), Hamiltonian::Toy(PerturbedQuadratic::zero()).digest());
        let json = serde_json::to_string(&Hamiltonian::Radial(fixtures::fig1_f())).unwrap();
        let back: Hamiltonian = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Hamiltonian::Radial(fixtures::fig1_f()));
    }

    #[test]
    fn zero_selector_fails_spectrality_and_nontriviality() {
        let elements = vec![
            Hamiltonian::Toy(PerturbedQuadratic::zero()),
            Hamiltonian::Toy(fixtures::negative_origin_bump()),
        ];
        let corpus = Corpus::from_elements(elements, 1, 2, 0);
        let cfg = HarnessConfig { checks: vec![CheckId::Spectrality, CheckId::Nontriviality, CheckId::Zero], ..Default::default() };
        let r = check_axioms(&ZeroSelector, &corpus, &cfg);
        let a1 = r.verdict(CheckId::Spectrality).unwrap();
        assert_eq!(a1.status, Status::Fail);
        assert_eq!(a1.counterexamples.len(), 1);
        assert_eq!(r.verdict(CheckId::Nontriviality).unwrap().status, Status::Fail);
        assert_eq!(r.verdict(CheckId::Zero).unwrap().status, Status::Pass);
    }

    #[test]
    fn unsupported_inputs_are_skipped() {
        let corpus = Corpus::from_elements(vec![Hamiltonian::Radial(fixtures::fig1_f())], 1, 0, 0);
        let cfg = HarnessConfig { checks: vec![CheckId::Spectrality], ..Default::default() };
        let r = check_axioms(&MinimaxSelector::default(), &corpus, &cfg);
        let a1 = r.verdict(CheckId::Spectrality).unwrap();
        assert_eq!((a1.status, a1.skipped), (Status::Skipped, 1));
    }
}
