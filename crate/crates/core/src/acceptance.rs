//! The acceptance suite behind `selector-lab check`.
//!
//! Ten criteria, each reduced to one pass/fail line. Details are formatted
//! from computed numbers only, so two runs on the same fixtures produce the
//! same manifest up to its wall-time field.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::axioms::{check_axioms, CheckId, Hamiltonian, HarnessConfig, MinimaxSelector, NaiveMinSelector, Status};
use crate::corpus::{default_corpus, fig1_corpus, random_corpus, Corpus, DEFAULT_SEED};
use crate::critical::{find_critical_points, SearchBox, SpectrumReport};
use crate::derivation::{nearby_orbit_certificate, nonsqueezing_certificate};
use crate::error::{Error, Result};
use crate::family::DeformationFamily;
use crate::field::{PerturbedQuadratic, RadialProfile};
use crate::fixtures;
use crate::flow::{find_bounded_flow_lines, sweep, uniform_energy_bound, FlowConfig};
use crate::manifest::RunManifest;
use crate::oracles::{grid_critical_points, radial_orbit};
use crate::radial::{min_negative_profile, radial_spectrum, EntryKind};
use crate::selector::{selector, FamilySearchConfig, SNAP_TOL};

pub const ENERGY_REL_TOL: f64 = 1e-6;
pub const ENERGY_BOUND_SLACK: f64 = 1e-6;
pub const CLOSURE_TOL: f64 = 1e-6;
/// RK4 steps per unit time in the orbit oracle.
pub const ORBIT_STEPS: usize = 200_000;
pub const ORACLE_GRID: usize = 400;
pub const FIG1_RATIO: f64 = 10.0;

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "fig2"),
    (2, "fig3"),
    (3, "energy-identity"),
    (4, "energy-bound"),
    (5, "axioms"),
    (6, "naive"),
    (7, "radial"),
    (8, "nonsqueezing"),
    (9, "nearby-orbit"),
    (10, "determinism"),
];

/// `(r_target, gap)` pairs for the two-valued spectrum check.
pub const MIN_PROFILE_CASES: [(f64, f64); 10] = [
    (0.5, 0.1),
    (0.5, 0.01),
    (1.0, 0.5),
    (1.0, 0.05),
    (1.0, 1e-3),
    (1.45, 3.3),
    (1.45, 0.2),
    (2.0, 1.0),
    (2.0, 0.01),
    (3.0, 0.5),
];

/// Inputs the suite runs on; tampering with them is how the mutation test works.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixtures {
    #[serde(rename = "FIG2_SADDLE")]
    pub fig2: PerturbedQuadratic,
    #[serde(rename = "FIG3_NOSE")]
    pub fig3: PerturbedQuadratic,
    #[serde(rename = "FIG1_F")]
    pub fig1_f: RadialProfile,
    #[serde(rename = "FIG1_FPM")]
    pub fig1_fpm: (RadialProfile, RadialProfile),
    #[serde(rename = "FIG_FE")]
    pub fig_fe: RadialProfile,
    pub seed: u64,
}

impl Default for Fixtures {
    fn default() -> Self {
        Self {
            fig2: fixtures::fig2_saddle(),
            fig3: fixtures::fig3_nose().model,
            fig1_f: fixtures::fig1_f(),
            fig1_fpm: (fixtures::fig1_f_plus(), fixtures::fig1_f_minus()),
            fig_fe: fixtures::fig_fe(3.0),
            seed: DEFAULT_SEED,
        }
    }
}

/// Partial fixture set layered over the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FixtureOverrides {
    #[serde(rename = "FIG2_SADDLE", default)]
    pub fig2: Option<PerturbedQuadratic>,
    #[serde(rename = "FIG3_NOSE", default)]
    pub fig3: Option<PerturbedQuadratic>,
    #[serde(rename = "FIG1_F", default)]
    pub fig1_f: Option<RadialProfile>,
    #[serde(rename = "FIG1_FPM", default)]
    pub fig1_fpm: Option<(RadialProfile, RadialProfile)>,
    #[serde(rename = "FIG_FE", default)]
    pub fig_fe: Option<RadialProfile>,
}

impl Fixtures {
    pub fn with(mut self, o: FixtureOverrides) -> Self {
        self.fig2 = o.fig2.unwrap_or(self.fig2);
        self.fig3 = o.fig3.unwrap_or(self.fig3);
        self.fig1_f = o.fig1_f.unwrap_or(self.fig1_f);
        self.fig1_fpm = o.fig1_fpm.unwrap_or(self.fig1_fpm);
        self.fig_fe = o.fig_fe.unwrap_or(self.fig_fe);
        self
    }
}

/// Which criteria to run; criterion 5 may be narrowed to some checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub criteria: BTreeSet<u8>,
    pub checks: Vec<CheckId>,
}

impl Default for Selection {
    fn default() -> Self {
        Self { criteria: CRITERIA.iter().map(|c| c.0).collect(), checks: CheckId::ALL.to_vec() }
    }
}

impl Selection {
    /// Comma-separated numbers, criterion names or check names. A check name
    /// selects criterion 5 restricted to the named checks.
    pub fn parse(only: &str) -> Result<Self> {
        let mut criteria = BTreeSet::new();
        let mut checks = Vec::new();
        for tok in only.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let tok = tok.to_ascii_lowercase();
            if let Some((id, _)) = CRITERIA.iter().find(|(id, name)| *name == tok || id.to_string() == tok) {
                criteria.insert(*id);
            } else if let Some(c) = CheckId::parse(&tok) {
                criteria.insert(5);
                checks.push(c);
            } else {
                return Err(Error::Other(format!("unknown criterion or check '{tok}'")));
            }
        }
        if criteria.is_empty() {
            return Ok(Self::default());
        }
        // a bare "5" or "axioms" keeps the full check list
        if checks.is_empty() {
            checks = CheckId::ALL.to_vec();
        }
        Ok(Self { criteria, checks })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub wall_time: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!("criterion {:>2} {:<16} {}  {}", self.id, self.name, if self.passed { "PASS" } else { "FAIL" }, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub results: Vec<CriterionResult>,
    pub manifest: RunManifest,
}

impl AcceptanceReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn result(&self, id: u8) -> Option<&CriterionResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

type Outcome = Result<(bool, String)>;

fn spectrum_of(h: &PerturbedQuadratic, grid: usize) -> Result<SpectrumReport> {
    Ok(find_critical_points(h, &SearchBox::covering(h, 1.0), grid)?)
}

fn fig2(fx: &Fixtures) -> Outcome {
    let h = &fx.fig2;
    let bx = SearchBox::covering(h, 1.0);
    let rep = spectrum_of(h, 64)?;
    let grid = grid_critical_points(h, &bx, ORACLE_GRID);
    let cell = 2.0 * bx.diameter() / ORACLE_GRID as f64;
    let matched = rep
        .critical_points
        .iter()
        .filter(|c| grid.iter().any(|g| (c.point() - crate::field::pt(g.location[0], g.location[1])).norm() < cell))
        .count();
    let sel = selector(h, &FamilySearchConfig::default(), &rep)?;
    let n = rep.critical_points.len();
    let frozen = rep.values.len() == 5
        && rep.values.iter().zip(fixtures::FIG2_CRITICAL_VALUES).all(|(v, e)| (v - e).abs() < fixtures::FIG2_VALUE_TOL);
    // two new values on each side of the saddle
    let above = rep.values.iter().filter(|v| **v > SNAP_TOL).count();
    let below = rep.values.iter().filter(|v| **v < -SNAP_TOL).count();
    let ok = n == 5 && grid.len() == 5 && matched == 5 && frozen && above == 2 && below == 2 && sel.value.abs() < SNAP_TOL;
    Ok((
        ok,
        format!(
            "{n} critical points, oracle {} ({matched} matched), {below} below / {above} above, frozen values {}, σ = {:.6e}",
            grid.len(),
            if frozen { "match" } else { "differ" },
            sel.value
        ),
    ))
}

fn fig3(fx: &Fixtures) -> Outcome {
    let h = &fx.fig3;
    let rep = spectrum_of(h, 64)?;
    let cfg = FlowConfig::default();
    let lines = find_bounded_flow_lines(&DeformationFamily::autonomous(h), &rep, &cfg)?;
    let bounded = lines.iter().filter(|l| l.bounded).count();
    let constant = lines.iter().filter(|l| l.bounded && l.constant).count();
    let sel = selector(h, &FamilySearchConfig::default(), &rep)?;
    let ok = bounded == 2 && constant == 2 && cfg.degenerate_seeds == 64 && sel.value.abs() < SNAP_TOL;
    Ok((ok, format!("{bounded} bounded lines, {constant} constant, σ = {:.6e}", sel.value)))
}

/// Sweeps (with escaping shots) of the cutoff and the first interpolation of each random element.
fn corpus_flows(seed: u64, f: &mut dyn FnMut(&DeformationFamily, &SpectrumReport, &crate::flow::FlowSweep) -> Result<()>) -> Result<()> {
    let search = FamilySearchConfig::default();
    for h in random_corpus(seed, crate::corpus::DEFAULT_RANDOM) {
        let rep = spectrum_of(&h, 64)?;
        let fams = search.families(&h)?;
        let picked = [0, search.cutoff_windows.len()];
        for fam in picked.iter().filter_map(|&i| fams.get(i)) {
            let sw = sweep(fam, &rep, &search.flow, true)?;
            f(fam, &rep, &sw)?;
        }
    }
    Ok(())
}

fn energy_identity(fx: &Fixtures) -> Outcome {
    let (mut n, mut worst) = (0usize, 0.0f64);
    corpus_flows(fx.seed, &mut |_, _, sw| {
        for l in sw.lines.iter().chain(&sw.shots) {
            n += 1;
            worst = worst.max(l.energy_identity_defect() / l.energy.abs().max(1.0));
        }
        Ok(())
    })?;
    Ok((n > 0 && worst <= ENERGY_REL_TOL, format!("{n} lines, worst relative defect {worst:.3e}")))
}

fn energy_bound(fx: &Fixtures) -> Outcome {
    let (mut n, mut worst) = (0usize, f64::NEG_INFINITY);
    corpus_flows(fx.seed, &mut |fam, rep, sw| {
        let terminal = spectrum_of(&fam.terminal, 64)?;
        let bound = uniform_energy_bound(fam, rep, &terminal) + ENERGY_BOUND_SLACK;
        for l in sw.lines.iter().filter(|l| l.bounded) {
            n += 1;
            worst = worst.max(l.energy - bound);
        }
        Ok(())
    })?;
    Ok((n > 0 && worst <= 0.0, format!("{n} bounded lines, worst E − bound {worst:.3e}")))
}

fn corpus_for(fx: &Fixtures) -> Corpus {
    let mut c = default_corpus(fx.seed);
    // the structured figure elements follow the fixtures
    for e in c.elements.iter_mut() {
        if let Hamiltonian::Toy(h) = e {
            if *h == fixtures::fig2_saddle() {
                *h = fx.fig2.clone();
            } else if *h == fixtures::fig3_nose().model {
                *h = fx.fig3.clone();
            }
        }
    }
    c
}

fn axioms(fx: &Fixtures, checks: &[CheckId]) -> Outcome {
    let cfg = HarnessConfig { checks: checks.to_vec(), ..HarnessConfig::default() };
    let report = check_axioms(&MinimaxSelector::default(), &corpus_for(fx), &cfg);
    let ok = !report.verdicts.is_empty() && report.verdicts.iter().all(|v| v.status == Status::Pass);
    let detail = report
        .verdicts
        .iter()
        .map(|v| {
            let tag = match v.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            format!("{} {tag} {}/{}", v.check.as_str(), v.checked - v.counterexamples.len(), v.checked)
        })
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, detail))
}

fn naive(fx: &Fixtures) -> Outcome {
    let mut corpus = fig1_corpus();
    let f = Hamiltonian::Radial(fx.fig1_f.clone());
    let (p, m) = (Hamiltonian::Radial(fx.fig1_fpm.0.clone()), Hamiltonian::Radial(fx.fig1_fpm.1.clone()));
    corpus.elements = vec![f.clone(), p.clone(), m.clone()];
    corpus.lipschitz_pairs = vec![(f.clone(), p.clone()), (f.clone(), m.clone())];
    let cfg = HarnessConfig { checks: vec![CheckId::Lipschitz], ..HarnessConfig::default() };
    let report = check_axioms(&NaiveMinSelector, &corpus, &cfg);
    let Some(v) = report.verdict(CheckId::Lipschitz) else {
        return Ok((false, "no lipschitz verdict".into()));
    };
    let fig1_cx = v.counterexamples.iter().any(|c| c.inputs.first() == Some(&f) && (c.inputs.get(1) == Some(&p) || c.inputs.get(1) == Some(&m)));
    let m0 = radial_spectrum(&fx.fig1_f).min_action();
    let mut ratios = Vec::new();
    for g in [&fx.fig1_fpm.0, &fx.fig1_fpm.1] {
        ratios.push((radial_spectrum(g).min_action() - m0).abs() / g.sup_distance(&fx.fig1_f));
    }
    let ok = v.status == Status::Fail && fig1_cx && ratios.iter().all(|r| *r > FIG1_RATIO);
    Ok((ok, format!("lipschitz {:?} with {} counterexamples, ratios {:.3} and {:.3}", v.status, v.counterexamples.len(), ratios[0], ratios[1])))
}

fn radial(fx: &Fixtures) -> Outcome {
    let profiles = [&fx.fig1_f, &fx.fig1_fpm.0, &fx.fig1_fpm.1, &fx.fig_fe];
    let (mut n, mut worst, mut action_err, mut turn_err) = (0usize, 0.0f64, 0.0f64, 0.0f64);
    for f in profiles {
        for e in radial_spectrum(f).entries {
            if e.kind == EntryKind::Origin {
                continue;
            }
            let o = radial_orbit(f, e.s, ORBIT_STEPS);
            n += 1;
            worst = worst.max(o.closure_error);
            if e.kind == EntryKind::Sphere {
                action_err = action_err.max((o.action - e.action).abs());
                turn_err = turn_err.max((o.turns - e.k as f64).abs());
            }
        }
    }
    let mut two_valued = 0;
    for (r, gap) in MIN_PROFILE_CASES {
        let f = min_negative_profile(r, gap)?;
        let a = radial_spectrum(&f).actions();
        let f0 = f.eval(0.0).0;
        if a.len() == 2 && (a[0] - f0).abs() <= 1e-12 && a[1] == 0.0 {
            two_valued += 1;
        }
    }
    let ok = n > 0 && worst < CLOSURE_TOL && action_err < CLOSURE_TOL && turn_err < CLOSURE_TOL && two_valued == MIN_PROFILE_CASES.len();
    Ok((
        ok,
        format!(
            "{n} orbits, closure {worst:.3e}, action {action_err:.3e}, turns {turn_err:.3e}; {two_valued}/{} two-valued",
            MIN_PROFILE_CASES.len()
        ),
    ))
}

fn nonsqueezing() -> Outcome {
    let t = Instant::now();
    let c = nonsqueezing_certificate(1.5, 1.0, 0.05)?;
    let anchored = c.steps.iter().all(|s| !s.anchor.is_empty());
    let mut never = true;
    for eps in [0.01, 0.05, 0.1, 0.3, 0.5, 0.9] {
        never &= !nonsqueezing_certificate(1.0, 1.0, eps)?.verdict;
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = c.verdict && c.chain_consistent && anchored && never && secs < 1.0;
    Ok((ok, format!("(1.5, 1, 0.05) {}; {} steps hold; (1, 1, ε) never excluded: {never}", if c.verdict { "excluded" } else { "not excluded" }, c.steps.iter().filter(|s| s.holds).count())))
}

fn nearby_orbit() -> Outcome {
    let c = nearby_orbit_certificate(&[0.0, -4.0], 3.0)?;
    Ok((c.verdict && c.chain_consistent, c.conclusion))
}

fn run_one(id: u8, fx: &Fixtures, checks: &[CheckId]) -> Outcome {
    match id {
        1 => fig2(fx),
        2 => fig3(fx),
        3 => energy_identity(fx),
        4 => energy_bound(fx),
        5 => axioms(fx, checks),
        6 => naive(fx),
        7 => radial(fx),
        8 => nonsqueezing(),
        9 => nearby_orbit(),
        _ => Err(Error::Other(format!("no criterion {id}"))),
    }
}

fn name_of(id: u8) -> &'static str {
    CRITERIA.iter().find(|c| c.0 == id).map_or("?", |c| c.1)
}

fn manifest_for(results: &[CriterionResult], fx: &Fixtures, sel: &Selection) -> Result<RunManifest> {
    let mut m = RunManifest::new("check");
    m.digest_config("fixtures", fx)?;
    m.digest_config("checks", &sel.checks)?;
    m.digest_config("criteria", &sel.criteria)?;
    m.digest_config("harness", &HarnessConfig::default())?;
    m.digest_config("search", &FamilySearchConfig::default())?;
    let h = HarnessConfig::default();
    m.tolerance("snap_tol", SNAP_TOL);
    m.tolerance("spectral_tol", h.spectral_tol);
    m.tolerance("lipschitz_slack", h.lipschitz_slack);
    m.tolerance("nontriviality_margin", h.nontriviality_margin);
    m.tolerance("property_tol", h.property_tol);
    m.tolerance("energy_rel_tol", ENERGY_REL_TOL);
    m.tolerance("energy_bound_slack", ENERGY_BOUND_SLACK);
    m.tolerance("closure_tol", CLOSURE_TOL);
    m.tolerance("chain_tol", crate::derivation::CHAIN_TOL);
    for r in results {
        m.verdict(&format!("{} {}", r.id, r.name), r.passed, r.detail.clone());
    }
    m.wall_time = results.iter().map(|r| r.wall_time).sum();
    Ok(m)
}

fn run_set(ids: &BTreeSet<u8>, fx: &Fixtures, checks: &[CheckId], on_result: &mut dyn FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let mut out = Vec::new();
    for &id in ids.iter().filter(|&&i| i != 10) {
        let t = Instant::now();
        let (passed, detail) = run_one(id, fx, checks).unwrap_or_else(|e| (false, format!("error: {e}")));
        let r = CriterionResult { id, name: name_of(id).into(), passed, detail, wall_time: t.elapsed().as_secs_f64() };
        on_result(&r);
        out.push(r);
    }
    out
}

/// Runs the selected criteria, calling `on_result` as each one finishes.
///
/// Criterion 10 re-runs the other selected criteria (all of 1–9 when it is
/// selected alone) and compares the two manifests.
pub fn run_acceptance(sel: &Selection, fx: &Fixtures, on_result: &mut dyn FnMut(&CriterionResult)) -> Result<AcceptanceReport> {
    let mut results = run_set(&sel.criteria, fx, &sel.checks, on_result);
    if sel.criteria.contains(&10) {
        let t = Instant::now();
        let base: BTreeSet<u8> = sel.criteria.iter().copied().filter(|&i| i != 10).collect();
        let (first, base) = if base.is_empty() {
            let all: BTreeSet<u8> = (1..10).collect();
            (run_set(&all, fx, &sel.checks, &mut |_| {}), all)
        } else {
            (results.clone(), base)
        };
        let again = run_set(&base, fx, &sel.checks, &mut |_| {});
        let inner = Selection { criteria: base, checks: sel.checks.clone() };
        let a = manifest_for(&first, fx, &inner)?.canonical()?;
        let b = manifest_for(&again, fx, &inner)?.canonical()?;
        let same = a == b;
        let r = CriterionResult {
            id: 10,
            name: name_of(10).into(),
            passed: same,
            detail: format!("manifests of two runs over {} criteria are {}", inner.criteria.len(), if same { "byte-identical" } else { "different" }),
            wall_time: t.elapsed().as_secs_f64(),
        };
        on_result(&r);
        results.push(r);
    }
    let manifest = manifest_for(&results, fx, sel)?;
    Ok(AcceptanceReport { results, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parsing() {
        assert_eq!(Selection::parse("").unwrap(), Selection::default());
        let s = Selection::parse("spectrality").unwrap();
        assert_eq!(s.criteria, BTreeSet::from([5]));
        assert_eq!(s.checks, vec![CheckId::Spectrality]);
        let s = Selection::parse("8, nearby-orbit,1").unwrap();
        assert_eq!(s.criteria, BTreeSet::from([1, 8, 9]));
        assert_eq!(s.checks.len(), CheckId::ALL.len());
        assert!(Selection::parse("bogus").is_err());
    }

    #[test]
    fn certificates_pass() {
        let sel = Selection::parse("8,9").unwrap();
        let r = run_acceptance(&sel, &Fixtures::default(), &mut |_| {}).unwrap();
        assert!(r.all_pass(), "{:?}", r.results);
        assert_eq!(r.manifest.verdicts.len(), 2);
    }
}
