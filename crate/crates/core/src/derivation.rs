//! Values forced by the selector axioms, and the two certificate chains built on them.
//!
//! Facts turn into interval constraints on `σ`; intersecting them with a
//! spectrum either pins `σ` down, leaves several candidates, or leaves none.
//! The empty case is the useful one: it means the premises cannot all hold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{min_negative_profile, profile_hofer_norm, radial_spectrum};

/// Absolute tolerance of every inequality checked in a derivation.
pub const CHAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fact", content = "value", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Fact {
    /// `H ≤ 0`, `H ≠ 0`: `σ(H) < 0`.
    NonpositiveNonzero,
    /// `H` is displaced by a flow of Hofer norm `e`: `|σ(H)| ≤ e`.
    DisplacementEnergy(f64),
    /// Pass to `H + c`: `σ(H + c) = σ(H) + c`.
    Shift(f64),
    /// Pass to the conformal rescaling by `e^τ`: `σ ↦ e^τ σ`.
    Scale(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self { lo: f(self.lo), hi: f(self.hi), ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub interval: Interval,
    /// The fact that produced the constraint, and any transforms applied after it.
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "conclusion", content = "values", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    Forced(f64),
    /// Two or more spectral values satisfy every constraint.
    Undetermined(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcedValue {
    pub spectrum: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub conclusion: Conclusion,
}

impl ForcedValue {
    pub fn candidates(&self) -> Vec<f64> {
        match &self.conclusion {
            Conclusion::Forced(v) => vec![*v],
            Conclusion::Undetermined(v) => v.clone(),
        }
    }
}

/// Constraints implied by `facts`, read in order; transforms act on everything before them.
pub fn constraints(facts: &[Fact]) -> Vec<Constraint> {
    let mut out: Vec<Constraint> = Vec::new();
    for f in facts {
        match *f {
            Fact::NonpositiveNonzero => out.push(Constraint {
                interval: Interval { lo: f64::NEG_INFINITY, hi: 0.0, lo_open: true, hi_open: true },
                provenance: "non-positive and non-zero: σ < 0".into(),
            }),
            Fact::DisplacementEnergy(e) => out.push(Constraint {
                interval: Interval { lo: -e, hi: e, lo_open: false, hi_open: false },
                provenance: format!("displacement energy {e}: |σ| ≤ {e}"),
            }),
            Fact::Shift(c) => {
                for k in &mut out {
                    k.interval = k.interval.map(|x| x + c);
                    k.provenance.push_str(&format!(", shifted by {c}"));
                }
            }
            Fact::Scale(tau) => {
                let m = tau.exp();
                for k in &mut out {
                    k.interval = k.interval.map(|x| m * x);
                    k.provenance.push_str(&format!(", scaled by e^{tau}"));
                }
            }
        }
    }
    out
}

/// Intersects the spectrum with the constraints of `facts`.
///
/// `Err(Error::EmptyIntersection)` when no spectral value survives.
pub fn forced_value(spectrum: &[f64], facts: &[Fact]) -> Result<ForcedValue> {
    let mut spec = spectrum.to_vec();
    spec.sort_by(f64::total_cmp);
    spec.dedup();
    let constraints = constraints(facts);
    let survivors: Vec<f64> = spec.iter().copied().filter(|x| constraints.iter().all(|c| c.interval.contains(*x))).collect();
    let conclusion = match survivors.len() {
        0 => return Err(Error::EmptyIntersection),
        1 => Conclusion::Forced(survivors[0]),
        _ => Conclusion::Undetermined(survivors),
    };
    Ok(ForcedValue { spectrum: spec, constraints, conclusion })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepTag {
    /// Evaluated by this crate.
    Computed,
    /// Assumed; the number is recorded, not derived.
    Premise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub id: String,
    /// Name of the property or construction the step rests on.
    pub anchor: String,
    pub tag: StepTag,
    pub statement: String,
    /// The step asserts `lhs ≤ rhs` (or `=` when `equality`), checked to `CHAIN_TOL`.
    pub lhs: f64,
    pub rhs: f64,
    pub equality: bool,
    pub holds: bool,
}

impl DerivationStep {
    fn new(id: &str, anchor: &str, tag: StepTag, statement: String, lhs: f64, rhs: f64, equality: bool) -> Self {
        let holds = if equality { (lhs - rhs).abs() <= CHAIN_TOL * (1.0 + rhs.abs()) } else { lhs <= rhs + CHAIN_TOL };
        Self { id: id.into(), anchor: anchor.into(), tag, statement, lhs, rhs, equality, holds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub kind: String,
    pub inputs: Vec<(String, f64)>,
    pub steps: Vec<DerivationStep>,
    /// Every step holds.
    pub chain_consistent: bool,
    /// The derivation reached its target: an excluded embedding, or a certified orbit.
    pub verdict: bool,
    pub conclusion: String,
}

/// Number of shrinking gaps used to approach the ball's capacity from below.
pub const GAP_STEPS: usize = 11;

/// Checks whether the ball `B(r)` can be excluded from the cylinder `Z(R)`,
/// shrinking both by `ε` so that every object is compactly supported.
///
/// Step 1 is computed: for gaps `δ_j = δ_0 2^{−j}` a minimal non-positive
/// profile on `B(r − ε)` has spectrum `{f(0), 0}` and the forced value
/// `σ = f(0) = −(π(r − ε)² − δ_j)`, so the capacity of `B(r − ε)` is at least
/// `π(r − ε)² − δ_j` for every `j`. Steps 2–4 are premises (symplectic
/// invariance, inclusion monotonicity, the displacement bound for the
/// truncated cylinder); step 5 compares radii, and step 6 holds when the
/// resulting bounds on the capacity of the cylinder piece are incompatible.
pub fn nonsqueezing_certificate(r: f64, big_r: f64, eps: f64) -> Result<DerivationReport> {
    if !(r > 0.0 && big_r > 0.0 && eps > 0.0 && eps < r) {
        return Err(Error::Other(format!("need r > 0, R > 0, 0 < ε < r; got r = {r}, R = {big_r}, ε = {eps}")));
    }
    let pi = std::f64::consts::PI;
    let ball = pi * (r - eps).powi(2);
    let cyl = pi * (big_r + eps).powi(2);
    let mut steps = Vec::new();
    let gap0 = 0.5 * ball;
    let mut capacity_lower = f64::NEG_INFINITY;
    for j in 0..GAP_STEPS {
        let gap = gap0 * 0.5f64.powi(j as i32);
        let f = min_negative_profile(r - eps, gap)?;
        let spec = radial_spectrum(&f).actions();
        let forced = forced_value(&spec, &[Fact::NonpositiveNonzero])?;
        let Conclusion::Forced(sigma) = forced.conclusion else {
            return Err(Error::Other(format!("spectrum {spec:?} does not force a value")));
        };
        steps.push(DerivationStep::new(
            &format!("1.{j}"),
            "spectrality + non-positivity",
            StepTag::Computed,
            format!("gap {gap:.6e}: σ(H_f) is forced to min f, so |σ(H_f)| = π(r−ε)² − gap"),
            -sigma,
            ball - gap,
            true,
        ));
        steps.push(DerivationStep::new(
            &format!("1.{j}.norm"),
            "profile oscillation",
            StepTag::Computed,
            "|σ(H_f)| equals the oscillation max f − min f".into(),
            -sigma,
            profile_hofer_norm(&f),
            true,
        ));
        capacity_lower = capacity_lower.max(-sigma);
    }
    steps.push(DerivationStep::new(
        "1",
        "capacity from below",
        StepTag::Computed,
        "c(B(r−ε)) ≥ sup_j |σ(H_{f_j})|, within the last gap of π(r−ε)²".into(),
        ball - capacity_lower,
        gap0 * 0.5f64.powi(GAP_STEPS as i32 - 1),
        false,
    ));
    steps.push(DerivationStep::new(
        "2",
        "symplectic invariance",
        StepTag::Premise,
        "c(φ(B(r−ε))) = c(B(r−ε)) for the embedding φ".into(),
        ball,
        ball,
        true,
    ));
    steps.push(DerivationStep::new(
        "3",
        "inclusion monotonicity",
        StepTag::Premise,
        "φ(B(r−ε)) lies in a truncated cylinder U, so c(U) ≥ c(φ(B(r−ε))) ≥ π(r−ε)²".into(),
        ball,
        ball,
        true,
    ));
    steps.push(DerivationStep::new(
        "4",
        "energy-capacity bound",
        StepTag::Premise,
        "U is displaced by K₁ with ‖K₁‖ ≤ π(R₁+ε)², so c(U) ≤ π(R₁+ε)²".into(),
        cyl,
        cyl,
        true,
    ));
    steps.push(DerivationStep::new(
        "5",
        "radius comparison",
        StepTag::Computed,
        "R₁ = R, so π(R₁+ε)² ≤ π(R+ε)²".into(),
        pi * (big_r + eps).powi(2),
        cyl,
        false,
    ));
    let chain_consistent = steps.iter().all(|s| s.holds);
    // the chain ends in π(r−ε)² ≤ π(R+ε)²; it is contradicted when the cylinder side is smaller
    let mut last = DerivationStep::new(
        "6",
        "contradiction",
        StepTag::Computed,
        "the upper bound π(R+ε)² on c(U) lies below the lower bound π(r−ε)²".into(),
        cyl + CHAIN_TOL,
        ball,
        false,
    );
    last.holds = cyl + CHAIN_TOL < ball;
    let contradiction = last.holds;
    steps.push(last);
    let verdict = chain_consistent && contradiction;
    let conclusion = if verdict {
        format!("excluded: π(r−ε)² = {ball:.12} exceeds π(R+ε)² = {cyl:.12}")
    } else {
        format!("not excluded: π(r−ε)² = {ball:.12} does not exceed π(R+ε)² = {cyl:.12}")
    };
    Ok(DerivationReport {
        kind: "nonsqueezing".into(),
        inputs: vec![("r".into(), r), ("R".into(), big_r), ("eps".into(), eps)],
        steps,
        chain_consistent,
        verdict,
        conclusion,
    })
}

/// The two critical values `{−‖K‖ − 1, 0}` of the composed profile.
pub fn dense_orbit_spectrum(k_norm: f64) -> Vec<f64> {
    vec![-k_norm - 1.0, 0.0]
}

/// Certifies a non-constant periodic orbit when `σ < 0` and `|σ| ≤ ‖K‖` leave
/// no room in `spectrum` (which holds the critical values alone, as it would
/// if every periodic orbit were constant).
pub fn nearby_orbit_certificate(spectrum: &[f64], k_norm: f64) -> Result<DerivationReport> {
    if !(k_norm >= 0.0) {
        return Err(Error::Other(format!("‖K‖ must be non-negative, got {k_norm}")));
    }
    let facts = [Fact::NonpositiveNonzero, Fact::DisplacementEnergy(k_norm)];
    let mut steps: Vec<DerivationStep> = constraints(&facts)
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let (anchor, bound) = if i == 0 { ("non-positivity", 0.0) } else { ("energy-capacity bound", k_norm) };
            DerivationStep::new(&format!("{}", i + 1), anchor, StepTag::Premise, c.provenance, bound, bound, true)
        })
        .collect();
    let (verdict, conclusion) = match forced_value(spectrum, &facts) {
        Err(Error::EmptyIntersection) => {
            (true, "no critical value satisfies both constraints: a non-constant periodic orbit must exist".to_string())
        }
        Ok(fv) => (false, format!("constraints leave {:?}; no contradiction, nothing certified", fv.candidates())),
        Err(e) => return Err(e),
    };
    for (i, &v) in spectrum.iter().enumerate() {
        // each excluded value violates one of the two constraints; record by how much
        let (lhs, rhs, statement) = if v >= 0.0 {
            (0.0, v, format!("critical value {v} is not negative"))
        } else {
            (k_norm, v.abs(), format!("critical value {v} has |σ| > ‖K‖ = {k_norm}"))
        };
        let mut s = DerivationStep::new(&format!("3.{i}"), "spectrality", StepTag::Computed, statement, lhs, rhs, false);
        if v < 0.0 {
            // a strict violation of |σ| ≤ ‖K‖ is the claim here
            s.holds = v.abs() > k_norm;
        }
        steps.push(s);
    }
    let chain_consistent = steps.iter().all(|s| s.holds);
    Ok(DerivationReport {
        kind: "nearby_orbit".into(),
        inputs: vec![("k_norm".into(), k_norm)],
        steps,
        chain_consistent,
        verdict,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_value_examples() {
        let pi = std::f64::consts::PI;
        let fv = forced_value(&[-pi / 2.0, 0.0], &[Fact::NonpositiveNonzero]).unwrap();
        assert_eq!(fv.conclusion, Conclusion::Forced(-pi / 2.0));
        assert!(matches!(
            forced_value(&[0.0, -4.0], &[Fact::NonpositiveNonzero, Fact::DisplacementEnergy(3.0)]),
            Err(Error::EmptyIntersection)
        ));
        assert_eq!(forced_value(&[0.0], &[]).unwrap().conclusion, Conclusion::Forced(0.0));
        let u = forced_value(&[-1.0, 0.0, 1.0], &[]).unwrap();
        assert_eq!(u.conclusion, Conclusion::Undetermined(vec![-1.0, 0.0, 1.0]));
    }

    #[test]
    fn transforms_move_constraints() {
        // σ(H) < 0, then H + 1: σ < 1
        let fv = forced_value(&[0.5, 1.5], &[Fact::NonpositiveNonzero, Fact::Shift(1.0)]).unwrap();
        assert_eq!(fv.conclusion, Conclusion::Forced(0.5));
        let fv = forced_value(&[-3.0, -1.0], &[Fact::DisplacementEnergy(1.0), Fact::Scale(2f64.ln())]).unwrap();
        assert_eq!(fv.conclusion, Conclusion::Forced(-1.0));
    }

    #[test]
    fn nonsqueezing_examples() {
        let c = nonsqueezing_certificate(1.5, 1.0, 0.05).unwrap();
        assert!(c.verdict && c.chain_consistent);
        let pi = std::f64::consts::PI;
        assert!((pi * 1.45f64.powi(2) - 6.605).abs() < 1e-3);
        for eps in [0.01, 0.2, 0.5, 0.9] {
            assert!(!nonsqueezing_certificate(1.0, 1.0, eps).unwrap().verdict);
        }
        for eps in [0.4, 0.2, 0.1, 0.01] {
            assert!(nonsqueezing_certificate(2.0, 1.0, eps).unwrap().verdict);
        }
        assert!(nonsqueezing_certificate(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn nearby_orbit_examples() {
        let c = nearby_orbit_certificate(&dense_orbit_spectrum(3.0), 3.0).unwrap();
        assert!(c.verdict && c.chain_consistent);
        assert!(nearby_orbit_certificate(&dense_orbit_spectrum(0.0), 0.0).unwrap().verdict);
        let c = nearby_orbit_certificate(&[-2.0, 0.0], 3.0).unwrap();
        assert!(!c.verdict);
    }
}
