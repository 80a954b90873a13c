//! Axiom checks: the naive `min spec` selector breaks Lipschitz continuity on the radial pair,
//! while the minimax selector passes a few quick checks on the toy corpus.

use selector_lab::axioms::{check_axioms, CheckId, HarnessConfig, MinimaxSelector, NaiveMinSelector, Status};
use selector_lab::corpus::{default_corpus, fig1_corpus, DEFAULT_SEED};

pub fn run_example() -> (Status, Vec<Status>) {
    let naive = check_axioms(&NaiveMinSelector, &fig1_corpus(), &HarnessConfig { checks: vec![CheckId::Lipschitz], ..Default::default() });
    let lip = naive.verdict(CheckId::Lipschitz).expect("lipschitz ran");
    for c in &lip.counterexamples {
        println!("naive: {}", c.detail);
    }
    let mut corpus = default_corpus(DEFAULT_SEED);
    corpus.property_elements.truncate(3);
    let cfg = HarnessConfig { checks: vec![CheckId::Zero, CheckId::Nontriviality, CheckId::Shift], ..Default::default() };
    let report = check_axioms(&MinimaxSelector::default(), &corpus, &cfg);
    for v in &report.verdicts {
        println!("minimax {:<14} {:?} ({} checked)", v.check.as_str(), v.status, v.checked);
    }
    (lip.status, report.verdicts.iter().map(|v| v.status).collect())
}

fn main() {
    run_example();
}
