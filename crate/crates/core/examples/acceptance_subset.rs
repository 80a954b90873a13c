//! Runs a slice of the acceptance suite (default `8,9`; pass any `--only` string).

use selector_lab::acceptance::{run_acceptance, Fixtures, Selection};
use selector_lab::error::Result;

pub fn run_example(only: &str) -> Result<bool> {
    let report = run_acceptance(&Selection::parse(only)?, &Fixtures::default(), &mut |r| println!("{}", r.line()))?;
    Ok(report.all_pass())
}

fn main() -> Result<()> {
    let only = std::env::args().nth(1).unwrap_or_else(|| "8,9".into());
    run_example(&only).map(|_| ())
}
