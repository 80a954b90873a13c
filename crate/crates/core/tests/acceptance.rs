//! Runs acceptance criteria 1 to 10, one line per criterion, then checks that a
//! tampered saddle fixture is caught.

use std::process::ExitCode;

use selector_lab::acceptance::{run_acceptance, FixtureOverrides, Fixtures, Selection};
use selector_lab::fixtures::fig2_saddle;

fn main() -> ExitCode {
    let report = run_acceptance(&Selection::default(), &Fixtures::default(), &mut |r| println!("{}", r.line())).expect("acceptance suite runs");
    let mut ok = report.all_pass() && report.results.len() == 10;

    let mut tampered = fig2_saddle();
    tampered.bumps[0].amplitude = 5.0;
    let fx = Fixtures::default().with(FixtureOverrides { fig2: Some(tampered), ..Default::default() });
    let mutated = run_acceptance(&Selection::parse("1").unwrap(), &fx, &mut |_| {}).expect("criterion 1 runs");
    let caught = !mutated.all_pass();
    println!("mutation   FIG2_SADDLE amplitude 5.0  {}", if caught { "PASS  criterion 1 fails as it should" } else { "FAIL  criterion 1 still passes" });
    ok &= caught;

    println!("acceptance: {}", if ok { "all criteria pass" } else { "FAILED" });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
