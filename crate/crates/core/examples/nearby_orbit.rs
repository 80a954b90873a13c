//! Forced values: the two constraints leave no room in `{−‖K‖ − 1, 0}`.

use selector_lab::derivation::{dense_orbit_spectrum, forced_value, nearby_orbit_certificate, Fact};
use selector_lab::error::Result;

pub fn run_example() -> Result<(bool, bool)> {
    let k = 3.0;
    let hit = nearby_orbit_certificate(&dense_orbit_spectrum(k), k)?;
    println!("{{−4, 0}}: {}", hit.conclusion);
    let miss = nearby_orbit_certificate(&[-2.0, 0.0], k)?;
    println!("{{−2, 0}}: {}", miss.conclusion);
    let fv = forced_value(&[-1.5, 0.0], &[Fact::NonpositiveNonzero])?;
    println!("spectrum {{−1.5, 0}}, σ < 0: {:?}", fv.conclusion);
    Ok((hit.verdict, miss.verdict))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
