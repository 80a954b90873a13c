//! Walks the derivation that excludes a ball of radius 1.5 from a cylinder of radius 1.

use selector_lab::derivation::nonsqueezing_certificate;
use selector_lab::error::Result;

pub fn run_example() -> Result<(bool, bool)> {
    let c = nonsqueezing_certificate(1.5, 1.0, 0.05)?;
    for s in c.steps.iter().filter(|s| !s.id.contains('.')) {
        println!("{:>7} {:<26} {:?}  {:.9} vs {:.9}  {}", s.id, s.anchor, s.tag, s.lhs, s.rhs, if s.holds { "holds" } else { "does not hold" });
    }
    println!("{}", c.conclusion);
    let equal = nonsqueezing_certificate(1.0, 1.0, 0.05)?;
    println!("{}", equal.conclusion);
    Ok((c.verdict, equal.verdict))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
