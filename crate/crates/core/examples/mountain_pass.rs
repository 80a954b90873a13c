//! The minimax value of the origin bump against the sublevel-connectivity oracle.

use selector_lab::critical::{find_critical_points, SearchBox};
use selector_lab::error::Result;
use selector_lab::fixtures::negative_origin_bump;
use selector_lab::oracles::pass_value;
use selector_lab::selector::{selector, FamilySearchConfig};

pub fn run_example() -> Result<(f64, f64)> {
    let h = negative_origin_bump();
    let bx = SearchBox::covering(&h, 1.0);
    let report = find_critical_points(&h, &bx, 64)?;
    let sigma = selector(&h, &FamilySearchConfig::default(), &report)?.value;
    let pass = pass_value(&h, &SearchBox::square(3.0), 600);
    println!("σ = {sigma:.6}, pass value on a 600² grid = {pass:.6}");
    Ok((sigma, pass))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
