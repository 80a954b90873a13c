//! Newton sweep over the saddle fixture, cross-checked against the grid oracle.

use selector_lab::critical::{find_critical_points, SearchBox};
use selector_lab::error::Result;
use selector_lab::fixtures::fig2_saddle;
use selector_lab::oracles::grid_critical_points;

pub fn run_example() -> Result<Vec<(f64, u8)>> {
    let h = fig2_saddle();
    let bx = SearchBox::covering(&h, 1.0);
    let report = find_critical_points(&h, &bx, 64)?;
    let grid = grid_critical_points(&h, &bx, 400);
    for c in &report.critical_points {
        println!("({:+.6}, {:+.6})  value {:+.9}  index {}", c.location[0], c.location[1], c.value, c.morse_index);
    }
    println!("grid oracle finds {} points", grid.len());
    Ok(report.critical_points.iter().map(|c| (c.value, c.morse_index)).collect())
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
