//! Shooting sweep for the degenerate nose: only the two constant lines stay bounded.

use selector_lab::critical::{find_critical_points, SearchBox};
use selector_lab::error::Result;
use selector_lab::family::DeformationFamily;
use selector_lab::fixtures::fig3_nose;
use selector_lab::flow::{sweep, FlowConfig};

pub fn run_example() -> Result<(usize, usize)> {
    let nose = fig3_nose();
    let h = &nose.model;
    let report = find_critical_points(h, &SearchBox::covering(h, 1.0), 64)?;
    let sw = sweep(&DeformationFamily::autonomous(h), &report, &FlowConfig::default(), true)?;
    for l in &sw.lines {
        let a = l.alpha_limit.as_ref().map(|c| c.location).unwrap_or_default();
        println!("bounded from ({:.4}, {:.4}): constant {}, energy {:.3e}", a[0], a[1], l.constant, l.energy);
    }
    println!("{} escaping shots", sw.shots.len());
    Ok((sw.lines.len(), sw.shots.len()))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
