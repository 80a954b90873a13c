//! The selector on the saddle fixture and on the negative origin bump.

use selector_lab::critical::{find_critical_points, SearchBox};
use selector_lab::error::Result;
use selector_lab::fixtures::{fig2_saddle, negative_origin_bump};
use selector_lab::selector::{selector, FamilySearchConfig};

pub fn run_example() -> Result<Vec<f64>> {
    let cfg = FamilySearchConfig::default();
    let mut out = Vec::new();
    for (name, h) in [("saddle", fig2_saddle()), ("origin bump", negative_origin_bump())] {
        let report = find_critical_points(&h, &SearchBox::covering(&h, 1.0), 64)?;
        let r = selector(&h, &cfg, &report)?;
        println!("{name}: σ = {:+.6}  (raw {:+.9}, {} families, {:?})", r.value, r.raw_minimax, r.family_bounds.len(), r.status);
        out.push(r.value);
    }
    Ok(out)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
