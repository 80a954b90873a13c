//! Closed-form radial spectra, and how far `min spec` jumps under a tiny change of `f`.

use selector_lab::fixtures::{fig1_f, fig1_f_minus, fig1_f_plus};
use selector_lab::radial::{periodic_levels, radial_spectrum};

pub fn run_example() -> Vec<(f64, f64)> {
    let f = fig1_f();
    let base = radial_spectrum(&f).min_action();
    let mut out = Vec::new();
    for (name, g) in [("f", fig1_f()), ("f_plus", fig1_f_plus()), ("f_minus", fig1_f_minus())] {
        let spec = radial_spectrum(&g);
        let d = g.sup_distance(&f);
        println!("{name:8} actions {:?}  orbits {:?}  ‖g − f‖ = {d:.4}", spec.actions(), periodic_levels(&g));
        out.push((spec.min_action() - base, d));
    }
    out
}

fn main() {
    run_example();
}
