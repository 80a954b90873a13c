//! Every example runs and returns what its printout claims.

#[allow(dead_code)]
#[path = "../examples/critical_points.rs"]
mod critical_points;
#[allow(dead_code)]
#[path = "../examples/flow_lines.rs"]
mod flow_lines;
#[allow(dead_code)]
#[path = "../examples/minimax_selector.rs"]
mod minimax_selector;
#[allow(dead_code)]
#[path = "../examples/radial_spectrum.rs"]
mod radial_spectrum;
#[allow(dead_code)]
#[path = "../examples/axiom_harness.rs"]
mod axiom_harness;
#[allow(dead_code)]
#[path = "../examples/nonsqueezing.rs"]
mod nonsqueezing;
#[allow(dead_code)]
#[path = "../examples/nearby_orbit.rs"]
mod nearby_orbit;
#[allow(dead_code)]
#[path = "../examples/figure_data.rs"]
mod figure_data;
#[allow(dead_code)]
#[path = "../examples/acceptance_subset.rs"]
mod acceptance_subset;
#[allow(dead_code)]
#[path = "../examples/mountain_pass.rs"]
mod mountain_pass;

use selector_lab::axioms::Status;
use selector_lab::fixtures::{FIG2_CRITICAL_VALUES, FIG2_VALUE_TOL};

#[test]
fn critical_points_match_frozen_values() {
    let mut pts = critical_points::run_example().unwrap();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(pts.len(), 5);
    for ((v, _), want) in pts.iter().zip(FIG2_CRITICAL_VALUES) {
        assert!((v - want).abs() < FIG2_VALUE_TOL, "{v} vs {want}");
    }
    let saddles = pts.iter().filter(|p| p.1 == 1).count();
    assert_eq!(saddles, 3);
}

#[test]
fn flow_lines_are_the_two_constants() {
    let (bounded, escaping) = flow_lines::run_example().unwrap();
    assert_eq!(bounded, 2);
    assert!(escaping > 0);
}

#[test]
fn minimax_values() {
    let v = minimax_selector::run_example().unwrap();
    assert!(v[0].abs() < 1e-9);
    assert!((v[1] + 0.162159).abs() < 1e-5, "{}", v[1]);
}

#[test]
fn radial_minima_jump() {
    let rows = radial_spectrum::run_example();
    assert_eq!(rows[0], (0.0, 0.0));
    for &(jump, dist) in &rows[1..] {
        assert!(jump > 10.0 * dist, "jump {jump} against distance {dist}");
    }
}

#[test]
fn axiom_harness_statuses() {
    let (naive, minimax) = axiom_harness::run_example();
    assert_eq!(naive, Status::Fail);
    assert_eq!(minimax, vec![Status::Pass; 3]);
}

#[test]
fn certificates() {
    assert_eq!(nonsqueezing::run_example().unwrap(), (true, false));
    assert_eq!(nearby_orbit::run_example().unwrap(), (true, false));
}

#[test]
fn figure_files() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(figure_data::run_example(dir.path().to_path_buf()).unwrap(), 13);
    assert!(dir.path().join("fig3_flows.csv").is_file());
}

#[test]
fn acceptance_certificates() {
    assert!(acceptance_subset::run_example("8,9").unwrap());
}

#[test]
fn selector_meets_pass_value() {
    let (sigma, pass) = mountain_pass::run_example().unwrap();
    assert!(sigma < -1e-3);
    assert!((sigma - pass).abs() < 1e-3, "{sigma} vs {pass}");
}
