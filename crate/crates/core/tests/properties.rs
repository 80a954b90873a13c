//! Invariants as property tests.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selector_lab::corpus::random_soft;
use selector_lab::critical::{find_critical_points, SearchBox};
use selector_lab::derivation::{forced_value, nonsqueezing_certificate, Fact};
use selector_lab::field::{pt, Bump, PerturbedQuadratic, RadialProfile};
use selector_lab::radial::{min_negative_profile, radial_spectrum};
use selector_lab::selector::{selector, snap, FamilySearchConfig, SNAP_TOL};

fn soft(seed: u64) -> PerturbedQuadratic {
    random_soft(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn bump() -> impl Strategy<Value = Bump> {
    (-1.5..1.5f64, -1.5..1.5f64, -1.0..1.0f64, 0.2..1.2f64).prop_map(|(x, y, a, r)| Bump { center: [x, y], amplitude: a, radius: r })
}

fn model() -> impl Strategy<Value = PerturbedQuadratic> {
    prop::collection::vec(bump(), 0..4).prop_map(|bumps| PerturbedQuadratic { bumps, offset: 0.0 })
}

fn profile() -> impl Strategy<Value = RadialProfile> {
    prop::collection::vec((0.1..1.0f64, -2.0..2.0f64, -3.0..3.0f64), 2..6).prop_map(|pts| {
        let mut s = 0.0;
        let mut knots = vec![0.0];
        let mut values = vec![0.0];
        let mut derivs = vec![0.0];
        for (ds, v, d) in pts {
            s += ds;
            knots.push(s);
            values.push(v);
            derivs.push(d);
        }
        RadialProfile::from_hermite(knots, values, derivs).unwrap()
    })
}

proptest! {
    #[test]
    fn gradient_matches_finite_differences(h in model(), x in -2.5..2.5f64, y in -2.5..2.5f64) {
        let e = 1e-5;
        let g = h.grad(pt(x, y));
        let gx = (h.eval(pt(x + e, y)) - h.eval(pt(x - e, y))) / (2.0 * e);
        let gy = (h.eval(pt(x, y + e)) - h.eval(pt(x, y - e))) / (2.0 * e);
        prop_assert!((g[0] - gx).abs() < 1e-6 && (g[1] - gy).abs() < 1e-6, "{g:?} vs ({gx}, {gy})");
    }

    #[test]
    fn unperturbed_outside_the_bumps(h in model(), x in -4.0..4.0f64, y in -4.0..4.0f64) {
        let p = pt(x, y);
        prop_assume!(h.bumps.iter().all(|b| !b.covers(p)));
        prop_assert_eq!(h.eval(p), x * x - y * y);
        prop_assert_eq!(h.grad(p), pt(2.0 * x, -2.0 * y));
    }

    #[test]
    fn profiles_are_c1_at_knots(f in profile()) {
        for i in 0..f.pieces() - 1 {
            let (a, b, [c0, c1, c2, c3]) = f.piece(i);
            let t = b - a;
            let left = (c0 + t * (c1 + t * (c2 + t * c3)), c1 + t * (2.0 * c2 + 3.0 * t * c3));
            let (_, _, [d0, d1, _, _]) = f.piece(i + 1);
            prop_assert!((left.0 - d0).abs() < 1e-12 * (1.0 + d0.abs()));
            prop_assert!((left.1 - d1).abs() < 1e-12 * (1.0 + d1.abs()));
        }
    }

    #[test]
    fn radial_scaling_multiplies_actions(r in 0.8..3.0f64, gap in 0.05..1.0f64, tau in -0.7..0.7f64) {
        let f = min_negative_profile(r, gap).unwrap();
        let a = radial_spectrum(&f).actions();
        let b = radial_spectrum(&f.rescaled(tau)).actions();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - tau.exp() * x).abs() < 1e-9 * (1.0 + x.abs()), "{a:?} {b:?}");
        }
    }

    #[test]
    fn min_negative_profiles_have_two_levels(r in 0.5..4.0f64, frac in 0.01..0.95f64) {
        let f = min_negative_profile(r, frac * std::f64::consts::PI * r * r).unwrap();
        let a = radial_spectrum(&f).actions();
        prop_assert_eq!(a.len(), 2, "{:?}", a);
        prop_assert_eq!(a[1], 0.0);
        prop_assert!(a[0] < 0.0);
    }

    #[test]
    fn forced_value_shrinks_with_facts(
        spec in prop::collection::vec(-5.0..5.0f64, 1..8),
        e in 0.1..6.0f64,
        e2 in 0.1..6.0f64,
        c in -2.0..2.0f64,
        tau in -1.0..1.0f64,
    ) {
        // transforms rewrite what came before them; appended constraints only cut
        let base = [Fact::DisplacementEnergy(e), Fact::Shift(c), Fact::Scale(tau)];
        let added = [Fact::NonpositiveNonzero, Fact::DisplacementEnergy(e2)];
        let mut prev: Option<Vec<f64>> = None;
        for n in 0..=added.len() {
            let facts: Vec<Fact> = base.iter().chain(&added[..n]).copied().collect();
            let now = forced_value(&spec, &facts).map(|f| f.candidates()).unwrap_or_default();
            if let Some(p) = &prev {
                prop_assert!(now.iter().all(|x| p.contains(x)), "{p:?} -> {now:?}");
            }
            prev = Some(now);
        }
    }

    #[test]
    fn nonsqueezing_monotone(r in 0.3..3.0f64, dr in 0.0..1.0f64, big_r in 0.3..3.0f64, d_big in 0.0..1.0f64) {
        let eps = 0.1 * r.min(big_r);
        let base = nonsqueezing_certificate(r, big_r, eps).unwrap().verdict;
        if base {
            prop_assert!(nonsqueezing_certificate(r + dr, big_r, eps).unwrap().verdict);
            prop_assert!(nonsqueezing_certificate(r, (big_r - d_big).max(0.05), eps).unwrap().verdict);
        }
        let c = nonsqueezing_certificate(r, big_r, eps).unwrap();
        prop_assert!(c.steps.iter().all(|s| s.holds || s.id == "6"));
    }

    #[test]
    fn spectrum_shifts_with_offset(seed in any::<u64>(), c in -3.0..3.0f64) {
        let h = soft(seed);
        let bx = SearchBox::covering(&h, 1.0);
        let a = find_critical_points(&h, &bx, 32).unwrap();
        let b = find_critical_points(&h.shifted(c), &bx, 32).unwrap();
        prop_assert_eq!(a.critical_points.len(), b.critical_points.len());
        for (p, q) in a.critical_points.iter().zip(&b.critical_points) {
            prop_assert!((q.value - p.value - c).abs() < 1e-12);
            prop_assert_eq!(p.location, q.location);
        }
    }

    #[test]
    fn critical_points_are_critical(seed in any::<u64>()) {
        let h = soft(seed);
        let rep = find_critical_points(&h, &SearchBox::covering(&h, 1.0), 32).unwrap();
        for c in &rep.critical_points {
            prop_assert!(h.grad(c.point()).norm() < 1e-10);
        }
    }

    #[test]
    fn snap_lands_in_the_spectrum(values in prop::collection::vec(-3.0..3.0f64, 1..6), k in 0usize..6, d in -2e-5..2e-5f64) {
        let v = values[k % values.len()];
        let (s, dist) = snap(v + d, &values).unwrap();
        prop_assert!(values.contains(&s));
        prop_assert!(dist <= d.abs() + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn doubling_the_grid_keeps_every_point(seed in any::<u64>()) {
        let h = soft(seed);
        let bx = SearchBox::covering(&h, 1.0);
        let coarse = find_critical_points(&h, &bx, 32).unwrap().critical_points.len();
        let fine = find_critical_points(&h, &bx, 64).unwrap().critical_points.len();
        prop_assert!(fine >= coarse, "{coarse} -> {fine}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn selector_is_spectral(seed in any::<u64>()) {
        let h = soft(seed);
        let rep = find_critical_points(&h, &SearchBox::covering(&h, 1.0), 64).unwrap();
        let r = selector(&h, &FamilySearchConfig::default(), &rep).unwrap();
        prop_assert!(r.spectral_distance < SNAP_TOL, "{r:?}");
        prop_assert!(rep.critical_points.iter().any(|c| (c.value - r.value).abs() < 1e-12));
    }
}
