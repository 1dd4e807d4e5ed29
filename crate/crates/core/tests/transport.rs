mod common;

use common::*;
use eelab::geometry::{w1, w1_circle, w1_interval, Domain, EmpiricalMeasure, IntervalUnion};
use proptest::prelude::*;
use rand::Rng;

fn measure(domain: Domain, atoms: &[(f64, f64)]) -> EmpiricalMeasure {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    EmpiricalMeasure::new(domain, atoms.iter().map(|&(x, w)| (x, w / total))).unwrap()
}

fn atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.01..1.0f64), 1..10)
}

fn domains() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::UNIT_INTERVAL), Just(Domain::Circle)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn w1_is_a_metric(domain in domains(), a in atoms(), b in atoms(), c in atoms()) {
        let (x, y, z) = (measure(domain, &a), measure(domain, &b), measure(domain, &c));
        let (xy, yx) = (w1(&x, &y).unwrap(), w1(&y, &x).unwrap());
        let (xz, yz) = (w1(&x, &z).unwrap(), w1(&y, &z).unwrap());
        prop_assert!(xy >= 0.0);
        prop_assert!((xy - yx).abs() <= 1e-12);
        prop_assert!(xz <= xy + yz + 1e-12);
        prop_assert!(w1(&x, &x).unwrap() <= 1e-12);
        prop_assert!(xy <= domain.diameter() + 1e-12);
    }

    #[test]
    fn merged_atoms_are_indiscernible(domain in domains(), a in atoms()) {
        // Splitting every atom in two leaves the measure unchanged.
        let split: Vec<(f64, f64)> = a.iter().flat_map(|&(x, w)| [(x, w / 3.0), (x, 2.0 * w / 3.0)]).collect();
        prop_assert!(w1(&measure(domain, &a), &measure(domain, &split)).unwrap() <= 1e-12);
    }

    #[test]
    fn named_routines_agree_with_w1(a in atoms(), b in atoms()) {
        let (i, j) = (measure(Domain::UNIT_INTERVAL, &a), measure(Domain::UNIT_INTERVAL, &b));
        prop_assert_eq!(w1_interval(&i, &j).unwrap(), w1(&i, &j).unwrap());
        let (p, q) = (measure(Domain::Circle, &a), measure(Domain::Circle, &b));
        prop_assert_eq!(w1_circle(&p, &q).unwrap(), w1(&p, &q).unwrap());
        prop_assert!(w1_circle(&p, &q).unwrap() <= w1_interval(&i, &j).unwrap() + 1e-12);
    }

    #[test]
    fn circle_w1_is_rotation_invariant(a in atoms(), b in atoms(), shift in 0.0..1.0f64) {
        let rotate = |v: &[(f64, f64)]| -> Vec<(f64, f64)> { v.iter().map(|&(x, w)| ((x + shift).fract(), w)).collect() };
        let before = w1(&measure(Domain::Circle, &a), &measure(Domain::Circle, &b)).unwrap();
        let after = w1(&measure(Domain::Circle, &rotate(&a)), &measure(Domain::Circle, &rotate(&b))).unwrap();
        prop_assert!((before - after).abs() <= 1e-9);
    }
}

#[test]
fn w1_matches_enumerated_matchings() {
    assert!(w1_oracle_discrepancy(200, 1) <= 1e-9);
}

#[test]
fn w1_is_at_most_twice_levy_prokhorov() {
    assert!(lp_bound_slack(100, 2) >= -1e-9);
}

#[test]
fn nested_sets_obey_the_share_bounds() {
    let (lp, w) = nested_set_slack(100, 3);
    assert!(lp >= -1e-9, "modified LP slack {lp}");
    assert!(w >= -1e-12, "w1 slack {w}");
}

#[test]
fn close_measures_nearly_cover_eroded_sets() {
    // w1(μ, ν) < ε ⇒ ν(B) ≥ μ(B_{−δ}) − ε/δ.
    let mut rng = rng(4);
    for k in 0..50 {
        let domain = if k % 2 == 0 {
            Domain::UNIT_INTERVAL
        } else {
            Domain::Circle
        };
        let xs = points(&mut rng, 40);
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| domain.normalize((x + rng.random_range(-0.02..0.02)).clamp(0.0, 1.0 - 1e-12)))
            .collect();
        let (mu, nu) = (
            EmpiricalMeasure::uniform(domain, &xs).unwrap(),
            EmpiricalMeasure::uniform(domain, &ys).unwrap(),
        );
        let eps = w1(&mu, &nu).unwrap() * (1.0 + 1e-9) + 1e-15;
        let set: IntervalUnion = random_set(&mut rng, domain);
        for delta in [0.05, 0.1] {
            assert!(nu.mass(&set) >= mu.mass(&set.erode(delta)) - eps / delta - 1e-12);
        }
    }
}

#[test]
fn brute_force_oracle_sanity() {
    assert_eq!(permutations(4).len(), 24);
    assert!((brute_force_w1(&[0.0, 0.5], &[0.5, 0.0], interval_distance)).abs() < 1e-15);
    assert!((brute_force_w1(&[0.05], &[0.95], circle_metric) - 0.1).abs() < 1e-12);
}
