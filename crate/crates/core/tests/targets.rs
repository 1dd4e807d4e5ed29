mod common;

use eelab::diagnostics::DiscretizedChain;
use eelab::geometry::{w1, Domain, EmpiricalMeasure, IntervalUnion};
use eelab::targets::{tempered_density, EnergyRingSpec, Potential, TemperedFamily};
use rand::Rng;

fn families() -> Vec<TemperedFamily> {
    vec![
        TemperedFamily::with_betas(
            Domain::Circle,
            Potential::square_tooth(8, 4.0).unwrap(),
            &[1.0, 0.5, 0.1],
        )
        .unwrap(),
        TemperedFamily::with_betas(
            Domain::Circle,
            Potential::saw_tooth(6.0).unwrap(),
            &[1.0, 0.3],
        )
        .unwrap(),
        TemperedFamily::with_betas(Domain::UNIT_INTERVAL, Potential::Flat, &[1.0]).unwrap(),
    ]
}

#[test]
fn tempered_densities_integrate_to_one() {
    for fam in families() {
        for i in 0..fam.len() {
            let d = fam.density(i).unwrap();
            let (a, b) = fam.domain().bounds();
            assert!((d.mass_between(a, b) - 1.0).abs() < 1e-12);
            assert!((d.cell_masses(1000).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let x = 0.37;
            assert!(
                (tempered_density(&fam, i, x, true).unwrap() - d.density(x)).abs()
                    < 1e-9 * d.density(x).max(1.0)
            );
        }
    }
}

#[test]
fn ladder_rings_partition_the_energies() {
    let spec = EnergyRingSpec::ladder([0.0, 1.5, 3.0, 7.0]).unwrap();
    let rings: Vec<_> = (0..spec.ladder_len().unwrap())
        .map(|k| spec.ladder_ring(k).unwrap())
        .collect();
    let mut rng = common::rng(5);
    for _ in 0..1000 {
        let v = rng.random_range(0.0..10.0);
        assert_eq!(rings.iter().filter(|r| r.contains(v)).count(), 1);
        assert!(spec.ring_interval(v).unwrap().contains(v));
    }
    for cut in [0.0, 1.5, 3.0, 7.0] {
        assert_eq!(spec.ring_interval(cut).unwrap().lo, cut);
    }
}

#[test]
fn restricted_draws_follow_the_restricted_density() {
    let fam = &families()[0];
    let d = fam.density(1).unwrap();
    let set = IntervalUnion::new(Domain::Circle, [(0.9, 1.15), (0.4, 0.55)]).unwrap();
    let r = d.restrict(&set).unwrap();
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n)
        .map(|k| r.sample((k as f64 + 0.5) / n as f64))
        .collect();
    assert!(draws.iter().all(|&x| set.contains(x)));
    // Exact law of the restriction from cell masses of the full density.
    let cells = 1 << 14;
    let masses = d.cell_masses(cells);
    let atoms: Vec<(f64, f64)> = (0..cells)
        .map(|k| ((k as f64 + 0.5) / cells as f64, masses[k]))
        .filter(|a| set.contains(a.0))
        .collect();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let reference = EmpiricalMeasure::new(
        Domain::Circle,
        atoms.into_iter().map(|(x, w)| (x, w / total)),
    )
    .unwrap();
    let mut rng = common::rng(6);
    let random: Vec<f64> = (0..n).map(|_| r.sample(rng.random())).collect();
    for sample in [draws, random] {
        let emp = EmpiricalMeasure::uniform(Domain::Circle, &sample).unwrap();
        assert!(w1(&emp, &reference).unwrap() < 3e-3);
    }
}

#[test]
fn limiting_chain_keeps_the_level_target() {
    for fam in &families()[..2] {
        let (lo, hi) = fam.potential().range();
        for rings in [
            EnergyRingSpec::ladder([lo, (lo + hi) / 2.0]).unwrap(),
            EnergyRingSpec::Full,
        ] {
            let chain = DiscretizedChain::limiting_ee(fam, 0, &rings, 0.05, 0.3, 256).unwrap();
            assert!(chain.stationarity_defect() <= 1e-10);
        }
    }
}
