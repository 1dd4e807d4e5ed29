mod common;

use common::runs::*;
use eelab::experiments::{map_replicas, thread_pool};
use eelab::samplers::{run_multilevel, MoveKind, SamplerKind};

#[test]
fn zero_p_ee_is_plain_metropolis() {
    assert!(zero_p_ee_reductions(3, 5000));
}

#[test]
fn metropolis_chains_are_reversible() {
    assert!(detailed_balance_defect(512) < 1e-12);
}

#[test]
fn limiting_sampler_keeps_its_target() {
    let d = limiting_stationarity(10_000, 1_000_000, 17);
    assert!(d <= 5e-3, "w1 = {d}");
}

#[test]
fn traces_do_not_depend_on_the_worker_count() {
    let cfg = square_tooth(SamplerKind::EquiEnergy, 0.2, 3000);
    let runs = |jobs| {
        map_replicas(&thread_pool(Some(jobs)).unwrap(), 6, |r| {
            run_multilevel(&cfg, 99, r)
        })
        .unwrap()
    };
    assert_eq!(runs(1), runs(3));
}

#[test]
fn equi_energy_jumps_stay_in_their_ring() {
    let cfg = square_tooth(SamplerKind::EquiEnergy, 0.3, 4000);
    let trace = run_multilevel(&cfg, 8, 0).unwrap();
    let level = &trace.levels[0];
    let mut jumps = 0;
    for k in 1..level.len() {
        if level.kinds[k] == MoveKind::EeAccept {
            jumps += 1;
            let (before, after) = (
                cfg.family.energy(level.points[k - 1]),
                cfg.family.energy(level.points[k]),
            );
            assert_eq!(before, after);
        }
    }
    assert!(jumps > 0);
}
