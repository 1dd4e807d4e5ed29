//! Equi-energy, limiting, parallel-tempering and Metropolis runs on one
//! square-tooth target, with move tallies and time spent in the wells.

use eelab::geometry::Domain;
use eelab::samplers::{
    run_multilevel, InitialLaw, LevelSchedule, MoveKind, Proposal, RunConfig, SamplerKind,
};
use eelab::targets::{EnergyRingSpec, Potential, TemperedFamily};

fn main() -> eelab::Result<()> {
    let family = TemperedFamily::with_betas(
        Domain::Circle,
        Potential::square_tooth(8, 4.0)?,
        &[1.0, 0.0],
    )?;
    for kind in [
        SamplerKind::EquiEnergy,
        SamplerKind::Limiting,
        SamplerKind::ParallelTempering,
        SamplerKind::Mh,
    ] {
        let ee_like = matches!(kind, SamplerKind::EquiEnergy | SamplerKind::Limiting);
        let cfg = RunConfig {
            kind,
            family: family.clone(),
            rings: EnergyRingSpec::ladder([0.0, 4.0])?,
            proposal: Proposal::Ball { radius: 1.0 / 64.0 },
            p_ee: 0.1,
            levels: vec![
                LevelSchedule {
                    burn_in: if ee_like { 5_000 } else { 0 },
                    init: if ee_like {
                        InitialLaw::EeMixture
                    } else {
                        InitialLaw::Point(0.03)
                    },
                },
                LevelSchedule {
                    burn_in: 0,
                    init: InitialLaw::Uniform,
                },
            ],
            t_end: 50_000,
        };
        let trace = run_multilevel(&cfg, 1, 0)?;
        let level = &trace.levels[0];
        let wells: std::collections::BTreeSet<usize> =
            level.points.iter().map(|&x| (x * 8.0) as usize).collect();
        let count = |k: MoveKind| level.kinds.iter().filter(|&&m| m == k).count();
        println!(
            "{kind}: {} level-0 states, {} of 8 wells visited, mh accepts {}, ee accepts {}, swaps {}",
            level.len(),
            wells.len(),
            count(MoveKind::MhAccept),
            count(MoveKind::EeAccept),
            count(MoveKind::Swap)
        );
    }
    Ok(())
}
