//! Tempered square-tooth densities, energy rings and exact restricted sampling.

use eelab::targets::{EnergyRingSpec, Potential, TemperedFamily};

fn main() -> eelab::Result<()> {
    let family = TemperedFamily::with_betas(
        eelab::geometry::Domain::Circle,
        Potential::square_tooth(4, 3.0)?,
        &[1.0, 0.5, 0.1],
    )?;
    for (i, level) in family.levels().iter().enumerate() {
        let d = family.density(i)?;
        println!(
            "level {i} {level:?}: density at a well {:.3}, at a wall {:.3}",
            d.density(0.05),
            d.density(0.2)
        );
    }

    let rings = EnergyRingSpec::ladder([0.0, 1.5])?;
    for v in [0.0, 3.0] {
        let ring = rings.ring_interval(v)?;
        let preimage = family.ring_preimage(ring);
        println!(
            "ring {ring:?}: {} arcs of total length {:.3}, π_1 mass {:.4}",
            preimage.intervals().len(),
            preimage.length(),
            family.ring_mass(1, ring)?
        );
        let r = family.ring_restriction(1, ring)?;
        let draws: Vec<String> = [0.1, 0.5, 0.9]
            .iter()
            .map(|&u| format!("{:.4}", r.sample(u)))
            .collect();
        println!(
            "  inverse-CDF draws from π_1 on the ring: {}",
            draws.join(", ")
        );
    }

    println!(
        "equi-energy acceptance for 0.05 → 0.55: {:.4}",
        family.ee_acceptance(0, 0.05, 0.55, &rings)?
    );
    Ok(())
}
