//! `curvature-report`: relaxation-time sandwich and well bottlenecks on grid
//! chains, and curvature quantities of the configured test kernel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{Report, Table};
use super::{Command, Ctx};
use crate::diagnostics::{
    cheeger_upper, coarse_diffusion, default_dictionary, global_curvature, granularity,
    local_dimension, relaxation_sandwich, uniform_grid, DiscretizedChain, LazyUniformKernel,
    DEFAULT_SAMPLES,
};
use crate::error::{Error, Result};
use crate::geometry::{Domain, IntervalUnion};
use crate::row;
use crate::targets::{Potential, TemperedFamily};

/// Slack for exactly computed quantities compared with closed forms.
const TOL: f64 = 1e-9;

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let cfg = ctx.cfg;
    let ex = &cfg.experiment;
    let cells = ex.cells.unwrap_or(2048);
    let radii = ex.radii.clone().unwrap_or(vec![0.02, 0.05]);
    let wells = ex.wells.clone().unwrap_or_default();
    let depths = ex.depths.clone().unwrap_or_default();
    let family = cfg.family()?;
    if family.potential() != Potential::Flat || !family.domain().is_circle() {
        return Err(Error::config(
            "curvature-report runs its spectral part on the flat circle",
        ));
    }

    let mut report = ctx.report(Command::CurvatureReport);
    let mut table = Table::new(
        "curvature",
        &["quantity", "c", "M", "H", "value", "se", "lower", "upper"],
    );
    let flat = family.density(0)?;
    for &c in &radii {
        let (lo, hi) = relaxation_sandwich(c)?;
        let chain = ctx.pool.install(|| DiscretizedChain::mh(flat, c, cells))?;
        let tau = chain.relaxation_time()?;
        table.push(row!["relaxation_time", c, "", "", tau, 0, lo, hi]);
        report.check(
            format!("sandwich c={c}"),
            tau >= lo * (1.0 - TOL) && tau <= hi * (1.0 + TOL),
            format!("τ = {tau:.3} in [{lo}, {hi}]"),
        );
    }
    for &m in &wells {
        for &h in &depths {
            let fam =
                TemperedFamily::with_betas(Domain::Circle, Potential::square_tooth(m, h)?, &[1.0])?;
            let well = IntervalUnion::new(Domain::Circle, [(0.0, 1.0 / (2.0 * m as f64))])?;
            let bound = cheeger_upper(m, h);
            for &c in &radii {
                let phi = DiscretizedChain::mh(fam.density(0)?, c, cells)?.bottleneck(&well)?;
                table.push(row!["bottleneck", c, m, h, phi, 0, "", bound]);
                report.check(
                    format!("bottleneck M={m} H={h} c={c}"),
                    phi <= bound,
                    format!("Φ = {phi:.4e} ≤ 8Me^(−H) = {bound:.4e}"),
                );
            }
        }
    }

    if let Some(spec) = &cfg.kernel {
        let domain = family.domain();
        let k = LazyUniformKernel::new(domain, spec.c, spec.p)?;
        let grid = uniform_grid(domain, ex.grid.unwrap_or(16));
        let pairs: Vec<(f64, f64)> = grid
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| grid[i + 1..].iter().map(move |&y| (x, y)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.tag.seed);
        let (kappa, _) = global_curvature(&k, &pairs, DEFAULT_SAMPLES, &mut rng)?;
        table.push(row![
            "curvature",
            spec.c,
            "",
            "",
            kappa.value,
            kappa.se,
            spec.p,
            ""
        ]);
        report.check(
            "curvature ≥ p",
            kappa.value + 3.0 * kappa.se >= spec.p - TOL,
            format!("κ = {kappa} vs p = {}", spec.p),
        );
        let mut diffusion = 0.0f64;
        let mut dimension = f64::INFINITY;
        for (i, &x) in grid.iter().enumerate() {
            diffusion = diffusion.max(coarse_diffusion(&k, x, DEFAULT_SAMPLES, &mut rng)?.value);
            let dict = default_dictionary(domain, x, ctx.tag.seed.wrapping_add(i as u64));
            dimension = dimension.min(local_dimension(&k, x, &dict, DEFAULT_SAMPLES, &mut rng)?);
        }
        table.push(row![
            "coarse_diffusion",
            spec.c,
            "",
            "",
            diffusion,
            0,
            "",
            ""
        ]);
        let sigma = granularity(&k, &grid)?;
        let half = domain.diameter() / 2.0;
        table.push(row!["granularity", spec.c, "", "", sigma, 0, "", half]);
        report.check(
            "granularity",
            sigma <= half + TOL,
            format!("σ∞ = {sigma} ≤ {half}"),
        );
        table.push(row!["local_dimension", spec.c, "", "", dimension, 0, 1, ""]);
        report.check(
            "local dimension ≥ 1",
            dimension >= 1.0 - TOL,
            format!("min n(x) bound {dimension}"),
        );
        report.set("curvature", kappa.value);
        report.set("coarse_diffusion", diffusion);
        report.set("granularity", sigma);
        report.set("local_dimension", dimension);
    }
    report.set("cells", cells);
    report.line = format!("{} rows on {cells} cells", table.rows.len());
    report.tables.push(table);
    Ok(report)
}
