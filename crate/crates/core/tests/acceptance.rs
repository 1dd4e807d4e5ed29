//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Criteria 1–7 run the shipped presets; 8 and 9 call the library
//! directly against independent oracles.

mod common;

use std::cell::OnceCell;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use eelab::experiments::{preset, run, Command, Report};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn from_checks(report: &Report, keep: impl Fn(&str) -> bool) -> Self {
        let checks: Vec<_> = report.checks.iter().filter(|c| keep(&c.name)).collect();
        let failed = checks.iter().filter(|c| !c.pass).count();
        Outcome {
            pass: !checks.is_empty() && failed == 0,
            summary: format!(
                "{} of {} checks pass; {}",
                checks.len() - failed,
                checks.len(),
                report.line
            ),
            details: checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.to_string())
                .collect(),
        }
    }
}

fn preset_run(command: Command, name: &str) -> Report {
    let cfg = preset(name).unwrap_or_else(|e| panic!("preset {name}: {e}"));
    run(command, &cfg, None).unwrap_or_else(|e| panic!("{command} on {name}: {e}"))
}

fn transport_oracles() -> Outcome {
    let discrepancy = common::w1_oracle_discrepancy(200, 81);
    let lp = common::lp_bound_slack(100, 82);
    let (nested_lp, nested_w) = common::nested_set_slack(100, 83);
    Outcome {
        pass: discrepancy <= 1e-9 && lp >= -1e-9 && nested_lp >= -1e-9 && nested_w >= -1e-12,
        summary: format!(
            "max |w1 − enumeration| = {discrepancy:.1e} over 200 instances; min(2·d_LP − w1) = {lp:.3e}; \
             nested slacks {nested_lp:.3e} (d̃_LP), {nested_w:.3e} (w1)"
        ),
        details: Vec::new(),
    }
}

fn reductions_and_balance() -> Outcome {
    let reductions = common::runs::zero_p_ee_reductions(5, 20_000);
    let balance = common::runs::detailed_balance_defect(512);
    let stationarity = common::runs::limiting_stationarity(10_000, 1_000_000, 91);
    Outcome {
        pass: reductions && balance <= 1e-12 && stationarity <= 5e-3,
        summary: format!(
            "p_ee = 0 traces equal: {reductions}; detailed balance defect {balance:.1e}; \
             limiting sampler w1 to π_0 = {stationarity:.2e} over 10^6 steps"
        ),
        details: Vec::new(),
    }
}

fn main() -> ExitCode {
    // Criteria 3 and 4 share one spectral run.
    let spectral = OnceCell::new();
    let spectral_report =
        || spectral.get_or_init(|| preset_run(Command::CurvatureReport, "spectral"));
    type Criterion<'a> = (u32, &'a str, u64, Box<dyn FnOnce() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "variance law of the running average",
            120,
            Box::new(|| {
                Outcome::from_checks(&preset_run(Command::VerifyVariance, "uniform46"), |_| true)
            }),
        ),
        (
            2,
            "covariance decay in the uniform example",
            60,
            Box::new(|| {
                Outcome::from_checks(
                    &preset_run(Command::VerifyAutocov, "uniform46-autocov"),
                    |_| true,
                )
            }),
        ),
        (
            3,
            "relaxation-time sandwich",
            30,
            Box::new(|| Outcome::from_checks(spectral_report(), |n| n.starts_with("sandwich"))),
        ),
        (
            4,
            "well bottleneck bound",
            30,
            Box::new(|| Outcome::from_checks(spectral_report(), |n| n.starts_with("bottleneck"))),
        ),
        (
            5,
            "ee / pt / mh decorrelation ordering",
            600,
            Box::new(|| {
                Outcome::from_checks(&preset_run(Command::CompareAutocov, "square-tooth"), |_| {
                    true
                })
            }),
        ),
        (
            6,
            "concentration bound coverage",
            120,
            Box::new(|| {
                Outcome::from_checks(&preset_run(Command::Concentration, "lazy-uniform"), |_| {
                    true
                })
            }),
        ),
        (
            7,
            "kernel-distance convergence",
            180,
            Box::new(|| {
                Outcome::from_checks(
                    &preset_run(Command::KernelDistance, "uniform46-kernel"),
                    |_| true,
                )
            }),
        ),
        (8, "transport oracles", 10, Box::new(transport_oracles)),
        (
            9,
            "exact reductions and balance",
            120,
            Box::new(reductions_and_balance),
        ),
    ];

    let mut failures = 0;
    for (n, title, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = outcome.pass && in_time;
        failures += usize::from(!pass);
        println!(
            "{} criterion {n}: {title}: {} [{:.1} s of {budget} s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.summary,
            elapsed.as_secs_f64()
        );
        for d in outcome.details {
            println!("    {d}");
        }
        if !in_time {
            println!("    over the time budget");
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
