//! One simulation against the local baseline, with per-region request counts.

use footprint_core::{
    run_against_baseline, Factor, ScenarioBundle, SchedulerKind, Season, SimulationConfig, Weights,
};

fn main() -> footprint_core::Result<()> {
    let bundle = ScenarioBundle::sample()?;
    let inst = bundle.instance(Season::Winter, 0, None)?;
    let config = SimulationConfig::new(
        inst.horizon,
        SchedulerKind::SpatialPersistent,
        Weights::CARBON,
    )
    .with_mae(0.1)
    .with_seed(0);
    let report = run_against_baseline(
        &config,
        &inst.regions,
        &inst.coefficients,
        &inst.true_mixes,
        &inst.jobs,
    )?;

    for f in Factor::ALL {
        println!(
            "{:<6} local {:>10.2}  sp {:>10.2} {:<6} improvement {:>7.2}%",
            f.name(),
            report.baseline.ledger.factor_total(f),
            report.candidate.ledger.factor_total(f),
            f.unit(),
            report.improvement.get(f).unwrap_or(f64::NAN)
        );
    }
    println!();
    for (id, t) in report
        .candidate
        .ledger
        .region_ids
        .iter()
        .zip(&report.candidate.ledger.tallies)
    {
        println!("{id:<14} {:>4} requests", t.requests);
    }
    Ok(())
}
