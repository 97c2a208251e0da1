//! How the weighting shifts footprint between factors: each weight vector
//! with spatio-temporal shifting, relative to local execution.

use footprint_core::{
    run_against_baseline, Factor, ScenarioBundle, SchedulerKind, Season, SimulationConfig, Weights,
};

fn main() -> footprint_core::Result<()> {
    let bundle = ScenarioBundle::sample()?;
    let inst = bundle.instance(Season::Spring, 3, Some(12.0))?;
    println!(
        "{:<20} {:>9} {:>9} {:>9}   improvement % vs local",
        "theta", "carbon", "water", "land"
    );
    for weights in Weights::PRESETS {
        let config = SimulationConfig::new(inst.horizon, SchedulerKind::SpatioTemporal, weights);
        let report = run_against_baseline(
            &config,
            &inst.regions,
            &inst.coefficients,
            &inst.true_mixes,
            &inst.jobs,
        )?;
        let pct = |f| report.improvement.get(f).unwrap_or(f64::NAN);
        println!(
            "{:<20} {:>9.2} {:>9.2} {:>9.2}",
            weights.to_string(),
            pct(Factor::Carbon),
            pct(Factor::Water),
            pct(Factor::Land)
        );
    }
    Ok(())
}
