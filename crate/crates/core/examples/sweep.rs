//! A small sensitivity sweep over prediction error, printed as CSV.

use footprint_core::sim::{run_sweep, write_sweep_csv, SweepPlan};
use footprint_core::{ScenarioBundle, SchedulerKind, Season, Weights};

fn main() -> footprint_core::Result<()> {
    let bundle = ScenarioBundle::sample()?;
    let plan = SweepPlan {
        seasons: vec![Season::Winter, Season::Summer],
        maes: vec![0.05, 0.2],
        weights: vec![Weights::CARBON],
        delay_tolerances: vec![4.0, 24.0],
        schedulers: vec![
            SchedulerKind::SpatialNonPersistent,
            SchedulerKind::SpatialPersistent,
            SchedulerKind::SpatioTemporal,
        ],
        seeds: (0..6).collect(),
    };
    let rows = run_sweep(&bundle, &plan, None)?;
    write_sweep_csv(std::io::stdout().lock(), &rows)
}
