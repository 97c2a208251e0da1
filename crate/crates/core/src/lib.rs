//! Simulator for carbon-, water- and land-aware placement of cloud jobs
//! across regions and time.
//!
//! Grid mixes are turned into per-region hourly profiles, jobs are placed by
//! one of five schedulers (local, spatial with or without data persistence,
//! temporal, spatio-temporal) and charged their footprint on the true mixes.
//!
//! ```no_run
//! use footprint_core::{run, ScenarioBundle, SchedulerKind, Season, SimulationConfig, Weights};
//!
//! let bundle = ScenarioBundle::sample()?;
//! let inst = bundle.instance(Season::Winter, 0, None)?;
//! let config = SimulationConfig::new(inst.horizon, SchedulerKind::SpatialPersistent, Weights::CARBON);
//! let out = run(&config, &inst.regions, &inst.coefficients, &inst.true_mixes, &inst.jobs)?;
//! println!("{:?}", out.ledger.total());
//! # Ok::<(), footprint_core::Error>(())
//! ```

pub mod error;
pub mod factor;
pub mod footprint;
pub mod grid;
pub mod profile;
pub mod region;
pub mod scenario;
pub mod scheduler;
pub mod sim;
pub mod workload;

pub use error::{Error, Result};
pub use factor::{Factor, FactorVec, Weights};
pub use footprint::{
    actual_footprint, actual_weighted_cost, execution_footprint, schedule_cost, ActualFootprint,
    CostBreakdown,
};
pub use grid::{
    apply_noise, harmonize, mix_intensity, EnergySource, IntensityCoefficients, Mix, MixSeries,
    NoiseSpec,
};
pub use profile::{Horizon, ProfileSeries};
pub use region::{Region, RegionsConfig};
pub use scenario::{ScenarioBundle, ScenarioInstance};
pub use scheduler::{decide, ScheduleDecision, SchedulerKind};
pub use sim::{
    improvement, run, run_against_baseline, run_sweep, FootprintLedger, Improvement, RunReport,
    Season, SimulationConfig, SweepPlan,
};
pub use workload::{JobRequest, RegionSet, TraceKind, TraceSpec, VmCatalog, VmInstance};
