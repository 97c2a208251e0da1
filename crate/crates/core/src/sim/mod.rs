//! The step-driven simulation loop and its footprint ledger.

mod report;
mod sweep;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, TimeZone, Utc};

use crate::error::{Error, Result};
use crate::factor::{Factor, FactorVec, Weights};
use crate::footprint::{actual_footprint, actual_weighted_cost, ActualFootprint};
use crate::grid::{apply_noise, IntensityCoefficients, MixSeries, NoiseSpec};
use crate::profile::{raw_profiles, Horizon, ProfileSeries};
use crate::region::Region;
use crate::scheduler::{decide, post_decision_update, ScheduleDecision, SchedulerKind};
use crate::workload::{JobRequest, RegionSet};

pub use report::{
    format_value, improvement, write_decisions_csv, write_ledger_csv, write_run_outputs,
    write_sweep_csv, Improvement, DECISIONS_CSV_HEADER, LEDGER_CSV_HEADER, SWEEP_CSV_HEADER,
};
pub use sweep::{run_cell, run_sweep, summarize, CellKey, SweepPlan, SweepRow};

/// Random seeds used for repeated runs.
pub const DEFAULT_SEEDS: [u64; 6] = [0, 1, 2, 3, 4, 5];

/// Prediction errors explored by the sensitivity analysis.
pub const DEFAULT_MAES: [f64; 4] = [0.05, 0.1, 0.15, 0.2];

/// Delay tolerances (hours) for ad-hoc jobs.
pub const DEFAULT_DELAY_TOLERANCES: [f64; 4] = [4.0, 12.0, 24.0, 48.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Autumn,
}

impl Season {
    pub const ALL: [Season; 4] = [
        Season::Winter,
        Season::Spring,
        Season::Summer,
        Season::Autumn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Autumn => "autumn",
        }
    }

    /// January, April, July or October.
    pub fn month(self) -> u32 {
        match self {
            Season::Winter => 1,
            Season::Spring => 4,
            Season::Summer => 7,
            Season::Autumn => 10,
        }
    }

    /// Midnight UTC on the 15th of the season's month.
    pub fn start(self, year: i32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(year, self.month(), 15, 0, 0, 0)
            .unwrap()
    }

    /// The mid-month week, 15th to 22nd.
    pub fn week(self, year: i32) -> Horizon {
        Horizon::new(self.start(year), 7 * 24)
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Season {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Season::ALL
            .into_iter()
            .find(|x| x.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                Error::parse(
                    "season",
                    format!("expected winter|spring|summer|autumn, got {s:?}"),
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub horizon: Horizon,
    pub scheduler: SchedulerKind,
    pub weights: Weights,
    /// Prediction error of the renewable share.
    pub mae: f64,
    pub seed: u64,
    /// Delay tolerance the trace was generated with (reporting only).
    pub delay_tolerance_hours: Option<f64>,
    pub season: Option<Season>,
    pub noise_weights: [f64; 5],
}

impl SimulationConfig {
    pub fn new(horizon: Horizon, scheduler: SchedulerKind, weights: Weights) -> Self {
        SimulationConfig {
            horizon,
            scheduler,
            weights,
            mae: 0.0,
            seed: 0,
            delay_tolerance_hours: None,
            season: None,
            noise_weights: NoiseSpec::DEFAULT_WEIGHTS,
        }
    }

    pub fn with_mae(mut self, mae: f64) -> Self {
        self.mae = mae;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_scheduler(mut self, scheduler: SchedulerKind) -> Self {
        self.scheduler = scheduler;
        self
    }

    pub fn noise(&self) -> NoiseSpec {
        NoiseSpec {
            mae: self.mae,
            weights: self.noise_weights,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if !(self.mae >= 0.0 && self.mae.is_finite()) {
            return Err(Error::Config(format!(
                "mae must be nonnegative, got {}",
                self.mae
            )));
        }
        if self.horizon.hours == 0 {
            return Err(Error::Config("empty horizon".into()));
        }
        Ok(())
    }
}

/// Accumulated actual footprint of one region.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RegionTally {
    /// Execution plus migration, physical units.
    pub actual: FactorVec,
    /// Migration part of `actual`.
    pub migration: FactorVec,
    pub requests: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FootprintLedger {
    pub scheduler: SchedulerKind,
    pub weights: Weights,
    pub region_ids: Vec<String>,
    pub tallies: Vec<RegionTally>,
    /// Σ predicted cost of the chosen candidates.
    pub predicted_cost: f64,
    /// Σ weighted cost re-evaluated on true mixes with the frozen bounds.
    pub actual_weighted_cost: f64,
    /// Jobs that could not meet their deadline and ran locally.
    pub infeasible: usize,
    pub migrations: usize,
}

impl FootprintLedger {
    pub fn new(scheduler: SchedulerKind, weights: Weights, regions: &[Region]) -> Self {
        FootprintLedger {
            scheduler,
            weights,
            region_ids: regions.iter().map(|r| r.id.clone()).collect(),
            tallies: vec![RegionTally::default(); regions.len()],
            predicted_cost: 0.0,
            actual_weighted_cost: 0.0,
            infeasible: 0,
            migrations: 0,
        }
    }

    pub fn record(&mut self, decision: &ScheduleDecision, actual: &ActualFootprint, weighted: f64) {
        let tally = &mut self.tallies[decision.region];
        tally.actual += actual.total();
        tally.migration += actual.migration;
        tally.requests += 1;
        self.predicted_cost += decision.cost.cost;
        self.actual_weighted_cost += weighted;
        self.infeasible += decision.fallback as usize;
        self.migrations += decision.migrated as usize;
    }

    pub fn total(&self) -> FactorVec {
        self.tallies
            .iter()
            .fold(FactorVec::ZERO, |acc, t| acc + t.actual)
    }

    pub fn migration_total(&self) -> FactorVec {
        self.tallies
            .iter()
            .fold(FactorVec::ZERO, |acc, t| acc + t.migration)
    }

    pub fn requests(&self) -> usize {
        self.tallies.iter().map(|t| t.requests).sum()
    }

    /// Share of the footprint caused by data migration, per factor (0 when
    /// the footprint is zero).
    pub fn migration_share(&self) -> FactorVec {
        let total = self.total();
        self.migration_total().map(|f, m| {
            if total.get(f) > 0.0 {
                m / total.get(f)
            } else {
                0.0
            }
        })
    }

    /// Physical totals combined with the weight vector.
    pub fn weighted_total(&self) -> f64 {
        self.total().dot(&self.weights)
    }
}

/// Result of one simulation run.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub ledger: FootprintLedger,
    /// In scheduling order.
    pub decisions: Vec<ScheduleDecision>,
    /// Per-decision actual footprint, aligned with `decisions`.
    pub actuals: Vec<ActualFootprint>,
}

/// Predicted (noised) and actual profile series for a run.
pub fn prepare_profiles(
    config: &SimulationConfig,
    regions: &[Region],
    coeffs: &IntensityCoefficients,
    true_mixes: &[MixSeries],
) -> Result<(ProfileSeries, ProfileSeries)> {
    let noise = config.noise();
    let predicted_mixes: Vec<MixSeries> =
        true_mixes.iter().map(|m| apply_noise(m, &noise)).collect();
    let predicted = ProfileSeries::from_raw(
        config.horizon,
        raw_profiles(regions, &predicted_mixes, coeffs, config.horizon)?,
        None,
    )?;
    let actual = ProfileSeries::from_raw(
        config.horizon,
        raw_profiles(regions, true_mixes, coeffs, config.horizon)?,
        Some(predicted.bounds()),
    )?;
    Ok((predicted, actual))
}

/// Runs one simulation over `config.horizon`.
///
/// Predictions are the true mixes with noise applied; normalization bounds
/// come from the predictions and stay fixed for the run. Jobs are released
/// at their arrival step in input order, decided one by one, and charged
/// their actual footprint on the true mixes.
pub fn run(
    config: &SimulationConfig,
    regions: &[Region],
    coeffs: &IntensityCoefficients,
    true_mixes: &[MixSeries],
    jobs: &[JobRequest],
) -> Result<SimulationOutcome> {
    config.validate()?;
    for r in regions {
        r.validate()?;
    }
    if regions.is_empty() || regions.len() > 64 {
        return Err(Error::Config(
            "between 1 and 64 regions are required".into(),
        ));
    }
    let steps = config.horizon.steps();
    for job in jobs {
        job.validate(regions.len(), steps)?;
    }
    let (predicted, actual) = prepare_profiles(config, regions, coeffs, true_mixes)?;
    simulate(config, regions, &predicted, &actual, jobs)
}

/// The simulation loop over prepared profiles. Inputs are assumed valid.
pub fn simulate(
    config: &SimulationConfig,
    regions: &[Region],
    predicted: &ProfileSeries,
    actual: &ProfileSeries,
    jobs: &[JobRequest],
) -> Result<SimulationOutcome> {
    let kind = config.scheduler;
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&i| jobs[i].arrival);

    let mut ledger = FootprintLedger::new(kind, config.weights, regions);
    let mut decisions = Vec::with_capacity(jobs.len());
    let mut actuals = Vec::with_capacity(jobs.len());
    let mut stored: HashMap<String, RegionSet> = HashMap::new();

    let mut next = 0;
    for step in 0..config.horizon.steps() {
        while next < order.len() && jobs[order[next]].arrival == step {
            let job = &jobs[order[next]];
            next += 1;

            let extra = stored.get(job.family()).copied().unwrap_or_default();
            let view;
            let job = if extra.is_empty() {
                job
            } else {
                view = JobRequest {
                    data_regions: job.data_regions.union(extra),
                    ..job.clone()
                };
                &view
            };

            let decision = decide(kind, job, predicted, &config.weights)?;
            let updated = post_decision_update(kind, job.data_regions, &decision);
            if updated != job.data_regions {
                *stored.entry(job.family().to_string()).or_default() = updated;
            }

            let footprint = actual_footprint(job, &decision, actual);
            let weighted = actual_weighted_cost(job, &decision, actual, &config.weights);
            ledger.record(&decision, &footprint, weighted);
            decisions.push(decision);
            actuals.push(footprint);
        }
    }

    Ok(SimulationOutcome {
        ledger,
        decisions,
        actuals,
    })
}

/// A candidate run next to its local baseline on the same inputs.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub baseline: SimulationOutcome,
    pub candidate: SimulationOutcome,
    pub improvement: Improvement,
}

/// Runs `config.scheduler` and the local baseline on identical inputs.
pub fn run_against_baseline(
    config: &SimulationConfig,
    regions: &[Region],
    coeffs: &IntensityCoefficients,
    true_mixes: &[MixSeries],
    jobs: &[JobRequest],
) -> Result<RunReport> {
    let local = config.clone().with_scheduler(SchedulerKind::Local);
    let baseline = run(&local, regions, coeffs, true_mixes, jobs)?;
    let candidate = if config.scheduler == SchedulerKind::Local {
        baseline.clone()
    } else {
        run(config, regions, coeffs, true_mixes, jobs)?
    };
    let improvement = improvement(&baseline.ledger, &candidate.ledger);
    Ok(RunReport {
        baseline,
        candidate,
        improvement,
    })
}

impl FootprintLedger {
    pub fn factor_total(&self, factor: Factor) -> f64 {
        self.total().get(factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{EnergySource, Mix};
    use crate::workload::VmCatalog;

    fn setup() -> (Vec<Region>, IntensityCoefficients, Vec<MixSeries>, Horizon) {
        let horizon = Season::Winter.week(2024);
        let horizon = Horizon::new(horizon.start, 6);
        let regions = vec![
            Region::new("a", "ga", 1.1, 0.1, 1e5).unwrap(),
            Region::new("b", "gb", 1.2, 0.5, 1e5).unwrap(),
        ];
        let mixes = vec![
            MixSeries::new("ga", horizon.start, vec![Mix::only(EnergySource::Coal); 6]).unwrap(),
            MixSeries::new(
                "gb",
                horizon.start,
                vec![Mix::from_pairs(&[(EnergySource::Wind, 0.5), (EnergySource::Gas, 0.5)]); 6],
            )
            .unwrap(),
        ];
        (regions, IntensityCoefficients::standard(), mixes, horizon)
    }

    fn job(id: &str, arrival: usize) -> JobRequest {
        JobRequest {
            id: id.into(),
            origin: 0,
            data_regions: RegionSet::single(0),
            size_gb: 5.0,
            nodes: 2,
            utilization: 0.5,
            vm: VmCatalog::standard().get("c4.xlarge").unwrap().clone(),
            runtime_min: 45.0,
            arrival,
            deadline: arrival + 120,
        }
    }

    #[test]
    fn season_weeks() {
        let w = Season::Summer.week(2023);
        assert_eq!(w.start, Utc.with_ymd_and_hms(2023, 7, 15, 0, 0, 0).unwrap());
        assert_eq!(w.end(), Utc.with_ymd_and_hms(2023, 7, 22, 0, 0, 0).unwrap());
        assert_eq!(w.steps(), 10_080);
        assert_eq!("autumn".parse::<Season>().unwrap().month(), 10);
    }

    #[test]
    fn empty_run_is_zero() {
        let (regions, coeffs, mixes, horizon) = setup();
        let cfg = SimulationConfig::new(horizon, SchedulerKind::SpatioTemporal, Weights::CARBON);
        let out = run(&cfg, &regions, &coeffs, &mixes, &[]).unwrap();
        assert!(out.decisions.is_empty());
        assert_eq!(out.ledger.total(), FactorVec::ZERO);
        assert_eq!(out.ledger.requests(), 0);
    }

    #[test]
    fn single_local_job_matches_its_footprint() {
        let (regions, coeffs, mixes, horizon) = setup();
        let cfg = SimulationConfig::new(horizon, SchedulerKind::Local, Weights::CARBON);
        let j = job("j0", 10);
        let out = run(&cfg, &regions, &coeffs, &mixes, std::slice::from_ref(&j)).unwrap();
        let d = &out.decisions[0];
        assert_eq!((d.region, d.start), (0, 10));
        assert_eq!(out.ledger.total(), out.actuals[0].total());
        // coal at PUE 1.1 over 45 minutes
        let kw = j.power_watts() / 1000.0;
        assert!((out.ledger.total().carbon - 820.0 * 1.1 * kw * 0.75).abs() < 1e-9);
        assert_eq!(out.ledger.migration_total(), FactorVec::ZERO);
    }

    #[test]
    fn persistent_storage_is_shared_by_family() {
        let (regions, coeffs, mixes, horizon) = setup();
        let jobs = vec![job("p1#0", 0), job("p1#1", 120), job("p2#0", 120)];
        let sp = SimulationConfig::new(horizon, SchedulerKind::SpatialPersistent, Weights::CARBON);
        let out = run(&sp, &regions, &coeffs, &mixes, &jobs).unwrap();
        let migrated: Vec<bool> = out.decisions.iter().map(|d| d.migrated).collect();
        assert!(out.decisions.iter().all(|d| d.region == 1));
        assert_eq!(migrated, vec![true, false, true]);

        let s = sp
            .clone()
            .with_scheduler(SchedulerKind::SpatialNonPersistent);
        let out_s = run(&s, &regions, &coeffs, &mixes, &jobs).unwrap();
        assert!(out_s.decisions.iter().all(|d| d.migrated));
        assert!(out.ledger.migration_total().carbon < out_s.ledger.migration_total().carbon);
    }

    #[test]
    fn invalid_jobs_are_rejected_up_front() {
        let (regions, coeffs, mixes, horizon) = setup();
        let cfg = SimulationConfig::new(horizon, SchedulerKind::Local, Weights::CARBON);
        let mut bad = job("x", 0);
        bad.utilization = 2.0;
        assert!(run(&cfg, &regions, &coeffs, &mixes, &[bad]).is_err());
        let late = job("y", 6 * 60 - 10);
        assert!(run(&cfg, &regions, &coeffs, &mixes, &[late]).is_err());
    }
}
