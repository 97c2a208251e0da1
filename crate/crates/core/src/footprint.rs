//! Migration and execution footprints of placing a job in a region at a
//! given start step, and the weighted scheduling cost built from them.

use crate::error::{Error, Result};
use crate::factor::{FactorVec, Weights};
use crate::profile::{ProfileSeries, STEP_MINUTES};
use crate::scheduler::ScheduleDecision;
use crate::workload::JobRequest;

/// Energy spent moving one GB between regions, kWh/GB.
pub const NETWORK_ENERGY_KWH_PER_GB: f64 = 0.06;

/// Energy (kWh) to transfer the job's data to `region`.
pub fn migration_energy(job: &JobRequest, region: usize) -> f64 {
    if job.data_regions.contains(region) {
        0.0
    } else {
        job.size_gb * NETWORK_ENERGY_KWH_PER_GB
    }
}

/// Transfer time in seconds of the job's data to `region` over the VM link.
pub fn migration_latency_seconds(job: &JobRequest, region: usize) -> f64 {
    if job.data_regions.contains(region) {
        0.0
    } else {
        job.size_gb * 8000.0 / job.vm.bandwidth_mbps
    }
}

/// Transfer time rounded up to whole simulation steps.
pub fn migration_latency(job: &JobRequest, region: usize) -> usize {
    let minutes = migration_latency_seconds(job, region) / 60.0;
    (minutes / STEP_MINUTES as f64).ceil() as usize
}

/// Σ P(kW) · p^norm_d(τ) · δ_t over the execution interval
/// `[start + L, start + L + r_j)`.
pub fn execution_footprint(
    job: &JobRequest,
    region: usize,
    start: usize,
    profiles: &ProfileSeries,
) -> Result<FactorVec> {
    let (from, to) = execution_window(job, region, start, profiles)?;
    Ok(profiles.integrate_normalized(region, from, to) * (job.power_watts() / 1000.0))
}

fn execution_window(
    job: &JobRequest,
    region: usize,
    start: usize,
    profiles: &ProfileSeries,
) -> Result<(f64, f64)> {
    let from = (start + migration_latency(job, region)) as f64;
    let to = from + job.runtime_min;
    let horizon = profiles.steps();
    if to > (horizon * STEP_MINUTES) as f64 {
        return Err(Error::HorizonOverflow {
            job: job.id.clone(),
            region,
            start,
            end: to,
            horizon,
        });
    }
    Ok((from, to))
}

/// Predicted cost of one (region, start) candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// Normalized execution footprint E.
    pub execution: FactorVec,
    /// Migration energy times the normalized global profile at the start step.
    pub migration: FactorVec,
    /// Scalar cost (E + M·p_global)·θ.
    pub cost: f64,
    pub migration_kwh: f64,
    pub latency_steps: usize,
}

pub fn schedule_cost(
    job: &JobRequest,
    region: usize,
    start: usize,
    weights: &Weights,
    profiles: &ProfileSeries,
) -> Result<CostBreakdown> {
    let execution = execution_footprint(job, region, start, profiles)?;
    let migration_kwh = migration_energy(job, region);
    let migration = profiles.global_normalized_at(start) * migration_kwh;
    Ok(CostBreakdown {
        execution,
        migration,
        cost: (execution + migration).dot(weights),
        migration_kwh,
        latency_steps: migration_latency(job, region),
    })
}

/// Physical footprint (gCO2e, l, m²) of an executed decision.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ActualFootprint {
    pub execution: FactorVec,
    pub migration: FactorVec,
}

impl ActualFootprint {
    pub fn total(&self) -> FactorVec {
        self.execution + self.migration
    }
}

/// Footprint of `decision` measured against `actual` (true-mix) profiles.
///
/// Execution is charged at the region's raw profile over the execution
/// interval; migration energy at the cross-region average raw profile of the
/// start step.
pub fn actual_footprint(
    job: &JobRequest,
    decision: &ScheduleDecision,
    actual: &ProfileSeries,
) -> ActualFootprint {
    let from = (decision.start + decision.cost.latency_steps) as f64;
    let to = from + job.runtime_min;
    let energy_kw = job.power_watts() / 1000.0;
    ActualFootprint {
        execution: actual.integrate_raw(decision.region, from, to) * energy_kw,
        migration: actual.global_raw_at(decision.start) * decision.cost.migration_kwh,
    }
}

/// Weighted cost of `decision` re-evaluated on `actual` profiles, keeping the
/// data availability that held when the decision was made.
pub fn actual_weighted_cost(
    job: &JobRequest,
    decision: &ScheduleDecision,
    actual: &ProfileSeries,
    weights: &Weights,
) -> f64 {
    let from = (decision.start + decision.cost.latency_steps) as f64;
    let to = from + job.runtime_min;
    let execution =
        actual.integrate_normalized(decision.region, from, to) * (job.power_watts() / 1000.0);
    let migration = actual.global_normalized_at(decision.start) * decision.cost.migration_kwh;
    (execution + migration).dot(weights)
}
