//! Placement policies: where and when each job runs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::factor::Weights;
use crate::footprint::{migration_latency, schedule_cost, CostBreakdown};
use crate::profile::{ProfileSeries, STEPS_PER_HOUR};
use crate::workload::{JobRequest, RegionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchedulerKind {
    /// Run at the origin on arrival.
    Local,
    /// Cheapest region at arrival; migrated data stays available.
    SpatialPersistent,
    /// Cheapest region at arrival; data is moved again every time.
    SpatialNonPersistent,
    /// Cheapest start at the origin within the deadline.
    Temporal,
    /// Cheapest (region, start) pair within the deadline.
    SpatioTemporal,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 5] = [
        SchedulerKind::Local,
        SchedulerKind::SpatialNonPersistent,
        SchedulerKind::SpatialPersistent,
        SchedulerKind::Temporal,
        SchedulerKind::SpatioTemporal,
    ];

    pub fn code(self) -> &'static str {
        match self {
            SchedulerKind::Local => "local",
            SchedulerKind::SpatialPersistent => "sp",
            SchedulerKind::SpatialNonPersistent => "s",
            SchedulerKind::Temporal => "t",
            SchedulerKind::SpatioTemporal => "stp",
        }
    }

    pub fn shifts_time(self) -> bool {
        matches!(
            self,
            SchedulerKind::Temporal | SchedulerKind::SpatioTemporal
        )
    }

    pub fn shifts_space(self) -> bool {
        matches!(
            self,
            SchedulerKind::SpatialPersistent
                | SchedulerKind::SpatialNonPersistent
                | SchedulerKind::SpatioTemporal
        )
    }

    /// Whether migrated data remains available to later jobs of the family.
    pub fn persists_data(self) -> bool {
        matches!(
            self,
            SchedulerKind::SpatialPersistent | SchedulerKind::SpatioTemporal
        )
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SchedulerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchedulerKind::ALL
            .into_iter()
            .find(|k| k.code() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                Error::parse(
                    "scheduler",
                    format!("expected one of local|s|sp|t|stp, got {s:?}"),
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDecision {
    pub job_id: String,
    pub region: usize,
    pub start: usize,
    /// The chosen region did not hold the job's data.
    pub migrated: bool,
    /// No candidate met the deadline; the job ran locally on arrival.
    pub fallback: bool,
    pub cost: CostBreakdown,
}

impl ScheduleDecision {
    pub fn new(job: &JobRequest, region: usize, start: usize, cost: CostBreakdown) -> Self {
        ScheduleDecision {
            job_id: job.id.clone(),
            region,
            start,
            migrated: !job.data_regions.contains(region),
            fallback: false,
            cost,
        }
    }
}

/// Start steps considered for a time-shifting policy: the arrival step plus
/// every top-of-hour step up to the latest start `t_j − r_j − latency`.
/// Empty when even the arrival step misses the deadline.
pub fn candidate_starts(job: &JobRequest, latency_steps: usize) -> Vec<usize> {
    let latest = job.deadline as f64 - job.runtime_min - latency_steps as f64;
    if latest < job.arrival as f64 {
        return Vec::new();
    }
    let latest = latest.floor() as usize;
    let first_hour = job.arrival / STEPS_PER_HOUR + 1;
    std::iter::once(job.arrival)
        .chain(
            (first_hour..)
                .map(|h| h * STEPS_PER_HOUR)
                .take_while(|&t| t <= latest),
        )
        .collect()
}

/// Chooses a region and start step for `job`, which is ready at its arrival.
///
/// Ties go to the lower region index, then the earlier start. When no
/// candidate is feasible the job is placed locally on arrival and the
/// decision is flagged as a fallback.
pub fn decide(
    kind: SchedulerKind,
    job: &JobRequest,
    profiles: &ProfileSeries,
    weights: &Weights,
) -> Result<ScheduleDecision> {
    let regions = profiles.region_count();
    let mut best: Option<(usize, usize, CostBreakdown)> = None;
    let mut consider = |d: usize, t: usize| -> Result<()> {
        match schedule_cost(job, d, t, weights, profiles) {
            Ok(c) => {
                if best.as_ref().is_none_or(|(_, _, b)| c.cost < b.cost) {
                    best = Some((d, t, c));
                }
                Ok(())
            }
            Err(Error::HorizonOverflow { .. }) => Ok(()),
            Err(e) => Err(e),
        }
    };

    match kind {
        SchedulerKind::Local => consider(job.origin, job.arrival)?,
        SchedulerKind::SpatialPersistent | SchedulerKind::SpatialNonPersistent => {
            for d in 0..regions {
                consider(d, job.arrival)?;
            }
        }
        SchedulerKind::Temporal => {
            for t in candidate_starts(job, migration_latency(job, job.origin)) {
                consider(job.origin, t)?;
            }
        }
        SchedulerKind::SpatioTemporal => {
            for d in 0..regions {
                for t in candidate_starts(job, migration_latency(job, d)) {
                    consider(d, t)?;
                }
            }
        }
    }

    match best {
        Some((d, t, cost)) => Ok(ScheduleDecision::new(job, d, t, cost)),
        None => {
            let cost = schedule_cost(job, job.origin, job.arrival, weights, profiles)?;
            let mut decision = ScheduleDecision::new(job, job.origin, job.arrival, cost);
            decision.fallback = true;
            Ok(decision)
        }
    }
}

/// Data availability after `decision`: persistent policies keep a copy in
/// the region the data was moved to.
pub fn post_decision_update(
    kind: SchedulerKind,
    data_regions: RegionSet,
    decision: &ScheduleDecision,
) -> RegionSet {
    if kind.persists_data() && decision.migrated {
        let mut out = data_regions;
        out.insert(decision.region);
        out
    } else {
        data_regions
    }
}
