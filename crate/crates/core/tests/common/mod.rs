#![allow(dead_code)]

pub mod oracle;

use chrono::{TimeZone, Utc};
use footprint_core::grid::{EnergySource, Mix, MixSeries};
use footprint_core::{Horizon, JobRequest, Region, RegionSet, VmCatalog, Weights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub horizon: Horizon,
    pub regions: Vec<Region>,
    pub mixes: Vec<MixSeries>,
    pub jobs: Vec<JobRequest>,
    pub weights: Weights,
}

pub fn random_mix(rng: &mut impl Rng) -> Mix {
    let mut m = Mix::default();
    for s in EnergySource::ALL {
        if rng.random_bool(0.6) {
            m[s] = rng.random::<f64>();
        }
    }
    if m.total() == 0.0 {
        m[EnergySource::Gas] = 1.0;
    }
    m.normalized().unwrap()
}

pub struct Shape {
    pub max_regions: usize,
    pub hours: std::ops::RangeInclusive<usize>,
    pub max_jobs: usize,
    /// Upper bound on deadline slack beyond the runtime, minutes.
    pub max_slack: usize,
    pub max_size_gb: f64,
    /// Fraction of jobs sharing a family with an earlier job.
    pub family_share: f64,
}

impl Shape {
    pub const SMALL: Shape = Shape {
        max_regions: 3,
        hours: 6..=12,
        max_jobs: 50,
        max_slack: 300,
        max_size_gb: 20.0,
        family_share: 0.3,
    };
}

pub fn random_instance(seed: u64, shape: &Shape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hours = rng.random_range(shape.hours.clone());
    let horizon = Horizon::new(Utc.with_ymd_and_hms(2023, 4, 15, 0, 0, 0).unwrap(), hours);
    let n = rng.random_range(1..=shape.max_regions);
    let regions: Vec<Region> = (0..n)
        .map(|d| {
            Region::new(
                format!("r{d}"),
                format!("g{d}"),
                rng.random_range(1.05..1.6),
                rng.random_range(0.0..2.0),
                rng.random_range(5e4..3e5),
            )
            .unwrap()
        })
        .collect();
    let mixes = (0..n)
        .map(|d| {
            MixSeries::new(
                format!("g{d}"),
                horizon.start,
                (0..hours).map(|_| random_mix(&mut rng)).collect(),
            )
            .unwrap()
        })
        .collect();

    let catalog = VmCatalog::standard();
    let vms: Vec<_> = catalog.iter().cloned().collect();
    let steps = horizon.steps();
    let count = rng.random_range(0..=shape.max_jobs);
    let mut jobs: Vec<JobRequest> = Vec::with_capacity(count);
    for k in 0..count {
        let runtime = rng.random_range(1..=120.min(steps));
        let arrival = rng.random_range(0..=steps - runtime);
        let deadline = (arrival + runtime + rng.random_range(0..=shape.max_slack)).min(steps);
        let origin = rng.random_range(0..n);
        let id = if k > 0 && rng.random_bool(shape.family_share) {
            format!("f{}#{k}", rng.random_range(0..3))
        } else {
            format!("j{k}")
        };
        let mut data = RegionSet::single(origin);
        if rng.random_bool(0.2) {
            data.insert(rng.random_range(0..n));
        }
        jobs.push(JobRequest {
            id,
            origin,
            data_regions: data,
            size_gb: if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.0..shape.max_size_gb)
            },
            nodes: rng.random_range(1..=8),
            utilization: rng.random::<f64>(),
            vm: vms[rng.random_range(0..vms.len())].clone(),
            runtime_min: runtime as f64,
            arrival,
            deadline,
        });
    }
    let w = [
        rng.random::<f64>(),
        rng.random::<f64>(),
        rng.random::<f64>(),
    ];
    let weights = match rng.random_range(0..5) {
        0..=3 => Weights::PRESETS[rng.random_range(0..4)],
        _ => Weights::new(w[0], w[1], w[2] + 1e-3).unwrap(),
    };
    Instance {
        horizon,
        regions,
        mixes,
        jobs,
        weights,
    }
}
