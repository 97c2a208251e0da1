//! Exhaustive reference scheduler built directly from the model definitions:
//! hourly raw profiles from the mixes, min-max normalization, and a
//! minute-by-minute sum for the execution integral.

use std::collections::HashMap;

use footprint_core::grid::{EnergySource, MixSeries};
use footprint_core::{
    IntensityCoefficients, JobRequest, Region, RegionSet, SchedulerKind, Weights,
};

pub struct OracleProfiles {
    pub steps: usize,
    /// [region][hour][factor]
    pub norm: Vec<Vec<[f64; 3]>>,
    /// [hour][factor]
    pub global: Vec<[f64; 3]>,
}

fn raw(region: &Region, mix: &MixSeries, hour: usize, coeffs: &IntensityCoefficients) -> [f64; 3] {
    let row = &mix.rows[hour];
    let mut ci = 0.0;
    let mut ewif = 0.0;
    let mut elif = 0.0;
    for s in EnergySource::ALL {
        let c = coeffs.get(s);
        ci += row[s] * c.carbon;
        ewif += row[s] * c.water;
        elif += row[s] * c.land;
    }
    let lue = region.land_area_m2 / (8760.0 * 100.0 * 1e3);
    [
        ci * region.pue,
        region.wue + ewif * region.pue,
        lue + elif * region.pue,
    ]
}

fn minmax(values: impl Iterator<Item = [f64; 3]> + Clone) -> [(f64, f64); 3] {
    let mut out = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for v in values {
        for f in 0..3 {
            out[f].0 = out[f].0.min(v[f]);
            out[f].1 = out[f].1.max(v[f]);
        }
    }
    out
}

fn scale(v: [f64; 3], b: &[(f64, f64); 3]) -> [f64; 3] {
    let mut o = [0.0; 3];
    for f in 0..3 {
        let (lo, hi) = b[f];
        o[f] = if hi > lo {
            (v[f] - lo) / (hi - lo)
        } else {
            0.0
        };
    }
    o
}

pub fn oracle_profiles(
    regions: &[Region],
    mixes: &[MixSeries],
    coeffs: &IntensityCoefficients,
    hours: usize,
) -> OracleProfiles {
    let raws: Vec<Vec<[f64; 3]>> = regions
        .iter()
        .map(|r| {
            let mix = mixes
                .iter()
                .find(|m| m.grid == r.grid)
                .expect("grid present");
            (0..hours).map(|h| raw(r, mix, h, coeffs)).collect()
        })
        .collect();
    let bounds = minmax(raws.iter().flatten().copied());
    let avg: Vec<[f64; 3]> = (0..hours)
        .map(|h| {
            let mut s = [0.0; 3];
            for r in &raws {
                for f in 0..3 {
                    s[f] += r[h][f];
                }
            }
            s.map(|x| x / raws.len() as f64)
        })
        .collect();
    let gb = minmax(avg.iter().copied());
    OracleProfiles {
        steps: hours * 60,
        norm: raws
            .iter()
            .map(|r| r.iter().map(|v| scale(*v, &bounds)).collect())
            .collect(),
        global: avg.iter().map(|v| scale(*v, &gb)).collect(),
    }
}

fn power_kw(job: &JobRequest) -> f64 {
    let vm = &job.vm;
    let per_node = vm.cpus as f64
        * (vm.watts_min + job.utilization * (vm.watts_max - vm.watts_min))
        + vm.ram_gb * vm.memory_watts_per_gb;
    job.nodes as f64 * per_node / 1000.0
}

fn latency(job: &JobRequest, data: RegionSet, d: usize) -> usize {
    if data.contains(d) {
        0
    } else {
        (job.size_gb * 8000.0 / job.vm.bandwidth_mbps / 60.0).ceil() as usize
    }
}

/// Cost of one candidate, or None when it runs past the horizon.
pub fn cost(
    job: &JobRequest,
    data: RegionSet,
    d: usize,
    t: usize,
    p: &OracleProfiles,
    w: &Weights,
) -> Option<f64> {
    let l = latency(job, data, d);
    let r = job.runtime_min as usize;
    if t + l + r > p.steps {
        return None;
    }
    let kw = power_kw(job);
    let mut e = [0.0; 3];
    for tau in t + l..t + l + r {
        for (acc, v) in e.iter_mut().zip(p.norm[d][tau / 60]) {
            *acc += kw * v / 60.0;
        }
    }
    let m = if data.contains(d) {
        0.0
    } else {
        job.size_gb * 0.06
    };
    let theta = [w.carbon, w.water, w.land];
    Some(
        (0..3)
            .map(|f| theta[f] * (e[f] + m * p.global[t / 60][f]))
            .sum(),
    )
}

fn starts(job: &JobRequest, l: usize) -> Vec<usize> {
    let r = job.runtime_min as usize;
    let mut out = Vec::new();
    if job.arrival + r + l > job.deadline {
        return out;
    }
    let latest = job.deadline - r - l;
    out.push(job.arrival);
    let mut t = (job.arrival / 60 + 1) * 60;
    while t <= latest {
        out.push(t);
        t += 60;
    }
    out
}

/// (region, start, fallback)
pub fn decide(
    kind: SchedulerKind,
    job: &JobRequest,
    data: RegionSet,
    p: &OracleProfiles,
    w: &Weights,
) -> (usize, usize, bool) {
    let regions = p.norm.len();
    let mut cands: Vec<(usize, usize)> = Vec::new();
    match kind {
        SchedulerKind::Local => cands.push((job.origin, job.arrival)),
        SchedulerKind::SpatialNonPersistent | SchedulerKind::SpatialPersistent => {
            cands.extend((0..regions).map(|d| (d, job.arrival)))
        }
        SchedulerKind::Temporal => cands.extend(
            starts(job, latency(job, data, job.origin))
                .into_iter()
                .map(|t| (job.origin, t)),
        ),
        SchedulerKind::SpatioTemporal => {
            for d in 0..regions {
                cands.extend(
                    starts(job, latency(job, data, d))
                        .into_iter()
                        .map(|t| (d, t)),
                );
            }
        }
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for (d, t) in cands {
        if let Some(c) = cost(job, data, d, t, p, w) {
            let better = match best {
                None => true,
                Some((bc, bd, bt)) => c < bc || (c == bc && (d, t) < (bd, bt)),
            };
            if better {
                best = Some((c, d, t));
            }
        }
    }
    match best {
        Some((_, d, t)) => (d, t, false),
        None => (job.origin, job.arrival, true),
    }
}

/// Decisions for every job in release order, tracking persistent storage
/// per job family.
pub fn replay(
    kind: SchedulerKind,
    jobs: &[JobRequest],
    p: &OracleProfiles,
    w: &Weights,
) -> Vec<(String, usize, usize, bool)> {
    let mut order: Vec<&JobRequest> = jobs.iter().collect();
    order.sort_by_key(|j| j.arrival);
    let mut stored: HashMap<String, RegionSet> = HashMap::new();
    let persistent = matches!(
        kind,
        SchedulerKind::SpatialPersistent | SchedulerKind::SpatioTemporal
    );
    order
        .into_iter()
        .map(|job| {
            let family = job.id.split('#').next().unwrap().to_string();
            let data = job
                .data_regions
                .union(stored.get(&family).copied().unwrap_or_default());
            let (d, t, fb) = decide(kind, job, data, p, w);
            if persistent && !data.contains(d) {
                let mut s = data;
                s.insert(d);
                stored.insert(family, s);
            }
            (job.id.clone(), d, t, fb)
        })
        .collect()
}
