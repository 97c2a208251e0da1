use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{JobRequest, RegionSet, TraceKind, TraceSpec, VmCatalog, VmInstance};
use crate::error::{Error, Result};
use crate::profile::{Horizon, STEPS_PER_HOUR};

/// Utilization assumed when the pool does not report one.
pub const DEFAULT_UTILIZATION: f64 = 0.5;

/// One job shape taken from a Spark execution trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolEntry {
    pub nodes: u32,
    pub vm: VmInstance,
    pub runtime_min: f64,
    pub size_gb: f64,
    pub utilization: Option<f64>,
}

/// Reads `nodes,vm,runtime_min,size_gb[,utilization]` rows.
pub fn load_pool_csv<R: Read>(reader: R, catalog: &VmCatalog) -> Result<Vec<PoolEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (nodes, vm, runtime, size) =
        match (col("nodes"), col("vm"), col("runtime_min"), col("size_gb")) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => {
                return Err(Error::parse(
                    "trace pool",
                    "expected columns nodes,vm,runtime_min,size_gb",
                ))
            }
        };
    let util = col("utilization");

    let mut pool = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let ctx = format!("trace pool row {}", i + 2);
        let num = |c: usize| -> Result<f64> {
            record[c]
                .parse()
                .map_err(|_| Error::parse(&ctx, format!("bad number {:?}", &record[c])))
        };
        let entry = PoolEntry {
            nodes: record[nodes]
                .parse()
                .map_err(|_| Error::parse(&ctx, "bad node count"))?,
            vm: catalog.get(&record[vm])?.clone(),
            runtime_min: num(runtime)?,
            size_gb: num(size)?,
            utilization: match util.map(|c| &record[c]) {
                Some(cell) if !cell.is_empty() => Some(
                    cell.parse()
                        .map_err(|_| Error::parse(&ctx, "bad utilization"))?,
                ),
                _ => None,
            },
        };
        let bad_runtime = entry.runtime_min.is_nan() || entry.runtime_min <= 0.0;
        if entry.nodes == 0 || bad_runtime || entry.size_gb.is_nan() || entry.size_gb < 0.0 {
            return Err(Error::parse(
                &ctx,
                "nodes and runtime must be positive, size nonnegative",
            ));
        }
        if entry.utilization.is_some_and(|u| !(0.0..=1.0).contains(&u)) {
            return Err(Error::parse(&ctx, "utilization outside [0, 1]"));
        }
        pool.push(entry);
    }
    Ok(pool)
}

fn make_job(
    id: String,
    entry: &PoolEntry,
    origin: usize,
    arrival: usize,
    deadline: usize,
) -> JobRequest {
    JobRequest {
        id,
        origin,
        data_regions: RegionSet::single(origin),
        size_gb: entry.size_gb,
        nodes: entry.nodes,
        utilization: entry.utilization.unwrap_or(DEFAULT_UTILIZATION),
        vm: entry.vm.clone(),
        runtime_min: entry.runtime_min,
        arrival,
        deadline,
    }
}

/// Synthesizes a big-data trace of roughly `spec.requests` jobs.
///
/// A `periodic_fraction` share of the budget comes from periodic families:
/// the first instance arrives uniformly within the first-arrival window and
/// repeats every `p` hours (`p` drawn uniformly from `periods_hours`), each
/// instance due one period after it arrives. The remaining ad-hoc jobs arrive
/// per minute as Poisson(λ) with λ = budget / horizon minutes and are due
/// after the delay tolerance. Deadlines are capped at the horizon end and jobs
/// that could not finish within the horizon are not emitted.
pub fn synth_bigdata(
    spec: &TraceSpec,
    pool: &[PoolEntry],
    regions: usize,
    horizon: Horizon,
) -> Result<Vec<JobRequest>> {
    spec.validate()?;
    if spec.kind != TraceKind::BigData {
        return Err(Error::InvalidTraceSpec(
            "expected a bigdata trace spec".into(),
        ));
    }
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if regions == 0 {
        return Err(Error::InvalidTraceSpec("no regions".into()));
    }
    let steps = horizon.steps();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fits =
        |arrival: usize, entry: &PoolEntry| arrival as f64 + entry.runtime_min <= steps as f64;

    let periodic_budget = (spec.requests as f64 * spec.periodic_fraction).round() as usize;
    let adhoc_budget = spec.requests - periodic_budget;

    let mut jobs = Vec::with_capacity(spec.requests + spec.requests / 10);
    let window = (spec.first_arrival_window_hours * STEPS_PER_HOUR).min(steps);
    let mut periodic = 0usize;
    let mut family = 0usize;
    let mut barren = 0usize;
    while periodic < periodic_budget {
        let first = rng.random_range(0..window);
        let period =
            spec.periods_hours[rng.random_range(0..spec.periods_hours.len())] * STEPS_PER_HOUR;
        let entry = &pool[rng.random_range(0..pool.len())];
        let origin = rng.random_range(0..regions);
        let before = periodic;
        let mut arrival = first;
        let mut instance = 0;
        while arrival < steps && periodic < periodic_budget && fits(arrival, entry) {
            let deadline = (arrival + period).min(steps);
            jobs.push(make_job(
                format!("p{family}#{instance}"),
                entry,
                origin,
                arrival,
                deadline,
            ));
            periodic += 1;
            instance += 1;
            arrival += period;
        }
        family += 1;
        if periodic == before {
            barren += 1;
            if barren > 1000 {
                return Err(Error::InvalidTraceSpec(
                    "pool runtimes do not fit in the horizon".into(),
                ));
            }
        }
    }

    if adhoc_budget > 0 {
        let lambda = adhoc_budget as f64 / steps as f64;
        let poisson = Poisson::new(lambda).map_err(|e| Error::InvalidTraceSpec(e.to_string()))?;
        let tolerance = (spec.delay_tolerance_hours * STEPS_PER_HOUR as f64).round() as usize;
        let mut next = 0usize;
        for minute in 0..steps {
            let arrivals = poisson.sample(&mut rng) as usize;
            for _ in 0..arrivals {
                let entry = &pool[rng.random_range(0..pool.len())];
                let origin = rng.random_range(0..regions);
                if !fits(minute, entry) {
                    continue;
                }
                let deadline = (minute + tolerance).min(steps);
                jobs.push(make_job(
                    format!("a{next}"),
                    entry,
                    origin,
                    minute,
                    deadline,
                ));
                next += 1;
            }
        }
    }

    jobs.sort_by_key(|j| j.arrival);
    Ok(jobs)
}

/// Number of ad-hoc arrivals drawn over `minutes` minutes at rate `lambda`,
/// with the same per-minute sampling as [`synth_bigdata`].
#[doc(hidden)]
pub fn poisson_arrival_count(lambda: f64, minutes: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poisson = Poisson::new(lambda).expect("positive rate");
    (0..minutes)
        .map(|_| poisson.sample(&mut rng) as usize)
        .sum()
}
