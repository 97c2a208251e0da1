use std::collections::HashMap;
use std::io::Read;

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{JobRequest, RegionSet, TraceKind, TraceSpec, VmInstance};
use crate::error::{Error, Result};
use crate::profile::Horizon;

/// Quantile knots of the daily execution-time summaries.
pub const PERCENTILE_KNOTS: [f64; 7] = [0.0, 0.01, 0.25, 0.50, 0.75, 0.99, 1.0];

const MINUTES_PER_DAY: usize = 1440;

/// Shortest runtime assigned to a function invocation, in milliseconds.
const MIN_RUNTIME_MS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionStat {
    pub key: String,
    /// Invocations in each minute of the day (1440 entries).
    pub per_minute: Vec<u64>,
    /// Execution time in ms at [`PERCENTILE_KNOTS`].
    pub percentiles_ms: [f64; 7],
}

impl FunctionStat {
    pub fn daily_invocations(&self) -> u64 {
        self.per_minute.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        if self.per_minute.len() != MINUTES_PER_DAY {
            return Err(Error::MalformedStats(format!(
                "{}: expected {MINUTES_PER_DAY} per-minute counts, got {}",
                self.key,
                self.per_minute.len()
            )));
        }
        let p = &self.percentiles_ms;
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) || p.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::MalformedStats(format!(
                "{}: percentiles must be nonnegative and nondecreasing",
                self.key
            )));
        }
        Ok(())
    }
}

/// Statistics of all functions for one day of the trace.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FunctionDay {
    pub functions: Vec<FunctionStat>,
}

/// Piecewise-linear inverse CDF through the percentile knots.
pub fn interpolate_percentiles(percentiles: &[f64; 7], q: f64) -> f64 {
    let q = q.clamp(0.0, 1.0);
    let k = PERCENTILE_KNOTS
        .windows(2)
        .position(|w| q <= w[1])
        .unwrap_or(PERCENTILE_KNOTS.len() - 2);
    let (q0, q1) = (PERCENTILE_KNOTS[k], PERCENTILE_KNOTS[k + 1]);
    let (v0, v1) = (percentiles[k], percentiles[k + 1]);
    v0 + (v1 - v0) * (q - q0) / (q1 - q0)
}

/// Joins the per-minute invocation counts and the duration percentiles of one
/// day, in the column layout of the public Azure Functions 2019 dataset.
/// Functions missing from either file are skipped.
pub fn load_function_day<R1: Read, R2: Read>(
    invocations: R1,
    durations: R2,
) -> Result<FunctionDay> {
    let malformed = |m: String| Error::MalformedStats(m);

    let mut rdr = csv::Reader::from_reader(durations);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| malformed(format!("durations file lacks column {name}")))
    };
    let key_cols = [col("HashOwner")?, col("HashApp")?, col("HashFunction")?];
    let pct_cols = ["0", "1", "25", "50", "75", "99", "100"]
        .iter()
        .map(|p| col(&format!("percentile_Average_{p}")))
        .collect::<Result<Vec<_>>>()?;
    let mut percentiles: HashMap<String, [f64; 7]> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let key = key_cols
            .iter()
            .map(|&c| &record[c])
            .collect::<Vec<_>>()
            .join("/");
        let mut p = [0.0; 7];
        for (slot, &c) in p.iter_mut().zip(&pct_cols) {
            *slot = record[c]
                .trim()
                .parse()
                .map_err(|_| malformed(format!("{key}: bad percentile {:?}", &record[c])))?;
        }
        percentiles.insert(key, p);
    }

    let mut rdr = csv::Reader::from_reader(invocations);
    let headers = rdr.headers()?.clone();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let key_cols = [
        position("HashOwner"),
        position("HashApp"),
        position("HashFunction"),
    ];
    let key_cols: Vec<usize> = key_cols
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| malformed("invocations file lacks hash columns".into()))?;
    let minute_cols = (1..=MINUTES_PER_DAY)
        .map(|m| {
            position(&m.to_string())
                .ok_or_else(|| malformed(format!("invocations file lacks minute column {m}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut functions = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let key = key_cols
            .iter()
            .map(|&c| &record[c])
            .collect::<Vec<_>>()
            .join("/");
        let Some(p) = percentiles.get(&key) else {
            continue;
        };
        let per_minute = minute_cols
            .iter()
            .map(|&c| {
                let cell = record[c].trim();
                if cell.is_empty() {
                    Ok(0)
                } else {
                    cell.parse()
                        .map_err(|_| malformed(format!("{key}: bad count {cell:?}")))
                }
            })
            .collect::<Result<Vec<u64>>>()?;
        let stat = FunctionStat {
            key,
            per_minute,
            percentiles_ms: *p,
        };
        stat.validate()?;
        functions.push(stat);
    }
    Ok(FunctionDay { functions })
}

struct DaySampler<'a> {
    day: &'a FunctionDay,
    active: Vec<usize>,
    pick: WeightedIndex<u64>,
    minutes: HashMap<usize, WeightedIndex<u64>>,
}

impl<'a> DaySampler<'a> {
    fn new(day: &'a FunctionDay) -> Result<Self> {
        for f in &day.functions {
            f.validate()?;
        }
        let active: Vec<usize> = (0..day.functions.len())
            .filter(|&i| day.functions[i].daily_invocations() > 0)
            .collect();
        let pick = WeightedIndex::new(active.iter().map(|&i| day.functions[i].daily_invocations()))
            .map_err(|_| Error::MalformedStats("no function has any invocation".into()))?;
        Ok(DaySampler {
            day,
            active,
            pick,
            minutes: HashMap::new(),
        })
    }

    fn sample(&mut self, rng: &mut ChaCha8Rng) -> (&'a FunctionStat, usize, f64) {
        let f = self.active[self.pick.sample(rng)];
        let stat = &self.day.functions[f];
        let q: f64 = Open01.sample(rng);
        let runtime_ms = interpolate_percentiles(&stat.percentiles_ms, q).max(MIN_RUNTIME_MS);
        let minutes = self.minutes.entry(f).or_insert_with(|| {
            WeightedIndex::new(stat.per_minute.iter().copied()).expect("positive total")
        });
        let minute = minutes.sample(rng);
        (stat, minute, runtime_ms)
    }
}

/// Synthesizes `spec.requests` function invocations per day of the horizon.
///
/// Days of `stats` are used in order and cycled when the horizon is longer.
/// Every job runs on `vm` with no data to migrate and no temporal slack.
pub fn synth_faas(
    spec: &TraceSpec,
    stats: &[FunctionDay],
    vm: &VmInstance,
    regions: usize,
    horizon: Horizon,
) -> Result<Vec<JobRequest>> {
    spec.validate()?;
    if spec.kind != TraceKind::Faas {
        return Err(Error::InvalidTraceSpec("expected a faas trace spec".into()));
    }
    if stats.is_empty() {
        return Err(Error::MalformedStats("no function statistics".into()));
    }
    if regions == 0 {
        return Err(Error::InvalidTraceSpec("no regions".into()));
    }
    let mut samplers = stats
        .iter()
        .map(DaySampler::new)
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let steps = horizon.steps();
    let days = steps.div_ceil(MINUTES_PER_DAY);

    let mut jobs = Vec::with_capacity(days * spec.requests);
    for day in 0..days {
        let sampler = &mut samplers[day % stats.len()];
        let mut produced = 0;
        let mut attempts = 0usize;
        while produced < spec.requests {
            attempts += 1;
            if attempts > 100 * spec.requests + 1000 {
                return Err(Error::InvalidTraceSpec(format!(
                    "day {day}: cannot place invocations that finish within the horizon"
                )));
            }
            let (_, minute, runtime_ms) = sampler.sample(&mut rng);
            let origin = rng.random_range(0..regions);
            let arrival = day * MINUTES_PER_DAY + minute;
            let runtime_min = runtime_ms / 60_000.0;
            if arrival as f64 + runtime_min > steps as f64 {
                continue;
            }
            jobs.push(JobRequest {
                id: format!("f{}", jobs.len()),
                origin,
                data_regions: RegionSet::single(origin),
                size_gb: 0.0,
                nodes: 1,
                utilization: 0.5,
                vm: vm.clone(),
                runtime_min,
                arrival,
                deadline: arrival,
            });
            produced += 1;
        }
    }
    jobs.sort_by_key(|j| j.arrival);
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::VmCatalog;
    use chrono::{TimeZone, Utc};

    fn stat(key: &str, count_per_minute: u64, p: [f64; 7]) -> FunctionStat {
        FunctionStat {
            key: key.into(),
            per_minute: vec![count_per_minute; MINUTES_PER_DAY],
            percentiles_ms: p,
        }
    }

    fn horizon(days: usize) -> Horizon {
        Horizon::new(
            Utc.with_ymd_and_hms(2024, 1, 15, 0, 0, 0).unwrap(),
            24 * days,
        )
    }

    fn faas_vm() -> VmInstance {
        VmCatalog::standard().get("azure-faas").unwrap().clone()
    }

    #[test]
    fn interpolation_hits_knots() {
        let p = [10.0, 20.0, 100.0, 200.0, 300.0, 900.0, 1000.0];
        assert_eq!(interpolate_percentiles(&p, 0.5), 200.0);
        assert_eq!(interpolate_percentiles(&p, 0.0), 10.0);
        assert_eq!(interpolate_percentiles(&p, 1.0), 1000.0);
        assert!((interpolate_percentiles(&p, 0.375) - 150.0).abs() < 1e-12);
        assert!((interpolate_percentiles(&p, 0.995) - 950.0).abs() < 1e-9);
    }

    #[test]
    fn constant_percentiles_give_constant_runtime() {
        let day = FunctionDay {
            functions: vec![stat("a", 1, [120.0; 7])],
        };
        let jobs = synth_faas(&TraceSpec::faas(200, 1), &[day], &faas_vm(), 3, horizon(1)).unwrap();
        assert_eq!(jobs.len(), 200);
        assert!(jobs.iter().all(|j| j.runtime_min == 120.0 / 60_000.0));
        assert!(jobs
            .iter()
            .all(|j| j.deadline == j.arrival && j.size_gb == 0.0));
    }

    #[test]
    fn one_function_week_count() {
        let day = FunctionDay {
            functions: vec![stat("a", 1, [50.0; 7])],
        };
        let jobs = synth_faas(&TraceSpec::faas(100, 0), &[day], &faas_vm(), 4, horizon(7)).unwrap();
        assert_eq!(jobs.len(), 700);
        for j in &jobs {
            j.validate(4, horizon(7).steps()).unwrap();
        }
    }

    #[test]
    fn arrivals_follow_minute_distribution() {
        let mut f = stat("a", 0, [10.0; 7]);
        f.per_minute[600] = 5;
        f.per_minute[601] = 5;
        let jobs = synth_faas(
            &TraceSpec::faas(500, 3),
            &[FunctionDay { functions: vec![f] }],
            &faas_vm(),
            2,
            horizon(2),
        )
        .unwrap();
        assert!(jobs.iter().all(|j| matches!(j.arrival % 1440, 600 | 601)));
    }

    #[test]
    fn rejects_bad_percentiles() {
        let day = FunctionDay {
            functions: vec![stat("a", 1, [5.0, 4.0, 3.0, 2.0, 1.0, 0.0, 0.0])],
        };
        assert!(matches!(
            synth_faas(&TraceSpec::faas(1, 0), &[day], &faas_vm(), 1, horizon(1)),
            Err(Error::MalformedStats(_))
        ));
    }

    #[test]
    fn loads_azure_layout() {
        let mut inv = String::from("HashOwner,HashApp,HashFunction,Trigger");
        for m in 1..=1440 {
            inv.push_str(&format!(",{m}"));
        }
        inv.push('\n');
        for (f, c) in [("f1", 1), ("f2", 2), ("orphan", 3)] {
            inv.push_str(&format!("o,a,{f},http"));
            for _ in 0..1440 {
                inv.push_str(&format!(",{c}"));
            }
            inv.push('\n');
        }
        let dur = "HashOwner,HashApp,HashFunction,Average,Count,Minimum,Maximum,percentile_Average_0,percentile_Average_1,percentile_Average_25,percentile_Average_50,percentile_Average_75,percentile_Average_99,percentile_Average_100\n\
                   o,a,f1,100,10,1,500,1,2,50,100,150,400,500\n\
                   o,a,f2,10,10,1,20,1,1,5,10,15,19,20\n";
        let day = load_function_day(inv.as_bytes(), dur.as_bytes()).unwrap();
        assert_eq!(day.functions.len(), 2);
        assert_eq!(day.functions[1].daily_invocations(), 2880);
        assert_eq!(day.functions[0].percentiles_ms[3], 100.0);

        let missing = "HashOwner,HashApp,HashFunction\n";
        assert!(load_function_day(inv.as_bytes(), missing.as_bytes()).is_err());
    }
}
