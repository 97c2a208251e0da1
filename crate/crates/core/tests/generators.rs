use std::collections::BTreeSet;

use footprint_core::workload::{
    poisson_arrival_count, synth_bigdata, synth_faas, FunctionDay, FunctionStat, PoolEntry,
};
use footprint_core::{Horizon, ScenarioBundle, Season, TraceSpec, VmCatalog};

fn stat(key: &str, daily: u64, ms: f64) -> FunctionStat {
    let mut per_minute = vec![0u64; 1440];
    per_minute[600] = daily;
    FunctionStat {
        key: key.into(),
        per_minute,
        percentiles_ms: [ms; 7],
    }
}

#[test]
fn poisson_mean_matches_budget() {
    // 25,200 ad-hoc jobs over a week is λ = 2.5 per minute.
    let lambda = 2.5;
    let minutes = 10_080;
    let seeds = 10_000u64;
    let total: usize = (0..seeds)
        .map(|s| poisson_arrival_count(lambda, minutes, s))
        .sum();
    let mean = total as f64 / seeds as f64;
    let expected = lambda * minutes as f64;
    assert!(
        (mean - expected).abs() / expected < 0.02,
        "mean {mean} vs {expected}"
    );
}

#[test]
fn faas_selection_follows_invocation_share() {
    let day = FunctionDay {
        functions: vec![stat("hot", 900, 100.0), stat("cold", 100, 5000.0)],
    };
    let vm = VmCatalog::standard().get("azure-faas").unwrap().clone();
    let horizon = Season::Winter.week(2023);
    let horizon = Horizon::new(horizon.start, 24);
    let jobs = synth_faas(&TraceSpec::faas(50_000, 3), &[day], &vm, 4, horizon).unwrap();
    assert_eq!(jobs.len(), 50_000);
    let cold = jobs
        .iter()
        .filter(|j| (j.runtime_min - 5000.0 / 60_000.0).abs() < 1e-12)
        .count();
    let share = cold as f64 / jobs.len() as f64;
    assert!((share - 0.1).abs() < 0.01, "cold share {share}");
    assert!(jobs
        .iter()
        .all(|j| j.arrival == 600 && j.deadline == j.arrival && j.size_gb == 0.0));
}

#[test]
fn faas_count_is_per_day() {
    let day = FunctionDay {
        functions: vec![stat("only", 10, 250.0)],
    };
    let vm = VmCatalog::standard().get("azure-faas").unwrap().clone();
    let jobs = synth_faas(
        &TraceSpec::faas(100, 0),
        &[day],
        &vm,
        4,
        Season::Summer.week(2023),
    )
    .unwrap();
    assert_eq!(jobs.len(), 700);
    let origins: BTreeSet<usize> = jobs.iter().map(|j| j.origin).collect();
    assert_eq!(origins.len(), 4);
}

#[test]
fn bigdata_jobs_satisfy_invariants() {
    let bundle = ScenarioBundle::sample().unwrap();
    let pool: Vec<PoolEntry> = bundle.pool().unwrap().to_vec();
    for (hours, dt) in [(3, 4.0), (12, 0.0), (48, 48.0)] {
        let horizon = Horizon::new(Season::Autumn.start(2023), hours);
        let spec = TraceSpec {
            requests: 400,
            ..TraceSpec::bigdata(dt, 9)
        };
        let jobs = synth_bigdata(&spec, &pool, 3, horizon).unwrap();
        assert!(!jobs.is_empty());
        for j in &jobs {
            j.validate(3, horizon.steps()).unwrap();
            assert!(j.arrival <= j.deadline && j.deadline <= horizon.steps());
            assert!(j.data_regions.contains(j.origin));
        }
        let periodic = jobs.iter().filter(|j| j.id.starts_with('p')).count();
        assert!(periodic <= 200);
    }
}

#[test]
fn bigdata_default_targets_fifty_thousand_a_week() {
    let spec = TraceSpec::bigdata(4.0, 0);
    assert_eq!(spec.requests, 50_000);
    assert_eq!(spec.periodic_fraction, 0.5);
    assert_eq!(spec.periods_hours, vec![2, 4, 8, 12]);

    let bundle = ScenarioBundle::sample().unwrap();
    let jobs = synth_bigdata(&spec, bundle.pool().unwrap(), 5, Season::Winter.week(2023)).unwrap();
    let periodic = jobs.iter().filter(|j| j.id.starts_with('p')).count();
    assert_eq!(periodic, 25_000);
    let n = jobs.len() as f64;
    assert!((n - 50_000.0).abs() / 50_000.0 < 0.02, "{n}");
}

#[test]
fn periodic_deadlines_follow_the_period() {
    let bundle = ScenarioBundle::sample().unwrap();
    let horizon = Season::Winter.week(2023);
    let spec = TraceSpec {
        requests: 1000,
        periodic_fraction: 1.0,
        ..TraceSpec::bigdata(4.0, 2)
    };
    let jobs = synth_bigdata(&spec, bundle.pool().unwrap(), 5, horizon).unwrap();
    assert_eq!(jobs.len(), 1000);
    for j in &jobs {
        let slack = j.deadline - j.arrival;
        assert!(
            [120, 240, 480, 720].contains(&slack) || j.deadline == horizon.steps(),
            "{slack}"
        );
    }
    let first_arrivals = jobs
        .iter()
        .filter(|j| j.id.ends_with("#0"))
        .all(|j| j.arrival < 12 * 60);
    assert!(first_arrivals);
}

#[test]
fn adhoc_deadline_is_arrival_plus_tolerance() {
    let bundle = ScenarioBundle::sample().unwrap();
    let horizon = Season::Winter.week(2023);
    let spec = TraceSpec {
        requests: 500,
        periodic_fraction: 0.0,
        ..TraceSpec::bigdata(4.0, 5)
    };
    let jobs = synth_bigdata(&spec, bundle.pool().unwrap(), 5, horizon).unwrap();
    let j = jobs
        .iter()
        .find(|j| j.arrival + 240 < horizon.steps())
        .unwrap();
    assert_eq!(j.deadline, j.arrival + 240);
}
