mod common;

use common::{oracle, random_instance, Shape};
use footprint_core::footprint::{actual_footprint, migration_energy};
use footprint_core::sim::{run, SimulationConfig};
use footprint_core::{apply_noise, FactorVec, IntensityCoefficients, RegionSet, SchedulerKind};

#[test]
fn engine_matches_oracle_replay() {
    let coeffs = IntensityCoefficients::standard();
    for seed in 0..40 {
        let inst = random_instance(seed, &Shape::SMALL);
        let mae = [0.0, 0.1][seed as usize % 2];
        for kind in SchedulerKind::ALL {
            let config = SimulationConfig::new(inst.horizon, kind, inst.weights)
                .with_mae(mae)
                .with_seed(seed);
            let out = run(&config, &inst.regions, &coeffs, &inst.mixes, &inst.jobs).unwrap();
            let noise = config.noise();
            let predicted: Vec<_> = inst.mixes.iter().map(|m| apply_noise(m, &noise)).collect();
            let p = oracle::oracle_profiles(&inst.regions, &predicted, &coeffs, inst.horizon.hours);
            let expected = oracle::replay(kind, &inst.jobs, &p, &inst.weights);
            let got: Vec<_> = out
                .decisions
                .iter()
                .map(|d| (d.job_id.clone(), d.region, d.start, d.fallback))
                .collect();
            assert_eq!(got, expected, "seed {seed} {kind}");
        }
    }
}

#[test]
fn ledger_is_the_sum_of_job_footprints() {
    let coeffs = IntensityCoefficients::standard();
    let inst = random_instance(7, &Shape::SMALL);
    let config = SimulationConfig::new(inst.horizon, SchedulerKind::SpatioTemporal, inst.weights)
        .with_mae(0.05);
    let out = run(&config, &inst.regions, &coeffs, &inst.mixes, &inst.jobs).unwrap();
    let sum = out
        .actuals
        .iter()
        .fold(FactorVec::ZERO, |acc, a| acc + a.total());
    let total = out.ledger.total();
    for f in footprint_core::Factor::ALL {
        assert!((sum.get(f) - total.get(f)).abs() <= 1e-9 * total.get(f).abs().max(1e-12));
        assert!(out
            .actuals
            .iter()
            .all(|a| a.execution.get(f) >= 0.0 && a.migration.get(f) >= 0.0));
    }
    assert_eq!(out.ledger.requests(), inst.jobs.len());
}

#[test]
fn identical_jobs_double_the_footprint() {
    let coeffs = IntensityCoefficients::standard();
    let inst = random_instance(11, &Shape::SMALL);
    let job = inst.jobs[0].clone();
    let mut twin = job.clone();
    twin.id = format!("{}-twin", job.id);
    let config = SimulationConfig::new(inst.horizon, SchedulerKind::Local, inst.weights);
    let one = run(
        &config,
        &inst.regions,
        &coeffs,
        &inst.mixes,
        std::slice::from_ref(&job),
    )
    .unwrap();
    let two = run(&config, &inst.regions, &coeffs, &inst.mixes, &[job, twin]).unwrap();
    let a = one.ledger.total();
    let b = two.ledger.total();
    assert_eq!(b, a + a);
}

#[test]
fn persistent_replay_never_migrates_more() {
    let coeffs = IntensityCoefficients::standard();
    for seed in 0..20 {
        let inst = random_instance(
            seed,
            &Shape {
                family_share: 0.8,
                ..Shape::SMALL
            },
        );
        let config =
            SimulationConfig::new(inst.horizon, SchedulerKind::SpatialPersistent, inst.weights);
        let out = run(&config, &inst.regions, &coeffs, &inst.mixes, &inst.jobs).unwrap();
        let mut order: Vec<_> = inst.jobs.iter().collect();
        order.sort_by_key(|j| j.arrival);
        let mut stored = std::collections::HashMap::<String, RegionSet>::new();
        let (mut persistent, mut plain) = (0.0, 0.0);
        for (job, d) in order.iter().zip(&out.decisions) {
            plain += migration_energy(job, d.region);
            let fam = job.family().to_string();
            let mut view = (*job).clone();
            view.data_regions = job
                .data_regions
                .union(stored.get(&fam).copied().unwrap_or_default());
            persistent += migration_energy(&view, d.region);
            let mut s = view.data_regions;
            s.insert(d.region);
            stored.insert(fam, s);
        }
        assert!(persistent <= plain, "seed {seed}: {persistent} > {plain}");
    }
}

#[test]
fn zero_runtime_costs_nothing() {
    let coeffs = IntensityCoefficients::standard();
    let inst = random_instance(3, &Shape::SMALL);
    let mut job = inst.jobs[0].clone();
    job.runtime_min = 0.0;
    job.data_regions = RegionSet::single(job.origin);
    let config = SimulationConfig::new(inst.horizon, SchedulerKind::Local, inst.weights);
    let (predicted, actual) =
        footprint_core::sim::prepare_profiles(&config, &inst.regions, &coeffs, &inst.mixes)
            .unwrap();
    let decision =
        footprint_core::decide(SchedulerKind::Local, &job, &predicted, &inst.weights).unwrap();
    assert_eq!(decision.cost.cost, 0.0);
    assert_eq!(
        actual_footprint(&job, &decision, &actual).total(),
        FactorVec::ZERO
    );
}
