//! Synthesizes a big-data trace from a job pool and a FaaS trace from
//! per-function statistics, and writes the first as CSV.

use footprint_core::workload::{
    synth_bigdata, synth_faas, write_trace_csv, FunctionDay, FunctionStat,
};
use footprint_core::{ScenarioBundle, Season, TraceSpec};

fn main() -> footprint_core::Result<()> {
    let bundle = ScenarioBundle::sample()?;
    let horizon = bundle.horizon(Season::Winter);

    let spec = TraceSpec {
        requests: 300,
        ..TraceSpec::bigdata(12.0, 1)
    };
    let jobs = synth_bigdata(&spec, bundle.pool().unwrap(), bundle.regions.len(), horizon)?;
    let periodic = jobs.iter().filter(|j| j.id.starts_with('p')).count();
    println!(
        "big data: {} jobs, {periodic} periodic, {} ad hoc",
        jobs.len(),
        jobs.len() - periodic
    );
    write_trace_csv(std::io::stdout().lock(), &jobs[..5], &bundle.regions)?;

    // Two functions: a busy short one and a rare slow one.
    let mut busy = vec![0u64; 1440];
    busy[540..1080].iter_mut().for_each(|c| *c = 9);
    let day = FunctionDay {
        functions: vec![
            FunctionStat {
                key: "busy".into(),
                per_minute: busy,
                percentiles_ms: [5.0, 8.0, 20.0, 40.0, 90.0, 400.0, 2000.0],
            },
            FunctionStat {
                key: "rare".into(),
                per_minute: vec![1; 1440],
                percentiles_ms: [1e3, 2e3, 5e3, 1e4, 2e4, 6e4, 1.2e5],
            },
        ],
    };
    let vm = bundle.catalog.get("azure-faas")?;
    let faas = synth_faas(
        &TraceSpec::faas(1000, 1),
        &[day],
        vm,
        bundle.regions.len(),
        horizon,
    )?;
    let mean_ms = faas.iter().map(|j| j.runtime_min * 60e3).sum::<f64>() / faas.len() as f64;
    let office = faas
        .iter()
        .filter(|j| (540..1080).contains(&(j.arrival % 1440)))
        .count();
    println!(
        "\nfaas: {} invocations, mean runtime {mean_ms:.0} ms, {office} in 09:00-18:00",
        faas.len()
    );
    Ok(())
}
