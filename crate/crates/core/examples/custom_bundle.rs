//! Builds a two-region scenario bundle on disk and runs it: a scenario.toml,
//! a regions file, grid CSVs and a fixed trace.

use std::fs;

use footprint_core::grid::synthetic::GridArchetype;
use footprint_core::grid::write_mix_csv;
use footprint_core::workload::write_trace_csv;
use footprint_core::{
    run, JobRequest, RegionSet, ScenarioBundle, SchedulerKind, Season, SimulationConfig, Weights,
};

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("footprint-custom-bundle");
    fs::create_dir_all(dir.join("grids"))?;
    fs::write(
        dir.join("scenario.toml"),
        r#"name = "two-regions"
regions = "regions.toml"
grid_dir = "grids"
year = 2024
horizon_hours = 24

[workload]
kind = "trace"
path = "trace.csv"
"#,
    )?;
    fs::write(
        dir.join("regions.toml"),
        r#"provider = "aws"

[[regions]]
id = "north"
grid = "sw"
pue = 1.1
wue = 0.02
land_area_m2 = 100000.0

[[regions]]
id = "west"
grid = "caiso"
pue = 1.2
wue = 0.5
land_area_m2 = 150000.0
"#,
    )?;
    for grid in ["sw", "caiso"] {
        let season = Season::Summer;
        let series = GridArchetype::for_grid(grid).generate(grid, season.start(2024), 24, 0);
        write_mix_csv(
            fs::File::create(dir.join(format!("grids/{grid}_{season}.csv")))?,
            &series,
        )?;
    }

    let probe = ScenarioBundle::sample()?;
    let vm = probe.catalog.get("m4.2xlarge")?.clone();
    let jobs: Vec<JobRequest> = (0..12)
        .map(|k| JobRequest {
            id: format!("nightly#{k}"),
            origin: 1,
            data_regions: RegionSet::single(1),
            size_gb: 0.5,
            nodes: 8,
            utilization: 0.7,
            vm: vm.clone(),
            runtime_min: 60.0,
            arrival: k * 120,
            deadline: (k * 120 + 240).min(24 * 60),
        })
        .filter(|j| j.arrival as f64 + j.runtime_min <= j.deadline as f64)
        .collect();
    let regions = footprint_core::RegionsConfig::from_file(&dir.join("regions.toml"))?.regions;
    write_trace_csv(fs::File::create(dir.join("trace.csv"))?, &jobs, &regions)?;

    let bundle = ScenarioBundle::from_dir(&dir)?;
    let inst = bundle.instance(Season::Summer, 0, None)?;
    for kind in SchedulerKind::ALL {
        let config = SimulationConfig::new(inst.horizon, kind, Weights::BALANCED);
        let out = run(
            &config,
            &inst.regions,
            &inst.coefficients,
            &inst.true_mixes,
            &inst.jobs,
        )?;
        let total = out.ledger.total();
        println!(
            "{:<4} carbon {:>9.1} g  water {:>6.2} l  migrations {}",
            kind.code(),
            total.carbon,
            total.water,
            out.ledger.migrations
        );
    }
    println!("bundle written to {}", dir.display());
    Ok(())
}
