use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use footprint_core::factor::Factor;
use footprint_core::sim::{
    run_against_baseline, run_sweep, write_run_outputs, write_sweep_csv, CellKey, SimulationConfig,
    SweepPlan,
};
use footprint_core::workload::{
    load_function_day, load_pool_csv, synth_bigdata, synth_faas, write_trace_csv,
};
use footprint_core::{Horizon, ScenarioBundle, SchedulerKind, Season, TraceSpec, Weights};

#[derive(Parser)]
#[command(
    name = "footprint",
    version,
    about = "Carbon, water and land-aware cloud job placement simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and its local baseline.
    Run(RunArgs),
    /// Full-factorial sweep over seasons, errors, weights, schedulers and delay tolerances.
    Sweep(SweepArgs),
    /// Generate a synthetic job trace.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    Sample,
    AzureFaas,
    AwsBigdata,
    Custom,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "sample")]
    scenario: ScenarioName,
    /// Directory holding scenario.toml (custom scenarios).
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Data root of the reference scenarios [default: $FOOTPRINT_DATA_DIR].
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

impl ScenarioArgs {
    fn load(&self) -> anyhow::Result<ScenarioBundle> {
        let bundle = match self.scenario {
            ScenarioName::Sample => ScenarioBundle::sample()?,
            ScenarioName::Custom => {
                let dir = self
                    .bundle
                    .as_deref()
                    .context("--scenario custom needs --bundle DIR")?;
                ScenarioBundle::from_dir(dir)?
            }
            ScenarioName::AzureFaas | ScenarioName::AwsBigdata => {
                let name = if matches!(self.scenario, ScenarioName::AzureFaas) {
                    "azure-faas"
                } else {
                    "aws-bigdata"
                };
                let dir = self
                    .data_dir
                    .clone()
                    .or_else(ScenarioBundle::default_data_dir)
                    .context("reference scenarios need --data-dir or FOOTPRINT_DATA_DIR")?;
                ScenarioBundle::reference(name, &dir)?
            }
        };
        Ok(bundle)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Job trace CSV to use instead of the scenario's workload.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value = "sp")]
    scheduler: SchedulerKind,
    #[arg(long, default_value = "1,0,0")]
    theta: Weights,
    #[arg(long, default_value_t = 0.0)]
    mae: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Delay tolerance of ad-hoc jobs, hours.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value = "winter")]
    season: Season,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_delimiter = ',', default_value = "winter")]
    seasons: Vec<Season>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    maes: Vec<f64>,
    /// Weight vectors, e.g. `--theta 1,0,0 --theta 0.333,0.333,0.334`.
    #[arg(long = "theta", num_args = 1.., default_value = "1,0,0")]
    thetas: Vec<Weights>,
    #[arg(long, value_delimiter = ',', default_value = "sp")]
    schedulers: Vec<SchedulerKind>,
    /// Delay tolerances (hours); only valid with t or stp.
    #[arg(long, value_delimiter = ',')]
    dts: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
    seeds: Vec<u64>,
    /// Output directory; per-seed results under `cells/` make the sweep resumable.
    #[arg(long, default_value = "sweep-out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Faas,
    Bigdata,
}

#[derive(Args)]
struct SynthArgs {
    kind: SynthKind,
    /// Supplies the regions, year and defaults.
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// FaaS: requests per day. Big data: requests over the horizon.
    #[arg(long)]
    requests: Option<usize>,
    #[arg(long)]
    periodic_fraction: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    periods: Option<Vec<usize>>,
    #[arg(long)]
    dt: Option<f64>,
    /// Spark-style pool CSV (big data).
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Per-day invocation files, Azure Functions 2019 layout (FaaS).
    #[arg(long, num_args = 1..)]
    invocations: Vec<PathBuf>,
    /// Per-day duration percentile files, one per invocation file (FaaS).
    #[arg(long, num_args = 1..)]
    durations: Vec<PathBuf>,
    #[arg(long, default_value = "azure-faas")]
    vm: String,
    /// Horizon length [default: the scenario's].
    #[arg(long)]
    hours: Option<usize>,
    #[arg(long, default_value = "winter")]
    season: Season,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let bundle = args.scenario.load()?;
    let (horizon, jobs) = match &args.trace {
        Some(path) => {
            if args.dt.is_some() {
                bail!("--dt does not apply to a fixed trace");
            }
            (bundle.horizon(args.season), bundle.read_trace(path)?)
        }
        None => (
            bundle.horizon(args.season),
            bundle.jobs(args.season, args.seed, args.dt)?,
        ),
    };
    let mixes = bundle.mixes(args.season)?;
    let mut config = SimulationConfig::new(horizon, args.scheduler, args.theta)
        .with_mae(args.mae)
        .with_seed(args.seed);
    config.season = Some(args.season);
    config.delay_tolerance_hours = args.dt.or(bundle.default_delay_tolerance());
    let report = run_against_baseline(
        &config,
        &bundle.regions,
        &bundle.coefficients,
        &mixes,
        &jobs,
    )?;

    let key = CellKey {
        season: args.season,
        mae: args.mae,
        weights: args.theta,
        delay_tolerance_hours: args
            .scheduler
            .shifts_time()
            .then_some(config.delay_tolerance_hours)
            .flatten(),
        scheduler: args.scheduler,
    };
    write_run_outputs(&args.out, &report, &bundle.regions, key)?;

    let base = report.baseline.ledger.total();
    let cand = report.candidate.ledger.total();
    let share = report.candidate.ledger.migration_share();
    println!(
        "{} | {} jobs | scheduler {} | theta {} | mae {} | seed {}",
        bundle.name(),
        jobs.len(),
        args.scheduler,
        args.theta,
        args.mae,
        args.seed
    );
    println!(
        "{:<8} {:>16} {:>16} {:>10} {:>10}",
        "factor",
        "local",
        args.scheduler.code(),
        "improv.%",
        "migr.%"
    );
    for f in Factor::ALL {
        let imp = report
            .improvement
            .get(f)
            .map_or_else(|| "NA".into(), |v| format!("{v:.2}"));
        println!(
            "{:<8} {:>16.3} {:>16.3} {:>10} {:>10.2}",
            format!("{} ({})", f.name(), f.unit()),
            base.get(f),
            cand.get(f),
            imp,
            100.0 * share.get(f)
        );
    }
    println!(
        "migrations {} | fallbacks {} | outputs in {}",
        report.candidate.ledger.migrations,
        report.candidate.ledger.infeasible,
        args.out.display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<bool> {
    let bundle = args.scenario.load()?;
    let plan = SweepPlan {
        seasons: args.seasons,
        maes: args.maes,
        weights: args.thetas,
        delay_tolerances: args.dts,
        schedulers: args.schedulers,
        seeds: args.seeds,
    };
    let rows = run_sweep(&bundle, &plan, Some(&args.out.join("cells")))?;
    let path = args.out.join("sweep.csv");
    let file = File::create(&path).with_context(|| path.display().to_string())?;
    write_sweep_csv(BufWriter::new(file), &rows)?;
    let failed: usize = rows.iter().map(|r| r.failed).sum();
    println!(
        "{} cells, {} failed seed runs -> {}",
        rows.len(),
        failed,
        path.display()
    );
    for row in rows.iter().filter(|r| r.failed > 0) {
        eprintln!(
            "cell {} {} {}: {}",
            row.key.season, row.key.scheduler, row.key.weights, row.status
        );
    }
    Ok(failed == 0)
}

fn cmd_synth(args: SynthArgs) -> anyhow::Result<()> {
    let bundle = args.scenario.load()?;
    let base = bundle.horizon(args.season);
    let horizon = Horizon::new(base.start, args.hours.unwrap_or(base.hours));
    let regions = &bundle.regions;
    let jobs = match args.kind {
        SynthKind::Bigdata => {
            let mut spec = TraceSpec::bigdata(
                args.dt.or(bundle.default_delay_tolerance()).unwrap_or(4.0),
                args.seed,
            );
            if let Some(n) = args.requests {
                spec.requests = n;
            }
            if let Some(p) = args.periodic_fraction {
                spec.periodic_fraction = p;
            }
            if let Some(p) = args.periods {
                spec.periods_hours = p;
            }
            let pool = match &args.pool {
                Some(path) => {
                    let file = File::open(path).with_context(|| path.display().to_string())?;
                    load_pool_csv(file, &bundle.catalog)?
                }
                None => bundle
                    .pool()
                    .context("no pool in scenario; pass --pool")?
                    .to_vec(),
            };
            synth_bigdata(&spec, &pool, regions.len(), horizon)?
        }
        SynthKind::Faas => {
            if args.invocations.is_empty() || args.invocations.len() != args.durations.len() {
                bail!("faas needs matching --invocations and --durations files");
            }
            let days = args
                .invocations
                .iter()
                .zip(&args.durations)
                .map(|(i, d)| -> anyhow::Result<_> {
                    let open = |p: &Path| File::open(p).with_context(|| p.display().to_string());
                    Ok(load_function_day(open(i)?, open(d)?)?)
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let spec = TraceSpec::faas(args.requests.unwrap_or(100_000), args.seed);
            synth_faas(
                &spec,
                &days,
                bundle.catalog.get(&args.vm)?,
                regions.len(),
                horizon,
            )?
        }
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
    }
    let file = File::create(&args.out).with_context(|| args.out.display().to_string())?;
    write_trace_csv(BufWriter::new(file), &jobs, regions)?;
    println!("{} jobs -> {}", jobs.len(), args.out.display());
    Ok(())
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("error: usage: {}", one_line(first));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(a) => cmd_synth(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {}", one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
