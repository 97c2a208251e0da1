//! Scenario bundles: regions, grid mixes and a workload, loaded from a
//! `scenario.toml` and resolved against a data root.
//!
//! ```toml
//! name = "sample"
//! regions = "regions.toml"        # or "builtin:aws" / "builtin:azure"
//! grid_dir = "grids"              # holds <grid>_<season>.csv
//! year = 2023
//! horizon_hours = 48
//!
//! [workload]
//! kind = "bigdata"                # or "faas" / "trace"
//! pool = "spark_pool.csv"
//! requests = 200
//! ```

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::{harmonize, read_mix_csv, IntensityCoefficients, MixSeries};
use crate::profile::Horizon;
use crate::region::{Region, RegionsConfig};
use crate::sim::Season;
use crate::workload::{
    load_function_day, load_pool_csv, read_trace_csv, synth_bigdata, synth_faas, FunctionDay,
    JobRequest, PoolEntry, TraceSpec, VmCatalog,
};

/// Environment variable naming the default data root.
pub const DATA_DIR_ENV: &str = "FOOTPRINT_DATA_DIR";

const DEFAULT_DELAY_TOLERANCE_HOURS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub regions: String,
    pub grid_dir: String,
    #[serde(default)]
    pub coefficients: Option<String>,
    #[serde(default = "default_year")]
    pub year: i32,
    #[serde(default = "default_horizon_hours")]
    pub horizon_hours: usize,
    pub workload: WorkloadConfig,
}

fn default_year() -> i32 {
    2023
}

fn default_horizon_hours() -> usize {
    7 * 24
}

fn default_periodic_fraction() -> f64 {
    0.5
}

fn default_periods() -> Vec<usize> {
    vec![2, 4, 8, 12]
}

fn default_first_window() -> usize {
    12
}

fn default_dt() -> f64 {
    DEFAULT_DELAY_TOLERANCE_HOURS
}

fn default_faas_vm() -> String {
    "azure-faas".into()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WorkloadConfig {
    /// Synthetic Spark-style jobs drawn from a pool.
    Bigdata {
        pool: String,
        #[serde(default = "default_requests")]
        requests: usize,
        #[serde(default = "default_periodic_fraction")]
        periodic_fraction: f64,
        #[serde(default = "default_periods")]
        periods_hours: Vec<usize>,
        #[serde(default = "default_first_window")]
        first_arrival_window_hours: usize,
        #[serde(default = "default_dt")]
        delay_tolerance_hours: f64,
    },
    /// Synthetic function invocations from per-day statistics files.
    Faas {
        requests_per_day: usize,
        invocations: Vec<String>,
        durations: Vec<String>,
        #[serde(default = "default_faas_vm")]
        vm: String,
    },
    /// A fixed job list.
    Trace { path: String },
}

fn default_requests() -> usize {
    50_000
}

/// Where bundle files are read from.
#[derive(Debug, Clone)]
enum DataRoot {
    Dir(PathBuf),
    Embedded(&'static [(&'static str, &'static str)]),
}

impl DataRoot {
    fn read(&self, rel: &str) -> Result<String> {
        match self {
            DataRoot::Dir(dir) => {
                let path = dir.join(rel);
                if !path.exists() {
                    return Err(Error::MissingData(path.display().to_string()));
                }
                std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
            }
            DataRoot::Embedded(files) => files
                .iter()
                .find(|(name, _)| *name == rel)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| Error::MissingData(format!("sample/{rel}"))),
        }
    }

    fn exists(&self, rel: &str) -> bool {
        match self {
            DataRoot::Dir(dir) => dir.join(rel).exists(),
            DataRoot::Embedded(files) => files.iter().any(|(name, _)| *name == rel),
        }
    }
}

macro_rules! sample_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../data/sample/", $name)))),*]
    };
}

static SAMPLE: &[(&str, &str)] = sample_files![
    "scenario.toml",
    "regions.toml",
    "spark_pool.csv",
    "trace.csv",
    "grids/sw_winter.csv",
    "grids/sw_spring.csv",
    "grids/sw_summer.csv",
    "grids/sw_autumn.csv",
    "grids/de_winter.csv",
    "grids/de_spring.csv",
    "grids/de_summer.csv",
    "grids/de_autumn.csv",
    "grids/pjm_winter.csv",
    "grids/pjm_spring.csv",
    "grids/pjm_summer.csv",
    "grids/pjm_autumn.csv",
];

const AZURE_FAAS: &str = include_str!("../data/scenarios/azure-faas.toml");
const AWS_BIGDATA: &str = include_str!("../data/scenarios/aws-bigdata.toml");

/// A loaded scenario. Region, coefficient and workload-pool files are read
/// eagerly; grid mixes are read per season.
#[derive(Debug)]
pub struct ScenarioBundle {
    pub file: ScenarioFile,
    pub regions: Vec<Region>,
    pub coefficients: IntensityCoefficients,
    pub catalog: VmCatalog,
    root: DataRoot,
    pool: Option<Vec<PoolEntry>>,
    days: OnceLock<Result<Vec<FunctionDay>, String>>,
}

/// Everything one simulation run needs.
#[derive(Debug, Clone)]
pub struct ScenarioInstance {
    pub horizon: Horizon,
    pub regions: Vec<Region>,
    pub coefficients: IntensityCoefficients,
    pub true_mixes: Vec<MixSeries>,
    pub jobs: Vec<JobRequest>,
}

impl ScenarioBundle {
    /// The bundled synthetic sample: 3 regions, 48 hours.
    pub fn sample() -> Result<Self> {
        let root = DataRoot::Embedded(SAMPLE);
        let text = root.read("scenario.toml")?;
        Self::load(&text, root)
    }

    /// Loads `dir/scenario.toml`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let root = DataRoot::Dir(dir.to_path_buf());
        let text = root.read("scenario.toml")?;
        Self::load(&text, root)
    }

    /// One of the two reference scenarios (`azure-faas`, `aws-bigdata`) with its
    /// data files resolved against `data_dir`.
    pub fn reference(name: &str, data_dir: &Path) -> Result<Self> {
        let text = match name {
            "azure-faas" => AZURE_FAAS,
            "aws-bigdata" => AWS_BIGDATA,
            other => return Err(Error::Config(format!("unknown scenario {other:?}"))),
        };
        Self::load(text, DataRoot::Dir(data_dir.to_path_buf()))
    }

    /// The data root from `FOOTPRINT_DATA_DIR`, if set.
    pub fn default_data_dir() -> Option<PathBuf> {
        std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
    }

    fn load(text: &str, root: DataRoot) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::parse("scenario", e))?;
        if file.horizon_hours == 0 {
            return Err(Error::Config("horizon_hours must be positive".into()));
        }
        let regions = match file.regions.as_str() {
            "builtin:aws" => RegionsConfig::aws(),
            "builtin:azure" => RegionsConfig::azure(),
            rel => RegionsConfig::from_toml_str(&root.read(rel)?)?,
        }
        .regions;
        let coefficients = match &file.coefficients {
            Some(rel) => IntensityCoefficients::from_toml_str(&root.read(rel)?)?,
            None => IntensityCoefficients::standard(),
        };
        let catalog = VmCatalog::standard();
        let pool = match &file.workload {
            WorkloadConfig::Bigdata { pool, .. } => {
                Some(load_pool_csv(root.read(pool)?.as_bytes(), &catalog)?)
            }
            WorkloadConfig::Faas {
                vm,
                invocations,
                durations,
                ..
            } => {
                catalog.get(vm)?;
                if invocations.len() != durations.len() || invocations.is_empty() {
                    return Err(Error::Config(
                        "faas needs one durations file per invocations file".into(),
                    ));
                }
                for rel in invocations.iter().chain(durations) {
                    if !root.exists(rel) {
                        return Err(Error::MissingData(rel.clone()));
                    }
                }
                None
            }
            WorkloadConfig::Trace { path } => {
                if !root.exists(path) {
                    return Err(Error::MissingData(path.clone()));
                }
                None
            }
        };
        Ok(ScenarioBundle {
            file,
            regions,
            coefficients,
            catalog,
            root,
            pool,
            days: OnceLock::new(),
        })
    }

    /// Job pool of a big-data workload.
    pub fn pool(&self) -> Option<&[PoolEntry]> {
        self.pool.as_deref()
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn horizon(&self, season: Season) -> Horizon {
        Horizon::new(season.start(self.file.year), self.file.horizon_hours)
    }

    /// Delay tolerance used when none is requested.
    pub fn default_delay_tolerance(&self) -> Option<f64> {
        match &self.file.workload {
            WorkloadConfig::Bigdata {
                delay_tolerance_hours,
                ..
            } => Some(*delay_tolerance_hours),
            _ => None,
        }
    }

    /// Harmonized true mixes of every grid used by the regions.
    pub fn mixes(&self, season: Season) -> Result<Vec<MixSeries>> {
        let horizon = self.horizon(season);
        let mut grids: Vec<&str> = self.regions.iter().map(|r| r.grid.as_str()).collect();
        grids.sort_unstable();
        grids.dedup();
        grids
            .into_iter()
            .map(|grid| {
                let rel = format!("{}/{grid}_{season}.csv", self.file.grid_dir);
                let rows = read_mix_csv(self.root.read(&rel)?.as_bytes(), &rel)?;
                harmonize(grid, &rows, horizon.start, horizon.hours)
            })
            .collect()
    }

    fn function_days(&self) -> Result<&[FunctionDay]> {
        let WorkloadConfig::Faas {
            invocations,
            durations,
            ..
        } = &self.file.workload
        else {
            return Ok(&[]);
        };
        let days = self.days.get_or_init(|| {
            invocations
                .iter()
                .zip(durations)
                .map(|(inv, dur)| {
                    let inv = self.root.read(inv)?;
                    let dur = self.root.read(dur)?;
                    load_function_day(inv.as_bytes(), dur.as_bytes())
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.to_string())
        });
        days.as_deref().map_err(|e| Error::MissingData(e.clone()))
    }

    /// Jobs of the workload for one season and seed. `delay_tolerance_hours`
    /// overrides the bundle's default and is only meaningful for big-data
    /// workloads.
    pub fn jobs(
        &self,
        season: Season,
        seed: u64,
        delay_tolerance_hours: Option<f64>,
    ) -> Result<Vec<JobRequest>> {
        let horizon = self.horizon(season);
        match &self.file.workload {
            WorkloadConfig::Bigdata {
                requests,
                periodic_fraction,
                periods_hours,
                first_arrival_window_hours,
                delay_tolerance_hours: default_dt,
                ..
            } => {
                let spec = TraceSpec {
                    requests: *requests,
                    periodic_fraction: *periodic_fraction,
                    periods_hours: periods_hours.clone(),
                    first_arrival_window_hours: *first_arrival_window_hours,
                    ..TraceSpec::bigdata(delay_tolerance_hours.unwrap_or(*default_dt), seed)
                };
                let pool = self.pool.as_deref().unwrap_or_default();
                synth_bigdata(&spec, pool, self.regions.len(), horizon)
            }
            WorkloadConfig::Faas {
                requests_per_day,
                vm,
                ..
            } => {
                if delay_tolerance_hours.is_some() {
                    return Err(Error::Config(
                        "function invocations have no delay tolerance".into(),
                    ));
                }
                let spec = TraceSpec::faas(*requests_per_day, seed);
                synth_faas(
                    &spec,
                    self.function_days()?,
                    self.catalog.get(vm)?,
                    self.regions.len(),
                    horizon,
                )
            }
            WorkloadConfig::Trace { path } => {
                if delay_tolerance_hours.is_some() {
                    return Err(Error::Config(
                        "a fixed trace carries its own deadlines".into(),
                    ));
                }
                read_trace_csv(
                    self.root.read(path)?.as_bytes(),
                    &self.regions,
                    &self.catalog,
                )
            }
        }
    }

    pub fn instance(
        &self,
        season: Season,
        seed: u64,
        delay_tolerance_hours: Option<f64>,
    ) -> Result<ScenarioInstance> {
        Ok(ScenarioInstance {
            horizon: self.horizon(season),
            regions: self.regions.clone(),
            coefficients: self.coefficients.clone(),
            true_mixes: self.mixes(season)?,
            jobs: self.jobs(season, seed, delay_tolerance_hours)?,
        })
    }

    /// Reads a trace file against this bundle's regions.
    pub fn read_trace(&self, path: &Path) -> Result<Vec<JobRequest>> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        read_trace_csv(file, &self.regions, &self.catalog)
    }

    /// The bundled sample trace (200 jobs, winter).
    pub fn sample_trace(&self) -> Result<Vec<JobRequest>> {
        read_trace_csv(
            self.root.read("trace.csv")?.as_bytes(),
            &self.regions,
            &self.catalog,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_loads_every_season() {
        let b = ScenarioBundle::sample().unwrap();
        assert_eq!(b.regions.len(), 3);
        for s in Season::ALL {
            let inst = b.instance(s, 0, None).unwrap();
            assert_eq!(inst.horizon.hours, 48);
            assert_eq!(inst.true_mixes.len(), 3);
            assert!(
                (150..=250).contains(&inst.jobs.len()),
                "{}",
                inst.jobs.len()
            );
        }
    }

    #[test]
    fn sample_trace_matches_regions() {
        let b = ScenarioBundle::sample().unwrap();
        let jobs = b.sample_trace().unwrap();
        assert_eq!(jobs.len(), 200);
        let steps = b.horizon(Season::Winter).steps();
        assert!(jobs.iter().all(|j| j.validate(3, steps).is_ok()));
    }

    #[test]
    fn reference_scenarios_need_data() {
        let dir = tempfile::tempdir().unwrap();
        let err = ScenarioBundle::reference("aws-bigdata", dir.path()).unwrap_err();
        assert!(matches!(err, Error::MissingData(_)), "{err}");
        assert!(ScenarioBundle::reference("gcp", dir.path()).is_err());
    }
}
