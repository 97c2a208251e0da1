//! Full-factorial parameter sweeps with per-seed result caching.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use super::{run_against_baseline, Improvement, Season, SimulationConfig};
use crate::error::{Error, Result};
use crate::factor::{Factor, Weights};
use crate::scenario::ScenarioBundle;
use crate::scheduler::SchedulerKind;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub seasons: Vec<Season>,
    pub maes: Vec<f64>,
    pub weights: Vec<Weights>,
    /// Only applied to time-shifting schedulers.
    pub delay_tolerances: Vec<f64>,
    pub schedulers: Vec<SchedulerKind>,
    pub seeds: Vec<u64>,
}

/// One configuration of the sweep; results are aggregated over seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub season: Season,
    pub mae: f64,
    pub weights: Weights,
    pub delay_tolerance_hours: Option<f64>,
    pub scheduler: SchedulerKind,
}

impl CellKey {
    fn file_stem(&self, seed: u64) -> String {
        let dt = self
            .delay_tolerance_hours
            .map_or_else(|| "na".to_string(), |v| v.to_string());
        format!(
            "{}_mae{}_theta{}-{}-{}_dt{}_{}_seed{}",
            self.season,
            self.mae,
            self.weights.carbon,
            self.weights.water,
            self.weights.land,
            dt,
            self.scheduler,
            seed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub key: CellKey,
    /// Seeds that produced a result.
    pub seeds: usize,
    /// Mean improvement (%) per factor, indexed by [`Factor`].
    pub mean: [Option<f64>; 3],
    /// Population standard deviation per factor.
    pub std: [Option<f64>; 3],
    pub failed: usize,
    pub status: String,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| Err(Error::Config(format!("sweep axis {name} is empty")));
        if self.seasons.is_empty() {
            return empty("season");
        }
        if self.maes.is_empty() {
            return empty("mae");
        }
        if self.weights.is_empty() {
            return empty("theta");
        }
        if self.schedulers.is_empty() {
            return empty("scheduler");
        }
        if self.seeds.is_empty() {
            return empty("seed");
        }
        if !self.delay_tolerances.is_empty() && !self.schedulers.iter().any(|k| k.shifts_time()) {
            return Err(Error::Config(
                "a delay-tolerance axis needs a time-shifting scheduler (t or stp)".into(),
            ));
        }
        let negative = |v: &f64| v.is_nan() || *v < 0.0;
        if self.maes.iter().any(negative) || self.delay_tolerances.iter().any(negative) {
            return Err(Error::Config(
                "mae and delay tolerance values must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Cells in axis order: season, mae, theta, scheduler, delay tolerance.
    pub fn cells(&self) -> Result<Vec<CellKey>> {
        self.validate()?;
        let mut cells = Vec::new();
        for &season in &self.seasons {
            for &mae in &self.maes {
                for &weights in &self.weights {
                    for &scheduler in &self.schedulers {
                        let dts: Vec<Option<f64>> =
                            if scheduler.shifts_time() && !self.delay_tolerances.is_empty() {
                                self.delay_tolerances.iter().map(|&d| Some(d)).collect()
                            } else {
                                vec![None]
                            };
                        for delay_tolerance_hours in dts {
                            cells.push(CellKey {
                                season,
                                mae,
                                weights,
                                delay_tolerance_hours,
                                scheduler,
                            });
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Improvement of the cell's scheduler over the local baseline for one seed.
pub fn run_cell(bundle: &ScenarioBundle, key: &CellKey, seed: u64) -> Result<Improvement> {
    let instance = bundle.instance(key.season, seed, key.delay_tolerance_hours)?;
    let mut config = SimulationConfig::new(instance.horizon, key.scheduler, key.weights)
        .with_mae(key.mae)
        .with_seed(seed);
    config.season = Some(key.season);
    config.delay_tolerance_hours = key.delay_tolerance_hours;
    let report = run_against_baseline(
        &config,
        &instance.regions,
        &instance.coefficients,
        &instance.true_mixes,
        &instance.jobs,
    )?;
    Ok(report.improvement)
}

fn cache_path(dir: &Path, key: &CellKey, seed: u64) -> PathBuf {
    dir.join(format!("{}.csv", key.file_stem(seed)))
}

fn read_cached(path: &Path) -> Option<Improvement> {
    let text = std::fs::read_to_string(path).ok()?;
    let line = text.lines().nth(1)?;
    let vals: Vec<Option<f64>> = line
        .split(',')
        .map(|c| {
            if c == "NA" {
                Some(None)
            } else {
                c.parse().ok().map(Some)
            }
        })
        .collect::<Option<_>>()?;
    match vals.as_slice() {
        [c, w, l] => Some(Improvement {
            carbon: *c,
            water: *w,
            land: *l,
        }),
        _ => None,
    }
}

fn write_cached(path: &Path, imp: &Improvement) -> Result<()> {
    // Shortest round-trip form, so resumed sweeps aggregate identical values.
    let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    let text = format!(
        "carbon,water,land\n{},{},{}\n",
        cell(imp.carbon),
        cell(imp.water),
        cell(imp.land)
    );
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Mean and population standard deviation over the defined values.
fn mean_std(values: impl Iterator<Item = f64>) -> (Option<f64>, Option<f64>) {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return (None, None);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.sqrt()))
}

/// Aggregates per-seed results of one cell.
pub fn summarize(key: CellKey, results: &[Result<Improvement>]) -> SweepRow {
    let ok: Vec<&Improvement> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let failed = results.len() - ok.len();
    let mut mean = [None; 3];
    let mut std = [None; 3];
    for f in Factor::ALL {
        let (m, s) = mean_std(ok.iter().filter_map(|i| i.get(f)));
        mean[f as usize] = m;
        std[f as usize] = s;
    }
    let status = results
        .iter()
        .find_map(|r| r.as_ref().err())
        .map_or_else(|| "ok".to_string(), |e| format!("error: {e}"));
    SweepRow {
        key,
        seeds: ok.len(),
        mean,
        std,
        failed,
        status,
    }
}

/// Runs every cell of `plan` for every seed. With `cache_dir`, each
/// (cell, seed) result is stored there and reused on later runs. Failures
/// are recorded in the row status and do not stop the sweep.
pub fn run_sweep(
    bundle: &ScenarioBundle,
    plan: &SweepPlan,
    cache_dir: Option<&Path>,
) -> Result<Vec<SweepRow>> {
    let cells = plan.cells()?;
    if let Some(dir) = cache_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tasks: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| plan.seeds.iter().map(move |&s| (c, s)))
        .collect();

    let results: Vec<Result<Improvement>> = tasks
        .par_iter()
        .map(|&(c, seed)| {
            let key = &cells[c];
            let cached = cache_dir.map(|d| cache_path(d, key, seed));
            if let Some(imp) = cached.as_deref().and_then(read_cached) {
                info!("cached {}", key.file_stem(seed));
                return Ok(imp);
            }
            let result = run_cell(bundle, key, seed);
            match (&result, cached) {
                (Ok(imp), Some(path)) => write_cached(&path, imp)?,
                (Err(e), _) => warn!("{} failed: {e}", key.file_stem(seed)),
                _ => {}
            }
            result
        })
        .collect();

    let per_cell = plan.seeds.len();
    Ok(cells
        .into_iter()
        .zip(results.chunks(per_cell))
        .map(|(key, chunk)| summarize(key, chunk))
        .collect())
}
