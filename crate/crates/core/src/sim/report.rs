use std::io::Write;
use std::path::{Path, PathBuf};

use super::sweep::{summarize, CellKey, SweepRow};
use super::{FootprintLedger, RunReport};
use crate::error::{Error, Result};
use crate::factor::{Factor, FactorVec};
use crate::region::Region;
use crate::scheduler::ScheduleDecision;

pub const LEDGER_CSV_HEADER: [&str; 7] = [
    "scheduler",
    "theta",
    "factor",
    "region",
    "actual_value",
    "migration_value",
    "requests",
];

pub const DECISIONS_CSV_HEADER: [&str; 5] =
    ["job", "region", "start", "migrated", "predicted_cost"];

pub const SWEEP_CSV_HEADER: [&str; 14] = [
    "season",
    "mae",
    "theta",
    "dt_hours",
    "scheduler",
    "seeds",
    "carbon_mean",
    "carbon_std",
    "water_mean",
    "water_std",
    "land_mean",
    "land_std",
    "failed_seeds",
    "status",
];

/// Fixed six-digit decimal used in every report.
pub fn format_value(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn flush<W: Write>(wtr: &mut csv::Writer<W>) -> Result<()> {
    wtr.flush().map_err(|e| Error::io("<report>", e))
}

/// One row per (factor, region) plus an `ALL` row per factor.
pub fn write_ledger_csv<W: Write>(writer: W, ledgers: &[&FootprintLedger]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(LEDGER_CSV_HEADER)?;
    for ledger in ledgers {
        let theta = ledger.weights.label();
        for factor in Factor::ALL {
            let rows = ledger
                .region_ids
                .iter()
                .zip(&ledger.tallies)
                .map(|(id, t)| (id.as_str(), t.actual, t.migration, t.requests))
                .chain(std::iter::once((
                    "ALL",
                    ledger.total(),
                    ledger.migration_total(),
                    ledger.requests(),
                )));
            for (region, actual, migration, requests) in rows {
                wtr.write_record([
                    ledger.scheduler.code(),
                    &theta,
                    factor.name(),
                    region,
                    &format_value(actual.get(factor)),
                    &format_value(migration.get(factor)),
                    &requests.to_string(),
                ])?;
            }
        }
    }
    flush(&mut wtr)
}

pub fn write_decisions_csv<W: Write>(
    writer: W,
    decisions: &[ScheduleDecision],
    regions: &[Region],
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(DECISIONS_CSV_HEADER)?;
    for d in decisions {
        wtr.write_record([
            d.job_id.as_str(),
            &regions[d.region].id,
            &d.start.to_string(),
            if d.migrated { "true" } else { "false" },
            &format_value(d.cost.cost),
        ])?;
    }
    flush(&mut wtr)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), format_value)
}

pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        let mut record = vec![
            row.key.season.name().to_string(),
            format_value(row.key.mae),
            row.key.weights.label(),
            row.key
                .delay_tolerance_hours
                .map_or_else(|| "-".to_string(), format_value),
            row.key.scheduler.code().to_string(),
            row.seeds.to_string(),
        ];
        for f in Factor::ALL {
            record.push(opt(row.mean[f as usize]));
            record.push(opt(row.std[f as usize]));
        }
        record.push(row.failed.to_string());
        record.push(row.status.clone());
        wtr.write_record(&record)?;
    }
    flush(&mut wtr)
}

/// Writes `ledger.csv` (candidate, then baseline), `decisions.csv` and a
/// one-row `sweep.csv` into `dir` and returns their paths.
pub fn write_run_outputs(
    dir: &Path,
    report: &RunReport,
    regions: &[Region],
    key: CellKey,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .map(|f| (std::io::BufWriter::new(f), path.clone()))
            .map_err(|e| Error::io(path, e))
    };
    let mut written = Vec::new();

    let (w, path) = create("ledger.csv")?;
    let ledgers: Vec<&FootprintLedger> = if key.scheduler == crate::scheduler::SchedulerKind::Local
    {
        vec![&report.candidate.ledger]
    } else {
        vec![&report.candidate.ledger, &report.baseline.ledger]
    };
    write_ledger_csv(w, &ledgers)?;
    written.push(path);

    let (w, path) = create("decisions.csv")?;
    write_decisions_csv(w, &report.candidate.decisions, regions)?;
    written.push(path);

    let (w, path) = create("sweep.csv")?;
    write_sweep_csv(w, &[summarize(key, &[Ok(report.improvement)])])?;
    written.push(path);
    Ok(written)
}

/// Percentage reduction of each factor relative to a baseline; `None` where
/// the baseline is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Improvement {
    pub carbon: Option<f64>,
    pub water: Option<f64>,
    pub land: Option<f64>,
}

impl Improvement {
    pub fn get(&self, factor: Factor) -> Option<f64> {
        match factor {
            Factor::Carbon => self.carbon,
            Factor::Water => self.water,
            Factor::Land => self.land,
        }
    }
}

pub fn improvement(baseline: &FootprintLedger, candidate: &FootprintLedger) -> Improvement {
    improvement_of(baseline.total(), candidate.total())
}

pub(crate) fn improvement_of(base: FactorVec, cand: FactorVec) -> Improvement {
    let pct = |f: Factor| {
        let b = base.get(f);
        (b != 0.0).then(|| 100.0 * (b - cand.get(f)) / b)
    };
    Improvement {
        carbon: pct(Factor::Carbon),
        water: pct(Factor::Water),
        land: pct(Factor::Land),
    }
}
