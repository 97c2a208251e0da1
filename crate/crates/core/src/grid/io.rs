use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};

use super::{EnergySource, Mix, MixSeries};
use crate::error::{Error, Result};

pub const MIX_CSV_HEADER: [&str; 11] = [
    "timestamp_utc",
    "solar",
    "wind",
    "hydro",
    "geothermal",
    "biomass",
    "nuclear",
    "coal",
    "gas",
    "oil",
    "unknown",
];

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Parses an ISO-8601 timestamp. Offsets are honoured; naive timestamps are
/// taken as UTC.
pub fn parse_timestamp(text: &str) -> Result<DateTime<Utc>> {
    let text = text.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(text) {
        return Ok(ts.with_timezone(&Utc));
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(text, fmt) {
            return Ok(naive.and_utc());
        }
    }
    Err(Error::parse("timestamp", format!("not ISO-8601: {text:?}")))
}

/// Reads raw mix rows (any granularity) from a grid-mix CSV.
pub fn read_mix_csv<R: Read>(reader: R, context: &str) -> Result<Vec<(DateTime<Utc>, Mix)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names.first().map(String::as_str) != Some("timestamp_utc") {
        return Err(Error::parse(context, "first column must be timestamp_utc"));
    }
    let mut columns = Vec::with_capacity(EnergySource::COUNT);
    for src in EnergySource::ALL {
        let col = names
            .iter()
            .position(|n| n == src.name())
            .ok_or_else(|| Error::parse(context, format!("missing column {src}")))?;
        columns.push((src, col));
    }

    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let ts = parse_timestamp(&record[0])
            .map_err(|e| Error::parse(format!("{context} row {}", line + 2), e))?;
        let mut mix = Mix::default();
        for &(src, col) in &columns {
            let cell = record.get(col).unwrap_or("");
            mix[src] = if cell.is_empty() {
                0.0
            } else {
                cell.parse().map_err(|_| {
                    Error::parse(
                        format!("{context} row {}", line + 2),
                        format!("bad share {cell:?}"),
                    )
                })?
            };
        }
        rows.push((ts, mix));
    }
    Ok(rows)
}

pub fn read_mix_file(path: &Path) -> Result<Vec<(DateTime<Utc>, Mix)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_mix_csv(file, &path.display().to_string())
}

pub fn write_mix_csv<W: Write>(writer: W, series: &MixSeries) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(MIX_CSV_HEADER)?;
    for (h, row) in series.rows.iter().enumerate() {
        let mut record = vec![format_timestamp(series.hour_start(h))];
        record.extend(row.0.iter().map(|v| format!("{v:.6}")));
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| Error::io("<mix csv>", e))?;
    Ok(())
}
