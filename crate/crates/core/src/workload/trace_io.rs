use std::io::{Read, Write};

use super::{JobRequest, RegionSet, VmCatalog};
use crate::error::{Error, Result};
use crate::region::Region;

pub const TRACE_CSV_HEADER: [&str; 10] = [
    "id",
    "origin",
    "regions_with_data",
    "size_gb",
    "nodes",
    "vm",
    "utilization",
    "runtime_min",
    "arrival_min",
    "deadline_min",
];

/// Writes jobs in the trace CSV layout; `regions_with_data` is a
/// `;`-separated list of region ids.
pub fn write_trace_csv<W: Write>(writer: W, jobs: &[JobRequest], regions: &[Region]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(TRACE_CSV_HEADER)?;
    for j in jobs {
        let data: Vec<&str> = j
            .data_regions
            .iter()
            .map(|r| regions[r].id.as_str())
            .collect();
        wtr.write_record([
            j.id.clone(),
            regions[j.origin].id.clone(),
            data.join(";"),
            j.size_gb.to_string(),
            j.nodes.to_string(),
            j.vm.name.clone(),
            j.utilization.to_string(),
            j.runtime_min.to_string(),
            j.arrival.to_string(),
            j.deadline.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<trace csv>", e))?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(
    reader: R,
    regions: &[Region],
    catalog: &VmCatalog,
) -> Result<Vec<JobRequest>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers != TRACE_CSV_HEADER {
        return Err(Error::parse(
            "trace",
            format!("expected header {}", TRACE_CSV_HEADER.join(",")),
        ));
    }
    let region_index = |id: &str| {
        regions
            .iter()
            .position(|r| r.id == id)
            .ok_or_else(|| Error::UnknownRegion(id.to_string()))
    };

    let mut jobs = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let ctx = format!("trace row {}", i + 2);
        let field = |c: usize| &record[c];
        macro_rules! num {
            ($c:expr) => {
                field($c).parse().map_err(|_| {
                    Error::parse(
                        &ctx,
                        format!("bad {} {:?}", TRACE_CSV_HEADER[$c], field($c)),
                    )
                })?
            };
        }
        let origin = region_index(field(1))?;
        let mut data: RegionSet = field(2)
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(region_index)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();
        if data.is_empty() {
            data.insert(origin);
        }
        jobs.push(JobRequest {
            id: field(0).to_string(),
            origin,
            data_regions: data,
            size_gb: num!(3),
            nodes: num!(4),
            vm: catalog.get(field(5))?.clone(),
            utilization: num!(6),
            runtime_min: num!(7),
            arrival: num!(8),
            deadline: num!(9),
        });
    }
    Ok(jobs)
}
