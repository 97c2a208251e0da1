use chrono::{DateTime, Duration, Utc};

use super::{format_timestamp, EnergySource, Mix, MixSeries};
use crate::error::{Error, Result};

/// Reshapes timestamped mix rows of arbitrary granularity into an hourly
/// series covering `hours` hours from `start`.
///
/// Rows falling in the same hour are averaged share-wise and each hourly row
/// is rescaled to sum to one. Rows outside the horizon are ignored; an hour
/// without any row is reported as a coverage gap.
pub fn harmonize(
    grid: &str,
    rows: &[(DateTime<Utc>, Mix)],
    start: DateTime<Utc>,
    hours: usize,
) -> Result<MixSeries> {
    let mut sums = vec![Mix::default(); hours];
    let mut counts = vec![0usize; hours];

    for (ts, mix) in rows {
        for src in EnergySource::ALL {
            let v = mix[src];
            if v < 0.0 || !v.is_finite() {
                return Err(Error::NegativeShare {
                    grid: grid.to_string(),
                    source_name: src.name().to_string(),
                    value: v,
                    at: format_timestamp(*ts),
                });
            }
        }
        let offset = (*ts - start).num_seconds();
        if offset < 0 {
            continue;
        }
        let hour = (offset / 3600) as usize;
        if hour >= hours {
            continue;
        }
        for (acc, v) in sums[hour].0.iter_mut().zip(mix.0) {
            *acc += v;
        }
        counts[hour] += 1;
    }

    if let Some(first_empty) = counts.iter().position(|&c| c == 0) {
        let last_empty = counts[first_empty..]
            .iter()
            .position(|&c| c > 0)
            .map_or(hours, |p| first_empty + p);
        return Err(Error::CoverageGap {
            grid: grid.to_string(),
            from: format_timestamp(start + Duration::hours(first_empty as i64)),
            to: format_timestamp(start + Duration::hours(last_empty as i64)),
        });
    }

    let mut hourly = Vec::with_capacity(hours);
    for (h, (sum, count)) in sums.into_iter().zip(counts).enumerate() {
        let mut mean = sum;
        if count > 1 {
            mean.0.iter_mut().for_each(|v| *v /= count as f64);
        }
        let row = if mean.total() == 1.0 {
            mean
        } else {
            mean.normalized().ok_or_else(|| Error::EmptyMix {
                grid: grid.to_string(),
                at: format_timestamp(start + Duration::hours(h as i64)),
            })?
        };
        hourly.push(row);
    }

    MixSeries::new(grid, start, hourly)
}
