//! Per-step profile vectors for every region over the simulated horizon,
//! together with their min-max normalization.

use chrono::{DateTime, Duration, Utc};

use crate::error::{Error, Result};
use crate::factor::{Factor, FactorVec};
use crate::grid::{mix_intensities, IntensityCoefficients, MixSeries};
use crate::region::{profile_from_intensities, ProfileVector, Region};

/// Minutes per simulation step.
pub const STEP_MINUTES: usize = 1;
pub const STEPS_PER_HOUR: usize = 60 / STEP_MINUTES;

/// Simulated period, a whole number of hours from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizon {
    pub start: DateTime<Utc>,
    pub hours: usize,
}

impl Horizon {
    pub fn new(start: DateTime<Utc>, hours: usize) -> Self {
        Horizon { start, hours }
    }

    pub fn steps(&self) -> usize {
        self.hours * STEPS_PER_HOUR
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.start + Duration::hours(self.hours as i64)
    }
}

/// Per-factor min/max used by the normalization operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: FactorVec,
    pub max: FactorVec,
}

impl Bounds {
    pub fn of<'a>(values: impl IntoIterator<Item = &'a FactorVec>) -> Option<Bounds> {
        let mut it = values.into_iter();
        let first = *it.next()?;
        let mut b = Bounds {
            min: first,
            max: first,
        };
        for v in it {
            for f in Factor::ALL {
                *b.min.get_mut(f) = b.min.get(f).min(v.get(f));
                *b.max.get_mut(f) = b.max.get(f).max(v.get(f));
            }
        }
        Some(b)
    }

    /// `(x − min) / (max − min)` per factor; a constant factor maps to 0.
    pub fn normalize(&self, x: FactorVec) -> FactorVec {
        x.map(|f, v| {
            let (lo, hi) = (self.min.get(f), self.max.get(f));
            if hi > lo {
                (v - lo) / (hi - lo)
            } else {
                0.0
            }
        })
    }
}

/// Bounds for the regional profiles (over all regions and steps) and for the
/// cross-region average profile (over steps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationBounds {
    pub regional: Bounds,
    pub global: Bounds,
}

/// Hourly profiles per region. Values are piecewise constant over the minute
/// steps of each hour.
#[derive(Debug, Clone)]
pub struct ProfileSeries {
    horizon: Horizon,
    regions: usize,
    raw: Vec<ProfileVector>,
    normalized: Vec<FactorVec>,
    global_raw: Vec<ProfileVector>,
    global_normalized: Vec<FactorVec>,
    bounds: NormalizationBounds,
}

/// Builds the profile series of `regions` from the mixes of their grids.
/// Normalization bounds are taken from this series itself.
pub fn build_profile_series(
    regions: &[Region],
    mixes: &[MixSeries],
    coeffs: &IntensityCoefficients,
    horizon: Horizon,
) -> Result<ProfileSeries> {
    let raw = raw_profiles(regions, mixes, coeffs, horizon)?;
    ProfileSeries::from_raw(horizon, raw, None)
}

/// Hourly raw profiles, one vector per region.
pub fn raw_profiles(
    regions: &[Region],
    mixes: &[MixSeries],
    coeffs: &IntensityCoefficients,
    horizon: Horizon,
) -> Result<Vec<Vec<ProfileVector>>> {
    regions
        .iter()
        .map(|region| {
            let series = mixes
                .iter()
                .find(|m| m.grid == region.grid)
                .ok_or_else(|| {
                    Error::MissingData(format!("no mix series for grid {}", region.grid))
                })?
                .window(horizon.start, horizon.hours)?;
            Ok(series
                .rows
                .iter()
                .map(|row| profile_from_intensities(region, mix_intensities(row, coeffs)))
                .collect())
        })
        .collect()
}

impl ProfileSeries {
    /// Builds a series from hourly raw profiles. With `bounds = None` the
    /// bounds are computed from `raw`; otherwise the given (frozen) bounds
    /// are applied, so normalized values may fall outside [0, 1].
    pub fn from_raw(
        horizon: Horizon,
        raw: Vec<Vec<ProfileVector>>,
        bounds: Option<NormalizationBounds>,
    ) -> Result<Self> {
        let regions = raw.len();
        if regions == 0 || horizon.hours == 0 {
            return Err(Error::Config(
                "profile series needs at least one region and one hour".into(),
            ));
        }
        if raw.iter().any(|r| r.len() != horizon.hours) {
            return Err(Error::Config(
                "every region needs one profile per hour".into(),
            ));
        }
        if raw.iter().flatten().any(|v| {
            Factor::ALL
                .iter()
                .any(|&f| !(v.get(f) >= 0.0 && v.get(f).is_finite()))
        }) {
            return Err(Error::Config(
                "profile components must be finite and nonnegative".into(),
            ));
        }

        let flat: Vec<ProfileVector> = raw.into_iter().flatten().collect();
        let global_raw: Vec<ProfileVector> = (0..horizon.hours)
            .map(|h| {
                let sum =
                    (0..regions).fold(FactorVec::ZERO, |acc, d| acc + flat[d * horizon.hours + h]);
                sum * (1.0 / regions as f64)
            })
            .collect();

        let bounds = bounds.unwrap_or_else(|| NormalizationBounds {
            regional: Bounds::of(&flat).expect("nonempty"),
            global: Bounds::of(&global_raw).expect("nonempty"),
        });
        let normalized = flat.iter().map(|v| bounds.regional.normalize(*v)).collect();
        let global_normalized = global_raw
            .iter()
            .map(|v| bounds.global.normalize(*v))
            .collect();

        Ok(ProfileSeries {
            horizon,
            regions,
            raw: flat,
            normalized,
            global_raw,
            global_normalized,
            bounds,
        })
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.horizon.steps()
    }

    pub fn region_count(&self) -> usize {
        self.regions
    }

    pub fn bounds(&self) -> NormalizationBounds {
        self.bounds
    }

    fn slot(&self, region: usize, step: usize) -> usize {
        debug_assert!(region < self.regions && step < self.steps());
        region * self.horizon.hours + step / STEPS_PER_HOUR
    }

    pub fn raw_at(&self, region: usize, step: usize) -> ProfileVector {
        self.raw[self.slot(region, step)]
    }

    pub fn normalized_at(&self, region: usize, step: usize) -> FactorVec {
        self.normalized[self.slot(region, step)]
    }

    pub fn global_raw_at(&self, step: usize) -> ProfileVector {
        self.global_raw[step / STEPS_PER_HOUR]
    }

    pub fn global_normalized_at(&self, step: usize) -> FactorVec {
        self.global_normalized[step / STEPS_PER_HOUR]
    }

    /// ∫ normalized profile dτ over `[from, to)` minutes, in profile·hours.
    pub fn integrate_normalized(&self, region: usize, from: f64, to: f64) -> FactorVec {
        self.integrate(&self.normalized, region, from, to)
    }

    /// ∫ raw profile dτ over `[from, to)` minutes, in (unit/kWh)·hours.
    pub fn integrate_raw(&self, region: usize, from: f64, to: f64) -> FactorVec {
        self.integrate(&self.raw, region, from, to)
    }

    fn integrate(&self, values: &[FactorVec], region: usize, from: f64, to: f64) -> FactorVec {
        debug_assert!(from >= 0.0 && to <= (self.steps() * STEP_MINUTES) as f64);
        let hour_len = 60.0;
        let row = &values[region * self.horizon.hours..(region + 1) * self.horizon.hours];
        let mut acc = FactorVec::ZERO;
        if to <= from {
            return acc;
        }
        let mut h = (from / hour_len) as usize;
        while h < row.len() && (h as f64) * hour_len < to {
            let lo = from.max(h as f64 * hour_len);
            let hi = to.min((h + 1) as f64 * hour_len);
            if hi > lo {
                acc += row[h] * ((hi - lo) / 60.0);
            }
            h += 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn horizon(hours: usize) -> Horizon {
        Horizon::new(Utc.with_ymd_and_hms(2024, 1, 15, 0, 0, 0).unwrap(), hours)
    }

    fn carbon_only(values: &[&[f64]]) -> Vec<Vec<ProfileVector>> {
        values
            .iter()
            .map(|r| r.iter().map(|&c| FactorVec::new(c, 1.0, 2.0)).collect())
            .collect()
    }

    #[test]
    fn normalizes_over_regions_and_time() {
        let ps = ProfileSeries::from_raw(
            horizon(2),
            carbon_only(&[&[10.0, 20.0], &[30.0, 40.0]]),
            None,
        )
        .unwrap();
        let got: Vec<f64> = [(0, 0), (0, 60), (1, 0), (1, 60)]
            .iter()
            .map(|&(d, t)| ps.normalized_at(d, t).carbon)
            .collect();
        let expect = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-15);
        }
        // constant factors normalize to zero
        assert_eq!(ps.normalized_at(1, 60).water, 0.0);
        assert_eq!(ps.normalized_at(1, 60).land, 0.0);
    }

    #[test]
    fn global_profile_is_normalized_average() {
        let ps = ProfileSeries::from_raw(
            horizon(3),
            carbon_only(&[&[10.0, 20.0, 0.0], &[30.0, 40.0, 0.0]]),
            None,
        )
        .unwrap();
        assert_eq!(ps.global_raw_at(0).carbon, 20.0);
        assert_eq!(ps.global_raw_at(60).carbon, 30.0);
        assert_eq!(ps.global_normalized_at(0).carbon, 20.0 / 30.0);
        assert_eq!(ps.global_normalized_at(60).carbon, 1.0);
        assert_eq!(ps.global_normalized_at(179).carbon, 0.0);
    }

    #[test]
    fn hourly_values_hold_across_minutes() {
        let ps = ProfileSeries::from_raw(horizon(2), carbon_only(&[&[10.0, 20.0]]), None).unwrap();
        assert_eq!(ps.raw_at(0, 0), ps.raw_at(0, 59));
        assert_ne!(ps.raw_at(0, 59), ps.raw_at(0, 60));
    }

    #[test]
    fn integral_matches_minute_sum() {
        let ps =
            ProfileSeries::from_raw(horizon(3), carbon_only(&[&[10.0, 20.0, 40.0]]), None).unwrap();
        let (from, to) = (45usize, 150usize);
        let brute: f64 = (from..to).map(|s| ps.raw_at(0, s).carbon / 60.0).sum();
        let fast = ps.integrate_raw(0, from as f64, to as f64).carbon;
        assert!((brute - fast).abs() < 1e-12);
        assert_eq!(ps.integrate_raw(0, 30.0, 30.0), FactorVec::ZERO);
    }

    #[test]
    fn frozen_bounds_are_reused() {
        let a = ProfileSeries::from_raw(horizon(2), carbon_only(&[&[10.0, 20.0]]), None).unwrap();
        let b = ProfileSeries::from_raw(horizon(2), carbon_only(&[&[5.0, 25.0]]), Some(a.bounds()))
            .unwrap();
        assert_eq!(b.normalized_at(0, 0).carbon, -0.5);
        assert_eq!(b.normalized_at(0, 60).carbon, 1.5);
    }

    #[test]
    fn rejects_ragged_input() {
        assert!(ProfileSeries::from_raw(horizon(2), carbon_only(&[&[1.0]]), None).is_err());
        assert!(ProfileSeries::from_raw(horizon(1), vec![], None).is_err());
    }
}
