//! Electricity grid mixes and the intensity factors derived from them.

mod harmonize;
mod io;
mod noise;
pub mod synthetic;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Duration, Utc};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::factor::{Factor, FactorVec};

pub use harmonize::harmonize;
pub use io::{
    format_timestamp, parse_timestamp, read_mix_csv, read_mix_file, write_mix_csv, MIX_CSV_HEADER,
};
pub use noise::{apply_noise, NoiseSpec};

/// Tolerance on the sum of a mix row.
pub const SHARE_SUM_TOLERANCE: f64 = 1e-9;

/// m²/kWh per ha/TWh.
pub const HA_PER_TWH_TO_M2_PER_KWH: f64 = 1e4 / 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EnergySource {
    Solar,
    Wind,
    Hydro,
    Geothermal,
    Biomass,
    Nuclear,
    Coal,
    Gas,
    Oil,
    Unknown,
}

impl EnergySource {
    pub const COUNT: usize = 10;

    /// Column order of mix CSV files.
    pub const ALL: [EnergySource; 10] = [
        EnergySource::Solar,
        EnergySource::Wind,
        EnergySource::Hydro,
        EnergySource::Geothermal,
        EnergySource::Biomass,
        EnergySource::Nuclear,
        EnergySource::Coal,
        EnergySource::Gas,
        EnergySource::Oil,
        EnergySource::Unknown,
    ];

    pub const RENEWABLE: [EnergySource; 5] = [
        EnergySource::Solar,
        EnergySource::Wind,
        EnergySource::Hydro,
        EnergySource::Geothermal,
        EnergySource::Biomass,
    ];

    pub const NON_RENEWABLE: [EnergySource; 5] = [
        EnergySource::Nuclear,
        EnergySource::Coal,
        EnergySource::Gas,
        EnergySource::Oil,
        EnergySource::Unknown,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_renewable(self) -> bool {
        self.index() < 5
    }

    pub fn name(self) -> &'static str {
        match self {
            EnergySource::Solar => "solar",
            EnergySource::Wind => "wind",
            EnergySource::Hydro => "hydro",
            EnergySource::Geothermal => "geothermal",
            EnergySource::Biomass => "biomass",
            EnergySource::Nuclear => "nuclear",
            EnergySource::Coal => "coal",
            EnergySource::Gas => "gas",
            EnergySource::Oil => "oil",
            EnergySource::Unknown => "unknown",
        }
    }
}

impl fmt::Display for EnergySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnergySource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        EnergySource::ALL
            .into_iter()
            .find(|src| src.name() == lower)
            .ok_or_else(|| Error::parse("energy source", format!("unknown source {s:?}")))
    }
}

/// Shares of each source in the generation mix for one time slot.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Mix(pub [f64; EnergySource::COUNT]);

impl Mix {
    pub fn from_pairs(pairs: &[(EnergySource, f64)]) -> Self {
        let mut mix = Mix::default();
        for &(src, share) in pairs {
            mix[src] += share;
        }
        mix
    }

    pub fn only(source: EnergySource) -> Self {
        Mix::from_pairs(&[(source, 1.0)])
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn renewable_share(&self) -> f64 {
        EnergySource::RENEWABLE.iter().map(|&s| self[s]).sum()
    }

    /// Scales the row so its shares sum to one. Returns `None` for an all-zero row.
    pub fn normalized(&self) -> Option<Mix> {
        let total = self.total();
        if total <= 0.0 {
            return None;
        }
        let mut out = *self;
        out.0.iter_mut().for_each(|v| *v /= total);
        Some(out)
    }

    pub fn is_distribution(&self) -> bool {
        self.0.iter().all(|v| (0.0..=1.0).contains(v))
            && (self.total() - 1.0).abs() <= SHARE_SUM_TOLERANCE
    }
}

impl Index<EnergySource> for Mix {
    type Output = f64;
    fn index(&self, src: EnergySource) -> &f64 {
        &self.0[src.index()]
    }
}

impl IndexMut<EnergySource> for Mix {
    fn index_mut(&mut self, src: EnergySource) -> &mut f64 {
        &mut self.0[src.index()]
    }
}

/// Per-source carbon (gCO2e/kWh), water (l/kWh) and land (m²/kWh) intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityCoefficients {
    per_source: [FactorVec; EnergySource::COUNT],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientEntry {
    ci: f64,
    ewif: f64,
    elif_ha_per_twh: f64,
}

const DEFAULT_COEFFICIENTS: &str = include_str!("../../data/coefficients.toml");

impl IntensityCoefficients {
    /// The bundled coefficient table.
    pub fn standard() -> Self {
        Self::from_toml_str(DEFAULT_COEFFICIENTS).expect("bundled coefficient table is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let entries: BTreeMap<String, CoefficientEntry> =
            toml::from_str(text).map_err(|e| Error::parse("coefficients", e))?;
        let mut per_source = [None; EnergySource::COUNT];
        for (name, entry) in entries {
            let src: EnergySource = name.parse()?;
            let values = [entry.ci, entry.ewif, entry.elif_ha_per_twh];
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::parse(
                    "coefficients",
                    format!("{name}: coefficients must be finite and nonnegative"),
                ));
            }
            per_source[src.index()] = Some(FactorVec::new(
                entry.ci,
                entry.ewif,
                entry.elif_ha_per_twh * HA_PER_TWH_TO_M2_PER_KWH,
            ));
        }
        let mut out = [FactorVec::ZERO; EnergySource::COUNT];
        for src in EnergySource::ALL {
            out[src.index()] = per_source[src.index()]
                .ok_or_else(|| Error::parse("coefficients", format!("missing source {src}")))?;
        }
        Ok(IntensityCoefficients { per_source: out })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn get(&self, source: EnergySource) -> FactorVec {
        self.per_source[source.index()]
    }

    pub fn coefficient(&self, source: EnergySource, factor: Factor) -> f64 {
        self.get(source).get(factor)
    }
}

/// Mix-weighted intensity of one factor: Σ_s share_s · coeff_s.
pub fn mix_intensity(mix: &Mix, coeffs: &IntensityCoefficients, factor: Factor) -> f64 {
    EnergySource::ALL
        .iter()
        .map(|&s| mix[s] * coeffs.coefficient(s, factor))
        .sum()
}

/// All three mix-weighted intensities at once (CI, EWIF, ELIF).
pub fn mix_intensities(mix: &Mix, coeffs: &IntensityCoefficients) -> FactorVec {
    EnergySource::ALL
        .iter()
        .fold(FactorVec::ZERO, |acc, &s| acc + coeffs.get(s) * mix[s])
}

/// Hourly generation mix of one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MixSeries {
    pub grid: String,
    pub start: DateTime<Utc>,
    pub rows: Vec<Mix>,
}

impl MixSeries {
    pub fn new(grid: impl Into<String>, start: DateTime<Utc>, rows: Vec<Mix>) -> Result<Self> {
        let series = MixSeries {
            grid: grid.into(),
            start,
            rows,
        };
        for (h, row) in series.rows.iter().enumerate() {
            if !row.is_distribution() {
                return Err(Error::parse(
                    format!("mix series {}", series.grid),
                    format!(
                        "row at {} is not a distribution (sum {})",
                        series.hour_start(h),
                        row.total()
                    ),
                ));
            }
        }
        Ok(series)
    }

    pub fn hours(&self) -> usize {
        self.rows.len()
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.hour_start(self.rows.len())
    }

    pub fn hour_start(&self, hour: usize) -> DateTime<Utc> {
        self.start + Duration::hours(hour as i64)
    }

    /// Restricts the series to `hours` hours beginning at `start`.
    pub fn window(&self, start: DateTime<Utc>, hours: usize) -> Result<MixSeries> {
        let offset = (start - self.start).num_minutes();
        if offset < 0 || offset % 60 != 0 || offset as usize / 60 + hours > self.rows.len() {
            return Err(Error::CoverageGap {
                grid: self.grid.clone(),
                from: format_timestamp(start),
                to: format_timestamp(start + Duration::hours(hours as i64)),
            });
        }
        let first = offset as usize / 60;
        Ok(MixSeries {
            grid: self.grid.clone(),
            start,
            rows: self.rows[first..first + hours].to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EnergySource::*;

    #[test]
    fn ten_sources_five_renewable() {
        assert_eq!(EnergySource::ALL.len(), 10);
        let renewable: Vec<_> = EnergySource::ALL
            .iter()
            .filter(|s| s.is_renewable())
            .collect();
        assert_eq!(renewable, [&Solar, &Wind, &Hydro, &Geothermal, &Biomass]);
        assert!(!Unknown.is_renewable());
    }

    #[test]
    fn standard_table_values() {
        let c = IntensityCoefficients::standard();
        assert_eq!(c.coefficient(Nuclear, Factor::Carbon), 12.0);
        assert_eq!(c.coefficient(Wind, Factor::Water), 0.0);
        assert_eq!(c.coefficient(Oil, Factor::Water), 3.776);
        assert_eq!(c.coefficient(Unknown, Factor::Carbon), 293.24);
        assert!((c.coefficient(Unknown, Factor::Land) - 4532.0e-5).abs() < 1e-15);
        assert!((c.coefficient(Hydro, Factor::Land) - 650.0e-5).abs() < 1e-15);
    }

    #[test]
    fn missing_source_is_rejected() {
        let text = "[solar]\nci = 1.0\newif = 1.0\nelif_ha_per_twh = 1.0\n";
        assert!(IntensityCoefficients::from_toml_str(text).is_err());
    }

    #[test]
    fn intensity_goldens() {
        let c = IntensityCoefficients::standard();
        assert_eq!(mix_intensity(&Mix::only(Nuclear), &c, Factor::Carbon), 12.0);
        assert_eq!(mix_intensity(&Mix::only(Wind), &c, Factor::Water), 0.0);
        let half = Mix::from_pairs(&[(Wind, 0.5), (Gas, 0.5)]);
        assert!((mix_intensity(&half, &c, Factor::Carbon) - 250.75).abs() < 1e-12);
    }

    #[test]
    fn combined_intensities_match_single_factor() {
        let c = IntensityCoefficients::standard();
        let mix = Mix::from_pairs(&[(Solar, 0.2), (Coal, 0.3), (Hydro, 0.5)]);
        let all = mix_intensities(&mix, &c);
        for f in Factor::ALL {
            assert!((all.get(f) - mix_intensity(&mix, &c, f)).abs() < 1e-12);
        }
    }
}
