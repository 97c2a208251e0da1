//! Data-center regions and their sustainability profile.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::factor::FactorVec;
use crate::grid::{mix_intensities, IntensityCoefficients, Mix};
use crate::workload::Provider;

/// 100 MW of IT draw over a year, in kWh.
pub const DEFAULT_ANNUAL_IT_ENERGY_KWH: f64 = 8760.0 * 100.0 * 1e3;

/// Carbon (gCO2e/kWh), water (l/kWh) and land (m²/kWh) intensity of running
/// one kWh of IT load in a region.
pub type ProfileVector = FactorVec;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub id: String,
    /// Grid operator whose mix powers the region.
    pub grid: String,
    pub pue: f64,
    /// On-site water usage, l/kWh.
    pub wue: f64,
    pub land_area_m2: f64,
    #[serde(default = "default_it_energy")]
    pub annual_it_energy_kwh: f64,
}

fn default_it_energy() -> f64 {
    DEFAULT_ANNUAL_IT_ENERGY_KWH
}

impl Region {
    pub fn new(
        id: impl Into<String>,
        grid: impl Into<String>,
        pue: f64,
        wue: f64,
        land_area_m2: f64,
    ) -> Result<Self> {
        let region = Region {
            id: id.into(),
            grid: grid.into(),
            pue,
            wue,
            land_area_m2,
            annual_it_energy_kwh: DEFAULT_ANNUAL_IT_ENERGY_KWH,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidRegion {
                id: self.id.clone(),
                reason: reason.to_string(),
            })
        };
        if self.id.is_empty() {
            return fail("empty id");
        }
        if !(self.pue >= 1.0 && self.pue.is_finite()) {
            return fail("PUE must be at least 1");
        }
        if !(self.wue >= 0.0 && self.wue.is_finite()) {
            return fail("WUE must be nonnegative");
        }
        if !(self.land_area_m2 > 0.0 && self.land_area_m2.is_finite()) {
            return fail("land area must be positive");
        }
        if !(self.annual_it_energy_kwh > 0.0 && self.annual_it_energy_kwh.is_finite()) {
            return fail("annual IT energy must be positive");
        }
        Ok(())
    }

    /// Land usage effectiveness: land area per kWh of annual IT energy.
    pub fn lue(&self) -> f64 {
        self.land_area_m2 / self.annual_it_energy_kwh
    }
}

/// Sustainability profile of `region` under the given grid mix.
pub fn profile(region: &Region, mix: &Mix, coeffs: &IntensityCoefficients) -> ProfileVector {
    profile_from_intensities(region, mix_intensities(mix, coeffs))
}

/// Profile from already mix-weighted grid intensities (CI, EWIF, ELIF).
pub fn profile_from_intensities(region: &Region, grid: FactorVec) -> ProfileVector {
    FactorVec::new(
        grid.carbon * region.pue,
        region.wue + grid.water * region.pue,
        region.lue() + grid.land * region.pue,
    )
}

/// A provider's region list as stored in a regions file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsConfig {
    pub provider: Provider,
    pub regions: Vec<Region>,
}

const AZURE_REGIONS: &str = include_str!("../data/regions/azure.toml");
const AWS_REGIONS: &str = include_str!("../data/regions/aws.toml");

impl RegionsConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RegionsConfig = toml::from_str(text).map_err(|e| Error::parse("regions", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::Config("no regions configured".into()));
        }
        if self.regions.len() > 64 {
            return Err(Error::Config("at most 64 regions are supported".into()));
        }
        for (i, r) in self.regions.iter().enumerate() {
            r.validate()?;
            if self.regions[..i].iter().any(|o| o.id == r.id) {
                return Err(Error::InvalidRegion {
                    id: r.id.clone(),
                    reason: "duplicate id".into(),
                });
            }
        }
        Ok(())
    }

    /// Regions of the FaaS scenario.
    pub fn azure() -> Self {
        Self::from_toml_str(AZURE_REGIONS).expect("bundled Azure regions are valid")
    }

    /// Regions of the big-data scenario.
    pub fn aws() -> Self {
        Self::from_toml_str(AWS_REGIONS).expect("bundled AWS regions are valid")
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.id == id)
    }
}
