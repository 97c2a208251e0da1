//! The three impact factors and small vector arithmetic over them.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Carbon,
    Water,
    Land,
}

impl Factor {
    pub const ALL: [Factor; 3] = [Factor::Carbon, Factor::Water, Factor::Land];

    pub fn name(self) -> &'static str {
        match self {
            Factor::Carbon => "carbon",
            Factor::Water => "water",
            Factor::Land => "land",
        }
    }

    /// Physical unit of the accumulated footprint.
    pub fn unit(self) -> &'static str {
        match self {
            Factor::Carbon => "gCO2e",
            Factor::Water => "l",
            Factor::Land => "m2",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A (carbon, water, land) triple. Used both for per-kWh intensities and for
/// accumulated footprints; the unit depends on context.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FactorVec {
    pub carbon: f64,
    pub water: f64,
    pub land: f64,
}

impl FactorVec {
    pub const ZERO: FactorVec = FactorVec {
        carbon: 0.0,
        water: 0.0,
        land: 0.0,
    };

    pub const fn new(carbon: f64, water: f64, land: f64) -> Self {
        FactorVec {
            carbon,
            water,
            land,
        }
    }

    pub const fn splat(v: f64) -> Self {
        FactorVec::new(v, v, v)
    }

    pub fn get(&self, factor: Factor) -> f64 {
        match factor {
            Factor::Carbon => self.carbon,
            Factor::Water => self.water,
            Factor::Land => self.land,
        }
    }

    pub fn get_mut(&mut self, factor: Factor) -> &mut f64 {
        match factor {
            Factor::Carbon => &mut self.carbon,
            Factor::Water => &mut self.water,
            Factor::Land => &mut self.land,
        }
    }

    pub fn map(self, mut f: impl FnMut(Factor, f64) -> f64) -> Self {
        FactorVec::new(
            f(Factor::Carbon, self.carbon),
            f(Factor::Water, self.water),
            f(Factor::Land, self.land),
        )
    }

    pub fn dot(&self, weights: &Weights) -> f64 {
        self.carbon * weights.carbon + self.water * weights.water + self.land * weights.land
    }

    pub fn scale(self, k: f64) -> Self {
        self * k
    }
}

impl Add for FactorVec {
    type Output = FactorVec;
    fn add(self, rhs: FactorVec) -> FactorVec {
        FactorVec::new(
            self.carbon + rhs.carbon,
            self.water + rhs.water,
            self.land + rhs.land,
        )
    }
}

impl AddAssign for FactorVec {
    fn add_assign(&mut self, rhs: FactorVec) {
        *self = *self + rhs;
    }
}

impl Sub for FactorVec {
    type Output = FactorVec;
    fn sub(self, rhs: FactorVec) -> FactorVec {
        FactorVec::new(
            self.carbon - rhs.carbon,
            self.water - rhs.water,
            self.land - rhs.land,
        )
    }
}

impl Mul<f64> for FactorVec {
    type Output = FactorVec;
    fn mul(self, k: f64) -> FactorVec {
        FactorVec::new(self.carbon * k, self.water * k, self.land * k)
    }
}

/// Weight vector θ combining the three normalized factors into a scalar cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub carbon: f64,
    pub water: f64,
    pub land: f64,
}

impl Weights {
    pub const CARBON: Weights = Weights::raw(1.0, 0.0, 0.0);
    pub const WATER: Weights = Weights::raw(0.0, 1.0, 0.0);
    pub const LAND: Weights = Weights::raw(0.0, 0.0, 1.0);
    pub const BALANCED: Weights = Weights::raw(0.333, 0.333, 0.334);

    /// The four weightings used throughout the experiments.
    pub const PRESETS: [Weights; 4] = [
        Weights::CARBON,
        Weights::WATER,
        Weights::LAND,
        Weights::BALANCED,
    ];

    const fn raw(carbon: f64, water: f64, land: f64) -> Self {
        Weights {
            carbon,
            water,
            land,
        }
    }

    pub fn new(carbon: f64, water: f64, land: f64) -> Result<Self> {
        let w = Weights::raw(carbon, water, land);
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.carbon, self.water, self.land];
        if parts.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "components must be finite and nonnegative, got {self}"
            )));
        }
        if parts.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidWeights("all components are zero".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Weights::raw(self.carbon * k, self.water * k, self.land * k)
    }

    /// Label used in CSV reports, e.g. `0.333;0.333;0.334`.
    pub fn label(&self) -> String {
        format!("{};{};{}", self.carbon, self.water, self.land)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.carbon, self.water, self.land)
    }
}

impl FromStr for Weights {
    type Err = Error;

    /// Accepts `a,b,c` (or `;`-separated).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([',', ';']).map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidWeights(format!(
                "expected three comma-separated weights, got {s:?}"
            )));
        }
        let mut vals = [0.0; 3];
        for (slot, part) in vals.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::InvalidWeights(format!("not a number: {part:?}")))?;
        }
        Weights::new(vals[0], vals[1], vals[2])
    }
}
