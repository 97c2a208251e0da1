//! Synthetic hourly grid mixes with a diurnal solar cycle and autocorrelated
//! wind. Used for the bundled sample data, examples and tests; not a model of
//! any real grid.

use chrono::{DateTime, Datelike, Timelike, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::noise::fnv1a;
use super::{EnergySource, Mix, MixSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct GridArchetype {
    /// Baseline shares. Solar is ignored (driven by `solar_peak`); wind is
    /// the mean around which the hourly wind share fluctuates.
    pub base: Mix,
    /// Solar share at solar noon in midsummer.
    pub solar_peak: f64,
    /// Std-dev of the log-wind innovation per hour.
    pub wind_volatility: f64,
}

impl GridArchetype {
    fn new(pairs: &[(EnergySource, f64)], solar_peak: f64, wind_volatility: f64) -> Self {
        GridArchetype {
            base: Mix::from_pairs(pairs),
            solar_peak,
            wind_volatility,
        }
    }

    /// Rough caricature of the named grid operator's mix.
    pub fn for_grid(grid: &str) -> Self {
        use EnergySource::*;
        match grid {
            "sw" => Self::new(
                &[
                    (Hydro, 0.42),
                    (Nuclear, 0.30),
                    (Wind, 0.20),
                    (Biomass, 0.05),
                    (Gas, 0.01),
                    (Unknown, 0.02),
                ],
                0.03,
                0.25,
            ),
            "uk" => Self::new(
                &[
                    (Gas, 0.35),
                    (Wind, 0.28),
                    (Nuclear, 0.14),
                    (Biomass, 0.06),
                    (Hydro, 0.02),
                    (Coal, 0.02),
                    (Unknown, 0.13),
                ],
                0.10,
                0.30,
            ),
            "de" => Self::new(
                &[
                    (Coal, 0.25),
                    (Wind, 0.30),
                    (Gas, 0.14),
                    (Biomass, 0.08),
                    (Hydro, 0.04),
                    (Oil, 0.01),
                    (Unknown, 0.18),
                ],
                0.30,
                0.35,
            ),
            "ercot" => Self::new(
                &[
                    (Gas, 0.45),
                    (Wind, 0.25),
                    (Coal, 0.14),
                    (Nuclear, 0.09),
                    (Unknown, 0.02),
                ],
                0.20,
                0.30,
            ),
            "miso" => Self::new(
                &[
                    (Coal, 0.38),
                    (Gas, 0.28),
                    (Nuclear, 0.15),
                    (Wind, 0.14),
                    (Hydro, 0.01),
                    (Unknown, 0.02),
                ],
                0.05,
                0.30,
            ),
            "pjm" => Self::new(
                &[
                    (Gas, 0.42),
                    (Nuclear, 0.33),
                    (Coal, 0.15),
                    (Wind, 0.04),
                    (Hydro, 0.02),
                    (Oil, 0.01),
                    (Unknown, 0.01),
                ],
                0.06,
                0.25,
            ),
            "caiso" => Self::new(
                &[
                    (Gas, 0.38),
                    (Hydro, 0.12),
                    (Wind, 0.10),
                    (Nuclear, 0.08),
                    (Geothermal, 0.05),
                    (Biomass, 0.02),
                    (Unknown, 0.08),
                ],
                0.45,
                0.25,
            ),
            _ => Self::new(
                &[
                    (Gas, 0.40),
                    (Coal, 0.20),
                    (Nuclear, 0.15),
                    (Wind, 0.15),
                    (Hydro, 0.10),
                ],
                0.15,
                0.30,
            ),
        }
    }

    /// Generates `hours` hourly rows from `start`. Deterministic in
    /// `(grid, start, hours, seed)`.
    pub fn generate(&self, grid: &str, start: DateTime<Utc>, hours: usize, seed: u64) -> MixSeries {
        use EnergySource::*;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(grid).rotate_left(17));
        let innovation = Normal::new(0.0, self.wind_volatility).expect("finite volatility");
        let month = start.month() as f64;
        let season = 0.6 + 0.4 * (2.0 * std::f64::consts::PI * (month - 6.5) / 12.0).cos();

        let fossil_base: f64 = EnergySource::NON_RENEWABLE
            .iter()
            .map(|&s| self.base[s])
            .sum();
        let mut log_wind = 0.0f64;
        let mut rows = Vec::with_capacity(hours);
        for h in 0..hours {
            let hour_of_day = (start.hour() as usize + h) % 24;
            let daylight = (std::f64::consts::PI * (hour_of_day as f64 - 6.0) / 12.0)
                .sin()
                .max(0.0);
            log_wind = 0.9 * log_wind + innovation.sample(&mut rng);

            let mut row = self.base;
            row[Solar] = self.solar_peak * season * daylight;
            row[Wind] = self.base[Wind] * log_wind.exp();
            let mut renewable = row.renewable_share();
            if renewable > 0.95 {
                let k = 0.95 / renewable;
                for s in EnergySource::RENEWABLE {
                    row[s] *= k;
                }
                renewable = 0.95;
            }
            if fossil_base > 0.0 {
                let k = (1.0 - renewable) / fossil_base;
                for s in EnergySource::NON_RENEWABLE {
                    row[s] = self.base[s] * k;
                }
            }
            rows.push(row.normalized().expect("nonempty synthetic row"));
        }
        MixSeries {
            grid: grid.to_string(),
            start,
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn generated_rows_are_distributions() {
        let start = Utc.with_ymd_and_hms(2024, 7, 15, 0, 0, 0).unwrap();
        for grid in ["sw", "uk", "de", "ercot", "miso", "pjm", "caiso", "other"] {
            let s = GridArchetype::for_grid(grid).generate(grid, start, 168, 1);
            assert_eq!(s.hours(), 168);
            assert!(s.rows.iter().all(Mix::is_distribution), "{grid}");
        }
    }

    #[test]
    fn solar_follows_daylight() {
        let start = Utc.with_ymd_and_hms(2024, 7, 15, 0, 0, 0).unwrap();
        let s = GridArchetype::for_grid("caiso").generate("caiso", start, 24, 0);
        assert_eq!(s.rows[0][EnergySource::Solar], 0.0);
        assert!(s.rows[12][EnergySource::Solar] > 0.3);
    }
}
