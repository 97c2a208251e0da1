use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{EnergySource, Mix, MixSeries};

/// Prediction-error model for the renewable share of a grid mix.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Target mean absolute error of the renewable share.
    pub mae: f64,
    /// Fraction of the error assigned to each source in
    /// [`EnergySource::RENEWABLE`] order.
    pub weights: [f64; 5],
    pub seed: u64,
}

impl NoiseSpec {
    /// Solar is hardest to forecast, biomass the most controllable.
    pub const DEFAULT_WEIGHTS: [f64; 5] = [0.45, 0.30, 0.10, 0.10, 0.05];

    pub fn new(mae: f64, seed: u64) -> Self {
        NoiseSpec {
            mae,
            weights: Self::DEFAULT_WEIGHTS,
            seed,
        }
    }

    /// Standard deviation giving E|ε| = mae for ε ~ N(0, σ).
    pub fn sigma(&self) -> f64 {
        self.mae / (2.0 / std::f64::consts::PI).sqrt()
    }
}

/// Stable 64-bit FNV-1a, used to derive per-grid random streams.
pub(crate) fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Perturbs the renewable share of every hour with ε ~ N(0, σ), split across
/// renewable sources by `spec.weights`. The opposite amount is spread evenly
/// over the non-renewable sources present in that hour. Shares are then
/// clamped to [0, 1] and the row rescaled to sum to one.
pub fn apply_noise(series: &MixSeries, spec: &NoiseSpec) -> MixSeries {
    if spec.mae == 0.0 {
        return series.clone();
    }
    let seed = spec.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ fnv1a(&series.grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, spec.sigma()).expect("mae must be finite and nonnegative");

    let rows = series
        .rows
        .iter()
        .map(|row| perturb_row(row, normal.sample(&mut rng), &spec.weights))
        .collect();
    MixSeries {
        grid: series.grid.clone(),
        start: series.start,
        rows,
    }
}

pub(crate) fn perturb_row(row: &Mix, eps: f64, weights: &[f64; 5]) -> Mix {
    let mut out = *row;
    for (src, w) in EnergySource::RENEWABLE.iter().zip(weights) {
        out[*src] += eps * w;
    }
    let present: Vec<EnergySource> = EnergySource::NON_RENEWABLE
        .into_iter()
        .filter(|&s| row[s] > 0.0)
        .collect();
    let compensate: &[EnergySource] = if present.is_empty() {
        &EnergySource::RENEWABLE
    } else {
        &present
    };
    let share = eps / compensate.len() as f64;
    for &src in compensate {
        out[src] -= share;
    }
    out.0.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    out.normalized().unwrap_or(*row)
}
