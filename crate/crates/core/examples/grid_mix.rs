//! Mix-weighted intensities, hourly harmonization and forecast noise.

use chrono::{Duration, TimeZone, Utc};
use footprint_core::grid::{harmonize, mix_intensities, EnergySource::*, Mix};
use footprint_core::{apply_noise, IntensityCoefficients, NoiseSpec};

fn main() -> footprint_core::Result<()> {
    let coeffs = IntensityCoefficients::standard();
    for (label, mix) in [
        ("nuclear", Mix::only(Nuclear)),
        ("coal", Mix::only(Coal)),
        (
            "half wind, half gas",
            Mix::from_pairs(&[(Wind, 0.5), (Gas, 0.5)]),
        ),
    ] {
        let v = mix_intensities(&mix, &coeffs);
        println!(
            "{label:<22} {:>8.2} gCO2e/kWh {:>6.3} l/kWh {:>10.3e} m2/kWh",
            v.carbon, v.water, v.land
        );
    }

    // Operator data at 15-minute resolution, averaged to hours.
    let t0 = Utc.with_ymd_and_hms(2023, 1, 15, 0, 0, 0).unwrap();
    let rows: Vec<_> = (0..4 * 6)
        .map(|q| {
            let wind = 0.2 + 0.02 * q as f64;
            (
                t0 + Duration::minutes(15 * q),
                Mix::from_pairs(&[(Wind, wind), (Gas, 1.0 - wind)]),
            )
        })
        .collect();
    let hourly = harmonize("demo", &rows, t0, 6)?;
    let noisy = apply_noise(&hourly, &NoiseSpec::new(0.1, 7));
    println!("\nhour  true re-share  predicted (mae 0.1)");
    for (h, (t, p)) in hourly.rows.iter().zip(&noisy.rows).enumerate() {
        println!(
            "{h:>4}  {:>13.3}  {:>9.3}",
            t.renewable_share(),
            p.renewable_share()
        );
    }
    Ok(())
}
