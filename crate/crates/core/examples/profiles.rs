//! Per-region footprint profiles of the sample bundle, raw and normalized.

use footprint_core::profile::build_profile_series;
use footprint_core::{ScenarioBundle, Season};

fn main() -> footprint_core::Result<()> {
    let bundle = ScenarioBundle::sample()?;
    let season = Season::Summer;
    let horizon = bundle.horizon(season);
    let mixes = bundle.mixes(season)?;
    let profiles = build_profile_series(&bundle.regions, &mixes, &bundle.coefficients, horizon)?;

    for region in &bundle.regions {
        println!(
            "{:<14} PUE {:.2}  WUE {:.2} l/kWh  LUE {:.3e} m2/kWh",
            region.id,
            region.pue,
            region.wue,
            region.lue()
        );
    }
    println!("\nhour  region          carbon g/kWh  water l/kWh   norm c/w/l");
    for hour in (0..horizon.hours).step_by(6) {
        let step = hour * 60;
        for (d, region) in bundle.regions.iter().enumerate() {
            let raw = profiles.raw_at(d, step);
            let n = profiles.normalized_at(d, step);
            println!(
                "{hour:>4}  {:<14} {:>12.1} {:>12.3}   {:.2}/{:.2}/{:.2}",
                region.id, raw.carbon, raw.water, n.carbon, n.water, n.land
            );
        }
    }
    Ok(())
}
