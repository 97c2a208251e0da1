//! Writes synthetic hourly grid mixes for every season in the layout a
//! scenario bundle expects (`<grid>_<season>.csv`).
//!
//!     cargo run --example synthetic_grids -- OUT_DIR [HOURS] [YEAR] [GRID...]

use std::fs::File;
use std::path::PathBuf;

use footprint_core::grid::synthetic::GridArchetype;
use footprint_core::grid::write_mix_csv;
use footprint_core::Season;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let out: PathBuf = args.next().unwrap_or_else(|| "grids".into()).into();
    let hours: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(48);
    let year: i32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2023);
    let mut grids: Vec<String> = args.collect();
    if grids.is_empty() {
        grids = vec!["sw".into(), "de".into(), "pjm".into()];
    }

    std::fs::create_dir_all(&out)?;
    for grid in &grids {
        let archetype = GridArchetype::for_grid(grid);
        for (k, season) in Season::ALL.into_iter().enumerate() {
            let series = archetype.generate(grid, season.start(year), hours, k as u64);
            let path = out.join(format!("{grid}_{season}.csv"));
            write_mix_csv(File::create(&path)?, &series)?;
            let mean_re: f64 =
                series.rows.iter().map(|m| m.renewable_share()).sum::<f64>() / hours as f64;
            println!("{:<40} mean renewable share {:.3}", path.display(), mean_re);
        }
    }
    Ok(())
}
