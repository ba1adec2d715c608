//! Search-phase probing followed by MUSIC direction finding.
//!
//! cargo run --example music_doa

use spim_isac::array::{ArrayGeometry, AngleDeg};
use spim_isac::experiments::{doa_pipeline, ScenarioConfig};
use spim_isac::radar::{default_grid, estimate_doa, sample_covariance, simulate_probing};

fn main() -> spim_isac::Result<()> {
    let tx = ArrayGeometry::new(128)?;
    let grid = default_grid();
    for (deg, noise_var) in [(40.0, 0.0), (40.0, 0.1), (-33.3, 1.0)] {
        let snaps = simulate_probing(tx, AngleDeg::new(deg)?, 100, noise_var, 42)?;
        let est = estimate_doa(&sample_covariance(&snaps), tx, 1, &grid)?;
        println!("true {deg:>6}°, noise {noise_var}: estimate {est}");
    }

    let r = doa_pipeline(&ScenarioConfig::default(), false)?;
    let worst = r.runs.iter().map(|x| x.abs_error_deg).fold(0.0, f64::max);
    println!(
        "{} / {} runs within 0.1°, worst error {worst:.1}°",
        r.hits_within(0.1),
        r.runs.len()
    );
    Ok(())
}
