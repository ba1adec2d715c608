//! Transmit beampatterns of both spatial patterns across the trade-off factor.
//!
//! cargo run --example beampattern

use spim_isac::experiments::{fig4_pipeline, ScenarioConfig};
use spim_isac::radar::normalize_db;

fn main() -> spim_isac::Result<()> {
    let cfg = ScenarioConfig::default();
    let r = fig4_pipeline(&cfg)?;
    for panel in &r.panels {
        println!("pattern {} (path {:?}°)", panel.pattern, panel.path_deg);
        for (k, eta) in r.etas.iter().enumerate() {
            let db = normalize_db(&panel.curves[k], -60.0);
            let at = |deg: f64| {
                let i = r.grid.iter().position(|g| g.deg() == deg).unwrap();
                db[i]
            };
            println!(
                "  eta {eta:.1}: peak {:>5.1}°, B(40°) {:>7.2} dB, B({}°) {:>7.2} dB",
                panel.peak_deg(&r.grid, k),
                at(cfg.target_deg),
                panel.path_deg[0],
                at(panel.path_deg[0])
            );
        }
    }
    Ok(())
}
