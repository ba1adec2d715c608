//! Monte-Carlo MI versus SNR and versus first-path gain with random angles.
//! Pass a trial count as the first argument (default 100).
//!
//! cargo run --release --example monte_carlo -- 500

use spim_isac::experiments::{fig2_pipeline, fig3_pipeline, AggregateResult, ScenarioConfig};

fn show(label: &str, r: &AggregateResult) {
    println!("{label:>8} {:>8} {:>8} {:>8} {:>8}", "spim", "mmw-num", "mmw-cf", "gap");
    for p in &r.points {
        println!(
            "{:>8.2} {:>8.4} {:>8.4} {:>8.4} {:>+8.4}",
            p.axis_value,
            p.mean_spim,
            p.mean_mmwave_num,
            p.mean_mmwave_cf,
            p.mean_spim - p.mean_mmwave_num
        );
    }
}

fn main() -> spim_isac::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let cfg = ScenarioConfig { trials, ..ScenarioConfig::default() };
    show("snr_db", &fig2_pipeline(&cfg)?);
    println!();
    show("gamma1", &fig3_pipeline(&cfg)?);
    Ok(())
}
