//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and asserts the
//! criterion at its stated tolerance.

use std::sync::OnceLock;

use spim_isac::beamformer::pattern_count;
use spim_isac::experiments::{doa_pipeline, fig2_pipeline, fig3_pipeline, fig4_pipeline, AggregateResult, ScenarioConfig};
use spim_isac::selftest::run_selftest;

fn report(name: &str, passed: bool, detail: &str) {
    println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "{name}: {detail}");
}

/// Every integer SNR in 0..=20 dB, 500 trials, γ₁ = γ₂ = 0.5, η = 0.5.
fn snr_sweep() -> &'static AggregateResult {
    static CELL: OnceLock<AggregateResult> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = ScenarioConfig {
            snr_grid_db: (0..=20).map(f64::from).collect(),
            trials: 500,
            ..ScenarioConfig::default()
        };
        fig2_pipeline(&cfg).expect("snr sweep")
    })
}

#[test]
fn closed_form_matches_simulation() {
    let res = snr_sweep();
    let worst = res
        .points
        .iter()
        .map(|p| ((p.mean_mmwave_num - p.mean_mmwave_cf).abs(), p.axis_value))
        .fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
    report(
        "closed_form_matches_simulation",
        worst.0 < 0.1,
        &format!("max |num - cf| = {:.4} bits at {} dB (tol 0.1)", worst.0, worst.1),
    );
}

#[test]
fn spim_beats_single_path() {
    let res = snr_sweep();
    let losing: Vec<f64> = res
        .points
        .iter()
        .filter(|p| p.mean_spim <= p.mean_mmwave_num)
        .map(|p| p.axis_value)
        .collect();
    let last = res.points.last().unwrap();
    let gap = last.mean_spim - last.mean_mmwave_num;
    report(
        "spim_beats_single_path",
        losing.is_empty() && last.axis_value == 20.0 && gap >= 0.5,
        &format!("points not ahead: {losing:?}; gap at 20 dB = {gap:.4} bits (min 0.5)"),
    );
}

#[test]
fn gain_crossover_near_four_to_one() {
    let cfg = ScenarioConfig::default();
    let res = fig3_pipeline(&cfg).expect("gain sweep");
    let diff: Vec<(f64, f64)> = res
        .points
        .iter()
        .map(|p| (p.axis_value, p.mean_spim - p.mean_mmwave_num))
        .collect();
    let at = |g: f64| diff.iter().find(|(x, _)| (x - g).abs() < 1e-9).map(|d| d.1);
    let (d75, d85) = (at(0.75).unwrap(), at(0.85).unwrap());
    let crossing = diff.windows(2).find(|w| w[0].1 > 0.0 && w[1].1 <= 0.0).map(|w| {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        x0 + (x1 - x0) * y0 / (y0 - y1)
    });
    let ok = d75 > 0.0 && d85 < 0.0 && crossing.is_some_and(|c| (c - 0.80).abs() <= 0.05);
    report(
        "gain_crossover_near_four_to_one",
        ok,
        &format!("diff(0.75) = {d75:.4}, diff(0.85) = {d85:.4}, crossover = {crossing:?} (want 0.80 +/- 0.05)"),
    );
}

#[test]
fn beampattern_tradeoff() {
    let cfg = ScenarioConfig::default();
    let res = fig4_pipeline(&cfg).expect("beampattern");
    let target = cfg.target_deg;
    let mut problems = Vec::new();
    for (i, panel) in res.panels.iter().enumerate() {
        let path = panel.path_deg[0];
        let at_target: Vec<f64> = (0..res.etas.len()).map(|k| panel.value_at(&res.grid, k, target).unwrap()).collect();
        let at_path: Vec<f64> = (0..res.etas.len()).map(|k| panel.value_at(&res.grid, k, path).unwrap()).collect();
        if !at_target.windows(2).all(|w| w[1] < w[0]) {
            problems.push(format!("pattern {}: B(target) not decreasing {at_target:?}", i + 1));
        }
        if !at_path.windows(2).all(|w| w[1] > w[0]) {
            problems.push(format!("pattern {}: B(path) not increasing {at_path:?}", i + 1));
        }
        let first = panel.peak_deg(&res.grid, 0);
        let last = panel.peak_deg(&res.grid, res.etas.len() - 1);
        if res.etas[0] == 0.0 && first != target {
            problems.push(format!("pattern {}: eta=0 peak at {first}", i + 1));
        }
        if *res.etas.last().unwrap() == 1.0 && last != path {
            problems.push(format!("pattern {}: eta=1 peak at {last}, path {path}", i + 1));
        }
    }
    let ok = problems.is_empty()
        && res.panels.len() == 2
        && res.etas == [0.0, 0.3, 0.5, 0.8, 1.0]
        && res.grid.len() == 1801;
    report(
        "beampattern_tradeoff",
        ok,
        &if problems.is_empty() {
            format!("{} panels x {} etas on {} grid points", res.panels.len(), res.etas.len(), res.grid.len())
        } else {
            problems.join("; ")
        },
    );
}

#[test]
fn music_accuracy() {
    let cfg = ScenarioConfig::default();
    let noisy = doa_pipeline(&cfg, false).expect("doa");
    let hits = noisy.hits_within(0.1);
    let clean = doa_pipeline(&ScenarioConfig { doa_runs: 1, ..cfg.clone() }, true).expect("noiseless doa");
    let exact = clean.runs[0].estimate_deg == cfg.target_deg;
    report(
        "music_accuracy",
        noisy.runs.len() == 100 && hits >= 95 && exact,
        &format!(
            "{hits}/{} runs within 0.1 deg; noiseless estimate {} deg",
            noisy.runs.len(),
            clean.runs[0].estimate_deg
        ),
    );
}

#[test]
fn property_suite() {
    let checks = run_selftest();
    for c in &checks {
        println!("  {} {}: {}", if c.passed { "ok" } else { "FAILED" }, c.name, c.detail);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let spot = pattern_count(4, 1).unwrap() == 4 && pattern_count(12, 3).unwrap() == 128;
    report(
        "property_suite",
        failed.is_empty() && spot && checks.len() >= 9,
        &format!("{} checks, failed: {failed:?}", checks.len()),
    );
}
