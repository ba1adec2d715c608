//! Scenario configuration, seeded Monte-Carlo trials and the sweep pipelines.
//!
//! Every trial owns an independent ChaCha stream selected by its index, so the
//! random draws of trial `t` do not depend on how many threads ran or in which
//! order. Results are collected in trial order and reduced sequentially,
//! which keeps aggregates bit-identical for any degree of parallelism.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{build_channel, AngleDeg, ArrayGeometry, ChannelRealization, PathParams};
use crate::beamformer::{assemble_hybrid, enumerate_patterns, pattern_count, SpatialPattern};
use crate::error::{domain, Error, Result};
use crate::metrics::{
    covariances_with, gains_for_gamma1, mi_general, mi_mmwave_closed_form, mi_spim, NoiseModel,
};
use crate::radar::{
    argmax, beampattern, estimate_doa, music_spectrum, sample_covariance, simulate_probing_with,
    uniform_grid, ProbingResponse,
};

/// Marker for randomly drawn path directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomAngles {
    RandomUniform,
}

/// How path directions are chosen in a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathAngles {
    /// Departure and arrival angles i.i.d. uniform on [-90°, 90°].
    Random(RandomAngles),
    /// Fixed angles in degrees; arrivals default to the departures.
    Explicit {
        dod: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        doa: Option<Vec<f64>>,
    },
}

impl Default for PathAngles {
    fn default() -> Self {
        Self::Random(RandomAngles::RandomUniform)
    }
}

/// Full description of an experiment. Defaults are the reference setup:
/// `N_T = 128`, `N_R = 10`, `M = 2`, `N_RF = N_S = 2`, target at 40°,
/// `γ₁ = γ₂ = 0.5`, `η = 0.5`, 500 trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_t: usize,
    pub n_r: usize,
    pub n_rf: usize,
    pub n_s: usize,
    pub m_paths: usize,
    pub target_deg: f64,
    pub gains: Vec<f64>,
    pub path_angles: PathAngles,
    pub eta: f64,
    pub snr_grid_db: Vec<f64>,
    /// First-path gain grid for the gain sweep (`γ₂ = 1 - γ₁`).
    pub gamma1_grid: Vec<f64>,
    /// Operating SNR of the gain sweep.
    pub gain_sweep_snr_db: f64,
    pub trials: usize,
    pub seed: u64,
    /// Rescale `F_BB` so that `‖F_RF F_BB‖_F = N_S` before computing MI.
    pub renormalize_power: bool,
    pub beampattern_etas: Vec<f64>,
    /// Fixed path departures used by the beampattern pipeline.
    pub beampattern_path_deg: Vec<f64>,
    pub grid_step_deg: f64,
    pub probing_snapshots: usize,
    pub probing_snr_db: f64,
    pub probing_response: ProbingResponse,
    pub doa_runs: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_t: 128,
            n_r: 10,
            n_rf: 2,
            n_s: 2,
            m_paths: 2,
            target_deg: 40.0,
            gains: vec![0.5, 0.5],
            path_angles: PathAngles::default(),
            eta: 0.5,
            snr_grid_db: (0..=10).map(|k| f64::from(2 * k)).collect(),
            gamma1_grid: (10..=20).map(|k| f64::from(k) / 20.0).collect(),
            gain_sweep_snr_db: 20.0,
            trials: 500,
            seed: 1,
            renormalize_power: false,
            beampattern_etas: vec![0.0, 0.3, 0.5, 0.8, 1.0],
            beampattern_path_deg: vec![50.0, 60.0],
            grid_step_deg: 0.1,
            probing_snapshots: 100,
            probing_snr_db: 10.0,
            probing_response: ProbingResponse::Transpose,
            doa_runs: 100,
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_angle(name: &str, v: f64) -> Result<AngleDeg> {
    AngleDeg::new(v).map_err(|_| cfg_err(format!("{name} = {v} outside [-90, 90]")))
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n_t", self.n_t), ("n_r", self.n_r), ("m_paths", self.m_paths)] {
            if v == 0 {
                return Err(cfg_err(format!("{name} must be >= 1")));
            }
        }
        if self.n_rf < 2 {
            return Err(cfg_err("n_rf must be >= 2 (one radar chain plus communication chains)"));
        }
        if self.n_rf - 1 > self.m_paths {
            return Err(cfg_err(format!(
                "n_rf - 1 = {} communication chains exceed m_paths = {}",
                self.n_rf - 1,
                self.m_paths
            )));
        }
        if self.n_s != self.n_rf {
            return Err(cfg_err("n_s must equal n_rf for the block-diagonal baseband stage"));
        }
        check_angle("target_deg", self.target_deg)?;
        if self.gains.len() != self.m_paths {
            return Err(cfg_err(format!(
                "{} gains given for m_paths = {}",
                self.gains.len(),
                self.m_paths
            )));
        }
        if self.gains.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
            return Err(cfg_err("path gains must be finite and >= 0"));
        }
        if let PathAngles::Explicit { dod, doa } = &self.path_angles {
            if dod.len() != self.m_paths || doa.as_ref().is_some_and(|d| d.len() != self.m_paths) {
                return Err(cfg_err("explicit path angle lists must have m_paths entries"));
            }
            for &a in dod.iter().chain(doa.iter().flatten()) {
                check_angle("path angle", a)?;
            }
        }
        let unit = |name: &str, v: &[f64]| -> Result<()> {
            if v.is_empty() || v.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(cfg_err(format!("{name} must be non-empty with values in [0, 1]")));
            }
            Ok(())
        };
        unit("eta", &[self.eta])?;
        unit("gamma1_grid", &self.gamma1_grid)?;
        unit("beampattern_etas", &self.beampattern_etas)?;
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(cfg_err("snr_grid_db must be non-empty and finite"));
        }
        if !self.gain_sweep_snr_db.is_finite() || !self.probing_snr_db.is_finite() {
            return Err(cfg_err("SNR values must be finite"));
        }
        if self.trials == 0 || self.doa_runs == 0 || self.probing_snapshots == 0 {
            return Err(cfg_err("trials, doa_runs and probing_snapshots must be >= 1"));
        }
        if self.beampattern_path_deg.len() != self.m_paths {
            return Err(cfg_err("beampattern_path_deg must have m_paths entries"));
        }
        for &a in &self.beampattern_path_deg {
            check_angle("beampattern path", a)?;
        }
        if !(self.grid_step_deg > 0.0) || self.grid_step_deg > 180.0 {
            return Err(cfg_err("grid_step_deg must be in (0, 180]"));
        }
        if self.probing_snapshots > 0 && self.n_t < 2 {
            return Err(cfg_err("direction finding needs n_t >= 2"));
        }
        pattern_count(self.m_paths, self.n_rf - 1).map_err(|e| cfg_err(e.to_string()))?;
        Ok(())
    }

    pub fn tx(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.n_t)
    }

    pub fn rx(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.n_r)
    }

    pub fn target(&self) -> Result<AngleDeg> {
        AngleDeg::new(self.target_deg)
    }

    pub fn patterns(&self) -> Result<Vec<SpatialPattern>> {
        enumerate_patterns(self.m_paths, self.n_rf - 1)
    }

    pub fn angle_grid(&self) -> Result<Vec<AngleDeg>> {
        uniform_grid(-90.0, 90.0, self.grid_step_deg)
    }
}

/// Independent random stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// MI values of a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub spim: f64,
    pub mmwave_num: f64,
    pub mmwave_cf: f64,
}

fn draw_paths(cfg: &ScenarioConfig, gains: &[f64], trial_index: u64) -> Result<Vec<PathParams>> {
    match &cfg.path_angles {
        PathAngles::Random(_) => {
            let mut rng = trial_rng(cfg.seed, trial_index);
            gains
                .iter()
                .map(|&g| {
                    let dod = AngleDeg::new(rng.random_range(-90.0..=90.0))?;
                    let doa = AngleDeg::new(rng.random_range(-90.0..=90.0))?;
                    PathParams::new(g, dod, doa)
                })
                .collect()
        }
        PathAngles::Explicit { dod, doa } => gains
            .iter()
            .enumerate()
            .map(|(k, &g)| {
                let d = AngleDeg::new(dod[k])?;
                let a = AngleDeg::new(doa.as_ref().map_or(dod[k], |v| v[k]))?;
                PathParams::new(g, d, a)
            })
            .collect(),
    }
}

/// Builds the channel a trial sees.
pub fn trial_channel(cfg: &ScenarioConfig, gains: &[f64], trial_index: u64) -> Result<ChannelRealization> {
    let paths = draw_paths(cfg, gains, trial_index)?;
    build_channel(cfg.tx()?, cfg.rx()?, &paths)
}

fn trial_with_gains(
    cfg: &ScenarioConfig,
    gains: &[f64],
    snr_db: f64,
    trial_index: u64,
) -> Result<TrialOutcome> {
    let noise = NoiseModel::from_snr_db(snr_db)?;
    let target = cfg.target()?;
    let ch = trial_channel(cfg, gains, trial_index)?;
    let patterns = cfg.patterns()?;
    let covs = covariances_with(&ch, &patterns, target, cfg.eta, noise, cfg.renormalize_power)?;

    // conventional design: radar beam + strongest path
    let strongest = SpatialPattern::new((0..cfg.n_rf - 1).collect())?;
    let mut hb = assemble_hybrid(ch.tx(), &ch, &strongest, target, cfg.eta)?;
    if cfg.renormalize_power {
        hb = hb.power_normalized();
    }
    Ok(TrialOutcome {
        spim: mi_spim(&covs, noise)?,
        mmwave_num: mi_general(ch.h(), hb.f_rf(), hb.f_bb(), noise)?,
        mmwave_cf: mi_mmwave_closed_form(ch.paths()[0].gain(), cfg.eta, noise)?,
    })
}

/// One Monte-Carlo trial at `snr_db`. Deterministic in `(cfg.seed, trial_index)`.
pub fn run_trial(cfg: &ScenarioConfig, snr_db: f64, trial_index: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    trial_with_gains(cfg, &cfg.gains, snr_db, trial_index)
}

/// Statistics of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregatePoint {
    pub axis_value: f64,
    pub mean_spim: f64,
    pub mean_mmwave_num: f64,
    pub mean_mmwave_cf: f64,
    pub stderr_spim: f64,
    pub stderr_mmwave_num: f64,
    pub stderr_mmwave_cf: f64,
    pub trials: usize,
}

impl AggregatePoint {
    pub fn is_finite(&self) -> bool {
        [
            self.axis_value,
            self.mean_spim,
            self.mean_mmwave_num,
            self.mean_mmwave_cf,
            self.stderr_spim,
            self.stderr_mmwave_num,
            self.stderr_mmwave_cf,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Which quantity a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SnrDb,
    Gamma1,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateResult {
    pub axis: SweepAxis,
    pub points: Vec<AggregatePoint>,
}

/// Mean and standard error (sample std / √n), summed in slice order.
fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// Reduces per-trial outcomes (in trial-index order) to one sweep point.
pub fn aggregate(axis_value: f64, outcomes: &[TrialOutcome]) -> Result<AggregatePoint> {
    if outcomes.is_empty() {
        return Err(domain("cannot aggregate an empty trial set"));
    }
    let (mean_spim, stderr_spim) = mean_stderr(outcomes.iter().map(|o| o.spim));
    let (mean_mmwave_num, stderr_mmwave_num) = mean_stderr(outcomes.iter().map(|o| o.mmwave_num));
    let (mean_mmwave_cf, stderr_mmwave_cf) = mean_stderr(outcomes.iter().map(|o| o.mmwave_cf));
    Ok(AggregatePoint {
        axis_value,
        mean_spim,
        mean_mmwave_num,
        mean_mmwave_cf,
        stderr_spim,
        stderr_mmwave_num,
        stderr_mmwave_cf,
        trials: outcomes.len(),
    })
}

fn run_point(cfg: &ScenarioConfig, gains: &[f64], snr_db: f64, axis_value: f64) -> Result<AggregatePoint> {
    let outcomes = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| trial_with_gains(cfg, gains, snr_db, t))
        .collect::<Result<Vec<_>>>()?;
    let point = aggregate(axis_value, &outcomes)?;
    if !point.is_finite() {
        return Err(Error::Numeric(format!("non-finite aggregate at axis value {axis_value}")));
    }
    Ok(point)
}

/// MI versus SNR over `cfg.snr_grid_db`.
pub fn fig2_pipeline(cfg: &ScenarioConfig) -> Result<AggregateResult> {
    cfg.validate()?;
    let points = cfg
        .snr_grid_db
        .iter()
        .map(|&snr| run_point(cfg, &cfg.gains, snr, snr))
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateResult {
        axis: SweepAxis::SnrDb,
        points,
    })
}

/// MI versus first-path gain at `cfg.gain_sweep_snr_db`, with the remaining
/// power `1 - γ₁` on the other path(s).
pub fn fig3_pipeline(cfg: &ScenarioConfig) -> Result<AggregateResult> {
    cfg.validate()?;
    if cfg.m_paths < 2 {
        return Err(cfg_err("gain sweep needs m_paths >= 2"));
    }
    let points = cfg
        .gamma1_grid
        .iter()
        .map(|&g1| {
            let gains = gains_for_gamma1(g1, cfg.m_paths)?;
            run_point(cfg, &gains, cfg.gain_sweep_snr_db, g1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AggregateResult {
        axis: SweepAxis::Gamma1,
        points,
    })
}

/// Linear beampattern curves of one spatial pattern, one per `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternPanel {
    pub pattern: SpatialPattern,
    /// Departure angles of the selected paths.
    pub path_deg: Vec<f64>,
    pub curves: Vec<Vec<f64>>,
}

impl BeampatternPanel {
    /// Grid angle of the global maximum of curve `k`.
    pub fn peak_deg(&self, grid: &[AngleDeg], k: usize) -> f64 {
        let pts: Vec<_> = grid.iter().copied().zip(self.curves[k].iter().copied()).collect();
        argmax(&pts).deg()
    }

    pub fn value_at(&self, grid: &[AngleDeg], k: usize, deg: f64) -> Option<f64> {
        grid.iter().position(|g| g.deg() == deg).map(|i| self.curves[k][i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternResult {
    pub grid: Vec<AngleDeg>,
    pub etas: Vec<f64>,
    pub panels: Vec<BeampatternPanel>,
}

/// Transmit beampatterns for every spatial pattern and every `η` in
/// `cfg.beampattern_etas`, with paths at `cfg.beampattern_path_deg`.
pub fn fig4_pipeline(cfg: &ScenarioConfig) -> Result<BeampatternResult> {
    cfg.validate()?;
    let tx = cfg.tx()?;
    let target = cfg.target()?;
    let grid = cfg.angle_grid()?;
    let paths = cfg
        .gains
        .iter()
        .zip(&cfg.beampattern_path_deg)
        .map(|(&g, &d)| {
            let a = AngleDeg::new(d)?;
            PathParams::new(g, a, a)
        })
        .collect::<Result<Vec<_>>>()?;
    let ch = build_channel(tx, cfg.rx()?, &paths)?;

    let panels = cfg
        .patterns()?
        .into_iter()
        .map(|pat| {
            let curves = cfg
                .beampattern_etas
                .iter()
                .map(|&eta| {
                    let hb = assemble_hybrid(tx, &ch, &pat, target, eta)?;
                    Ok(beampattern(&hb, tx, &grid)?.into_iter().map(|(_, v)| v).collect())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BeampatternPanel {
                path_deg: pat.selected_paths().iter().map(|&p| ch.paths()[p].dod.deg()).collect(),
                pattern: pat,
                curves,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BeampatternResult {
        grid,
        etas: cfg.beampattern_etas.clone(),
        panels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoaRun {
    pub run: usize,
    pub seed: u64,
    pub estimate_deg: f64,
    pub abs_error_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoaResult {
    pub true_deg: f64,
    pub runs: Vec<DoaRun>,
    /// MUSIC pseudospectrum of run 0.
    pub spectrum: Vec<(AngleDeg, f64)>,
}

impl DoaResult {
    pub fn hits_within(&self, tol_deg: f64) -> usize {
        self.runs.iter().filter(|r| r.abs_error_deg <= tol_deg + 1e-9).count()
    }
}

/// Repeated search-phase probing and MUSIC estimation of the target angle.
/// Noise variance is `10^(-probing_snr_db/10)`; `noiseless` forces it to 0.
pub fn doa_pipeline(cfg: &ScenarioConfig, noiseless: bool) -> Result<DoaResult> {
    cfg.validate()?;
    let tx = cfg.tx()?;
    let target = cfg.target()?;
    let grid = cfg.angle_grid()?;
    let noise_var = if noiseless {
        0.0
    } else {
        10f64.powf(-cfg.probing_snr_db / 10.0)
    };

    let per_run = (0..cfg.doa_runs)
        .into_par_iter()
        .map(|run| {
            let seed = trial_rng(cfg.seed, run as u64).next_u64();
            let snaps = simulate_probing_with(
                tx,
                target,
                cfg.probing_snapshots,
                noise_var,
                seed,
                cfg.probing_response,
            )?;
            let cov = sample_covariance(&snaps);
            let est = estimate_doa(&cov, tx, 1, &grid)?;
            let spectrum = if run == 0 {
                music_spectrum(&cov, tx, 1, &grid)?
            } else {
                Vec::new()
            };
            Ok((
                DoaRun {
                    run,
                    seed,
                    estimate_deg: est.deg(),
                    abs_error_deg: (est.deg() - target.deg()).abs(),
                },
                spectrum,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut spectrum = Vec::new();
    let mut runs = Vec::with_capacity(per_run.len());
    for (r, s) in per_run {
        if r.run == 0 {
            spectrum = s;
        }
        runs.push(r);
    }
    Ok(DoaResult {
        true_deg: target.deg(),
        runs,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small(trials: usize) -> ScenarioConfig {
        ScenarioConfig {
            trials,
            snr_grid_db: vec![0.0, 10.0, 20.0],
            ..ScenarioConfig::default()
        }
    }

    fn outcome(v: f64) -> TrialOutcome {
        TrialOutcome {
            spim: v,
            mmwave_num: v,
            mmwave_cf: v,
        }
    }

    #[test]
    fn defaults_are_valid() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.snr_grid_db.len(), 11);
        assert_eq!(cfg.gamma1_grid.first(), Some(&0.5));
        assert_eq!(cfg.gamma1_grid.last(), Some(&1.0));
        assert_eq!(cfg.gamma1_grid[6], 0.8);
    }

    #[test]
    fn validation_errors() {
        let bad = ScenarioConfig {
            n_rf: 4,
            n_s: 4,
            ..ScenarioConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = ScenarioConfig {
            gains: vec![1.0],
            ..ScenarioConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ScenarioConfig {
            eta: 1.5,
            ..ScenarioConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ScenarioConfig {
            target_deg: 91.0,
            ..ScenarioConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = ScenarioConfig {
            n_s: 3,
            ..ScenarioConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn toml_parsing() {
        let cfg = ScenarioConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        let cfg = ScenarioConfig::from_toml_str(
            "seed = 7\ntrials = 3\npath_angles = { dod = [50.0, 60.0] }\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(
            cfg.path_angles,
            PathAngles::Explicit {
                dod: vec![50.0, 60.0],
                doa: None
            }
        );
        let cfg = ScenarioConfig::from_toml_str("path_angles = \"random-uniform\"").unwrap();
        assert_eq!(cfg.path_angles, PathAngles::default());
        assert!(matches!(
            ScenarioConfig::from_toml_str("n_antennas = 3"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = small(4);
        let a = run_trial(&cfg, 10.0, 3).unwrap();
        let b = run_trial(&cfg, 10.0, 3).unwrap();
        assert_eq!(a.spim.to_bits(), b.spim.to_bits());
        assert_eq!(a.mmwave_num.to_bits(), b.mmwave_num.to_bits());
        let c = run_trial(&cfg, 10.0, 4).unwrap();
        assert_ne!(a.spim, c.spim);
    }

    #[test]
    fn explicit_angles_match_closed_form() {
        let cfg = ScenarioConfig {
            path_angles: PathAngles::Explicit {
                dod: vec![50.0, 60.0],
                doa: None,
            },
            ..small(1)
        };
        let o = run_trial(&cfg, 20.0, 0).unwrap();
        assert!((o.mmwave_num - o.mmwave_cf).abs() < 0.1, "{o:?}");
    }

    #[test]
    fn radar_only_carries_almost_nothing() {
        let cfg = ScenarioConfig {
            eta: 0.0,
            path_angles: PathAngles::Explicit {
                dod: vec![50.0, 60.0],
                doa: None,
            },
            ..small(1)
        };
        let o = run_trial(&cfg, 20.0, 0).unwrap();
        assert!(o.spim < 0.05 && o.mmwave_num < 0.05 && o.mmwave_cf < 0.05, "{o:?}");
    }

    #[test]
    fn aggregate_examples() {
        let p = aggregate(1.0, &[outcome(3.0); 4]).unwrap();
        assert_eq!(p.mean_spim, 3.0);
        assert_eq!(p.stderr_spim, 0.0);
        assert_eq!(p.trials, 4);
        let p = aggregate(1.0, &[outcome(0.0), outcome(2.0)]).unwrap();
        assert_eq!(p.mean_mmwave_num, 1.0);
        // sample std √2, /√2
        assert_abs_diff_eq!(p.stderr_mmwave_num, 1.0, epsilon = 1e-15);
        assert!(aggregate(0.0, &[]).is_err());
    }

    #[test]
    fn small_fig2_is_reproducible_and_ordered() {
        let cfg = small(20);
        let a = fig2_pipeline(&cfg).unwrap();
        let b = fig2_pipeline(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 3);
        for w in a.points.windows(2) {
            assert!(w[1].mean_spim > w[0].mean_spim);
            assert!(w[1].mean_mmwave_num > w[0].mean_mmwave_num);
        }
        assert!(a.points.iter().all(|p| p.trials == 20 && p.is_finite()));
    }

    #[test]
    fn fig3_handles_zero_second_path() {
        let cfg = ScenarioConfig {
            gamma1_grid: vec![1.0],
            ..small(20)
        };
        let r = fig3_pipeline(&cfg).unwrap();
        let p = r.points[0];
        assert!(p.is_finite());
        assert!(p.mean_spim <= p.mean_mmwave_num);
    }

    #[test]
    fn fig4_shapes() {
        let r = fig4_pipeline(&ScenarioConfig::default()).unwrap();
        assert_eq!(r.grid.len(), 1801);
        assert_eq!(r.panels.len(), 2);
        assert_eq!(r.panels[0].path_deg, vec![50.0]);
        assert_eq!(r.panels[1].path_deg, vec![60.0]);
        for panel in &r.panels {
            assert_eq!(panel.curves.len(), 5);
            assert_eq!(panel.peak_deg(&r.grid, 0), 40.0);
            assert_eq!(panel.peak_deg(&r.grid, 4), panel.path_deg[0]);
        }
    }

    #[test]
    fn doa_noiseless_is_exact() {
        let cfg = ScenarioConfig {
            doa_runs: 2,
            n_t: 32,
            ..ScenarioConfig::default()
        };
        let r = doa_pipeline(&cfg, true).unwrap();
        assert!(r.runs.iter().all(|x| x.estimate_deg == 40.0));
        assert_eq!(r.spectrum.len(), 1801);
    }
}
