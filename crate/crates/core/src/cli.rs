//! Command-line front-end: config loading, subcommand dispatch, CSV and
//! manifest output.
//!
//! Exit status is 0 on success, 1 on a numeric or I/O failure (or a failed
//! self-test), 2 on a usage or configuration error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{
    doa_pipeline, fig2_pipeline, fig3_pipeline, fig4_pipeline, AggregateResult,
    BeampatternResult, DoaResult, ScenarioConfig,
};
use crate::radar::normalize_db;
use crate::selftest::{run_selftest, CheckResult};

/// Floor applied to normalized beampattern and spectrum curves.
pub const DB_FLOOR: f64 = -60.0;

#[derive(Debug, Parser)]
#[command(name = "spim-isac", version, about = "Index-modulated hybrid beamforming for joint radar-communications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: RunOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Mutual information versus SNR.
    MiVsSnr,
    /// Mutual information versus the first path gain.
    MiVsGain,
    /// Transmit beampatterns per spatial pattern and trade-off value.
    Beampattern,
    /// MUSIC target direction estimation.
    Doa,
    /// Numerical property checks.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::MiVsSnr => "mi-vs-snr",
            Self::MiVsGain => "mi-vs-gain",
            Self::Beampattern => "beampattern",
            Self::Doa => "doa",
            Self::Selftest => "selftest",
        }
    }

    fn stem(self) -> String {
        self.name().replace('-', "_")
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunOptions {
    /// TOML scenario file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, env = "ISAC_SEED")]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub trials: Option<usize>,

    #[arg(long, global = true, default_value = "results")]
    pub out_dir: PathBuf,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub snr_min: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub snr_max: Option<f64>,

    #[arg(long, global = true)]
    pub snr_step: Option<f64>,

    /// Comma-separated first-path gains, e.g. `0.5,0.6,0.7`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub gamma1_grid: Option<Vec<f64>>,

    #[arg(long, global = true)]
    pub eta: Option<f64>,

    #[arg(long, global = true)]
    pub quiet: bool,
}

/// Resolves the scenario from an optional config file plus flag overrides.
pub fn parse_config(opts: &RunOptions) -> Result<ScenarioConfig> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::from_toml_str(&text)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = opts.trials {
        cfg.trials = trials;
    }
    if let Some(eta) = opts.eta {
        cfg.eta = eta;
    }
    if let Some(g) = &opts.gamma1_grid {
        cfg.gamma1_grid = g.clone();
    }
    if opts.snr_min.is_some() || opts.snr_max.is_some() || opts.snr_step.is_some() {
        let grid = &cfg.snr_grid_db;
        let min = opts.snr_min.unwrap_or(grid[0]);
        let max = opts.snr_max.unwrap_or(grid[grid.len() - 1]);
        let step = opts
            .snr_step
            .unwrap_or(if grid.len() > 1 { grid[1] - grid[0] } else { 1.0 });
        if !(step > 0.0) || !(max >= min) {
            return Err(Error::Config(format!("bad SNR range {min}..{max} step {step}")));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        cfg.snr_grid_db = (0..count).map(|k| min + k as f64 * step).collect();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Everything needed to rerun a result set.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub timestamp: String,
    pub config: ScenarioConfig,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: Command, cfg: &ScenarioConfig, outputs: Vec<PathBuf>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.name().to_string(),
            seed: cfg.seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            config: cfg.clone(),
            outputs,
        }
    }
}

pub const MI_HEADER: &str =
    "axis_value,mi_spim,mi_mmwave_num,mi_mmwave_cf,stderr_spim,stderr_mmwave_num,trials";

pub fn write_mi_csv<W: Write>(mut w: W, result: &AggregateResult) -> io::Result<()> {
    writeln!(w, "{MI_HEADER}")?;
    for p in &result.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.axis_value,
            p.mean_spim,
            p.mean_mmwave_num,
            p.mean_mmwave_cf,
            p.stderr_spim,
            p.stderr_mmwave_num,
            p.trials
        )?;
    }
    Ok(())
}

/// One panel: `angle_deg` then one normalized dB column per `η`.
pub fn write_beampattern_csv<W: Write>(mut w: W, result: &BeampatternResult, panel: usize) -> io::Result<()> {
    let header: Vec<String> = std::iter::once("angle_deg".to_string())
        .chain(result.etas.iter().map(|e| format!("eta_{e}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    let db: Vec<Vec<f64>> = result.panels[panel]
        .curves
        .iter()
        .map(|c| normalize_db(c, DB_FLOOR))
        .collect();
    for (i, g) in result.grid.iter().enumerate() {
        let mut line = g.deg().to_string();
        for curve in &db {
            line.push(',');
            line.push_str(&curve[i].to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_doa_csv<W: Write>(mut w: W, result: &DoaResult) -> io::Result<()> {
    writeln!(w, "run,seed,true_deg,estimate_deg,abs_error_deg")?;
    for r in &result.runs {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.run, r.seed, result.true_deg, r.estimate_deg, r.abs_error_deg
        )?;
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(mut w: W, result: &DoaResult) -> io::Result<()> {
    writeln!(w, "angle_deg,spectrum_db")?;
    let vals: Vec<f64> = result.spectrum.iter().map(|(_, v)| *v).collect();
    for ((g, _), db) in result.spectrum.iter().zip(normalize_db(&vals, DB_FLOOR)) {
        writeln!(w, "{},{}", g.deg(), db)?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_selftest_csv<W: Write>(mut w: W, checks: &[CheckResult]) -> io::Result<()> {
    writeln!(w, "check,passed,detail")?;
    for c in checks {
        writeln!(w, "{},{},{}", c.name, c.passed, csv_field(&c.detail))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>> {
    Ok(io::BufWriter::new(fs::File::create(path)?))
}

fn write_manifest(out_dir: &Path, command: Command, cfg: &ScenarioConfig, outputs: Vec<PathBuf>) -> Result<PathBuf> {
    let path = out_dir.join(format!("{}.manifest.json", command.stem()));
    let manifest = RunManifest::new(command, cfg, outputs);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Numeric(e.to_string()))?;
    fs::write(&path, json + "\n")?;
    Ok(path)
}

fn print_mi(quiet: bool, label: &str, r: &AggregateResult) {
    if quiet {
        return;
    }
    println!("{label:>10} {:>10} {:>10} {:>10}", "spim", "mmw-num", "mmw-cf");
    for p in &r.points {
        println!(
            "{:>10.3} {:>10.4} {:>10.4} {:>10.4}",
            p.axis_value, p.mean_spim, p.mean_mmwave_num, p.mean_mmwave_cf
        );
    }
}

/// Runs one subcommand. `Ok(false)` means it ran but a check failed.
pub fn run_command(command: Command, opts: &RunOptions) -> Result<bool> {
    let cfg = parse_config(opts)?;
    let out = &opts.out_dir;
    fs::create_dir_all(out)?;
    let quiet = opts.quiet;

    let (outputs, ok) = match command {
        Command::MiVsSnr | Command::MiVsGain => {
            let (r, label) = if command == Command::MiVsSnr {
                (fig2_pipeline(&cfg)?, "snr_db")
            } else {
                (fig3_pipeline(&cfg)?, "gamma1")
            };
            let path = out.join(format!("{}.csv", command.stem()));
            let mut w = create(&path)?;
            write_mi_csv(&mut w, &r)?;
            w.flush()?;
            print_mi(quiet, label, &r);
            (vec![path], true)
        }
        Command::Beampattern => {
            let r = fig4_pipeline(&cfg)?;
            let mut paths = Vec::new();
            for (k, panel) in r.panels.iter().enumerate() {
                let path = out.join(format!("beampattern_i{}.csv", k + 1));
                let mut w = create(&path)?;
                write_beampattern_csv(&mut w, &r, k)?;
                w.flush()?;
                if !quiet {
                    let peaks: Vec<String> = (0..r.etas.len())
                        .map(|e| format!("eta={}: {}°", r.etas[e], panel.peak_deg(&r.grid, e)))
                        .collect();
                    println!("pattern {} peaks: {}", panel.pattern, peaks.join(", "));
                }
                paths.push(path);
            }
            (paths, true)
        }
        Command::Doa => {
            let r = doa_pipeline(&cfg, false)?;
            let runs = out.join("doa_runs.csv");
            let spectrum = out.join("doa_spectrum.csv");
            let mut w = create(&runs)?;
            write_doa_csv(&mut w, &r)?;
            w.flush()?;
            let mut w = create(&spectrum)?;
            write_spectrum_csv(&mut w, &r)?;
            w.flush()?;
            if !quiet {
                println!(
                    "{} of {} estimates within 0.1° of {}°",
                    r.hits_within(0.1),
                    r.runs.len(),
                    r.true_deg
                );
            }
            (vec![runs, spectrum], true)
        }
        Command::Selftest => {
            let checks = run_selftest();
            let path = out.join("selftest.csv");
            let mut w = create(&path)?;
            write_selftest_csv(&mut w, &checks)?;
            w.flush()?;
            if !quiet {
                for c in &checks {
                    println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
            }
            (vec![path], checks.iter().all(|c| c.passed))
        }
    };
    let manifest = write_manifest(out, command, &cfg, outputs)?;
    if !quiet {
        println!("manifest: {}", manifest.display());
    }
    Ok(ok)
}

pub fn exit_code(result: &Result<bool>) -> i32 {
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Error::Config(_) | Error::Domain(_)) => 2,
        Err(_) => 1,
    }
}

/// Parses arguments and runs the selected subcommand, returning the exit status.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = run_command(cli.command, &cli.opts);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RunOptions {
        RunOptions {
            out_dir: PathBuf::from("results"),
            ..RunOptions::default()
        }
    }

    #[test]
    fn empty_config_gives_defaults() {
        assert_eq!(parse_config(&opts()).unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.toml");
        fs::write(&path, "seed = 5\ntrials = 9\neta = 0.3\n").unwrap();
        let o = RunOptions {
            config: Some(path),
            seed: Some(7),
            ..opts()
        };
        let cfg = parse_config(&o).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.trials, 9);
        assert_eq!(cfg.eta, 0.3);
    }

    #[test]
    fn snr_flags_rebuild_grid() {
        let o = RunOptions {
            snr_min: Some(-4.0),
            snr_max: Some(4.0),
            snr_step: Some(4.0),
            ..opts()
        };
        assert_eq!(parse_config(&o).unwrap().snr_grid_db, vec![-4.0, 0.0, 4.0]);
        let o = RunOptions {
            snr_step: Some(0.0),
            ..opts()
        };
        assert!(matches!(parse_config(&o), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_chain_count_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.toml");
        fs::write(&path, "n_rf = 4\nn_s = 4\n").unwrap();
        let r = parse_config(&RunOptions {
            config: Some(path),
            ..opts()
        });
        assert!(matches!(r, Err(Error::Config(_))));
        assert_eq!(exit_code(&r.map(|_| true)), 2);
    }

    #[test]
    fn missing_file_is_config_error() {
        let r = parse_config(&RunOptions {
            config: Some(PathBuf::from("/nonexistent/scenario.toml")),
            ..opts()
        });
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
