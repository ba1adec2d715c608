//! Radar side: search-phase probing, MUSIC direction finding, transmit
//! covariance and beampattern.
//!
//! The two-way probing response is `a(Φ) a(Φ)ᵀ` applied to the probing
//! vector. Probing is radiated from the reference element (`√N_T e₁`), so the
//! echo of every snapshot is `a(Φ) r(t)` up to a unit-modulus factor, and the
//! probing SNR is `1 / noise_var` for a unit-norm response.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::array::{steering_vector, AngleDeg, ArrayGeometry};
use crate::beamformer::HybridBeamformer;
use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_residual};
use crate::{CMatrix, CVector, C64};

/// Which transpose forms the two-way response `a(Φ) a(Φ)^{T|H}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbingResponse {
    #[default]
    Transpose,
    ConjugateTranspose,
}

/// Received probing echoes, one column per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbingSnapshots {
    samples: CMatrix,
    true_target: AngleDeg,
    noise_var: f64,
}

impl ProbingSnapshots {
    pub fn samples(&self) -> &CMatrix {
        &self.samples
    }

    pub fn true_target(&self) -> AngleDeg {
        self.true_target
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn num_snapshots(&self) -> usize {
        self.samples.ncols()
    }
}

/// Draws a standard circular complex Gaussian sample scaled to variance `var`.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

pub fn simulate_probing(
    tx: ArrayGeometry,
    target: AngleDeg,
    t_r: usize,
    noise_var: f64,
    seed: u64,
) -> Result<ProbingSnapshots> {
    simulate_probing_with(tx, target, t_r, noise_var, seed, ProbingResponse::default())
}

pub fn simulate_probing_with(
    tx: ArrayGeometry,
    target: AngleDeg,
    t_r: usize,
    noise_var: f64,
    seed: u64,
    response: ProbingResponse,
) -> Result<ProbingSnapshots> {
    if t_r == 0 {
        return Err(domain("need at least one probing snapshot"));
    }
    if !(noise_var >= 0.0) || !noise_var.is_finite() {
        return Err(domain(format!("noise variance {noise_var} must be finite and >= 0")));
    }
    let n = tx.num_elements();
    let a = steering_vector(tx, target);
    // a^{T|H} (√N e₁)
    let gain = match response {
        ProbingResponse::Transpose => a[0],
        ProbingResponse::ConjugateTranspose => a[0].conj(),
    } * (n as f64).sqrt();
    let echo: CVector = a * gain;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut samples = CMatrix::zeros(n, t_r);
    for t in 0..t_r {
        let r = complex_gaussian(&mut rng, 1.0);
        for i in 0..n {
            samples[(i, t)] = echo[i] * r + complex_gaussian(&mut rng, noise_var);
        }
    }
    Ok(ProbingSnapshots {
        samples,
        true_target: target,
        noise_var,
    })
}

/// Sample covariance of the probing echoes.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    r: CMatrix,
}

impl CovarianceEstimate {
    /// Wraps a matrix, checking that it is Hermitian.
    pub fn new(r: CMatrix) -> Result<Self> {
        if !r.is_square() {
            return Err(Error::Dimension("covariance must be square".into()));
        }
        let scale = r.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if hermitian_residual(&r) > 1e-12 * scale {
            return Err(domain("covariance is not Hermitian"));
        }
        Ok(Self { r })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.r
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.r).0[0]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { r: self.r.scale(c) }
    }
}

/// `(1/T_R) Σ_t ȳ(t) ȳ(t)ᴴ`.
pub fn sample_covariance(snaps: &ProbingSnapshots) -> CovarianceEstimate {
    let y = &snaps.samples;
    let r = (y * y.adjoint()).scale(1.0 / y.ncols() as f64);
    CovarianceEstimate { r }
}

/// Uniform angle grid from `min` to `max` inclusive.
///
/// When `1/step` is an integer the points are computed as `k / (1/step)` so
/// that decimal angles such as 40.0 land exactly on the grid.
pub fn uniform_grid(min: f64, max: f64, step: f64) -> Result<Vec<AngleDeg>> {
    if !(step > 0.0) || max < min {
        return Err(domain(format!("bad grid [{min}, {max}] step {step}")));
    }
    AngleDeg::new(min)?;
    AngleDeg::new(max)?;
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    let inv = 1.0 / step;
    let exact = (inv - inv.round()).abs() < 1e-9;
    (0..count)
        .map(|k| {
            let v = if exact {
                ((min * inv).round() + k as f64) / inv.round()
            } else {
                min + k as f64 * step
            };
            AngleDeg::new(v.clamp(-90.0, 90.0))
        })
        .collect()
}

/// [-90°, 90°] in 0.1° steps (1801 points).
pub fn default_grid() -> Vec<AngleDeg> {
    uniform_grid(-90.0, 90.0, 0.1).expect("static grid is valid")
}

fn steering_matrix(geometry: ArrayGeometry, grid: &[AngleDeg]) -> CMatrix {
    let cols: Vec<CVector> = grid.iter().map(|&g| steering_vector(geometry, g)).collect();
    CMatrix::from_columns(&cols)
}

/// MUSIC pseudospectrum `1 / ‖E_nᴴ a(θ)‖²` over `grid`.
pub fn music_spectrum(
    r: &CovarianceEstimate,
    geometry: ArrayGeometry,
    num_sources: usize,
    grid: &[AngleDeg],
) -> Result<Vec<(AngleDeg, f64)>> {
    let n = geometry.num_elements();
    if r.r.nrows() != n {
        return Err(Error::Dimension(format!(
            "covariance is {0}x{0}, array has {n} elements",
            r.r.nrows()
        )));
    }
    if num_sources == 0 || num_sources >= n {
        return Err(domain(format!("num_sources = {num_sources} must be in 1..{n}")));
    }
    if grid.is_empty() {
        return Err(domain("empty angle grid"));
    }
    let (_, vecs) = hermitian_eigen(&r.r);
    let noise = vecs.columns(0, n - num_sources);
    let proj = noise.adjoint() * steering_matrix(geometry, grid);
    Ok(grid
        .iter()
        .zip(proj.column_iter())
        .map(|(&g, col)| (g, 1.0 / col.norm_squared().max(f64::MIN_POSITIVE)))
        .collect())
}

/// Grid angle of the largest MUSIC pseudospectrum value.
pub fn estimate_doa(
    r: &CovarianceEstimate,
    geometry: ArrayGeometry,
    num_sources: usize,
    grid: &[AngleDeg],
) -> Result<AngleDeg> {
    let spec = music_spectrum(r, geometry, num_sources, grid)?;
    Ok(argmax(&spec))
}

pub(crate) fn argmax(curve: &[(AngleDeg, f64)]) -> AngleDeg {
    let mut best = curve[0];
    for &p in &curve[1..] {
        if p.1 > best.1 {
            best = p;
        }
    }
    best.0
}

/// `R_x = F_RF F_BB F_BBᴴ F_RFᴴ`.
pub fn transmit_covariance(hb: &HybridBeamformer) -> CMatrix {
    let p = hb.precoder();
    &p * p.adjoint()
}

pub(crate) fn beampattern_complex(
    hb: &HybridBeamformer,
    geometry: ArrayGeometry,
    grid: &[AngleDeg],
) -> Result<Vec<C64>> {
    let rx = transmit_covariance(hb);
    if rx.nrows() != geometry.num_elements() {
        return Err(Error::Dimension(format!(
            "beamformer drives {} antennas, array has {}",
            rx.nrows(),
            geometry.num_elements()
        )));
    }
    let a = steering_matrix(geometry, grid);
    let ra = &rx * &a;
    Ok(a.column_iter().zip(ra.column_iter()).map(|(ac, rc)| ac.dotc(&rc)).collect())
}

/// Transmit beampattern `B(θ) = a(θ)ᴴ R_x a(θ)` over `grid`.
pub fn beampattern(
    hb: &HybridBeamformer,
    geometry: ArrayGeometry,
    grid: &[AngleDeg],
) -> Result<Vec<(AngleDeg, f64)>> {
    let q = beampattern_complex(hb, geometry, grid)?;
    Ok(grid.iter().zip(q).map(|(&g, z)| (g, z.re)).collect())
}

/// Per-curve normalization to a 0 dB peak, floored at `floor_db`.
pub fn normalize_db(values: &[f64], floor_db: f64) -> Vec<f64> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    values
        .iter()
        .map(|&v| {
            if max <= 0.0 || v <= 0.0 {
                floor_db
            } else {
                (10.0 * (v / max).log10()).max(floor_db)
            }
        })
        .collect()
}
