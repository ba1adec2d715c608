//! Mutual information of the conventional and index-modulated ISAC links.
//!
//! Every determinant goes through a Cholesky log-det; `N_R = 10` receive
//! antennas at low noise easily push raw determinants out of `f64` range.
//!
//! `mi_spim` is an asymptotic approximation. At low SNR it can fall below the
//! best single-pattern value; it is reported as computed, without clamping.
//! Its constant term `log₂(K / (2σ²)^{N_R})` is used exactly as written, which
//! makes the `K = 1` case collapse to the plain log-det rate.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::array::{build_channel, AngleDeg, ArrayGeometry, ChannelRealization, PathParams};
use crate::beamformer::{assemble_hybrid, enumerate_patterns, SpatialPattern};
use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_residual, log2det_hpd, logdet_hpd, real};
use crate::CMatrix;

/// Receiver noise, `σ_n²` per antenna. SNR is `1/σ_n²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(domain(format!("noise variance {variance} must be finite and > 0")));
        }
        Ok(Self { variance })
    }

    /// `σ_n² = 10^(-snr_db/10)`.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(10f64.powf(-snr_db / 10.0))
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn snr_db(&self) -> f64 {
        -10.0 * self.variance.log10()
    }
}

/// `log₂ det(I + (1/σ²) H F_RF F_BB F_BBᴴ F_RFᴴ Hᴴ)` in bits.
pub fn mi_general(h: &CMatrix, f_rf: &CMatrix, f_bb: &CMatrix, noise: NoiseModel) -> Result<f64> {
    if h.ncols() != f_rf.nrows() || f_rf.ncols() != f_bb.nrows() {
        return Err(Error::Dimension(format!(
            "H {}x{}, F_RF {}x{}, F_BB {}x{}",
            h.nrows(),
            h.ncols(),
            f_rf.nrows(),
            f_rf.ncols(),
            f_bb.nrows(),
            f_bb.ncols()
        )));
    }
    let g = h * f_rf * f_bb;
    let m = CMatrix::identity(h.nrows(), h.nrows()) + (&g * g.adjoint()).scale(1.0 / noise.variance);
    Ok(log2det_hpd(&m)?.max(0.0))
}

/// Numerical MI of the conventional design: the radar beam plus the strongest
/// path only (pattern `{1}`).
pub fn mi_mmwave_numerical(
    channel: &ChannelRealization,
    target: AngleDeg,
    eta: f64,
    noise: NoiseModel,
) -> Result<f64> {
    let strongest = SpatialPattern::new(vec![0])?;
    let hb = assemble_hybrid(channel.tx(), channel, &strongest, target, eta)?;
    mi_general(channel.h(), hb.f_rf(), hb.f_bb(), noise)
}

/// Large-array limit of [`mi_mmwave_numerical`]: `log₂(1 + η²γ₁/σ²)`.
pub fn mi_mmwave_closed_form(gamma1: f64, eta: f64, noise: NoiseModel) -> Result<f64> {
    if !(gamma1 >= 0.0) {
        return Err(domain(format!("gamma1 = {gamma1} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("trade-off eta = {eta} outside [0, 1]")));
    }
    Ok((eta * eta * gamma1 / noise.variance).ln_1p() / std::f64::consts::LN_2)
}

/// Receive covariances `Σ_i`, one per spatial pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCovariances {
    sigmas: Vec<CMatrix>,
}

impl PatternCovariances {
    /// Wraps externally built covariances after checking shape and symmetry.
    pub fn new(sigmas: Vec<CMatrix>) -> Result<Self> {
        let first = sigmas.first().ok_or_else(|| domain("no pattern covariances"))?;
        let n = first.nrows();
        for s in &sigmas {
            if s.nrows() != n || s.ncols() != n {
                return Err(Error::Dimension("pattern covariances differ in shape".into()));
            }
            if hermitian_residual(s) > 1e-12 * s.norm().max(1.0) {
                return Err(domain("pattern covariance is not Hermitian"));
            }
        }
        Ok(Self { sigmas })
    }

    pub fn sigmas(&self) -> &[CMatrix] {
        &self.sigmas
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }
}

/// `Σ_i = H F_RF^(i) F_BB F_BBᴴ F_RF^(i)ᴴ Hᴴ + σ² I` for each pattern.
pub fn receive_covariances(
    channel: &ChannelRealization,
    patterns: &[SpatialPattern],
    target: AngleDeg,
    eta: f64,
    noise: NoiseModel,
) -> Result<PatternCovariances> {
    covariances_with(channel, patterns, target, eta, noise, false)
}

pub(crate) fn covariances_with(
    channel: &ChannelRealization,
    patterns: &[SpatialPattern],
    target: AngleDeg,
    eta: f64,
    noise: NoiseModel,
    normalize_power: bool,
) -> Result<PatternCovariances> {
    if patterns.is_empty() {
        return Err(domain("no spatial patterns"));
    }
    let n_r = channel.rx().num_elements();
    let sigmas = patterns
        .iter()
        .map(|pat| {
            let mut hb = assemble_hybrid(channel.tx(), channel, pat, target, eta)?;
            if normalize_power {
                hb = hb.power_normalized();
            }
            let g = channel.h() * hb.precoder();
            let mut s = &g * g.adjoint();
            for k in 0..n_r {
                s[(k, k)] += real(noise.variance);
            }
            // exact Hermitian symmetry
            Ok((&s + s.adjoint()).scale(0.5))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PatternCovariances { sigmas })
}

/// Asymptotic MI of the index-modulated link:
/// `log₂(K/(2σ²)^{N_R}) - (1/K) Σ_i log₂ Σ_j det(Σ_i + Σ_j)⁻¹`.
pub fn mi_spim(covs: &PatternCovariances, noise: NoiseModel) -> Result<f64> {
    let k = covs.len();
    if k == 0 {
        return Err(domain("no pattern covariances"));
    }
    let n_r = covs.sigmas[0].nrows() as f64;
    let ln2 = std::f64::consts::LN_2;

    let mut acc = 0.0;
    for si in &covs.sigmas {
        // log Σ_j exp(-ln det(Σ_i + Σ_j)), shifted for stability
        let neg_ld = covs
            .sigmas
            .iter()
            .map(|sj| logdet_hpd(&(si + sj)).map(|ld| -ld))
            .collect::<Result<Vec<_>>>()?;
        let peak = neg_ld.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = peak + neg_ld.iter().map(|v| (v - peak).exp()).sum::<f64>().ln();
        acc += lse / ln2;
    }
    let constant = (k as f64).log2() - n_r * (2.0 * noise.variance).log2();
    let mi = constant - acc / k as f64;
    if !mi.is_finite() {
        return Err(Error::Numeric("index-modulated MI is not finite".into()));
    }
    Ok(mi)
}

/// Axis of an MI sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Snr,
    Gamma1,
    Eta,
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr" => Ok(Self::Snr),
            "gamma1" => Ok(Self::Gamma1),
            "eta" => Ok(Self::Eta),
            other => Err(domain(format!("unknown sweep kind {other:?}"))),
        }
    }
}

/// Fixed operating point of a sweep; the swept coordinate is overwritten.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub gamma1: f64,
    pub eta: f64,
}

/// What a sweep evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepModel {
    /// Closed form only.
    ClosedForm,
    /// A fixed-geometry channel; gains follow from `gamma1` (see
    /// [`gains_for_gamma1`]).
    Channel {
        tx: ArrayGeometry,
        rx: ArrayGeometry,
        n_rf: usize,
        target: AngleDeg,
        /// `(dod, doa)` per path, in nominal order.
        angles: Vec<(AngleDeg, AngleDeg)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub mi_spim: Option<f64>,
    pub mi_mmwave_num: Option<f64>,
    pub mi_mmwave_cf: f64,
}

/// Path gains with the first path at `gamma1` and the remaining power
/// `1 - gamma1` split evenly over the other paths.
pub fn gains_for_gamma1(gamma1: f64, num_paths: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&gamma1) {
        return Err(domain(format!("gamma1 = {gamma1} outside [0, 1]")));
    }
    match num_paths {
        0 => Err(domain("need at least one path")),
        1 => Ok(vec![gamma1]),
        m => {
            let rest = ((1.0 - gamma1) / (m - 1) as f64).max(0.0);
            Ok(std::iter::once(gamma1).chain(std::iter::repeat_n(rest, m - 1)).collect())
        }
    }
}

/// Evaluates the MI metrics along one axis with everything else fixed.
pub fn mi_sweep(
    model: &SweepModel,
    base: SweepPoint,
    kind: SweepKind,
    axis: &[f64],
) -> Result<Vec<SweepRow>> {
    axis.iter()
        .map(|&x| {
            let mut pt = base;
            match kind {
                SweepKind::Snr => pt.snr_db = x,
                SweepKind::Gamma1 => pt.gamma1 = x,
                SweepKind::Eta => pt.eta = x,
            }
            let noise = NoiseModel::from_snr_db(pt.snr_db)?;
            let (mi_spim, mi_mmwave_num, gamma1) = match model {
                SweepModel::ClosedForm => (None, None, pt.gamma1),
                SweepModel::Channel {
                    tx,
                    rx,
                    n_rf,
                    target,
                    angles,
                } => {
                    let gains = gains_for_gamma1(pt.gamma1, angles.len())?;
                    let paths = gains
                        .iter()
                        .zip(angles)
                        .map(|(&g, &(dod, doa))| PathParams::new(g, dod, doa))
                        .collect::<Result<Vec<_>>>()?;
                    let ch = build_channel(*tx, *rx, &paths)?;
                    let pats = enumerate_patterns(angles.len(), n_rf.saturating_sub(1))?;
                    let covs = receive_covariances(&ch, &pats, *target, pt.eta, noise)?;
                    (
                        Some(mi_spim(&covs, noise)?),
                        Some(mi_mmwave_numerical(&ch, *target, pt.eta, noise)?),
                        ch.paths()[0].gain(),
                    )
                }
            };
            Ok(SweepRow {
                axis_value: x,
                mi_spim,
                mi_mmwave_num,
                mi_mmwave_cf: mi_mmwave_closed_form(gamma1, pt.eta, noise)?,
            })
        })
        .collect()
}
