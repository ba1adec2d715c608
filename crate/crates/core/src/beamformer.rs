//! Spatial patterns and the hybrid, joint and fully digital beamformers.
//!
//! With `N_RF` RF chains the first analog column always points at the radar
//! target and the other `N_RF - 1` columns point along a subset of the
//! communication paths. Such a subset is a [`SpatialPattern`]; the index of the
//! pattern in use is the extra information carried by path index modulation.
//!
//! The baseband stage is `blkdiag{(1-η), η I}`. Some write-ups use `(η-1)`
//! for the radar entry; the sign cancels in `F_BB F_BBᴴ`, so transmit
//! covariance, beampattern and mutual information are unaffected.

use std::fmt;

use nalgebra::RowDVector;
use serde::Serialize;

use crate::array::{steering_vector, AngleDeg, ArrayGeometry, ChannelRealization};
use crate::error::{domain, Error, Result};
use crate::linalg::real;
use crate::{CMatrix, CVector, C64};

/// `C(n, k)` in exact integer arithmetic, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral at each step
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

/// Number of usable spatial patterns, `K = 2^⌊log₂ C(M, N̄_RF)⌋`.
pub fn pattern_count(num_paths: usize, n_rf_comm: usize) -> Result<u128> {
    if n_rf_comm == 0 || n_rf_comm > num_paths {
        return Err(domain(format!(
            "need 1 <= communication RF chains ({n_rf_comm}) <= paths ({num_paths})"
        )));
    }
    let c = binomial(num_paths as u64, n_rf_comm as u64)
        .ok_or_else(|| domain("path combinatorics overflow u128"))?;
    let log2_floor = 127 - c.leading_zeros();
    Ok(1u128 << log2_floor)
}

/// Subset of communication paths driven by the analog beamformer.
///
/// Indices are 0-based into the gain-sorted path list of a channel and are
/// strictly increasing. `Display` prints them 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SpatialPattern {
    selected_paths: Vec<usize>,
}

impl SpatialPattern {
    pub fn new(selected_paths: Vec<usize>) -> Result<Self> {
        if selected_paths.is_empty() {
            return Err(domain("spatial pattern selects no paths"));
        }
        if selected_paths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("spatial pattern indices must be strictly increasing"));
        }
        Ok(Self { selected_paths })
    }

    pub fn selected_paths(&self) -> &[usize] {
        &self.selected_paths
    }

    pub fn len(&self) -> usize {
        self.selected_paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected_paths.is_empty()
    }
}

impl fmt::Display for SpatialPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.selected_paths.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The first `K` size-`n_rf_comm` subsets of `0..num_paths` in lexicographic
/// order. Paths are gain-sorted, so the prefix favours the strongest paths.
pub fn enumerate_patterns(num_paths: usize, n_rf_comm: usize) -> Result<Vec<SpatialPattern>> {
    let k = pattern_count(num_paths, n_rf_comm)?;
    let k = usize::try_from(k).map_err(|_| domain("pattern count does not fit in memory"))?;
    let mut out = Vec::with_capacity(k);
    let mut idx: Vec<usize> = (0..n_rf_comm).collect();
    while out.len() < k {
        out.push(SpatialPattern {
            selected_paths: idx.clone(),
        });
        // advance to the next combination
        let mut pos = n_rf_comm;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if idx[pos] < num_paths - n_rf_comm + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..n_rf_comm {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(out)
}

/// Radar-only beamformer: the transmit response toward the (estimated) target.
pub fn radar_beamformer(tx: ArrayGeometry, target: AngleDeg) -> CVector {
    steering_vector(tx, target)
}

/// Analog plus baseband beamformer for one spatial pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridBeamformer {
    f_rf: CMatrix,
    f_bb: CMatrix,
    pattern: SpatialPattern,
    eta: f64,
}

impl HybridBeamformer {
    /// Analog stage, `N_T × N_RF`. Column 0 is the radar beam.
    pub fn f_rf(&self) -> &CMatrix {
        &self.f_rf
    }

    /// Baseband stage, `N_RF × N_S`.
    pub fn f_bb(&self) -> &CMatrix {
        &self.f_bb
    }

    pub fn pattern(&self) -> &SpatialPattern {
        &self.pattern
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_rf(&self) -> usize {
        self.f_rf.ncols()
    }

    pub fn n_streams(&self) -> usize {
        self.f_bb.ncols()
    }

    /// The cascaded precoder `F_RF F_BB`.
    pub fn precoder(&self) -> CMatrix {
        &self.f_rf * &self.f_bb
    }

    /// Copy with the baseband stage rescaled so that `‖F_RF F_BB‖_F = N_S`.
    ///
    /// The closed-form design leaves the power constraint unenforced; rescaling
    /// changes the effective trade-off weights, so it is opt-in.
    pub fn power_normalized(&self) -> Self {
        let norm = self.precoder().norm();
        let mut out = self.clone();
        if norm > 0.0 {
            out.f_bb = out.f_bb.scale(self.n_streams() as f64 / norm);
        }
        out
    }
}

/// Assembles `F_RF = [f_R, a_T(θ_p) for p in pattern]` and
/// `F_BB = blkdiag{(1-η), η I}`.
pub fn assemble_hybrid(
    tx: ArrayGeometry,
    channel: &ChannelRealization,
    pattern: &SpatialPattern,
    target_est: AngleDeg,
    eta: f64,
) -> Result<HybridBeamformer> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("trade-off eta = {eta} outside [0, 1]")));
    }
    if tx != channel.tx() {
        return Err(Error::Dimension(format!(
            "transmit array has {} elements, channel expects {}",
            tx.num_elements(),
            channel.tx().num_elements()
        )));
    }
    if let Some(&bad) = pattern.selected_paths().iter().find(|&&p| p >= channel.num_paths()) {
        return Err(domain(format!(
            "pattern index {} out of range for {} paths",
            bad + 1,
            channel.num_paths()
        )));
    }

    let n_rf = pattern.len() + 1;
    let mut f_rf = CMatrix::zeros(tx.num_elements(), n_rf);
    f_rf.set_column(0, &radar_beamformer(tx, target_est));
    for (col, &p) in pattern.selected_paths().iter().enumerate() {
        f_rf.set_column(col + 1, &steering_vector(tx, channel.paths()[p].dod));
    }

    let mut f_bb = CMatrix::zeros(n_rf, n_rf);
    f_bb[(0, 0)] = real(1.0 - eta);
    for j in 1..n_rf {
        f_bb[(j, j)] = real(eta);
    }

    Ok(HybridBeamformer {
        f_rf,
        f_bb,
        pattern: pattern.clone(),
        eta,
    })
}

/// Fully digital communication-only precoder: the right singular vectors of
/// `H` for the `n_streams` largest singular values.
pub fn optimal_digital(channel: &ChannelRealization, n_streams: usize) -> Result<CMatrix> {
    let h = channel.h();
    let max = h.nrows().min(h.ncols());
    if n_streams == 0 || n_streams > max {
        return Err(domain(format!("n_streams = {n_streams} must be in 1..={max}")));
    }
    let svd = h.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not return right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let cols: Vec<CVector> = order[..n_streams]
        .iter()
        .map(|&i| v_t.row(i).adjoint())
        .collect();
    Ok(CMatrix::from_columns(&cols))
}

/// Default ξ: the first canonical row vector.
pub fn default_xi(n_streams: usize) -> RowDVector<C64> {
    let mut xi = RowDVector::zeros(n_streams);
    if n_streams > 0 {
        xi[0] = real(1.0);
    }
    xi
}

/// Joint radar-communications beamformer `F_CR = η F_opt + (1-η) f_R ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointBeamformer {
    f_cr: CMatrix,
    xi: RowDVector<C64>,
}

impl JointBeamformer {
    pub fn f_cr(&self) -> &CMatrix {
        &self.f_cr
    }

    pub fn xi(&self) -> &RowDVector<C64> {
        &self.xi
    }

    /// `‖F_CR - F_RF F_BB‖_F`, the distance the joint design problem minimizes.
    pub fn distance_to(&self, hb: &HybridBeamformer) -> Result<f64> {
        let p = hb.precoder();
        if p.shape() != self.f_cr.shape() {
            return Err(Error::Dimension(format!(
                "hybrid precoder {:?} vs joint beamformer {:?}",
                p.shape(),
                self.f_cr.shape()
            )));
        }
        Ok((&self.f_cr - p).norm())
    }
}

pub fn joint_fcr(
    f_opt: &CMatrix,
    f_r: &CVector,
    eta: f64,
    xi: &RowDVector<C64>,
) -> Result<JointBeamformer> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("trade-off eta = {eta} outside [0, 1]")));
    }
    if (xi.norm() - 1.0).abs() > 1e-9 {
        return Err(domain(format!("xi must have unit norm, got {}", xi.norm())));
    }
    if xi.len() != f_opt.ncols() || f_r.len() != f_opt.nrows() {
        return Err(Error::Dimension(format!(
            "F_opt is {}x{}, f_R has {} entries, xi has {}",
            f_opt.nrows(),
            f_opt.ncols(),
            f_r.len(),
            xi.len()
        )));
    }
    let f_cr = f_opt.scale(eta) + (f_r * xi).scale(1.0 - eta);
    Ok(JointBeamformer {
        f_cr,
        xi: xi.clone(),
    })
}

/// Residuals of the hybrid design against the joint problem's constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintReport {
    /// `max |(|F_RF[n, r]| - 1/√N_T)|`.
    pub modulus_residual: f64,
    /// Communication columns are the responses of some enumerated pattern.
    pub admissible: bool,
    /// `‖F_RF F_BB‖_F`.
    pub power_frobenius: f64,
    /// `‖F_RF F_BB‖_F - N_S`. Reported, not enforced.
    pub power_deviation: f64,
}

impl ConstraintReport {
    pub fn constant_modulus_ok(&self) -> bool {
        self.modulus_residual < 1e-12
    }
}

pub fn check_constraints(
    hb: &HybridBeamformer,
    channel: &ChannelRealization,
    patterns: &[SpatialPattern],
) -> ConstraintReport {
    let n_t = hb.f_rf.nrows();
    let target_mod = 1.0 / (n_t as f64).sqrt();
    let modulus_residual = hb
        .f_rf
        .iter()
        .map(|z| (z.norm() - target_mod).abs())
        .fold(0.0, f64::max);

    let comm = hb.f_rf.columns(1, hb.n_rf() - 1);
    let admissible = patterns.iter().any(|pat| {
        pat.len() == comm.ncols()
            && pat.selected_paths().iter().zip(comm.column_iter()).all(|(&p, col)| {
                channel.paths().get(p).is_some_and(|path| {
                    let a = steering_vector(channel.tx(), path.dod);
                    a.len() == col.len()
                        && (col - a).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-9
                })
            })
    });

    let power_frobenius = hb.precoder().norm();
    ConstraintReport {
        modulus_residual,
        admissible,
        power_frobenius,
        power_deviation: power_frobenius - hb.n_streams() as f64,
    }
}
