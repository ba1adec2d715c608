//! Property checks that run without producing figures. Backs the `selftest`
//! subcommand.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::array::{build_channel, coherence, steering_vector, AngleDeg, ArrayGeometry, PathParams};
use crate::beamformer::{
    assemble_hybrid, default_xi, joint_fcr, optimal_digital, pattern_count, radar_beamformer,
    SpatialPattern,
};
use crate::error::Result;
use crate::experiments::{fig2_pipeline, ScenarioConfig};
use crate::linalg::{hermitian_eigen, hermitian_residual, logdet_hpd};
use crate::metrics::{mi_general, mi_spim, receive_covariances, NoiseModel};
use crate::radar::{complex_gaussian, sample_covariance, simulate_probing};
use crate::{CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn random_angle(rng: &mut ChaCha8Rng) -> Result<AngleDeg> {
    AngleDeg::new(rng.random_range(-90.0..=90.0))
}

/// Largest power of two not exceeding `C(m, k)`, via Pascal's triangle and
/// repeated doubling.
fn pattern_count_oracle(m: usize, k: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..m {
        let mut next = vec![1u128; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    let c = row[k];
    let mut p = 1u128;
    while p * 2 <= c {
        p *= 2;
    }
    p
}

pub fn steering_norm() -> CheckResult {
    check("steering-norm", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let n = rng.random_range(1..=512);
            let v = steering_vector(ArrayGeometry::new(n)?, random_angle(&mut rng)?);
            worst = worst.max((v.norm() - 1.0).abs());
        }
        Ok((worst < 1e-12, format!("max |‖a‖ - 1| = {worst:.3e}")))
    })
}

pub fn coherence_decay() -> CheckResult {
    check("coherence-decay", || {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (small, large) = (ArrayGeometry::new(16)?, ArrayGeometry::new(1024)?);
        let mut pairs = 0;
        let mut violations = 0;
        while pairs < 100 {
            let (a, b) = (random_angle(&mut rng)?, random_angle(&mut rng)?);
            if (a.rad().sin() - b.rad().sin()).abs() <= 0.05 {
                continue;
            }
            pairs += 1;
            if coherence(large, a, b) >= coherence(small, a, b) {
                violations += 1;
            }
        }
        Ok((violations == 0, format!("{violations}/100 pairs failed to decay")))
    })
}

pub fn covariances_hermitian_psd() -> CheckResult {
    check("covariance-hermitian-psd", || {
        let tx = ArrayGeometry::new(24)?;
        let mut worst_herm: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        for seed in 0..20u64 {
            let s = simulate_probing(tx, AngleDeg::new(-60.0 + 6.0 * seed as f64)?, 1 + seed as usize, 0.3, seed)?;
            let cov = sample_covariance(&s);
            worst_herm = worst_herm.max(hermitian_residual(cov.matrix()));
            min_eig = min_eig.min(hermitian_eigen(cov.matrix()).0[0]);
        }
        let ok = worst_herm < 1e-12 && min_eig >= -1e-9;
        Ok((ok, format!("hermitian residual {worst_herm:.2e}, min eigenvalue {min_eig:.2e}")))
    })
}

pub fn determinant_lemma() -> CheckResult {
    check("determinant-lemma", || {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let n = rng.random_range(1..=12);
            let a = CVector::from_fn(n, |_, _| complex_gaussian(&mut rng, 1.0));
            let lhs = (CMatrix::identity(n, n) + &a * a.adjoint()).determinant();
            let rhs = C64::new(1.0 + a.norm_squared(), 0.0);
            worst = worst.max((lhs - rhs).norm());
        }
        Ok((worst < 1e-10, format!("max |det(I + aaᴴ) - (1 + aᴴa)| = {worst:.3e}")))
    })
}

pub fn spim_single_pattern_identity() -> CheckResult {
    check("spim-k1-identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let (tx, rx) = (ArrayGeometry::new(64)?, ArrayGeometry::new(10)?);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let paths = (0..2)
                .map(|_| PathParams::new(rng.random_range(0.05..1.0), random_angle(&mut rng)?, random_angle(&mut rng)?))
                .collect::<Result<Vec<_>>>()?;
            let ch = build_channel(tx, rx, &paths)?;
            let pat = SpatialPattern::new(vec![rng.random_range(0..2)])?;
            let target = random_angle(&mut rng)?;
            let eta = rng.random_range(0.0..=1.0);
            let noise = NoiseModel::from_snr_db(rng.random_range(-10.0..30.0))?;
            let covs = receive_covariances(&ch, std::slice::from_ref(&pat), target, eta, noise)?;
            let hb = assemble_hybrid(tx, &ch, &pat, target, eta)?;
            let direct = mi_general(ch.h(), hb.f_rf(), hb.f_bb(), noise)?;
            worst = worst.max((mi_spim(&covs, noise)? - direct).abs());
        }
        Ok((worst < 1e-9, format!("max |Δ| = {worst:.3e}")))
    })
}

pub fn pattern_count_combinatorics() -> CheckResult {
    check("pattern-count", || {
        let mut bad = Vec::new();
        for m in 1..=12 {
            for k in 1..=m {
                let got = pattern_count(m, k)?;
                if got != pattern_count_oracle(m, k) || !got.is_power_of_two() {
                    bad.push((m, k));
                }
            }
        }
        Ok((bad.is_empty(), format!("mismatches: {bad:?}")))
    })
}

pub fn joint_endpoints() -> CheckResult {
    check("fcr-endpoints", || {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let (tx, rx) = (ArrayGeometry::new(32)?, ArrayGeometry::new(6)?);
        let mut ok = true;
        for _ in 0..20 {
            let paths = (0..3)
                .map(|_| PathParams::new(rng.random_range(0.05..1.0), random_angle(&mut rng)?, random_angle(&mut rng)?))
                .collect::<Result<Vec<_>>>()?;
            let ch = build_channel(tx, rx, &paths)?;
            let f_opt = optimal_digital(&ch, 2)?;
            let f_r = radar_beamformer(tx, random_angle(&mut rng)?);
            let xi = default_xi(2);
            ok &= joint_fcr(&f_opt, &f_r, 1.0, &xi)?.f_cr() == &f_opt;
            ok &= joint_fcr(&f_opt, &f_r, 0.0, &xi)?.f_cr() == &(&f_r * &xi);
        }
        Ok((ok, "exact equality at eta = 0 and eta = 1".to_string()))
    })
}

/// Runs a short MI sweep on 1 and 4 worker threads and compares bits.
pub fn reproducibility() -> CheckResult {
    check("bit-reproducibility", || {
        let cfg = ScenarioConfig {
            trials: 24,
            snr_grid_db: vec![0.0, 20.0],
            seed: 2024,
            ..ScenarioConfig::default()
        };
        let run_on = |threads: usize| -> Result<Vec<u64>> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| crate::Error::Numeric(e.to_string()))?;
            let r = pool.install(|| fig2_pipeline(&cfg))?;
            Ok(r.points
                .iter()
                .flat_map(|p| [p.mean_spim, p.mean_mmwave_num, p.stderr_spim].map(f64::to_bits))
                .collect())
        };
        let a = run_on(1)?;
        let b = run_on(4)?;
        let c = run_on(4)?;
        Ok((a == b && b == c, format!("{} aggregate words compared", a.len())))
    })
}

/// Log-det route against the eigenvalue route for a random HPD matrix.
pub fn logdet_consistency() -> CheckResult {
    check("logdet-consistency", || {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let n = rng.random_range(1..=10);
            let a = CMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng, 1.0));
            let m = &a * a.adjoint() + CMatrix::identity(n, n).scale(0.1);
            let (vals, _) = hermitian_eigen(&m);
            let eig = DVector::from_vec(vals).map(f64::ln).sum();
            worst = worst.max((logdet_hpd(&m)? - eig).abs());
        }
        Ok((worst < 1e-9, format!("max |Δ| = {worst:.3e}")))
    })
}

pub fn run_selftest() -> Vec<CheckResult> {
    vec![
        steering_norm(),
        coherence_decay(),
        covariances_hermitian_psd(),
        determinant_lemma(),
        spim_single_pattern_identity(),
        pattern_count_combinatorics(),
        joint_endpoints(),
        logdet_consistency(),
        reproducibility(),
    ]
}
