use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spim_isac::array::{build_channel, coherence, ArrayGeometry, AngleDeg, PathParams};
use spim_isac::beamformer::optimal_digital;
use spim_isac::linalg::log2det_hpd;
use spim_isac::metrics::{mi_mmwave_closed_form, mi_mmwave_numerical, NoiseModel};
use spim_isac::radar::{default_grid, estimate_doa, sample_covariance, simulate_probing, CovarianceEstimate};
use spim_isac::CMatrix;

fn angle(rng: &mut ChaCha8Rng) -> AngleDeg {
    AngleDeg::new(rng.random_range(-90.0..=90.0)).unwrap()
}

fn mean_closed_form_error(n_t: usize, draws: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = NoiseModel::from_snr_db(20.0).unwrap();
    let target = AngleDeg::new(40.0).unwrap();
    let tx = ArrayGeometry::new(n_t).unwrap();
    let rx = ArrayGeometry::new(10).unwrap();
    let cf = mi_mmwave_closed_form(0.5, 0.5, noise).unwrap();
    let total: f64 = (0..draws)
        .map(|_| {
            let paths: Vec<_> = (0..2)
                .map(|_| PathParams::new(0.5, angle(&mut rng), angle(&mut rng)).unwrap())
                .collect();
            let ch = build_channel(tx, rx, &paths).unwrap();
            (mi_mmwave_numerical(&ch, target, 0.5, noise).unwrap() - cf).abs()
        })
        .sum();
    total / draws as f64
}

#[test]
fn closed_form_error_shrinks_with_array_size() {
    let small = mean_closed_form_error(16, 100);
    let large = mean_closed_form_error(1024, 100);
    assert!(large < 0.05, "N_T=1024 mean error {large}");
    assert!(large < small, "N_T=16 {small} vs N_T=1024 {large}");
}

fn random_orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let g = DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    g.qr().q()
}

#[test]
fn optimal_digital_beats_random_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tx = ArrayGeometry::new(16).unwrap();
    let rx = ArrayGeometry::new(10).unwrap();
    let paths = vec![
        PathParams::new(0.7, AngleDeg::new(-20.0).unwrap(), AngleDeg::new(10.0).unwrap()).unwrap(),
        PathParams::new(0.3, AngleDeg::new(35.0).unwrap(), AngleDeg::new(-45.0).unwrap()).unwrap(),
    ];
    let ch = build_channel(tx, rx, &paths).unwrap();
    let sigma2 = 0.1;
    let mi = |f: &CMatrix| {
        let g = ch.h() * f;
        let m = CMatrix::identity(10, 10) + (&g * g.adjoint()).scale(1.0 / sigma2);
        log2det_hpd(&m).unwrap()
    };
    let best = mi(&optimal_digital(&ch, 2).unwrap());
    for _ in 0..1000 {
        let cand = random_orthonormal(&mut rng, 16, 2);
        assert!(mi(&cand) <= best + 1e-9);
    }
}

#[test]
fn music_estimate_is_scale_invariant() {
    let tx = ArrayGeometry::new(32).unwrap();
    let grid = default_grid();
    let snaps = simulate_probing(tx, AngleDeg::new(-12.3).unwrap(), 50, 0.1, 5).unwrap();
    let cov = sample_covariance(&snaps);
    let base = estimate_doa(&cov, tx, 1, &grid).unwrap();
    for c in [1e-6, 0.5, 3.0, 1e6] {
        let scaled = CovarianceEstimate::new(cov.matrix().scale(c)).unwrap();
        assert_eq!(estimate_doa(&scaled, tx, 1, &grid).unwrap(), base, "scale {c}");
    }
}

#[test]
fn coherence_obeys_sidelobe_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [8, 64, 1024] {
        let geom = ArrayGeometry::new(n).unwrap();
        for _ in 0..200 {
            let (a, b) = (angle(&mut rng), angle(&mut rng));
            let x = std::f64::consts::PI * (a.rad().sin() - b.rad().sin());
            let half = (x / 2.0).sin().abs();
            if half < 1e-3 {
                continue;
            }
            let bound = 1.0 / (n as f64 * half);
            assert!(coherence(geom, a, b) <= bound + 1e-12, "n={n} {a} {b}");
        }
    }
}
