//! Closed-form and channel-based MI for a single channel, then a deterministic
//! SNR sweep.
//!
//! cargo run --example mutual_information

use spim_isac::array::{build_channel, ArrayGeometry, AngleDeg, PathParams};
use spim_isac::beamformer::enumerate_patterns;
use spim_isac::metrics::{
    mi_mmwave_closed_form, mi_mmwave_numerical, mi_spim, mi_sweep, receive_covariances, NoiseModel, SweepKind,
    SweepModel, SweepPoint,
};

fn main() -> spim_isac::Result<()> {
    let tx = ArrayGeometry::new(128)?;
    let rx = ArrayGeometry::new(10)?;
    let target = AngleDeg::new(40.0)?;
    let angles = [(AngleDeg::new(-30.0)?, AngleDeg::new(20.0)?), (AngleDeg::new(10.0)?, AngleDeg::new(-50.0)?)];
    let paths: Vec<_> = angles
        .iter()
        .map(|&(d, a)| PathParams::new(0.5, d, a))
        .collect::<Result<_, _>>()?;
    let ch = build_channel(tx, rx, &paths)?;

    let noise = NoiseModel::from_snr_db(20.0)?;
    let patterns = enumerate_patterns(2, 1)?;
    let covs = receive_covariances(&ch, &patterns, target, 0.5, noise)?;
    println!("20 dB, eta 0.5");
    println!("  closed form      {:.4}", mi_mmwave_closed_form(0.5, 0.5, noise)?);
    println!("  mmWave numerical {:.4}", mi_mmwave_numerical(&ch, target, 0.5, noise)?);
    println!("  SPIM             {:.4}", mi_spim(&covs, noise)?);

    let model = SweepModel::Channel { tx, rx, n_rf: 2, target, angles: angles.to_vec() };
    let base = SweepPoint { snr_db: 0.0, gamma1: 0.5, eta: 0.5 };
    let axis: Vec<f64> = (0..=4).map(|k| 5.0 * k as f64).collect();
    println!("{:>6} {:>8} {:>8} {:>8}", "snr", "spim", "mmw-num", "mmw-cf");
    for row in mi_sweep(&model, base, SweepKind::Snr, &axis)? {
        println!(
            "{:>6} {:>8.4} {:>8.4} {:>8.4}",
            row.axis_value,
            row.mi_spim.unwrap_or(f64::NAN),
            row.mi_mmwave_num.unwrap_or(f64::NAN),
            row.mi_mmwave_cf
        );
    }
    Ok(())
}
