//! Enumerates spatial patterns and assembles the hybrid beamformer for each,
//! then compares it with the fully digital joint design.
//!
//! cargo run --example hybrid_beamformer

use spim_isac::array::{build_channel, ArrayGeometry, AngleDeg, PathParams};
use spim_isac::beamformer::{
    assemble_hybrid, check_constraints, default_xi, enumerate_patterns, joint_fcr, optimal_digital,
    pattern_count, radar_beamformer,
};

fn main() -> spim_isac::Result<()> {
    let tx = ArrayGeometry::new(128)?;
    let rx = ArrayGeometry::new(10)?;
    let target = AngleDeg::new(40.0)?;
    let paths = [
        PathParams::new(0.5, AngleDeg::new(50.0)?, AngleDeg::new(-20.0)?)?,
        PathParams::new(0.5, AngleDeg::new(60.0)?, AngleDeg::new(15.0)?)?,
    ];
    let ch = build_channel(tx, rx, &paths)?;

    println!("K = {} patterns for M = 2, N_RF = 2", pattern_count(2, 1)?);
    for m in [4, 8, 12] {
        println!("K = {} for M = {m}, N_RF = 3", pattern_count(m, 2)?);
    }

    let patterns = enumerate_patterns(2, 1)?;
    let f_opt = optimal_digital(&ch, 2)?;
    let f_r = radar_beamformer(tx, target);
    for eta in [0.0, 0.5, 1.0] {
        let joint = joint_fcr(&f_opt, &f_r, eta, &default_xi(2))?;
        for pat in &patterns {
            let hb = assemble_hybrid(tx, &ch, pat, target, eta)?;
            let rep = check_constraints(&hb, &ch, &patterns);
            println!(
                "eta {eta:.1} pattern {pat}: ‖F_RF F_BB‖_F = {:.3}, modulus ok {}, ‖F_CR - F_RF F_BB‖_F = {:.3}",
                rep.power_frobenius,
                rep.constant_modulus_ok(),
                joint.distance_to(&hb)?
            );
        }
    }
    Ok(())
}
