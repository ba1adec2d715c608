//! Builds a two-path channel and prints its factored form and array coherence.
//!
//! cargo run --example channel

use spim_isac::array::{build_channel, coherence, steering_vector, ArrayGeometry, AngleDeg, PathParams};

fn main() -> spim_isac::Result<()> {
    let tx = ArrayGeometry::new(128)?;
    let rx = ArrayGeometry::new(10)?;

    let a = steering_vector(tx, AngleDeg::new(40.0)?);
    println!("‖a_T(40°)‖ = {:.15}", a.norm());
    for sep in [0.5, 1.0, 5.0, 10.0] {
        let c = coherence(tx, AngleDeg::new(40.0)?, AngleDeg::new(40.0 + sep)?);
        println!("coherence 40° vs {:>4}°: {c:.4}", 40.0 + sep);
    }

    let paths = [
        PathParams::new(0.3, AngleDeg::new(60.0)?, AngleDeg::new(-10.0)?)?,
        PathParams::new(0.7, AngleDeg::new(50.0)?, AngleDeg::new(25.0)?)?,
    ];
    let ch = build_channel(tx, rx, &paths)?;
    println!("H is {}x{}", ch.h().nrows(), ch.h().ncols());
    for (i, p) in ch.paths().iter().enumerate() {
        println!("path {}: gain {:.2}, DoD {}, DoA {}", i + 1, p.gain(), p.dod, p.doa);
    }
    let recon = ch.p() * ch.lambda().map(|v| v.into()) * ch.q().adjoint();
    println!("‖H - PΛQᴴ‖ = {:.2e}", (ch.h() - recon).norm());
    Ok(())
}
