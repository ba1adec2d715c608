//! Hybrid beamforming with spatial path index modulation for joint
//! radar-communications.
//!
//! A base station with `N_T` antennas and `N_RF` RF chains dedicates one
//! analog beam to a radar target and steers the remaining beams along a
//! subset of the user's propagation paths. Which subset is used carries
//! extra bits. The crate provides:
//!
//! * [`array`]: ULA steering vectors and the geometric multipath channel;
//! * [`beamformer`]: spatial patterns and hybrid/joint/digital beamformers;
//! * [`radar`]: probing, MUSIC direction finding, transmit beampattern;
//! * [`metrics`]: mutual information of conventional and index-modulated links;
//! * [`experiments`]: seeded Monte-Carlo sweeps;
//! * [`cli`]: the `spim-isac` command line front-end.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod array;
pub mod beamformer;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod metrics;
pub mod radar;
pub mod selftest;

pub use error::{Error, Result};

/// Complex double.
pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;
