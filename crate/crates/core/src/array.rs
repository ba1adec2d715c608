//! Half-wavelength ULA responses and the geometric multipath channel.
//!
//! A channel with `M` paths is stored both as the list of path parameters and
//! in factored form `H = P Λ Qᴴ`, where the columns of `P` and `Q` are receive
//! and transmit steering vectors and `Λ` holds the amplitude `√γ_m` of each
//! path. Paths are kept sorted by decreasing power gain, so index 0 is always
//! the strongest path.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::{CMatrix, CVector, C64};

/// Uniform linear array with half-wavelength spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrayGeometry {
    num_elements: usize,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize) -> Result<Self> {
        if num_elements == 0 {
            return Err(domain("array needs at least one element"));
        }
        Ok(Self { num_elements })
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }
}

/// An angle in degrees, restricted to the visible region [-90, 90].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AngleDeg(f64);

impl AngleDeg {
    pub fn new(deg: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&deg) {
            return Err(domain(format!("angle {deg} deg outside [-90, 90]")));
        }
        Ok(Self(deg))
    }

    pub fn deg(self) -> f64 {
        self.0
    }

    pub fn rad(self) -> f64 {
        self.0.to_radians()
    }
}

impl TryFrom<f64> for AngleDeg {
    type Error = crate::Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<AngleDeg> for f64 {
    fn from(a: AngleDeg) -> f64 {
        a.0
    }
}

impl fmt::Display for AngleDeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.0)
    }
}

/// One propagation path: power gain, departure angle at the transmitter and
/// arrival angle at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathParams {
    gain: f64,
    pub dod: AngleDeg,
    pub doa: AngleDeg,
}

impl PathParams {
    pub fn new(gain: f64, dod: AngleDeg, doa: AngleDeg) -> Result<Self> {
        if !(gain >= 0.0) || !gain.is_finite() {
            return Err(domain(format!("path gain {gain} must be finite and non-negative")));
        }
        Ok(Self { gain, dod, doa })
    }

    /// Power gain γ.
    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Complex amplitude √γ. Gains are real and non-negative in this model.
    pub fn amplitude(&self) -> f64 {
        self.gain.sqrt()
    }
}

/// Unit-norm ULA response: entry `n` is `exp(-jπ n sin θ) / √N` (0-based `n`).
pub fn steering_vector(geometry: ArrayGeometry, angle: AngleDeg) -> CVector {
    let n = geometry.num_elements();
    let scale = 1.0 / (n as f64).sqrt();
    let phase_step = -std::f64::consts::PI * angle.rad().sin();
    CVector::from_fn(n, |i, _| Complex::from_polar(scale, phase_step * i as f64))
}

/// `|a(a1)ᴴ a(a2)|`, the magnitude of the inner product of two responses.
pub fn coherence(geometry: ArrayGeometry, a1: AngleDeg, a2: AngleDeg) -> f64 {
    if a1 == a2 {
        return 1.0;
    }
    let v1 = steering_vector(geometry, a1);
    let v2 = steering_vector(geometry, a2);
    v1.dotc(&v2).norm().min(1.0)
}

/// A realized geometric channel between a transmit and a receive array.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    tx: ArrayGeometry,
    rx: ArrayGeometry,
    paths: Vec<PathParams>,
    p: CMatrix,
    lambda: DMatrix<f64>,
    q: CMatrix,
    h: CMatrix,
}

impl ChannelRealization {
    pub fn tx(&self) -> ArrayGeometry {
        self.tx
    }

    pub fn rx(&self) -> ArrayGeometry {
        self.rx
    }

    /// Paths in order of decreasing gain.
    pub fn paths(&self) -> &[PathParams] {
        &self.paths
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// Receive responses, `N_R × M`.
    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    /// Diagonal path amplitudes, `M × M`.
    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    /// Transmit responses, `N_T × M`.
    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    /// Channel matrix, `N_R × N_T`.
    pub fn h(&self) -> &CMatrix {
        &self.h
    }
}

/// Builds `H = P Λ Qᴴ` from a list of paths.
///
/// Paths are sorted by decreasing gain; equal gains keep their input order.
pub fn build_channel(
    tx: ArrayGeometry,
    rx: ArrayGeometry,
    paths: &[PathParams],
) -> Result<ChannelRealization> {
    if paths.is_empty() {
        return Err(domain("channel needs at least one path"));
    }
    let mut paths = paths.to_vec();
    // sort_by is stable
    paths.sort_by(|a, b| b.gain.total_cmp(&a.gain));

    let m = paths.len();
    let mut p = CMatrix::zeros(rx.num_elements(), m);
    let mut q = CMatrix::zeros(tx.num_elements(), m);
    for (k, path) in paths.iter().enumerate() {
        p.set_column(k, &steering_vector(rx, path.doa));
        q.set_column(k, &steering_vector(tx, path.dod));
    }
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        m,
        paths.iter().map(PathParams::amplitude),
    ));
    let lambda_c = lambda.map(|x| C64::new(x, 0.0));
    let h = &p * lambda_c * q.adjoint();

    Ok(ChannelRealization {
        tx,
        rx,
        paths,
        p,
        lambda,
        q,
        h,
    })
}
