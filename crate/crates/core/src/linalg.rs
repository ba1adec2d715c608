//! Small dense helpers for complex Hermitian matrices.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Natural log-determinant of a Hermitian positive definite matrix, via
/// Cholesky. Never forms the determinant itself.
pub fn logdet_hpd(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "log-det of non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numeric("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        let d = l[(i, i)];
        // complex Cholesky does not reject negative pivots on its own
        if !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re || !d.re.is_finite() {
            return Err(Error::Numeric("matrix is not positive definite".into()));
        }
        acc += 2.0 * d.re.ln();
    }
    Ok(acc)
}

pub fn log2det_hpd(m: &CMatrix) -> Result<f64> {
    Ok(logdet_hpd(m)? / std::f64::consts::LN_2)
}

/// Largest elementwise modulus of `M - Mᴴ`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix, eigenpairs in ascending order.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    // symmetrize so tiny rounding asymmetry never leaks into the solver
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Numerical rank from singular values, relative tolerance `tol`.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn logdet_of_diagonal() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            real(2.0),
            real(3.0),
            real(0.5),
        ]));
        assert_abs_diff_eq!(logdet_hpd(&m).unwrap(), 3f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn logdet_survives_tiny_determinants() {
        // det = 1e-400 underflows f64, the log does not
        let m = CMatrix::identity(10, 10).scale(1e-40);
        assert_abs_diff_eq!(logdet_hpd(&m).unwrap(), -400.0 * 10f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn logdet_rejects_indefinite_and_rectangular() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![real(1.0), real(-1.0)]));
        assert!(matches!(logdet_hpd(&m), Err(Error::Numeric(_))));
        assert!(matches!(logdet_hpd(&CMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn eigen_is_ascending() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            real(5.0),
            real(1.0),
            real(3.0),
        ]));
        let (vals, vecs) = hermitian_eigen(&m);
        assert_eq!(vals, vec![1.0, 3.0, 5.0]);
        assert_abs_diff_eq!(vecs[(1, 0)].norm(), 1.0, epsilon = 1e-14);
    }
}
