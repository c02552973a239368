//! Small wrappers around nalgebra for the symmetric-matrix work the
//! Gaussian and metrics modules share.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Maximum absolute asymmetry |M - M^T|.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    dev
}

/// Eigendecomposition of a symmetric matrix; eigenvalues ascending is not
/// guaranteed by nalgebra, so callers use min/max explicitly.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Symmetric PSD square root; eigenvalues below zero are clamped.
pub fn sqrtm_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let sqrt_vals = DVector::from_iterator(vals.len(), vals.iter().map(|&v| v.max(0.0).sqrt()));
    &vecs * DMatrix::from_diagonal(&sqrt_vals) * vecs.transpose()
}

/// Cholesky-based solve helpers for SPD matrices.
pub struct SpdFactor {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl SpdFactor {
    pub fn new(m: &DMatrix<f64>, context: &str) -> Result<Self> {
        nalgebra::Cholesky::new(m.clone())
            .map(|chol| SpdFactor { chol })
            .ok_or_else(|| Error::Singular(context.to_string()))
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    pub fn ln_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
    }

    pub fn trace_inverse(&self) -> f64 {
        let n = self.chol.l_dirty().nrows();
        self.solve_mat(&DMatrix::identity(n, n)).trace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0, 0.25]));
        let s = sqrtm_psd(&m);
        let back = &s * &s;
        assert!((back - m).abs().max() < 1e-12);
    }

    #[test]
    fn spd_factor_solves_and_logdets() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let f = SpdFactor::new(&m, "test").unwrap();
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let x = f.solve_vec(&b);
        assert!((&m * &x - &b).abs().max() < 1e-12);
        assert!((f.ln_det() - (4.0f64 * 3.0 - 1.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn spd_factor_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(SpdFactor::new(&m, "test").is_err());
    }
}
