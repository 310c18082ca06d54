//! Cholesky factors for the mixture E-steps.

use nalgebra::DMatrix;

/// Lower Cholesky factor of a d×d covariance, stored row-major for fast
/// forward substitution.
#[derive(Debug, Clone)]
pub(crate) struct CholFactor {
    d: usize,
    lower: Vec<f64>,
    log_det: f64,
}

impl CholFactor {
    pub(crate) fn new(cov: &[f64], d: usize) -> Option<Self> {
        let m = DMatrix::from_row_slice(d, d, cov);
        let chol = m.cholesky()?;
        let l = chol.l();
        let mut lower = vec![0.0; d * d];
        let mut log_det = 0.0;
        for i in 0..d {
            for j in 0..=i {
                lower[i * d + j] = l[(i, j)];
            }
            log_det += 2.0 * l[(i, i)].ln();
        }
        log_det.is_finite().then_some(CholFactor { d, lower, log_det })
    }

    pub(crate) fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `(x − mu)ᵀ Σ⁻¹ (x − mu)`; `buf` must hold d values.
    #[inline]
    pub(crate) fn mahalanobis_sq(&self, x: &[f64], mu: &[f64], buf: &mut [f64]) -> f64 {
        let d = self.d;
        let mut acc = 0.0;
        for i in 0..d {
            let row = &self.lower[i * d..i * d + i];
            let s: f64 = row.iter().zip(&buf[..i]).map(|(l, y)| l * y).sum();
            let y = (x[i] - mu[i] - s) / self.lower[i * d + i];
            buf[i] = y;
            acc += y * y;
        }
        acc
    }
}

/// Factors `cov + ridge·I`, multiplying the ridge by 10 until the matrix is
/// positive definite. Returns the factor and the number of escalations.
pub(crate) fn factor_with_ridge(cov: &mut [f64], d: usize, ridge: f64) -> (CholFactor, usize) {
    let mut extra = 0.0;
    let mut escalations = 0;
    loop {
        if let Some(f) = CholFactor::new(cov, d) {
            return (f, escalations);
        }
        let bump = if extra == 0.0 { ridge.max(1e-12) * 10.0 } else { extra * 9.0 };
        for i in 0..d {
            cov[i * d + i] += bump;
        }
        extra += bump;
        escalations += 1;
        assert!(escalations < 64, "covariance could not be regularized");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mahalanobis_matches_explicit_inverse() {
        let cov = [4.0, 1.0, 1.0, 3.0];
        let f = CholFactor::new(&cov, 2).unwrap();
        let det: f64 = 4.0 * 3.0 - 1.0;
        assert!((f.log_det() - det.ln()).abs() < 1e-12);
        let inv = [3.0 / det, -1.0 / det, -1.0 / det, 4.0 / det];
        let x = [1.5, -2.0];
        let explicit = x[0] * (inv[0] * x[0] + inv[1] * x[1]) + x[1] * (inv[2] * x[0] + inv[3] * x[1]);
        let mut buf = [0.0; 2];
        assert!((f.mahalanobis_sq(&x, &[0.0, 0.0], &mut buf) - explicit).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_gets_regularized() {
        let mut cov = vec![1.0, 1.0, 1.0, 1.0];
        let (f, esc) = factor_with_ridge(&mut cov, 2, 1e-6);
        assert!(esc >= 1);
        assert!(f.log_det().is_finite());
    }
}
