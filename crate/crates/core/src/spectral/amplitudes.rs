use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Diagonal loading used when factorising a supplied PSD amplitude matrix.
pub const FACTOR_JITTER: f64 = 1e-12;

/// Per-component `N x N` amplitude matrices `A^q = L^q (L^q)^T`, stored through
/// their lower-triangular factors so every matrix is PSD by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrixSet {
    factors: Vec<DMatrix<f64>>,
    matrices: Vec<DMatrix<f64>>,
}

impl AmplitudeMatrixSet {
    /// Builds the set from lower-triangular factors. Entries above the
    /// diagonal must be zero.
    pub fn from_factors(factors: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = match factors.first() {
            Some(f) => f.nrows(),
            None => return Err(Error::invalid("amplitude set needs at least one component")),
        };
        if n == 0 {
            return Err(Error::invalid(
                "amplitude matrices need at least one channel",
            ));
        }
        for (q, f) in factors.iter().enumerate() {
            if f.nrows() != n || f.ncols() != n {
                return Err(Error::invalid(format!(
                    "factor {q} is {}x{}, expected {n}x{n}",
                    f.nrows(),
                    f.ncols()
                )));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("factor {q} has non-finite entries")));
            }
            for i in 0..n {
                for j in i + 1..n {
                    if f[(i, j)] != 0.0 {
                        return Err(Error::invalid(format!(
                            "factor {q} is not lower triangular at ({i},{j})"
                        )));
                    }
                }
            }
        }
        let matrices = factors.iter().map(|l| l * l.transpose()).collect();
        Ok(Self { factors, matrices })
    }

    /// Factorises symmetric PSD matrices via Cholesky of `A + 1e-12 I`.
    pub fn from_matrices(matrices: &[DMatrix<f64>]) -> Result<Self> {
        let factors = matrices
            .iter()
            .enumerate()
            .map(|(q, a)| {
                if a.nrows() != a.ncols() {
                    return Err(Error::invalid(format!(
                        "amplitude matrix {q} is not square"
                    )));
                }
                if a.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid(format!(
                        "amplitude matrix {q} is not finite"
                    )));
                }
                let sym = 0.5 * (a + a.transpose());
                let n = sym.nrows();
                let loaded = sym + DMatrix::identity(n, n) * FACTOR_JITTER;
                loaded
                    .cholesky()
                    .map(|c| c.l())
                    .ok_or_else(|| Error::invalid(format!("amplitude matrix {q} is not PSD")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_factors(factors)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn channels(&self) -> usize {
        self.factors[0].nrows()
    }

    pub fn factor(&self, q: usize) -> &DMatrix<f64> {
        &self.factors[q]
    }

    pub fn factors(&self) -> &[DMatrix<f64>] {
        &self.factors
    }

    pub fn matrix(&self, q: usize) -> &DMatrix<f64> {
        &self.matrices[q]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// `sum_q A^q`, the lag-zero covariance of the associated kernel.
    pub fn total(&self) -> DMatrix<f64> {
        let n = self.channels();
        self.matrices
            .iter()
            .fold(DMatrix::zeros(n, n), |acc, a| acc + a)
    }
}
