//! Dense symmetric linear algebra used throughout the crate.
//!
//! Generalized symmetric eigenproblems `A x = λ B x` with `B` positive
//! definite are reduced to standard form through the Cholesky factor of `B`:
//! the pencil spectrum equals the spectrum of `L⁻¹ A L⁻ᵀ`. No matrix square
//! roots are ever formed here.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Returns `(M + Mᵀ) / 2`.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// Only the symmetric part of `m` is used.
pub fn sym_eigenvalues(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut eig: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Spectral norm of a symmetric matrix (largest eigenvalue magnitude).
pub fn sym_norm(m: &Matrix) -> f64 {
    let eig = sym_eigenvalues(m);
    match (eig.first(), eig.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

/// Maximum absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Cholesky factor `B = L Lᵀ` of a symmetric positive definite matrix,
/// computed once and reused for every solve.
#[derive(Clone, Debug)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
    lower: Matrix,
}

impl SpdFactor {
    /// Factors `m`; `what` names the matrix in error messages.
    pub fn new(m: &Matrix, what: &str) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Structural(format!(
                "{what} is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        let sym = symmetrize(m);
        match Cholesky::new(sym.clone()) {
            Some(chol) => {
                let lower = chol.l();
                if lower.diagonal().iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                    return Err(Error::NotPositiveDefinite {
                        what: what.to_string(),
                        min_eig: sym_eigenvalues(&sym).first().copied().unwrap_or(f64::NAN),
                    });
                }
                Ok(Self { chol, lower })
            }
            None => Err(Error::NotPositiveDefinite {
                what: what.to_string(),
                min_eig: sym_eigenvalues(&sym).first().copied().unwrap_or(f64::NAN),
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    /// `B⁻¹ v`
    pub fn solve_vec(&self, v: &Vector) -> Vector {
        self.chol.solve(v)
    }

    /// `B⁻¹ M`
    pub fn solve(&self, m: &Matrix) -> Matrix {
        self.chol.solve(m)
    }

    /// `L⁻¹ M`
    pub fn left_whiten(&self, m: &Matrix) -> Matrix {
        self.lower
            .solve_lower_triangular(m)
            .expect("Cholesky factor has a positive diagonal")
    }

    /// `L⁻¹ M L⁻ᵀ` for symmetric `M`, symmetrized to remove rounding skew.
    pub fn congruence(&self, m: &Matrix) -> Matrix {
        let half = self.left_whiten(m);
        let full = self.left_whiten(&half.transpose());
        symmetrize(&full)
    }
}

/// Eigenvalues of the symmetric pencil `(a, b)`, ascending, where `b` is
/// given by its Cholesky factor.
pub fn pencil_eigenvalues(a: &Matrix, b: &SpdFactor) -> Vec<f64> {
    sym_eigenvalues(&b.congruence(a))
}

/// Smallest and largest eigenvalue of the pencil `(a, b)`.
pub fn pencil_extremes(a: &Matrix, b: &SpdFactor) -> (f64, f64) {
    let eig = pencil_eigenvalues(a, b);
    (eig[0], eig[eig.len() - 1])
}
