//! Exact spectrum of the preconditioned matrix at desk scale.
//!
//! The eigenvalues of the pencil `(𝒜, 𝒫)` are those of `L⁻¹𝒜L⁻ᵀ` where
//! `L = blkdiag(L_0, …, L_N)` collects the Cholesky factors of the `Ŝ_k`.
//! Only the block-tridiagonal pattern is whitened, block by block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::saddle::{BlockSaddleSystem, SchurChain};

/// Largest total dimension accepted by [`preconditioned_spectrum`].
pub const MAX_DENSE_DIM: usize = 5000;

/// Eigenvalues closer to zero than this trigger a warning.
pub const ZERO_GAP_WARN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `(λ₋min, λ₋max, λ₊min, λ₊max)`.
    pub extremal: [f64; 4],
    /// `min |λ|`.
    pub zero_gap: f64,
    pub negative_count: usize,
    /// `n_1 + n_3 + …`, the inertia predicted by the sign pattern.
    pub expected_negative: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// The symmetric matrix `L⁻¹𝒜L⁻ᵀ`.
pub fn whitened_matrix(sys: &BlockSaddleSystem, chain: &SchurChain) -> Result<Matrix> {
    if chain.dims() != sys.dims().as_slice() {
        return Err(Error::Structural("chain and system dimensions differ".into()));
    }
    let total = sys.total_dim();
    let offsets = sys.offsets();
    let dims = sys.dims();
    let mut q = Matrix::zeros(total, total);
    for k in 0..=sys.depth() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let block = chain.factor(k).congruence(sys.diag(k)) * sign;
        q.view_mut((offsets[k], offsets[k]), (dims[k], dims[k])).copy_from(&block);
        if k >= 1 {
            // L_k⁻¹ B_k L_{k-1}⁻ᵀ
            let half = chain.factor(k).left_whiten(sys.offdiag(k));
            let coupling = chain.factor(k - 1).left_whiten(&half.transpose()).transpose();
            q.view_mut((offsets[k], offsets[k - 1]), (dims[k], dims[k - 1])).copy_from(&coupling);
            q.view_mut((offsets[k - 1], offsets[k]), (dims[k - 1], dims[k]))
                .copy_from(&coupling.transpose());
        }
    }
    Ok(q)
}

pub fn preconditioned_spectrum(sys: &BlockSaddleSystem, chain: &SchurChain) -> Result<SpectrumReport> {
    let total = sys.total_dim();
    if total > MAX_DENSE_DIM {
        return Err(Error::Guard(format!("total dimension {total} exceeds the dense limit {MAX_DENSE_DIM}")));
    }
    let eigenvalues = linalg::sym_eigenvalues(&whitened_matrix(sys, chain)?);
    let expected_negative = sys.dims().iter().skip(1).step_by(2).sum();
    report_from_eigenvalues(eigenvalues, expected_negative)
}

/// Wraps a sorted eigenvalue list; fails when it does not have both signs.
pub fn report_from_eigenvalues(eigenvalues: Vec<f64>, expected_negative: usize) -> Result<SpectrumReport> {
    let extremal = extremal_eigs(&eigenvalues)?;
    let zero_gap = eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let negative_count = eigenvalues.iter().filter(|v| **v < 0.0).count();
    let mut warnings = Vec::new();
    if zero_gap < ZERO_GAP_WARN {
        warnings.push(format!("eigenvalue within {zero_gap:.3e} of zero; the matrix is numerically singular"));
    }
    if negative_count != expected_negative {
        warnings.push(format!("{negative_count} negative eigenvalues, inertia predicts {expected_negative}"));
    }
    Ok(SpectrumReport { eigenvalues, extremal, zero_gap, negative_count, expected_negative, warnings })
}

/// `(most negative, least negative, least positive, most positive)`.
pub fn extremal_eigs(eigenvalues: &[f64]) -> Result<[f64; 4]> {
    let neg: Vec<f64> = eigenvalues.iter().copied().filter(|v| *v < 0.0).collect();
    let pos: Vec<f64> = eigenvalues.iter().copied().filter(|v| *v > 0.0).collect();
    if neg.is_empty() || pos.is_empty() {
        return Err(Error::Numerical(format!(
            "spectrum is single-signed ({} negative, {} positive); the system was assembled incorrectly",
            neg.len(),
            pos.len()
        )));
    }
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok([min(&neg), max(&neg), min(&pos), max(&pos)])
}
