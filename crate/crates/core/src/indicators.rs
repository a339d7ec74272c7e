//! Spectral indicator intervals.
//!
//! For each level the E-indicator is the extremal spectrum of the pencil
//! `(A_k, Ŝ_k)` (equivalently of `Ŝ_k^{-1/2} A_k Ŝ_k^{-1/2}`), and the
//! R-indicator that of `(B_k Ŝ_{k-1}⁻¹ B_kᵀ, Ŝ_k)` (equivalently of `R_k R_kᵀ`
//! with `R_k = Ŝ_k^{-1/2} B_k Ŝ_{k-1}^{-1/2}`). When the last block of a
//! double saddle point is taller than the previous one the R-indicator is
//! taken from `R_kᵀ R_k` instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::saddle::{BlockSaddleSystem, SchurChain, Shape};

/// `α_R` must exceed this fraction of `β_R`.
pub const RANK_TOL: f64 = 1e-10;

/// Extremal eigenvalue intervals `[α_E^(k), β_E^(k)]`, `k = 0..=N`, and
/// `[α_R^(k), β_R^(k)]`, `k = 1..=N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSet {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "alphaE")]
    pub alpha_e: Vec<f64>,
    #[serde(rename = "betaE")]
    pub beta_e: Vec<f64>,
    #[serde(rename = "alphaR")]
    pub alpha_r: Vec<f64>,
    #[serde(rename = "betaR")]
    pub beta_r: Vec<f64>,
    #[serde(default)]
    pub rect_tail: bool,
}

impl IndicatorSet {
    /// Degenerate set with `α = β` everywhere.
    pub fn point(gamma_e: &[f64], gamma_r: &[f64]) -> Self {
        Self {
            n: gamma_r.len(),
            alpha_e: gamma_e.to_vec(),
            beta_e: gamma_e.to_vec(),
            alpha_r: gamma_r.to_vec(),
            beta_r: gamma_r.to_vec(),
            rect_tail: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidIndicators("N must be at least 1".into()));
        }
        if self.alpha_e.len() != n + 1 || self.beta_e.len() != n + 1 {
            return Err(Error::InvalidIndicators(format!("E-intervals must have N+1 = {} entries", n + 1)));
        }
        if self.alpha_r.len() != n || self.beta_r.len() != n {
            return Err(Error::InvalidIndicators(format!("R-intervals must have N = {n} entries")));
        }
        let all = self.alpha_e.iter().chain(&self.beta_e).chain(&self.alpha_r).chain(&self.beta_r);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidIndicators("non-finite endpoint".into()));
        }
        if self.alpha_e[0] <= 0.0 {
            return Err(Error::InvalidIndicators(format!("alphaE[0] = {} must be positive", self.alpha_e[0])));
        }
        for k in 0..=n {
            if self.alpha_e[k] < 0.0 {
                return Err(Error::InvalidIndicators(format!("alphaE[{k}] = {} is negative", self.alpha_e[k])));
            }
            if self.alpha_e[k] > self.beta_e[k] {
                return Err(Error::InvalidIndicators(format!("alphaE[{k}] > betaE[{k}]")));
            }
        }
        for i in 0..n {
            if self.alpha_r[i] <= 0.0 {
                return Err(Error::InvalidIndicators(format!(
                    "alphaR for level {} = {} must be positive",
                    i + 1,
                    self.alpha_r[i]
                )));
            }
            if self.alpha_r[i] > self.beta_r[i] {
                return Err(Error::InvalidIndicators(format!("alphaR > betaR at level {}", i + 1)));
            }
        }
        if self.rect_tail && n != 2 {
            return Err(Error::InvalidIndicators("rect_tail is only defined for N = 2".into()));
        }
        Ok(())
    }

    /// `(label, lo, hi)` rows in the order `I_E0..I_EN, I_R1..I_RN`.
    pub fn rows(&self) -> Vec<(String, f64, f64)> {
        let mut rows: Vec<_> = (0..=self.n)
            .map(|k| (format!("I_E{k}"), self.alpha_e[k], self.beta_e[k]))
            .collect();
        rows.extend((1..=self.n).map(|k| (format!("I_R{k}"), self.alpha_r[k - 1], self.beta_r[k - 1])));
        rows
    }
}

/// Extremal eigenvalues of the pencil `(A_k, Ŝ_k)`.
pub fn compute_e_interval(sys: &BlockSaddleSystem, chain: &SchurChain, k: usize) -> Result<(f64, f64)> {
    check_level(sys, chain, k)?;
    Ok(linalg::pencil_extremes(sys.diag(k), chain.factor(k)))
}

fn is_rect_level(sys: &BlockSaddleSystem, k: usize) -> bool {
    sys.shape() == Shape::RectangularTail && k == sys.depth()
}

/// Extremal eigenvalues of `R_k R_kᵀ`, or of `R_kᵀ R_k` on a rectangular tail.
pub fn compute_r_interval(sys: &BlockSaddleSystem, chain: &SchurChain, k: usize) -> Result<(f64, f64)> {
    check_level(sys, chain, k)?;
    if k == 0 {
        return Err(Error::Parameter("R-indicators start at level 1".into()));
    }
    let b = sys.offdiag(k);
    let (lo, hi) = if is_rect_level(sys, k) {
        // Pencil (B_kᵀ Ŝ_k⁻¹ B_k, Ŝ_{k-1}).
        let w = chain.factor(k).left_whiten(b);
        let m: Matrix = w.transpose() * w;
        linalg::pencil_extremes(&m, chain.factor(k - 1))
    } else {
        let w = chain.factor(k - 1).left_whiten(&b.transpose());
        let m: Matrix = w.transpose() * w;
        linalg::pencil_extremes(&m, chain.factor(k))
    };
    if lo <= RANK_TOL * hi || hi <= 0.0 {
        return Err(Error::RankDeficient {
            level: k,
            detail: format!("alpha_R = {lo:.3e}, beta_R = {hi:.3e}"),
        });
    }
    Ok((lo, hi))
}

/// `‖(B_k Ŝ_{k-1}⁻¹ B_kᵀ + A_k) − S̃_k‖_F / ‖S̃_k‖_F`, the congruence-free form
/// of `R_k R_kᵀ + E_k = Ŝ_k^{-1/2} S̃_k Ŝ_k^{-1/2}`.
pub fn sbar_identity_residual(sys: &BlockSaddleSystem, chain: &SchurChain, k: usize) -> Result<f64> {
    check_level(sys, chain, k)?;
    if k == 0 {
        return Err(Error::Parameter("the identity is defined for levels 1..=N".into()));
    }
    let b = sys.offdiag(k);
    let w = chain.factor(k - 1).left_whiten(&b.transpose());
    let lhs: Matrix = w.transpose() * w + sys.diag(k);
    let st = chain.perturbed(k);
    Ok((lhs - st).norm() / st.norm())
}

pub fn compute_indicator_set(sys: &BlockSaddleSystem, chain: &SchurChain) -> Result<IndicatorSet> {
    if sys.shape() == Shape::Unsupported {
        return Err(Error::Structural(format!("unsupported block sizes {:?}", sys.dims())));
    }
    let n = sys.depth();
    let mut set = IndicatorSet {
        n,
        alpha_e: Vec::with_capacity(n + 1),
        beta_e: Vec::with_capacity(n + 1),
        alpha_r: Vec::with_capacity(n),
        beta_r: Vec::with_capacity(n),
        rect_tail: sys.shape() == Shape::RectangularTail,
    };
    for k in 0..=n {
        let (lo, hi) = compute_e_interval(sys, chain, k)?;
        // Rounding can push the minimum of a semi-definite block a hair below zero.
        let lo = if k > 0 { lo.max(0.0) } else { lo };
        set.alpha_e.push(lo);
        set.beta_e.push(hi.max(lo));
    }
    for k in 1..=n {
        let (lo, hi) = compute_r_interval(sys, chain, k)?;
        set.alpha_r.push(lo);
        set.beta_r.push(hi);
    }
    if set.alpha_e[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite { what: "E_0".into(), min_eig: set.alpha_e[0] });
    }
    Ok(set)
}

fn check_level(sys: &BlockSaddleSystem, chain: &SchurChain, k: usize) -> Result<()> {
    if chain.dims() != sys.dims().as_slice() {
        return Err(Error::Structural("chain and system dimensions differ".into()));
    }
    if k > sys.depth() {
        return Err(Error::Parameter(format!("level {k} exceeds N = {}", sys.depth())));
    }
    Ok(())
}
