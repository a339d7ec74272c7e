//! The parametric polynomial sequence
//!
//! ```text
//! U_0 = 1
//! U_1 = λ − γ_E^(0)
//! U_{k+1} = (λ + (−1)^{k+1} γ_E^(k)) U_k − γ_R^(k) U_{k−1}
//! ```
//!
//! whose roots localize the eigenvalues of the preconditioned matrix.
//!
//! Roots are computed as eigenvalues of the symmetric tridiagonal matrix whose
//! characteristic polynomial is `U_k` (diagonal `(−1)^j γ_E^(j)`, off-diagonal
//! `sqrt(γ_R^(j))`), located by Sturm-count bisection. This never touches
//! monomial coefficients and always returns real, sorted roots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// One concrete choice of the parameters: `e = (γ_E^(0), …, γ_E^(N))`,
/// `r = (γ_R^(1), …, γ_R^(N))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaAssignment {
    #[serde(rename = "gammaE")]
    pub e: Vec<f64>,
    #[serde(rename = "gammaR")]
    pub r: Vec<f64>,
}

impl GammaAssignment {
    pub fn new(e: Vec<f64>, r: Vec<f64>) -> Self {
        Self { e, r }
    }

    /// Highest degree `N + 1` the assignment supports.
    pub fn max_degree(&self) -> usize {
        self.e.len().min(self.r.len() + 1)
    }

    /// `γ_R^(k)` with the one-based index used by the recurrence.
    #[inline]
    fn gr(&self, k: usize) -> f64 {
        self.r[k - 1]
    }

    fn check_degree(&self, k: usize) {
        assert!(
            k <= self.max_degree(),
            "degree {k} needs {k} gammaE and {} gammaR entries, have {} and {}",
            k.saturating_sub(1),
            self.e.len(),
            self.r.len()
        );
    }
}

/// The diagonal coefficient `(−1)^{k+1} γ_E^(k)` entering `U_{k+1}`.
#[inline]
fn shift(gamma: &GammaAssignment, k: usize) -> f64 {
    if k % 2 == 0 {
        -gamma.e[k]
    } else {
        gamma.e[k]
    }
}

/// `U_0(λ), …, U_k(λ)`.
pub fn eval_sequence(k: usize, lambda: f64, gamma: &GammaAssignment) -> Vec<f64> {
    gamma.check_degree(k);
    let mut u = Vec::with_capacity(k + 1);
    u.push(1.0);
    if k >= 1 {
        u.push(lambda - gamma.e[0]);
    }
    for j in 1..k {
        let next = (lambda + shift(gamma, j)) * u[j] - gamma.gr(j) * u[j - 1];
        u.push(next);
    }
    u
}

/// `U_k(λ)`.
pub fn eval_u(k: usize, lambda: f64, gamma: &GammaAssignment) -> f64 {
    eval_sequence(k, lambda, gamma)[k]
}

/// `(U_j(λ), U_j'(λ))` for `j = 0..=k`, from the recurrence and its
/// λ-derivative.
pub fn eval_with_derivative(k: usize, lambda: f64, gamma: &GammaAssignment) -> (Vec<f64>, Vec<f64>) {
    gamma.check_degree(k);
    let mut u = vec![1.0];
    let mut du = vec![0.0];
    if k >= 1 {
        u.push(lambda - gamma.e[0]);
        du.push(1.0);
    }
    for j in 1..k {
        let eta = lambda + shift(gamma, j);
        let g = gamma.gr(j);
        u.push(eta * u[j] - g * u[j - 1]);
        du.push(u[j] + eta * du[j] - g * du[j - 1]);
    }
    (u, du)
}

/// Symmetric tridiagonal matrix stored by its diagonal and off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, e) in self.off.iter().enumerate() {
            m[(i, i + 1)] = *e;
            m[(i + 1, i)] = *e;
        }
        m
    }

    /// Number of eigenvalues strictly below `x` (Sylvester inertia of the
    /// `LDLᵀ` factorization of `T − xI`).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off.iter().fold(1.0_f64, |a, e| a.max(e * e));
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// All eigenvalues in ascending order, each bisected until its bracket
    /// cannot shrink further in floating point.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let (glo, ghi) = self.gershgorin();
        let pad = 2.0 * f64::EPSILON * glo.abs().max(ghi.abs()) + f64::MIN_POSITIVE;
        let (glo, ghi) = (glo - pad, ghi + pad);
        let mut out = Vec::with_capacity(n);
        let mut lo_start = glo;
        for j in 0..n {
            // The j-th eigenvalue is the smallest x with count_below(x) > j.
            let mut lo = lo_start;
            let mut hi = ghi;
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_below(mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            out.push(root);
            lo_start = lo;
        }
        out
    }
}

/// The `k×k` tridiagonal matrix whose characteristic polynomial is `U_k`.
pub fn tridiagonal_realization(k: usize, gamma: &GammaAssignment) -> Result<Tridiagonal> {
    if k == 0 {
        return Err(Error::Parameter("degree must be at least 1".into()));
    }
    if k > gamma.max_degree() {
        return Err(Error::Parameter(format!("degree {k} exceeds the {} levels provided", gamma.max_degree())));
    }
    if let Some(j) = gamma.r[..k - 1].iter().position(|g| !(*g > 0.0)) {
        return Err(Error::Parameter(format!("gammaR[{}] = {} must be positive", j + 1, gamma.r[j])));
    }
    let diag = (0..k).map(|j| if j % 2 == 0 { gamma.e[j] } else { -gamma.e[j] }).collect();
    let off = gamma.r[..k - 1].iter().map(|g| g.sqrt()).collect();
    Ok(Tridiagonal { diag, off })
}

/// Sorted roots of `U_k` with their sign counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub degree: usize,
    pub roots: Vec<f64>,
    pub neg_count: usize,
    pub pos_count: usize,
}

impl RootSet {
    fn from_roots(degree: usize, roots: Vec<f64>) -> Self {
        let neg_count = roots.iter().filter(|r| **r < 0.0).count();
        let pos_count = roots.iter().filter(|r| **r > 0.0).count();
        Self { degree, roots, neg_count, pos_count }
    }

    pub fn smallest(&self) -> f64 {
        self.roots[0]
    }

    pub fn largest(&self) -> f64 {
        self.roots[self.roots.len() - 1]
    }

    pub fn largest_negative(&self) -> Option<f64> {
        self.roots.iter().rev().copied().find(|r| *r < 0.0)
    }

    pub fn smallest_positive(&self) -> Option<f64> {
        self.roots.iter().copied().find(|r| *r > 0.0)
    }

    /// Strictly increasing roots, `k/2` of each sign for even `k`, one more
    /// positive than negative for odd `k`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.roots.len() != self.degree {
            return Err(format!("{} roots for degree {}", self.roots.len(), self.degree));
        }
        if let Some(w) = self.roots.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(format!("roots not strictly increasing: {} then {}", w[0], w[1]));
        }
        let (want_neg, want_pos) = (self.degree / 2, self.degree - self.degree / 2);
        if self.neg_count != want_neg || self.pos_count != want_pos {
            return Err(format!(
                "degree {}: {} negative / {} positive roots, expected {want_neg} / {want_pos}",
                self.degree, self.neg_count, self.pos_count
            ));
        }
        Ok(())
    }
}

/// All `k` roots of `U_k`.
pub fn roots_u(k: usize, gamma: &GammaAssignment) -> Result<RootSet> {
    let t = tridiagonal_realization(k, gamma)?;
    Ok(RootSet::from_roots(k, t.eigenvalues()))
}

/// Which family of parameters a derivative refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Param {
    /// `γ_E^(m)`, `m ≥ 0`
    E,
    /// `γ_R^(m)`, `m ≥ 1`
    R,
}

/// Residual threshold for accepting `ξ` as a root of `U_k`.
pub fn root_tolerance(k: usize, xi: f64) -> f64 {
    1e-8 * xi.abs().powi(k as i32).max(1.0)
}

/// Closed-form `∂U_{k+1}/∂γ^(m)` at a root `ξ` of `U_{k+1}`:
///
/// * `E`: `(−1)^{m+1} U_m(ξ)² / U_k(ξ) · Π_{i=m+1}^{k} γ_R^(i)`
/// * `R`: `−U_m(ξ) U_{m−1}(ξ) / U_k(ξ) · Π_{i=m+1}^{k} γ_R^(i)`
pub fn partial_derivative_u(
    k_plus_1: usize,
    m: usize,
    which: Param,
    xi: f64,
    gamma: &GammaAssignment,
) -> Result<f64> {
    if k_plus_1 == 0 {
        return Err(Error::Parameter("degree must be at least 1".into()));
    }
    let k = k_plus_1 - 1;
    if m > k {
        return Err(Error::Parameter(format!("parameter index {m} exceeds k = {k}")));
    }
    if which == Param::R && m == 0 {
        return Err(Error::Parameter("gammaR is indexed from 1".into()));
    }
    let u = eval_sequence(k_plus_1, xi, gamma);
    let residual = u[k_plus_1].abs();
    if residual > root_tolerance(k_plus_1, xi) {
        return Err(Error::NotARoot { degree: k_plus_1, xi, residual });
    }
    if u[k] == 0.0 {
        return Err(Error::Numerical(format!("U_{k} vanishes at a root of U_{k_plus_1}")));
    }
    let prod: f64 = (m + 1..=k).map(|i| gamma.gr(i)).product();
    Ok(match which {
        Param::E => {
            let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
            sign * u[m] * u[m] / u[k] * prod
        }
        Param::R => -u[m] * u[m - 1] / u[k] * prod,
    })
}

fn sgn(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign of `∂ξ/∂γ^(m)` for the `root_index`-th root (ascending, zero-based)
/// of `U_{k+1}`, from the implicit function theorem:
/// `−sgn(∂U/∂γ)·sgn(∂U/∂λ)`.
pub fn root_sensitivity_sign(
    k_plus_1: usize,
    m: usize,
    which: Param,
    root_index: usize,
    gamma: &GammaAssignment,
) -> Result<i8> {
    let roots = roots_u(k_plus_1, gamma)?;
    let xi = *roots
        .roots
        .get(root_index)
        .ok_or_else(|| Error::Parameter(format!("root index {root_index} out of range for degree {k_plus_1}")))?;
    let du_dgamma = partial_derivative_u(k_plus_1, m, which, xi, gamma)?;
    let (_, du) = eval_with_derivative(k_plus_1, xi, gamma);
    Ok(-sgn(du_dgamma) * sgn(du[k_plus_1]))
}

/// `a_{k+1}(λ) = U_k(λ) U'_{k+1}(λ) − U'_k(λ) U_{k+1}(λ)`.
pub fn wronskian_a(k_plus_1: usize, lambda: f64, gamma: &GammaAssignment) -> f64 {
    assert!(k_plus_1 >= 1, "a_k is defined for k >= 1");
    let (u, du) = eval_with_derivative(k_plus_1, lambda, gamma);
    let k = k_plus_1 - 1;
    u[k] * du[k_plus_1] - du[k] * u[k_plus_1]
}
