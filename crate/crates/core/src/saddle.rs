//! Block-tridiagonal multiple saddle-point systems and their block-diagonal
//! Schur-complement preconditioners.
//!
//! The system matrix is
//!
//! ```text
//! [ A_0  B_1ᵀ                 ]
//! [ B_1  -A_1  B_2ᵀ           ]
//! [      B_2   A_2   ⋱        ]
//! [            ⋱     ⋱   B_Nᵀ ]
//! [                 B_N  ±A_N ]
//! ```
//!
//! with `A_0` SPD, `A_k` (k ≥ 1) symmetric positive semi-definite and `B_k`
//! of full rank. The preconditioner is `blkdiag(Ŝ_0, …, Ŝ_N)` where each
//! `Ŝ_k` approximates the perturbed complement `S̃_k = A_k + B_k Ŝ_{k-1}⁻¹ B_kᵀ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, SpdFactor, Vector};

/// Relative tolerance used by [`validate_system`] when none is supplied.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// `n_k ≤ n_{k-1}` at every level.
    Standard,
    /// Double saddle point (`N = 2`) whose last block is taller than the one
    /// before it (`n_2 > n_1`).
    RectangularTail,
    /// Any other violation of the size ordering.
    Unsupported,
}

/// The blocks of a multiple saddle-point matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSaddleSystem {
    diag: Vec<Matrix>,
    offdiag: Vec<Matrix>,
}

impl BlockSaddleSystem {
    /// Builds a system from `A_0..A_N` and `B_1..B_N`, checking only that the
    /// block dimensions fit together.
    pub fn new(diag: Vec<Matrix>, offdiag: Vec<Matrix>) -> Result<Self> {
        if offdiag.is_empty() {
            return Err(Error::Structural("at least one off-diagonal block is required (N >= 1)".into()));
        }
        if diag.len() != offdiag.len() + 1 {
            return Err(Error::Structural(format!(
                "{} diagonal blocks but {} off-diagonal blocks; expected N+1 and N",
                diag.len(),
                offdiag.len()
            )));
        }
        for (k, a) in diag.iter().enumerate() {
            if a.nrows() != a.ncols() {
                return Err(Error::Structural(format!("A_{k} is {}x{}, expected square", a.nrows(), a.ncols())));
            }
            if a.nrows() == 0 {
                return Err(Error::Structural(format!("A_{k} is empty")));
            }
        }
        for (i, b) in offdiag.iter().enumerate() {
            let k = i + 1;
            let (rows, cols) = (diag[k].nrows(), diag[k - 1].nrows());
            if b.nrows() != rows || b.ncols() != cols {
                return Err(Error::Structural(format!(
                    "B_{k} is {}x{}, expected {rows}x{cols} to couple A_{} and A_{k}",
                    b.nrows(),
                    b.ncols(),
                    k - 1
                )));
            }
        }
        Ok(Self { diag, offdiag })
    }

    /// Number of coupling blocks `N`.
    pub fn depth(&self) -> usize {
        self.offdiag.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.diag.iter().map(|a| a.nrows()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.diag.iter().map(|a| a.nrows()).sum()
    }

    /// `A_k`, `k = 0..=N`.
    pub fn diag(&self, k: usize) -> &Matrix {
        &self.diag[k]
    }

    /// `B_k`, `k = 1..=N`.
    pub fn offdiag(&self, k: usize) -> &Matrix {
        &self.offdiag[k - 1]
    }

    pub fn diag_blocks(&self) -> &[Matrix] {
        &self.diag
    }

    pub fn offdiag_blocks(&self) -> &[Matrix] {
        &self.offdiag
    }

    /// Replaces `A_k` with a zero block of the same size.
    pub fn zero_diag(&mut self, k: usize) {
        let n = self.diag[k].nrows();
        self.diag[k] = Matrix::zeros(n, n);
    }

    pub fn shape(&self) -> Shape {
        let dims = self.dims();
        let violations: Vec<usize> = (1..dims.len()).filter(|&k| dims[k] > dims[k - 1]).collect();
        match violations.as_slice() {
            [] => Shape::Standard,
            [k] if *k == 2 && self.depth() == 2 => Shape::RectangularTail,
            _ => Shape::Unsupported,
        }
    }

    /// Start offset of every block inside the assembled matrix.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.diag.len());
        let mut acc = 0;
        for a in &self.diag {
            offsets.push(acc);
            acc += a.nrows();
        }
        offsets
    }

    /// Dense symmetric matrix with diagonal blocks `(-1)^k A_k` and
    /// sub-diagonal blocks `B_k`.
    pub fn assemble_full(&self) -> Matrix {
        let n = self.total_dim();
        let offsets = self.offsets();
        let mut m = Matrix::zeros(n, n);
        for (k, a) in self.diag.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let o = offsets[k];
            m.view_mut((o, o), a.shape()).copy_from(&(a * sign));
        }
        for (i, b) in self.offdiag.iter().enumerate() {
            let k = i + 1;
            let (r, c) = (offsets[k], offsets[k - 1]);
            m.view_mut((r, c), b.shape()).copy_from(b);
            m.view_mut((c, r), (b.ncols(), b.nrows())).copy_from(&b.transpose());
        }
        m
    }
}

/// Outcome of one invariant check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured quantity (smallest eigenvalue, smallest singular value, …).
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the spectral and shape preconditions of a system.
///
/// `tol` is relative: definiteness is judged against `tol·‖A_k‖` and rank
/// against `tol·σ_max(B_k)`.
pub fn validate_system(sys: &BlockSaddleSystem, tol: f64) -> ValidationReport {
    let mut checks = Vec::new();

    for (k, a) in sys.diag_blocks().iter().enumerate() {
        let skew = linalg::max_abs(&(a - a.transpose()));
        let scale = linalg::max_abs(a);
        checks.push(Check {
            name: format!("A_{k} symmetric"),
            passed: skew <= tol * scale.max(f64::MIN_POSITIVE),
            measured: skew,
            threshold: tol * scale,
            detail: format!("max |A_{k} - A_{k}^T| = {skew:.3e}"),
        });

        let eig = linalg::sym_eigenvalues(a);
        let min_eig = eig[0];
        let norm = eig[0].abs().max(eig[eig.len() - 1].abs());
        let threshold = tol * norm;
        let (passed, detail) = if k == 0 {
            let ok = min_eig > threshold;
            let msg = if ok {
                format!("A_0 positive definite (min eigenvalue {min_eig:.6e})")
            } else {
                format!("A_0 not positive definite (min eigenvalue {min_eig:.6e})")
            };
            (ok, msg)
        } else {
            let ok = min_eig >= -threshold;
            let msg = if ok {
                format!("A_{k} positive semi-definite (min eigenvalue {min_eig:.6e})")
            } else {
                format!("A_{k} not positive semi-definite (min eigenvalue {min_eig:.6e})")
            };
            (ok, msg)
        };
        checks.push(Check {
            name: if k == 0 { "A_0 positive definite".into() } else { format!("A_{k} positive semi-definite") },
            passed,
            measured: min_eig,
            threshold: if k == 0 { threshold } else { -threshold },
            detail,
        });
    }

    for k in 1..=sys.depth() {
        let b = sys.offdiag(k);
        let sv = linalg::singular_values(b);
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        let expected = b.nrows().min(b.ncols());
        let rank = sv.iter().filter(|s| **s > tol * smax).count();
        checks.push(Check {
            name: format!("B_{k} full rank"),
            passed: smax > 0.0 && rank == expected,
            measured: smin,
            threshold: tol * smax,
            detail: format!("numerical rank {rank} of {expected} (sigma_min {smin:.6e}, sigma_max {smax:.6e})"),
        });
    }

    let shape = sys.shape();
    checks.push(Check {
        name: "block size ordering".into(),
        passed: shape != Shape::Unsupported,
        measured: 0.0,
        threshold: 0.0,
        detail: format!("dims {:?}: {shape:?}", sys.dims()),
    });

    let pass = checks.iter().all(|c| c.passed);
    ValidationReport { checks, pass }
}

/// How `Ŝ_k` is derived from its target (`A_0` at level 0, `S̃_k` above).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ApproxStrategy {
    Exact,
    /// Diagonal of the target.
    Jacobi,
    /// `c·I`.
    ScaledIdentity { c: f64 },
    /// Blend `c₁·T + c₂·I` whose pencil spectrum against `T` spans exactly
    /// `[lo, hi]`.
    SpectralWindow { lo: f64, hi: f64 },
}

impl fmt::Display for ApproxStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxStrategy::Exact => write!(f, "exact"),
            ApproxStrategy::Jacobi => write!(f, "jacobi"),
            ApproxStrategy::ScaledIdentity { c } => write!(f, "scaled:{c}"),
            ApproxStrategy::SpectralWindow { lo, hi } => write!(f, "window:{lo}:{hi}"),
        }
    }
}

impl FromStr for ApproxStrategy {
    type Err = Error;

    /// Accepts `exact`, `jacobi`, `scaled:<c>` and `window:<lo>:<hi>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad number {t:?} in strategy {s:?}")))
        };
        match parts.as_slice() {
            ["exact"] => Ok(ApproxStrategy::Exact),
            ["jacobi"] => Ok(ApproxStrategy::Jacobi),
            ["scaled", c] => Ok(ApproxStrategy::ScaledIdentity { c: num(c)? }),
            ["window", lo, hi] => Ok(ApproxStrategy::SpectralWindow { lo: num(lo)?, hi: num(hi)? }),
            _ => Err(Error::Parameter(format!(
                "unknown strategy {s:?} (expected exact, jacobi, scaled:<c> or window:<lo>:<hi>)"
            ))),
        }
    }
}

/// Builds `Ŝ = c₁·T + c₂·I` such that the eigenvalues of `Ŝ⁻¹T` are
/// `t/(c₁t + c₂)` for the eigenvalues `t` of `T`, with the extreme ones mapped
/// onto `lo` and `hi`.
///
/// Returns `None` when `T` has a single distinct eigenvalue and `lo < hi`,
/// in which case the window cannot be spanned.
pub(crate) fn window_blend(target: &Matrix, lo: f64, hi: f64) -> Result<Option<Matrix>> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::Parameter(format!("spectral window [{lo}, {hi}] must satisfy 0 < lo <= hi")));
    }
    let n = target.nrows();
    if lo == hi {
        return Ok(Some(target / lo));
    }
    let eig = linalg::sym_eigenvalues(target);
    let (tmin, tmax) = (eig[0], eig[n - 1]);
    if tmin <= 0.0 {
        return Err(Error::NotPositiveDefinite { what: "window target".into(), min_eig: tmin });
    }
    if tmax - tmin <= 1e-14 * tmax {
        return Ok(None);
    }
    // 1/μ = c₁ + c₂/t, pinned at (t_min, lo) and (t_max, hi).
    let c2 = (1.0 / lo - 1.0 / hi) / (1.0 / tmin - 1.0 / tmax);
    let c1 = 1.0 / hi - c2 / tmax;
    let mut s = target * c1;
    for i in 0..n {
        s[(i, i)] += c2;
    }
    Ok(Some(linalg::symmetrize(&s)))
}

fn approximate(target: &Matrix, strategy: ApproxStrategy, level: usize) -> Result<Matrix> {
    let n = target.nrows();
    match strategy {
        ApproxStrategy::Exact => Ok(target.clone()),
        ApproxStrategy::Jacobi => {
            let d = target.diagonal();
            if let Some(i) = d.iter().position(|v| *v <= 0.0) {
                return Err(Error::SingularApproximation {
                    level,
                    detail: format!("diagonal entry {i} of the target is {:.3e}", d[i]),
                });
            }
            Ok(Matrix::from_diagonal(&d))
        }
        ApproxStrategy::ScaledIdentity { c } => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Parameter(format!("scaled identity factor must be positive, got {c}")));
            }
            Ok(Matrix::identity(n, n) * c)
        }
        ApproxStrategy::SpectralWindow { lo, hi } => match window_blend(target, lo, hi)? {
            Some(s) => Ok(s),
            // Single-point spectrum: land it on the lower end of the window.
            None => Ok(target / lo),
        },
    }
}

/// Exact, perturbed and approximate Schur complements, with `Ŝ_k` factored.
#[derive(Clone, Debug)]
pub struct SchurChain {
    exact: Option<Vec<Matrix>>,
    perturbed: Vec<Matrix>,
    approx: Vec<Matrix>,
    factors: Vec<SpdFactor>,
    strategies: Vec<ApproxStrategy>,
    dims: Vec<usize>,
}

/// `B M⁻¹ Bᵀ` computed as `WᵀW` with `W = L⁻¹Bᵀ`, so the result is exactly
/// symmetric.
fn coupled_product(b: &Matrix, m: &SpdFactor) -> Matrix {
    let w = m.left_whiten(&b.transpose());
    w.transpose() * w
}

fn exact_complements(sys: &BlockSaddleSystem) -> Result<Vec<Matrix>> {
    let mut s = vec![sys.diag(0).clone()];
    let mut f = SpdFactor::new(sys.diag(0), "S_0")?;
    for k in 1..=sys.depth() {
        let sk = sys.diag(k) + coupled_product(sys.offdiag(k), &f);
        f = SpdFactor::new(&sk, &format!("S_{k}"))?;
        s.push(sk);
    }
    Ok(s)
}

/// `S_0 = A_0`, `S_k = A_k + B_k S_{k-1}⁻¹ B_kᵀ`, used directly as the
/// preconditioner blocks.
pub fn build_exact_schur_chain(sys: &BlockSaddleSystem) -> Result<SchurChain> {
    let exact = exact_complements(sys)?;
    let factors = exact
        .iter()
        .enumerate()
        .map(|(k, s)| SpdFactor::new(s, &format!("S_{k}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(SchurChain {
        perturbed: exact[1..].to_vec(),
        approx: exact.clone(),
        exact: Some(exact),
        factors,
        strategies: vec![ApproxStrategy::Exact; sys.depth() + 1],
        dims: sys.dims(),
    })
}

/// Builds `Ŝ_0 ≈ A_0` and `Ŝ_k ≈ S̃_k = A_k + B_k Ŝ_{k-1}⁻¹ B_kᵀ` level by
/// level with the given strategies (one per level `0..=N`).
pub fn build_inexact_chain(sys: &BlockSaddleSystem, strategies: &[ApproxStrategy]) -> Result<SchurChain> {
    if strategies.len() != sys.depth() + 1 {
        return Err(Error::Structural(format!(
            "{} strategies given for {} levels",
            strategies.len(),
            sys.depth() + 1
        )));
    }
    let mut perturbed = Vec::with_capacity(sys.depth());
    let mut approx = Vec::with_capacity(sys.depth() + 1);
    let mut factors: Vec<SpdFactor> = Vec::with_capacity(sys.depth() + 1);
    for (k, &strategy) in strategies.iter().enumerate() {
        let target = if k == 0 {
            sys.diag(0).clone()
        } else {
            let t = sys.diag(k) + coupled_product(sys.offdiag(k), &factors[k - 1]);
            perturbed.push(t.clone());
            t
        };
        let s = approximate(&target, strategy, k)?;
        factors.push(SpdFactor::new(&s, &format!("approximate Schur complement at level {k}"))?);
        approx.push(s);
    }
    Ok(SchurChain {
        exact: exact_complements(sys).ok(),
        perturbed,
        approx,
        factors,
        strategies: strategies.to_vec(),
        dims: sys.dims(),
    })
}

impl SchurChain {
    pub fn depth(&self) -> usize {
        self.approx.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `S_0..S_N` when every exact complement is positive definite.
    pub fn exact(&self) -> Option<&[Matrix]> {
        self.exact.as_deref()
    }

    /// `S̃_k`, `k = 1..=N`.
    pub fn perturbed(&self, k: usize) -> &Matrix {
        &self.perturbed[k - 1]
    }

    /// `Ŝ_k`, `k = 0..=N`.
    pub fn approx(&self, k: usize) -> &Matrix {
        &self.approx[k]
    }

    pub fn factor(&self, k: usize) -> &SpdFactor {
        &self.factors[k]
    }

    pub fn strategies(&self) -> &[ApproxStrategy] {
        &self.strategies
    }

    pub fn is_exact(&self) -> bool {
        self.strategies.iter().all(|s| *s == ApproxStrategy::Exact)
    }

    /// Overwrites `S̃_k`; only meant for corruption experiments.
    #[doc(hidden)]
    pub fn set_perturbed(&mut self, k: usize, m: Matrix) {
        self.perturbed[k - 1] = m;
    }

    /// Largest relative deviation of the stored `S̃_k` from
    /// `A_k + B_k Ŝ_{k-1}⁻¹ B_kᵀ` recomputed from scratch.
    pub fn recompute_residual(&self, sys: &BlockSaddleSystem) -> f64 {
        (1..=self.depth())
            .map(|k| {
                let fresh = sys.diag(k) + sys.offdiag(k) * self.factors[k - 1].solve(&sys.offdiag(k).transpose());
                let stored = &self.perturbed[k - 1];
                (stored - &fresh).norm() / fresh.norm()
            })
            .fold(0.0, f64::max)
    }

    /// Blockwise `Ŝ_k⁻¹ v_k`.
    pub fn apply_preconditioner(&self, v: &Vector) -> Result<Vector> {
        let n: usize = self.dims.iter().sum();
        if v.len() != n {
            return Err(Error::Structural(format!("vector has length {}, preconditioner has size {n}", v.len())));
        }
        let mut out = Vector::zeros(n);
        let mut o = 0;
        for (k, &d) in self.dims.iter().enumerate() {
            let block = Vector::from_iterator(d, v.rows(o, d).iter().copied());
            out.rows_mut(o, d).copy_from(&self.factors[k].solve_vec(&block));
            o += d;
        }
        Ok(out)
    }
}
