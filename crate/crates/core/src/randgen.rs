//! Random multiple saddle-point systems with prescribed indicator windows.
//!
//! Every random draw comes from a ChaCha8 generator. A single case uses
//! `ChaCha8Rng::seed_from_u64(seed)`; suite case `i` uses the same seed with
//! stream `i` selected through `set_stream`, so cases are independent of the
//! order in which they run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::saddle::{build_inexact_chain, ApproxStrategy, BlockSaddleSystem, SchurChain};

/// Block sizes are `round(base + jitter·U)` with `U` uniform on `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionPolicy {
    pub base: f64,
    pub jitter: f64,
}

impl Default for DimensionPolicy {
    fn default() -> Self {
        Self { base: 50.0, jitter: 10.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenOptions {
    pub dims: DimensionPolicy,
    /// Extra shift `margin·‖A_k‖` for `k ≥ 1` on top of `|λ_min|`.
    #[serde(default)]
    pub psd_margin: f64,
    /// Set `A_k = 0` for `k ≥ 1`.
    #[serde(default)]
    pub zero_tail: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self { dims: DimensionPolicy::default(), psd_margin: 0.0, zero_tail: false }
    }
}

/// Shift applied to `A_0` on top of `|λ_min|`, relative to `‖A_0‖`.
pub const PD_MARGIN: f64 = 1e-3;

const RANK_RESAMPLES: usize = 10;

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn draw_dim(rng: &mut impl Rng, policy: &DimensionPolicy) -> usize {
    let d = (policy.base + policy.jitter * rng.random::<f64>()).round();
    d.max(1.0) as usize
}

fn draw_dims(rng: &mut impl Rng, n: usize, policy: &DimensionPolicy) -> Result<Vec<usize>> {
    let mut dims = vec![draw_dim(rng, policy)];
    for _ in 1..=n {
        let prev = dims[dims.len() - 1];
        let mut d = draw_dim(rng, policy);
        let mut tries = 0;
        while d > prev {
            tries += 1;
            if tries > 10_000 {
                return Err(Error::Parameter(format!("dimension policy {policy:?} cannot produce n_k <= {prev}")));
            }
            d = draw_dim(rng, policy);
        }
        dims.push(d);
    }
    Ok(dims)
}

/// Symmetric part of a Gaussian matrix shifted by `|λ_min|·I` plus
/// `margin·‖A‖·I`.
fn shifted_symmetric(rng: &mut impl Rng, n: usize, margin: f64) -> Matrix {
    let a = linalg::symmetrize(&gaussian(rng, n, n));
    let eig = linalg::sym_eigenvalues(&a);
    let norm = eig[0].abs().max(eig[n - 1].abs());
    let shift = eig[0].abs() + margin * norm;
    let mut a = a;
    for i in 0..n {
        a[(i, i)] += shift;
    }
    a
}

fn full_rank_gaussian(rng: &mut impl Rng, rows: usize, cols: usize, level: usize) -> Result<Matrix> {
    for _ in 0..RANK_RESAMPLES {
        let b = gaussian(rng, rows, cols);
        let sv = linalg::singular_values(&b);
        if sv.last().copied().unwrap_or(0.0) > 1e-10 * sv[0] {
            return Ok(b);
        }
    }
    Err(Error::RankDeficient { level, detail: format!("no full-rank draw in {RANK_RESAMPLES} attempts") })
}

/// Draws a system from `rng`.
pub fn random_system_with(n: usize, rng: &mut impl Rng, opts: &GenOptions) -> Result<BlockSaddleSystem> {
    if n == 0 {
        return Err(Error::Parameter("N must be at least 1".into()));
    }
    let dims = draw_dims(rng, n, &opts.dims)?;
    let mut diag = Vec::with_capacity(n + 1);
    for (k, &d) in dims.iter().enumerate() {
        let margin = if k == 0 { PD_MARGIN } else { opts.psd_margin };
        let a = shifted_symmetric(rng, d, margin);
        diag.push(if k > 0 && opts.zero_tail { Matrix::zeros(d, d) } else { a });
    }
    let offdiag = (1..=n)
        .map(|k| full_rank_gaussian(rng, dims[k], dims[k - 1], k))
        .collect::<Result<Vec<_>>>()?;
    BlockSaddleSystem::new(diag, offdiag)
}

/// Default policy, seeded ChaCha8 stream 0.
pub fn random_system(n: usize, seed: u64) -> Result<BlockSaddleSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_system_with(n, &mut rng, &GenOptions::default())
}

/// Generator for suite case `stream` under `seed`.
pub fn case_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Chain whose level-`k` approximation is the blend `c₁·T_k + c₂·I` mapping
/// the spectrum of `Ŝ_k⁻¹T_k` onto `targets[k]`, where `T_0 = A_0` and
/// `T_k = S̃_k`. With `A_k = 0` for `k ≥ 1` the level-`k` window is exactly
/// the R-indicator interval.
pub fn controlled_chain(sys: &BlockSaddleSystem, targets: &[(f64, f64)]) -> Result<SchurChain> {
    if targets.len() != sys.depth() + 1 {
        return Err(Error::Parameter(format!(
            "{} target intervals for {} levels",
            targets.len(),
            sys.depth() + 1
        )));
    }
    for (k, &(lo, hi)) in targets.iter().enumerate() {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Infeasible(format!("target [{lo}, {hi}] at level {k} is not a positive interval")));
        }
    }
    let strategies: Vec<ApproxStrategy> = targets
        .iter()
        .map(|&(lo, hi)| ApproxStrategy::SpectralWindow { lo, hi })
        .collect();
    build_inexact_chain(sys, &strategies)
}
