//! Preconditioned MINRES (Paige–Saunders) and the two-interval residual
//! envelope.
//!
//! The recorded residual is `‖r_k‖_{𝒫⁻¹} / ‖r_0‖_{𝒫⁻¹}`, the quantity MINRES
//! minimizes, so the history is non-increasing up to rounding. Lanczos
//! vectors are not re-orthogonalized.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::EigenvalueBounds;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::saddle::{BlockSaddleSystem, SchurChain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// The Lanczos process stopped (`β = 0`) before the tolerance was met.
    Breakdown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative preconditioned residual after each iteration; entry 0 is 1.
    pub history: Vec<f64>,
    pub termination: Termination,
    pub converged: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vector,
    pub report: SolveReport,
}

/// `𝒜x` applied block by block.
pub fn apply_system(sys: &BlockSaddleSystem, x: &Vector) -> Result<Vector> {
    let total = sys.total_dim();
    if x.len() != total {
        return Err(Error::Structural(format!("vector has length {}, system has size {total}", x.len())));
    }
    let offsets = sys.offsets();
    let dims = sys.dims();
    let mut y = Vector::zeros(total);
    for k in 0..=sys.depth() {
        let xk = x.rows(offsets[k], dims[k]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut yk = sys.diag(k) * xk * sign;
        if k >= 1 {
            yk += sys.offdiag(k) * x.rows(offsets[k - 1], dims[k - 1]);
        }
        if k < sys.depth() {
            yk += sys.offdiag(k + 1).transpose() * x.rows(offsets[k + 1], dims[k + 1]);
        }
        y.rows_mut(offsets[k], dims[k]).copy_from(&yk);
    }
    Ok(y)
}

/// MINRES for a symmetric operator `a` with SPD preconditioner `m_inv`.
pub fn minres_operator<A, M>(a: A, m_inv: M, b: &Vector, tol: f64, maxit: usize) -> Result<Solution>
where
    A: Fn(&Vector) -> Result<Vector>,
    M: Fn(&Vector) -> Result<Vector>,
{
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let start = Instant::now();
    let n = b.len();
    let mut x = Vector::zeros(n);

    let mut r1 = b.clone();
    let mut y = m_inv(&r1)?;
    let beta1_sq = r1.dot(&y);
    if beta1_sq < 0.0 {
        return Err(Error::NotPositiveDefinite { what: "preconditioner".into(), min_eig: f64::NAN });
    }
    let beta1 = beta1_sq.sqrt();
    if beta1 == 0.0 {
        return Ok(Solution {
            x,
            report: SolveReport {
                iterations: 0,
                history: vec![0.0],
                termination: Termination::Converged,
                converged: true,
                wall_time: start.elapsed(),
            },
        });
    }

    let mut r2 = r1.clone();
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln) = (0.0, 0.0);
    let mut phibar = beta1;
    let (mut cs, mut sn) = (-1.0, 0.0);
    let mut w = Vector::zeros(n);
    let mut w2 = Vector::zeros(n);
    let mut history = vec![1.0];
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    for itn in 1..=maxit {
        iterations = itn;
        let v = &y / beta;
        y = a(&v)?;
        if itn >= 2 {
            y.axpy(-beta / oldb, &r1, 1.0);
        }
        let alfa = v.dot(&y);
        y.axpy(-alfa / beta, &r2, 1.0);
        r1 = std::mem::replace(&mut r2, y);
        y = m_inv(&r2)?;
        oldb = beta;
        let beta_sq = r2.dot(&y);
        if beta_sq < 0.0 {
            return Err(Error::NotPositiveDefinite { what: "preconditioner".into(), min_eig: f64::NAN });
        }
        beta = beta_sq.sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let w1 = std::mem::replace(&mut w2, w);
        w = (&v - &w1 * oldeps - &w2 * delta) / gamma;
        x.axpy(phi, &w, 1.0);

        let rel = phibar / beta1;
        history.push(rel);
        if rel <= tol {
            termination = Termination::Converged;
            break;
        }
        if beta <= f64::EPSILON * beta1 {
            termination = Termination::Breakdown;
            break;
        }
    }

    Ok(Solution {
        x,
        report: SolveReport {
            iterations,
            converged: termination == Termination::Converged,
            history,
            termination,
            wall_time: start.elapsed(),
        },
    })
}

/// Solves `𝒜x = b` preconditioned by `blkdiag(Ŝ_0, …, Ŝ_N)`.
pub fn minres(sys: &BlockSaddleSystem, chain: &SchurChain, b: &Vector, tol: f64, maxit: usize) -> Result<Solution> {
    if b.len() != sys.total_dim() {
        return Err(Error::Structural(format!(
            "right-hand side has length {}, system has size {}",
            b.len(),
            sys.total_dim()
        )));
    }
    if chain.dims() != sys.dims().as_slice() {
        return Err(Error::Structural("chain and system dimensions differ".into()));
    }
    minres_operator(|v| apply_system(sys, v), |v| chain.apply_preconditioner(v), b, tol, maxit)
}

/// `(ρ₋^l, ρ₋^u, ρ₊^l, ρ₊^u)` after widening the narrower interval outward so
/// both have the same width.
pub fn equalized_intervals(bounds: &EigenvalueBounds) -> Result<[f64; 4]> {
    bounds.check()?;
    let [mut nl, nu] = bounds.neg;
    let [pl, mut pu] = bounds.pos;
    let (wn, wp) = (nu - nl, pu - pl);
    if wn < wp {
        nl = nu - wp;
    } else {
        pu = pl + wn;
    }
    Ok([nl, nu, pl, pu])
}

/// The convergence factor `(√|ρ₋^l ρ₊^u| − √|ρ₋^u ρ₊^l|) / (√|ρ₋^l ρ₊^u| + √|ρ₋^u ρ₊^l|)`.
pub fn envelope_rate(bounds: &EigenvalueBounds) -> Result<f64> {
    let [nl, nu, pl, pu] = equalized_intervals(bounds)?;
    let outer = (nl * pu).abs().sqrt();
    let inner = (nu * pl).abs().sqrt();
    Ok((outer - inner) / (outer + inner))
}

/// `2·rate^{⌊k/2⌋}`.
pub fn convergence_envelope(bounds: &EigenvalueBounds, k: usize) -> Result<f64> {
    let rate = envelope_rate(bounds)?;
    Ok(2.0 * rate.powi((k / 2) as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    /// Iterations checked (envelope above the cutoff).
    pub checked: usize,
    /// Largest `history[k] / envelope(k)`.
    pub worst_ratio: f64,
    pub worst_iteration: usize,
    pub pass: bool,
}

/// Compares a residual history against the envelope at every iteration where
/// the envelope exceeds `cutoff`, allowing `history ≤ envelope·(1 + slack)`.
pub fn check_envelope(history: &[f64], bounds: &EigenvalueBounds, cutoff: f64, slack: f64) -> Result<EnvelopeCheck> {
    let rate = envelope_rate(bounds)?;
    let mut out = EnvelopeCheck { checked: 0, worst_ratio: 0.0, worst_iteration: 0, pass: true };
    for (k, h) in history.iter().enumerate() {
        let env = 2.0 * rate.powi((k / 2) as i32);
        if env <= cutoff {
            break;
        }
        out.checked += 1;
        let ratio = h / env;
        if ratio > out.worst_ratio {
            out.worst_ratio = ratio;
            out.worst_iteration = k;
        }
    }
    out.pass = out.worst_ratio <= 1.0 + slack;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{Method, Provenance, EndpointSource};
    use crate::linalg::Matrix;
    use crate::saddle::build_exact_schur_chain;

    fn sym_bounds(a: f64, b: f64) -> EigenvalueBounds {
        let src = || EndpointSource { source: "test".into(), degrees: vec![] };
        EigenvalueBounds {
            neg: [-a, -b],
            pos: [b, a],
            extra: None,
            provenance: Provenance {
                method: Method::Linear,
                neg_lb: src(),
                neg_ub: src(),
                pos_lb: src(),
                pos_ub: src(),
                hulled: false,
                warnings: vec![],
            },
        }
    }

    #[test]
    fn envelope_values() {
        let b = sym_bounds(2.0, 1.0);
        assert!((convergence_envelope(&b, 4).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(convergence_envelope(&b, 0).unwrap(), 2.0);
        assert_eq!(convergence_envelope(&b, 1).unwrap(), 2.0);
    }

    #[test]
    fn widening_targets_the_narrower_side() {
        let mut b = sym_bounds(2.0, 1.0);
        b.pos = [0.5, 3.0];
        let [nl, nu, pl, pu] = equalized_intervals(&b).unwrap();
        assert_eq!((nl, nu, pl, pu), (-3.5, -1.0, 0.5, 3.0));
    }

    #[test]
    fn spd_operator_equal_to_preconditioner() {
        let m = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.0, 0.0, 0.0, 2.0]);
        let chol = m.clone().cholesky().unwrap();
        let b = Vector::from_vec(vec![1.0, -2.0, 0.5]);
        let sol = minres_operator(|v| Ok(&m * v), |v| Ok(chol.solve(v)), &b, 1e-12, 10).unwrap();
        assert_eq!(sol.report.iterations, 1);
        assert!(sol.report.converged);
        assert!((&m * &sol.x - &b).norm() < 1e-12);
    }

    #[test]
    fn zero_rhs() {
        let sys = BlockSaddleSystem::new(
            vec![Matrix::identity(2, 2), Matrix::zeros(1, 1)],
            vec![Matrix::from_row_slice(1, 2, &[1.0, 0.0])],
        )
        .unwrap();
        let chain = build_exact_schur_chain(&sys).unwrap();
        let sol = minres(&sys, &chain, &Vector::zeros(3), 1e-12, 10).unwrap();
        assert_eq!(sol.report.iterations, 0);
        assert_eq!(sol.x, Vector::zeros(3));
    }

    #[test]
    fn matvec_matches_assembly() {
        let sys = BlockSaddleSystem::new(
            vec![Matrix::identity(2, 2) * 2.0, Matrix::from_element(1, 1, 0.5)],
            vec![Matrix::from_row_slice(1, 2, &[1.0, 3.0])],
        )
        .unwrap();
        let x = Vector::from_vec(vec![1.0, -1.0, 2.0]);
        let full = sys.assemble_full() * &x;
        assert!((apply_system(&sys, &x).unwrap() - full).norm() < 1e-15);
    }
}
