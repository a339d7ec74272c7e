#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use saddlebounds::polynomials::GammaAssignment;
use saddlebounds::IndicatorSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random admissible indicator box; about one E-interval in four above
/// level 0 touches zero.
pub fn random_indicators(rng: &mut impl Rng, n: usize) -> IndicatorSet {
    let mut alpha_e = Vec::with_capacity(n + 1);
    let mut beta_e = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let lo = if k == 0 {
            rng.random_range(0.05..1.0)
        } else if rng.random_bool(0.25) {
            0.0
        } else {
            rng.random_range(0.0..1.0)
        };
        alpha_e.push(lo);
        beta_e.push(lo + rng.random_range(0.0..3.0));
    }
    let mut alpha_r = Vec::with_capacity(n);
    let mut beta_r = Vec::with_capacity(n);
    for _ in 0..n {
        let lo = rng.random_range(0.05..1.0);
        alpha_r.push(lo);
        beta_r.push(lo + rng.random_range(0.0..3.0));
    }
    IndicatorSet { n, alpha_e, beta_e, alpha_r, beta_r, rect_tail: false }
}

/// Admissible parameters: `γ_E^(0) > 0`, `γ_E^(k) ≥ 0`, `γ_R > 0`.
pub fn random_gamma(rng: &mut impl Rng, n: usize) -> GammaAssignment {
    let e = (0..=n)
        .map(|k| if k == 0 { rng.random_range(0.05..5.0) } else { rng.random_range(0.0..5.0) })
        .collect();
    let r = (0..n).map(|_| rng.random_range(0.05..5.0)).collect();
    GammaAssignment::new(e, r)
}

pub fn max_endpoint_gap(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
