//! Eigenvalue inclusion intervals `[μ₋^LB, μ₋^UB] ∪ [μ₊^LB, μ₊^UB]` computed
//! from an [`IndicatorSet`].
//!
//! The linear algorithm evaluates the polynomial sequence at four corners of
//! the indicator box, chosen from the sign of each root's sensitivity to the
//! parameters:
//!
//! | endpoint | γ_E                      | γ_R                      | degrees          |
//! |----------|--------------------------|--------------------------|------------------|
//! | μ₋^LB    | α_E^(0), β_E^(1), α_E^(2) … | β_R everywhere        | N+1, smallest    |
//! | μ₋^UB    | β_E^(0), α_E^(1), β_E^(2) … | α_R^(1), β_R^(2), α_R^(3) … | even, largest negative |
//! | μ₊^LB    | α_E^(0), β_E^(1), α_E^(2) … | β_R^(1), α_R^(2), β_R^(3) … | odd, smallest positive |
//! | μ₊^UB    | β_E^(0), α_E^(1), β_E^(2) … | β_R everywhere        | N+1, largest     |
//!
//! [`compute_bounds_bruteforce`] sweeps every corner and every degree and is
//! the reference the linear algorithm is checked against.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::IndicatorSet;
use crate::polynomials::{roots_u, GammaAssignment};

/// Largest `N` accepted by the exhaustive corner sweep.
pub const BRUTEFORCE_MAX_N: usize = 6;

/// Relative slack allowed by [`containment`] by default.
pub const CONTAINMENT_REL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Linear,
    Bruteforce,
    N2Closed,
    N2Rect,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Linear => "linear",
            Method::Bruteforce => "bruteforce",
            Method::N2Closed => "n2-closed",
            Method::N2Rect => "n2-rect",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Method::Linear),
            "bruteforce" => Ok(Method::Bruteforce),
            "n2-closed" => Ok(Method::N2Closed),
            "n2-rect" => Ok(Method::N2Rect),
            _ => Err(Error::Parameter(format!(
                "unknown method {s:?} (expected linear, bruteforce, n2-closed or n2-rect)"
            ))),
        }
    }
}

/// Where an endpoint came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointSource {
    /// Corner name, or the indicator interval that supplied the value.
    pub source: String,
    /// Polynomial degrees attaining the endpoint (empty when the value is an
    /// indicator endpoint rather than a root).
    pub degrees: Vec<usize>,
}

impl EndpointSource {
    fn new(source: impl Into<String>, degrees: Vec<usize>) -> Self {
        Self { source: source.into(), degrees }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: Method,
    pub neg_lb: EndpointSource,
    pub neg_ub: EndpointSource,
    pub pos_lb: EndpointSource,
    pub pos_ub: EndpointSource,
    /// Set when `pos` is the hull of several positive intervals.
    #[serde(default)]
    pub hulled: bool,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Eigenvalue inclusion set: `neg ∪ pos`, plus `extra` on a rectangular tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueBounds {
    pub neg: [f64; 2],
    pub pos: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<[f64; 2]>,
    pub provenance: Provenance,
}

impl EigenvalueBounds {
    /// `μ₋^LB ≤ μ₋^UB < 0 < μ₊^LB ≤ μ₊^UB`, extra interval positive.
    pub fn check(&self) -> Result<()> {
        let [nl, nu] = self.neg;
        let [pl, pu] = self.pos;
        if !(nl <= nu && nu < 0.0 && 0.0 < pl && pl <= pu) {
            return Err(Error::InvalidBounds(format!("[{nl}, {nu}] ∪ [{pl}, {pu}] is not ordered around zero")));
        }
        if let Some([lo, hi]) = self.extra {
            if !(0.0 < lo && lo <= hi) {
                return Err(Error::InvalidBounds(format!("extra interval [{lo}, {hi}] is not positive")));
            }
        }
        Ok(())
    }

    /// `(μ₋^LB, μ₋^UB, μ₊^LB, μ₊^UB)`.
    pub fn endpoints(&self) -> [f64; 4] {
        [self.neg[0], self.neg[1], self.pos[0], self.pos[1]]
    }

    fn intervals(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        [self.neg, self.pos].into_iter().chain(self.extra)
    }

    /// Signed distance of `x` into the nearest interval (positive inside).
    pub fn slack(&self, x: f64) -> f64 {
        self.intervals()
            .map(|[lo, hi]| (x - lo).min(hi - x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Membership with endpoints relaxed by `rel_tol·|endpoint|`.
    pub fn contains(&self, x: f64, rel_tol: f64) -> bool {
        self.intervals()
            .any(|[lo, hi]| x >= lo - rel_tol * lo.abs() && x <= hi + rel_tol * hi.abs())
    }
}

/// The four parameter corners used by the linear algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerAssignments {
    pub neg_lb: GammaAssignment,
    pub neg_ub: GammaAssignment,
    pub pos_lb: GammaAssignment,
    pub pos_ub: GammaAssignment,
}

/// Picks `β` at even levels when `beta_on_even`, `α` otherwise, alternating.
fn alternate(alpha: &[f64], beta: &[f64], beta_on_even: bool, first_level: usize) -> Vec<f64> {
    alpha
        .iter()
        .zip(beta)
        .enumerate()
        .map(|(i, (a, b))| {
            let even = (i + first_level) % 2 == 0;
            if even == beta_on_even {
                *b
            } else {
                *a
            }
        })
        .collect()
}

pub fn corner_assignments(ind: &IndicatorSet) -> CornerAssignments {
    let e_low_first = alternate(&ind.alpha_e, &ind.beta_e, false, 0);
    let e_high_first = alternate(&ind.alpha_e, &ind.beta_e, true, 0);
    CornerAssignments {
        neg_lb: GammaAssignment::new(e_low_first.clone(), ind.beta_r.clone()),
        neg_ub: GammaAssignment::new(e_high_first.clone(), alternate(&ind.alpha_r, &ind.beta_r, true, 1)),
        pos_lb: GammaAssignment::new(e_low_first, alternate(&ind.alpha_r, &ind.beta_r, false, 1)),
        pos_ub: GammaAssignment::new(e_high_first, ind.beta_r.clone()),
    }
}

fn ties_within(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Linear-cost bounds: four evaluations of `U_{N+1}` plus one sweep over the
/// lower degrees.
pub fn compute_bounds(ind: &IndicatorSet) -> Result<EigenvalueBounds> {
    ind.validate()?;
    if ind.rect_tail {
        return Err(Error::InvalidIndicators(
            "rect_tail indicators need the rectangular-tail method (n2-rect)".into(),
        ));
    }
    let top = ind.n + 1;
    let corners = corner_assignments(ind);
    let mut warnings = Vec::new();

    let neg_lb = roots_u(top, &corners.neg_lb)?.smallest();
    let pos_ub = roots_u(top, &corners.pos_ub)?.largest();

    let mut neg_ub: Option<(f64, Vec<usize>)> = None;
    for d in (2..=top).step_by(2) {
        match roots_u(d, &corners.neg_ub)?.largest_negative() {
            Some(x) => update_extreme(&mut neg_ub, x, d, |new, old| new > old),
            None => warnings.push(format!("U_{d} at the neg-ub corner has no negative root; skipped")),
        }
    }
    let mut pos_lb: Option<(f64, Vec<usize>)> = None;
    for d in (1..=top).step_by(2) {
        match roots_u(d, &corners.pos_lb)?.smallest_positive() {
            Some(x) => update_extreme(&mut pos_lb, x, d, |new, old| new < old),
            None => warnings.push(format!("U_{d} at the pos-lb corner has no positive root; skipped")),
        }
    }
    let (neg_ub, neg_ub_deg) = neg_ub.ok_or_else(|| Error::Numerical("no negative upper-bound candidate".into()))?;
    let (pos_lb, pos_lb_deg) = pos_lb.ok_or_else(|| Error::Numerical("no positive lower-bound candidate".into()))?;

    let bounds = EigenvalueBounds {
        neg: [neg_lb, neg_ub],
        pos: [pos_lb, pos_ub],
        extra: None,
        provenance: Provenance {
            method: Method::Linear,
            neg_lb: EndpointSource::new("neg-lb", vec![top]),
            neg_ub: EndpointSource::new("neg-ub", neg_ub_deg),
            pos_lb: EndpointSource::new("pos-lb", pos_lb_deg),
            pos_ub: EndpointSource::new("pos-ub", vec![top]),
            hulled: false,
            warnings,
        },
    };
    bounds.check()?;
    Ok(bounds)
}

fn update_extreme(slot: &mut Option<(f64, Vec<usize>)>, x: f64, degree: usize, better: impl Fn(f64, f64) -> bool) {
    match slot {
        None => *slot = Some((x, vec![degree])),
        Some((best, degrees)) => {
            if ties_within(x, *best) {
                degrees.push(degree);
                if better(x, *best) {
                    *best = x;
                }
            } else if better(x, *best) {
                *slot = Some((x, vec![degree]));
            }
        }
    }
}

/// One extreme value and the (corner mask, degree) that produced it; ties on
/// the value are broken by the smaller `(mask, degree)` so that reductions
/// are order independent.
#[derive(Clone, Copy, Debug)]
struct Hit {
    value: f64,
    mask: u32,
    degree: usize,
}

impl Hit {
    fn pick(a: Option<Hit>, b: Option<Hit>, want_max: bool) -> Option<Hit> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => {
                let ord = a.value.total_cmp(&b.value);
                let ord = if want_max { ord.reverse() } else { ord };
                Some(match ord.then((a.mask, a.degree).cmp(&(b.mask, b.degree))) {
                    std::cmp::Ordering::Greater => b,
                    _ => a,
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Envelope {
    neg_min: Option<Hit>,
    neg_max: Option<Hit>,
    pos_min: Option<Hit>,
    pos_max: Option<Hit>,
}

impl Envelope {
    fn merge(self, o: Envelope) -> Envelope {
        Envelope {
            neg_min: Hit::pick(self.neg_min, o.neg_min, false),
            neg_max: Hit::pick(self.neg_max, o.neg_max, true),
            pos_min: Hit::pick(self.pos_min, o.pos_min, false),
            pos_max: Hit::pick(self.pos_max, o.pos_max, true),
        }
    }

    fn push(&mut self, value: f64, mask: u32, degree: usize) {
        let hit = Some(Hit { value, mask, degree });
        if value < 0.0 {
            self.neg_min = Hit::pick(self.neg_min, hit, false);
            self.neg_max = Hit::pick(self.neg_max, hit, true);
        } else if value > 0.0 {
            self.pos_min = Hit::pick(self.pos_min, hit, false);
            self.pos_max = Hit::pick(self.pos_max, hit, true);
        }
    }
}

/// The corner with bit `j` (`j ≤ N`) choosing `β_E^(j)` and bit `N+i`
/// choosing `β_R^(i)`.
fn corner_from_mask(ind: &IndicatorSet, mask: u32) -> GammaAssignment {
    let n = ind.n;
    let e = (0..=n)
        .map(|j| if mask >> j & 1 == 1 { ind.beta_e[j] } else { ind.alpha_e[j] })
        .collect();
    let r = (1..=n)
        .map(|i| if mask >> (n + i) & 1 == 1 { ind.beta_r[i - 1] } else { ind.alpha_r[i - 1] })
        .collect();
    GammaAssignment::new(e, r)
}

fn describe_mask(n: usize, mask: u32) -> String {
    let e: String = (0..=n).map(|j| if mask >> j & 1 == 1 { 'b' } else { 'a' }).collect();
    let r: String = (1..=n).map(|i| if mask >> (n + i) & 1 == 1 { 'b' } else { 'a' }).collect();
    format!("E:{e} R:{r}")
}

/// Exhaustive sweep over all `2^{2N+1}` corners and all degrees `1..=N+1`;
/// returns the envelope of the negative and positive roots.
pub fn compute_bounds_bruteforce(ind: &IndicatorSet) -> Result<EigenvalueBounds> {
    ind.validate()?;
    if ind.rect_tail {
        return Err(Error::InvalidIndicators(
            "rect_tail indicators need the rectangular-tail method (n2-rect)".into(),
        ));
    }
    if ind.n > BRUTEFORCE_MAX_N {
        return Err(Error::Guard(format!("bruteforce sweep limited to N <= {BRUTEFORCE_MAX_N}, got {}", ind.n)));
    }
    let n = ind.n;
    let corners: u32 = 1 << (2 * n + 1);
    let env = (0..corners)
        .into_par_iter()
        .map(|mask| -> Result<Envelope> {
            let gamma = corner_from_mask(ind, mask);
            let mut env = Envelope::default();
            for d in 1..=n + 1 {
                for &x in &roots_u(d, &gamma)?.roots {
                    env.push(x, mask, d);
                }
            }
            Ok(env)
        })
        .try_reduce(Envelope::default, |a, b| Ok(a.merge(b)))?;

    let get = |h: Option<Hit>, what: &str| h.ok_or_else(|| Error::Numerical(format!("no {what} root found")));
    let (nl, nu, pl, pu) = (
        get(env.neg_min, "negative")?,
        get(env.neg_max, "negative")?,
        get(env.pos_min, "positive")?,
        get(env.pos_max, "positive")?,
    );
    let src = |h: Hit| EndpointSource::new(describe_mask(n, h.mask), vec![h.degree]);
    let bounds = EigenvalueBounds {
        neg: [nl.value, nu.value],
        pos: [pl.value, pu.value],
        extra: None,
        provenance: Provenance {
            method: Method::Bruteforce,
            neg_lb: src(nl),
            neg_ub: src(nu),
            pos_lb: src(pl),
            pos_ub: src(pu),
            hulled: false,
            warnings: Vec::new(),
        },
    };
    bounds.check()?;
    Ok(bounds)
}

/// Roots of the monic cubic `x³ + a x² + b x + c` with three real roots,
/// by the trigonometric method followed by Newton polishing; ascending.
fn real_cubic_roots(a: f64, b: f64, c: f64) -> Result<[f64; 3]> {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    if p >= 0.0 {
        return Err(Error::Numerical(format!("cubic with p = {p} does not have three distinct real roots")));
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let tau = 2.0 * std::f64::consts::PI / 3.0;
    let mut roots = [0, 1, 2].map(|j| m * (theta - tau * j as f64).cos() - a / 3.0);
    for r in &mut roots {
        for _ in 0..3 {
            let f = ((*r + a) * *r + b) * *r + c;
            let df = (3.0 * *r + 2.0 * a) * *r + b;
            if df == 0.0 {
                break;
            }
            let step = f / df;
            *r -= step;
            if step.abs() <= 1e-16 * r.abs() {
                break;
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Coefficients `(a, b, c)` of `U_3 = λ³ + aλ² + bλ + c`.
fn u3_coefficients(g: &GammaAssignment) -> (f64, f64, f64) {
    let (e0, e1, e2) = (g.e[0], g.e[1], g.e[2]);
    let (r1, r2) = (g.r[0], g.r[1]);
    (
        e1 - e0 - e2,
        -e0 * e1 - r1 - e2 * e1 + e2 * e0 - r2,
        e2 * e0 * e1 + e2 * r1 + r2 * e0,
    )
}

fn u3_roots(g: &GammaAssignment) -> Result<[f64; 3]> {
    let (a, b, c) = u3_coefficients(g);
    real_cubic_roots(a, b, c)
}

/// Negative root of `U_2 = λ² + (γ_E^(1) − γ_E^(0))λ − γ_E^(0)γ_E^(1) − γ_R^(1)`.
fn u2_negative_root(e0: f64, e1: f64, r1: f64) -> f64 {
    let b = e1 - e0;
    let c = -e0 * e1 - r1;
    let disc = (b * b - 4.0 * c).sqrt();
    // c < 0, so the roots have opposite signs; avoid cancellation.
    let q = -0.5 * (b + b.signum() * disc);
    let (x1, x2) = if b == 0.0 { (-disc / 2.0, disc / 2.0) } else { (q, c / q) };
    x1.min(x2)
}

/// Double saddle point (`N = 2`) bounds evaluated from explicit formulas:
/// a quadratic for `μ₋^UB` and cubics for the other three endpoints.
pub fn bounds_n2_closed(ind: &IndicatorSet) -> Result<EigenvalueBounds> {
    ind.validate()?;
    if ind.n != 2 {
        return Err(Error::InvalidIndicators(format!("n2-closed needs N = 2, got N = {}", ind.n)));
    }
    if ind.rect_tail {
        return Err(Error::InvalidIndicators("rect_tail indicators need the n2-rect method".into()));
    }
    let (ae, be, ar, br) = (&ind.alpha_e, &ind.beta_e, &ind.alpha_r, &ind.beta_r);
    let g = |e: [f64; 3], r: [f64; 2]| GammaAssignment::new(e.to_vec(), r.to_vec());

    let neg_lb = u3_roots(&g([ae[0], be[1], ae[2]], [br[0], br[1]]))?[0];
    let neg_ub = u2_negative_root(be[0], ae[1], ar[0]);
    let pos_lb3 = u3_roots(&g([ae[0], be[1], ae[2]], [br[0], ar[1]]))?
        .into_iter()
        .find(|x| *x > 0.0)
        .ok_or_else(|| Error::Numerical("U_3 has no positive root at the pos-lb corner".into()))?;
    let pos_ub = u3_roots(&g([be[0], ae[1], be[2]], [br[0], br[1]]))?[2];

    let (pos_lb, pos_lb_src) = if ae[0] <= pos_lb3 {
        (ae[0], EndpointSource::new("pos-lb", vec![1]))
    } else {
        (pos_lb3, EndpointSource::new("pos-lb", vec![3]))
    };
    let bounds = EigenvalueBounds {
        neg: [neg_lb, neg_ub],
        pos: [pos_lb, pos_ub],
        extra: None,
        provenance: Provenance {
            method: Method::N2Closed,
            neg_lb: EndpointSource::new("neg-lb", vec![3]),
            neg_ub: EndpointSource::new("neg-ub", vec![2]),
            pos_lb: pos_lb_src,
            pos_ub: EndpointSource::new("pos-ub", vec![3]),
            hulled: false,
            warnings: Vec::new(),
        },
    };
    bounds.check()?;
    Ok(bounds)
}

/// Double saddle point whose last block is taller than the middle one.
///
/// Eigenvalues lie in `I_1 ∪ I_E2 ∪ I_3`, where `I_1 = [α_E^(0), β_E^(0)]`,
/// `I_E2 = [α_E^(2), β_E^(2)]` and `I_3` is the root range of `U_3` with
/// `γ_R^(2)` the Rayleigh quotient of `R_2ᵀR_2`. `U_3` has a single negative
/// root (its smallest), which decreases in `γ_R`; its maximum is therefore
/// taken at `(β_E^(0), α_E^(1), β_E^(2); α_R^(1), α_R^(2))`.
pub fn bounds_n2_rect(ind: &IndicatorSet) -> Result<EigenvalueBounds> {
    ind.validate()?;
    if ind.n != 2 || !ind.rect_tail {
        return Err(Error::InvalidIndicators("n2-rect needs N = 2 indicators with rect_tail set".into()));
    }
    let corners = corner_assignments(ind);
    let neg_ub_tail = GammaAssignment::new(
        vec![ind.beta_e[0], ind.alpha_e[1], ind.beta_e[2]],
        vec![ind.alpha_r[0], ind.alpha_r[1]],
    );

    let neg_lb = roots_u(3, &corners.neg_lb)?.smallest();
    let neg_ub = roots_u(3, &neg_ub_tail)?.smallest();
    let pos_lb3 = roots_u(3, &corners.pos_lb)?
        .smallest_positive()
        .ok_or_else(|| Error::Numerical("U_3 has no positive root at the pos-lb corner".into()))?;
    let pos_ub3 = roots_u(3, &corners.pos_ub)?.largest();

    let lb_candidates = [
        (ind.alpha_e[0], EndpointSource::new("I_E0", vec![])),
        (ind.alpha_e[2], EndpointSource::new("I_E2", vec![])),
        (pos_lb3, EndpointSource::new("pos-lb", vec![3])),
    ];
    let ub_candidates = [
        (ind.beta_e[0], EndpointSource::new("I_E0", vec![])),
        (ind.beta_e[2], EndpointSource::new("I_E2", vec![])),
        (pos_ub3, EndpointSource::new("pos-ub", vec![3])),
    ];
    let (pos_lb, pos_lb_src) = lb_candidates
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("non-empty");
    let (pos_ub, pos_ub_src) = ub_candidates
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("non-empty");

    let bounds = EigenvalueBounds {
        neg: [neg_lb, neg_ub],
        pos: [pos_lb, pos_ub],
        extra: Some([ind.alpha_e[2], ind.beta_e[2]]),
        provenance: Provenance {
            method: Method::N2Rect,
            neg_lb: EndpointSource::new("neg-lb", vec![3]),
            neg_ub: EndpointSource::new("neg-ub-tail", vec![3]),
            pos_lb: pos_lb_src,
            pos_ub: pos_ub_src,
            hulled: true,
            warnings: Vec::new(),
        },
    };
    bounds.check()?;
    Ok(bounds)
}

/// Dispatches to the requested method.
pub fn compute_with(ind: &IndicatorSet, method: Method) -> Result<EigenvalueBounds> {
    match method {
        Method::Linear => compute_bounds(ind),
        Method::Bruteforce => compute_bounds_bruteforce(ind),
        Method::N2Closed => bounds_n2_closed(ind),
        Method::N2Rect => bounds_n2_rect(ind),
    }
}

/// Default method for an indicator set: the rectangular-tail variant when
/// flagged, the linear algorithm otherwise.
pub fn default_method(ind: &IndicatorSet) -> Method {
    if ind.rect_tail {
        Method::N2Rect
    } else {
        Method::Linear
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: f64,
    pub inside: bool,
    /// Signed distance into the nearest interval (negative when outside).
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub verdicts: Vec<Verdict>,
    pub outside: usize,
    pub min_slack: f64,
    pub pass: bool,
}

/// Checks every eigenvalue against the inclusion set with relative tolerance
/// `rel_tol` on the endpoints.
pub fn containment(bounds: &EigenvalueBounds, eigenvalues: &[f64], rel_tol: f64) -> ContainmentReport {
    let verdicts: Vec<Verdict> = eigenvalues
        .iter()
        .map(|&value| Verdict { value, inside: bounds.contains(value, rel_tol), slack: bounds.slack(value) })
        .collect();
    let outside = verdicts.iter().filter(|v| !v.inside).count();
    let min_slack = verdicts.iter().map(|v| v.slack).fold(f64::INFINITY, f64::min);
    ContainmentReport { verdicts, outside, min_slack, pass: outside == 0 }
}
