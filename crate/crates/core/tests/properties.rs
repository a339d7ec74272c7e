mod common;

use proptest::prelude::*;
use saddlebounds::bounds::{compute_bounds, compute_bounds_bruteforce, containment, EigenvalueBounds, CONTAINMENT_REL_TOL};
use saddlebounds::indicators::compute_indicator_set;
use saddlebounds::linalg::Vector;
use saddlebounds::minres::{check_envelope, convergence_envelope, minres};
use saddlebounds::mtx::{parse_matrix_market, to_matrix_market};
use saddlebounds::polynomials::{roots_u, GammaAssignment};
use saddlebounds::randgen::{case_rng, controlled_chain, random_system_with, DimensionPolicy, GenOptions};
use saddlebounds::saddle::build_inexact_chain;
use saddlebounds::saddle::ApproxStrategy;
use saddlebounds::spectrum::preconditioned_spectrum;
use saddlebounds::IndicatorSet;

fn gamma_strategy() -> impl Strategy<Value = GammaAssignment> {
    (1usize..=6).prop_flat_map(|n| {
        (
            0.05f64..5.0,
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..5.0], n),
            prop::collection::vec(0.05f64..5.0, n),
        )
            .prop_map(|(e0, rest, r)| {
                let mut e = vec![e0];
                e.extend(rest);
                GammaAssignment::new(e, r)
            })
    })
}

fn indicator_strategy(max_n: usize) -> impl Strategy<Value = IndicatorSet> {
    (1usize..=max_n).prop_flat_map(|n| {
        (
            0.05f64..1.0,
            0.0f64..3.0,
            prop::collection::vec((prop_oneof![Just(0.0), 0.0f64..1.0], 0.0f64..3.0), n),
            prop::collection::vec((0.05f64..1.0, 0.0f64..3.0), n),
        )
            .prop_map(move |(a0, w0, e, r)| IndicatorSet {
                n,
                alpha_e: std::iter::once(a0).chain(e.iter().map(|x| x.0)).collect(),
                beta_e: std::iter::once(a0 + w0).chain(e.iter().map(|x| x.0 + x.1)).collect(),
                alpha_r: r.iter().map(|x| x.0).collect(),
                beta_r: r.iter().map(|x| x.0 + x.1).collect(),
                rect_tail: false,
            })
    })
}

fn encloses(outer: &EigenvalueBounds, inner: &EigenvalueBounds) -> bool {
    let tol = 1e-12;
    outer.neg[0] <= inner.neg[0] + tol
        && outer.neg[1] >= inner.neg[1] - tol
        && outer.pos[0] <= inner.pos[0] + tol
        && outer.pos[1] >= inner.pos[1] - tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_interlace_with_sign_counts(gamma in gamma_strategy()) {
        let top = gamma.max_degree();
        let mut prev: Option<Vec<f64>> = None;
        for k in 1..=top {
            let rs = roots_u(k, &gamma).unwrap();
            prop_assert!(rs.check_invariants().is_ok(), "{:?}", rs.check_invariants());
            if let Some(p) = prev {
                for (j, x) in p.iter().enumerate() {
                    prop_assert!(rs.roots[j] < *x && *x < rs.roots[j + 1]);
                }
            }
            prev = Some(rs.roots);
        }
    }

    #[test]
    fn top_degree_roots_are_outermost(ind in indicator_strategy(5)) {
        let b = compute_bounds(&ind).unwrap();
        let neg = saddlebounds::bounds::corner_assignments(&ind).neg_lb;
        let pos = saddlebounds::bounds::corner_assignments(&ind).pos_ub;
        for k in 1..=ind.n {
            prop_assert!(b.neg[0] < roots_u(k, &neg).unwrap().smallest());
            prop_assert!(b.pos[1] > roots_u(k, &pos).unwrap().largest());
        }
    }

    #[test]
    fn linear_equals_bruteforce(ind in indicator_strategy(4)) {
        let a = compute_bounds(&ind).unwrap().endpoints();
        let b = compute_bounds_bruteforce(&ind).unwrap().endpoints();
        prop_assert!(common::max_endpoint_gap(&a, &b) <= 1e-10, "{a:?} vs {b:?}");
    }

    #[test]
    fn widening_an_interval_never_shrinks_bounds(
        ind in indicator_strategy(4),
        which in 0usize..2,
        slot in 0usize..5,
        grow_lo in 0.0f64..0.5,
        grow_hi in 0.0f64..2.0,
    ) {
        let mut wide = ind.clone();
        if which == 0 {
            let k = slot % (ind.n + 1);
            let floor = if k == 0 { wide.alpha_e[0] * 0.5 } else { 0.0 };
            wide.alpha_e[k] = (wide.alpha_e[k] - grow_lo).max(floor);
            wide.beta_e[k] += grow_hi;
        } else {
            let k = slot % ind.n;
            wide.alpha_r[k] = (wide.alpha_r[k] - grow_lo).max(wide.alpha_r[k] * 0.5);
            wide.beta_r[k] += grow_hi;
        }
        let narrow = compute_bounds(&ind).unwrap();
        let wide = compute_bounds(&wide).unwrap();
        prop_assert!(encloses(&wide, &narrow), "{:?} vs {:?}", wide.endpoints(), narrow.endpoints());
    }

    #[test]
    fn tighter_bounds_never_raise_the_envelope(ind in indicator_strategy(3), k in 0usize..40, shrink in 0.0f64..0.9) {
        let outer = compute_bounds(&ind).unwrap();
        let mut tight = ind.clone();
        for i in 0..ind.n {
            tight.beta_r[i] = tight.alpha_r[i] + (tight.beta_r[i] - tight.alpha_r[i]) * (1.0 - shrink);
        }
        let inner = compute_bounds(&tight).unwrap();
        prop_assert!(encloses(&outer, &inner));
        let (eo, ei) = (convergence_envelope(&outer, k).unwrap(), convergence_envelope(&inner, k).unwrap());
        prop_assert!(ei <= eo * (1.0 + 1e-12), "{ei} > {eo}");
        prop_assert!(convergence_envelope(&outer, k + 2).unwrap() <= eo);
    }

    #[test]
    fn json_round_trips(ind in indicator_strategy(4)) {
        let back: IndicatorSet = serde_json::from_str(&serde_json::to_string(&ind).unwrap()).unwrap();
        prop_assert_eq!(&back, &ind);
        let b = compute_bounds(&ind).unwrap();
        let back: EigenvalueBounds = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn matrix_market_round_trips(rows in 1usize..6, cols in 1usize..6, vals in prop::collection::vec(-1e3f64..1e3, 36), mask in prop::collection::vec(any::<bool>(), 36)) {
        let m = saddlebounds::linalg::Matrix::from_fn(rows, cols, |i, j| if mask[i * 6 + j] { vals[i * 6 + j] } else { 0.0 });
        let back = parse_matrix_market(&to_matrix_market(&m), std::path::Path::new("p.mtx")).unwrap();
        prop_assert_eq!(back, m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_systems_are_contained(
        seed in any::<u64>(),
        n in 1usize..=3,
        zero_tail in any::<bool>(),
        lo in prop::collection::vec(0.1f64..1.0, 4),
        width in prop::collection::vec(0.0f64..4.0, 4),
    ) {
        let opts = GenOptions { dims: DimensionPolicy { base: 8.0, jitter: 6.0 }, zero_tail, ..GenOptions::default() };
        let sys = random_system_with(n, &mut case_rng(seed, 0), &opts).unwrap();
        prop_assert!(sys.assemble_full() == sys.assemble_full().transpose());
        let targets: Vec<(f64, f64)> = (0..=n).map(|k| (lo[k], lo[k] + width[k])).collect();
        let chain = controlled_chain(&sys, &targets).unwrap();
        let bounds = compute_bounds(&compute_indicator_set(&sys, &chain).unwrap()).unwrap();
        let spectrum = preconditioned_spectrum(&sys, &chain).unwrap();
        prop_assert_eq!(spectrum.negative_count, spectrum.expected_negative);
        let report = containment(&bounds, &spectrum.eigenvalues, CONTAINMENT_REL_TOL);
        prop_assert!(report.pass, "{} outside, min slack {}", report.outside, report.min_slack);

        let b = Vector::from_fn(sys.total_dim(), |i, _| ((i * 7919) % 13) as f64 - 6.0);
        let sol = minres(&sys, &chain, &b, 1e-12, 4000).unwrap();
        prop_assert!(sol.report.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        prop_assert!(check_envelope(&sol.report.history, &bounds, 1e-10, 1e-6).unwrap().pass);
    }

    #[test]
    fn preconditioner_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let opts = GenOptions { dims: DimensionPolicy { base: 6.0, jitter: 4.0 }, ..GenOptions::default() };
        let sys = random_system_with(2, &mut case_rng(seed, 1), &opts).unwrap();
        let chain = build_inexact_chain(&sys, &[ApproxStrategy::Jacobi, ApproxStrategy::Exact, ApproxStrategy::ScaledIdentity { c: 2.0 }]).unwrap();
        let n = sys.total_dim();
        let v = Vector::from_fn(n, |i, _| (i as f64).sin());
        let w = Vector::from_fn(n, |i, _| (i as f64 * 0.37).cos());
        let lhs = chain.apply_preconditioner(&(&v * a + &w * c)).unwrap();
        let rhs = chain.apply_preconditioner(&v).unwrap() * a + chain.apply_preconditioner(&w).unwrap() * c;
        prop_assert!((&lhs - &rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }
}
