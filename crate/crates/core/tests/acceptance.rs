//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the report is always printed; the process fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use saddlebounds::bounds::{bounds_n2_closed, bounds_n2_rect, compute_bounds, compute_bounds_bruteforce};
use saddlebounds::indicators::compute_indicator_set;
use saddlebounds::linalg::Vector;
use saddlebounds::minres::{check_envelope, minres};
use saddlebounds::polynomials::{
    eval_sequence, eval_u, eval_with_derivative, partial_derivative_u, roots_u, root_sensitivity_sign, wronskian_a,
    GammaAssignment, Param,
};
use saddlebounds::randgen::{case_rng, controlled_chain, random_system_with, DimensionPolicy, GenOptions};
use saddlebounds::saddle::{build_exact_schur_chain, build_inexact_chain, ApproxStrategy};
use saddlebounds::spectrum::preconditioned_spectrum;
use saddlebounds::suite::{run_suite, to_csv, Grid, SuiteConfig};
use saddlebounds::IndicatorSet;

use common::{max_endpoint_gap, random_gamma, random_indicators, rng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    const TOL: f64 = 1e-10;
    const PER_N: usize = 100;
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for n in 2..=5 {
        let mut r = rng(1000 + n as u64);
        for i in 0..PER_N {
            let ind = random_indicators(&mut r, n);
            let (lin, brute) = match (compute_bounds(&ind), compute_bounds_bruteforce(&ind)) {
                (Ok(a), Ok(b)) => (a, b),
                (a, b) => {
                    failures.push(format!("N={n} #{i}: {:?} / {:?}", a.err(), b.err()));
                    continue;
                }
            };
            let gap = max_endpoint_gap(&lin.endpoints(), &brute.endpoints());
            worst = worst.max(gap);
            if gap > TOL && failures.len() < 5 {
                failures.push(format!(
                    "N={n} #{i}: linear {:?} vs bruteforce {:?}",
                    lin.endpoints(),
                    brute.endpoints()
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= TOL && failures.is_empty() && elapsed <= Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{} sets per N in 2..=5, max endpoint gap {worst:.2e} (tol {TOL:.0e}), {:.2}s (limit 60s){}",
            PER_N,
            elapsed.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn criterion_2() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut r = rng(2002);
    let mut worst = 0.0_f64;
    let mut errors = Vec::new();
    for i in 0..200 {
        let ind = random_indicators(&mut r, 2);
        match (bounds_n2_closed(&ind), compute_bounds(&ind)) {
            (Ok(a), Ok(b)) => worst = worst.max(max_endpoint_gap(&a.endpoints(), &b.endpoints())),
            (a, b) => errors.push(format!("#{i}: {:?} / {:?}", a.err(), b.err())),
        }
    }
    outcome(
        worst <= TOL && errors.is_empty(),
        format!("200 random N=2 sets, max gap {worst:.2e} (tol {TOL:.0e}){}", errors.join("; ")),
    )
}

/// Indicator rows of the poroelasticity experiment; only `I_E0` changes with
/// the drop tolerance.
pub fn table_indicators(e0: (f64, f64)) -> IndicatorSet {
    IndicatorSet {
        n: 2,
        alpha_e: vec![e0.0, 5e-4, 0.9976],
        beta_e: vec![e0.1, 0.0889, 1.0001],
        alpha_r: vec![2e-4, 3e-5],
        beta_r: vec![0.7790, 0.0023],
        rect_tail: true,
    }
}

fn criterion_3() -> Outcome {
    const TOL: f64 = 1e-2;
    let rows = [
        ("1e-3", (0.0099, 1.2358), [-1.4308, -0.0012, 0.0101, 1.6958]),
        ("1e-4", (0.0422, 1.2036), [-1.4221, -0.0012, 0.0424, 1.6706]),
        ("1e-5", (0.2563, 1.2232), [-1.3693, -0.0012, 0.2565, 1.6859]),
        ("1e-6", (0.9600, 1.0118), [-1.2436, -0.0012, 0.9601, 1.5241]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (delta, e0, printed) in rows {
        let b = match bounds_n2_rect(&table_indicators(e0)) {
            Ok(b) => b,
            Err(e) => return outcome(false, format!("delta={delta}: {e}")),
        };
        let [nl, nu, pl, pu] = b.endpoints();
        let ok = (pl - printed[2]).abs() <= TOL && (pu - printed[3]).abs() <= TOL;
        pass &= ok;
        parts.push(format!(
            "delta={delta}: pos [{pl:.4}, {pu:.4}] vs [{}, {}] {}; neg (diagnostic) [{nl:.4}, {nu:.4}] vs [{}, {}]",
            printed[2],
            printed[3],
            if ok { "ok" } else { "MISMATCH" },
            printed[0],
            printed[1]
        ));
    }
    outcome(pass, parts.join(" | "))
}

fn criterion_4() -> Outcome {
    const RUNS: usize = 3;
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, stride) in [(2, 1), (3, 1), (4, 16)] {
        let mut cfg = SuiteConfig::new(n, Grid::Table1, RUNS, 4040 + n as u64);
        cfg.combo_stride = stride;
        let start = Instant::now();
        let res = match run_suite(&cfg) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("N={n}: {e}")),
        };
        let elapsed = start.elapsed();
        let s = &res.summary;
        let combos = cfg.combinations().len();
        let ok = s.pass && combos >= 64 && (n != 2 || (combos == 729 && elapsed <= Duration::from_secs(900)));
        pass &= ok;
        let tight: Vec<String> = s.classes.iter().map(|c| format!("{}={:.3}", c.name, c.min_rel_slack)).collect();
        parts.push(format!(
            "N={n}: {combos} combos x {RUNS} runs, {}/{} contained, {} errors, {:.1}s, tightest rel slack {}",
            s.contained,
            s.cases,
            s.errors,
            elapsed.as_secs_f64(),
            tight.join(" ")
        ));
    }
    outcome(pass, parts.join(" | "))
}

fn criterion_5() -> Outcome {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let opts = GenOptions { zero_tail: true, ..GenOptions::default() };
    let sys = match random_system_with(1, &mut case_rng(5, 0), &opts) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let result = (|| -> saddlebounds::Result<(f64, [f64; 4])> {
        let chain = build_exact_schur_chain(&sys)?;
        let spectrum = preconditioned_spectrum(&sys, &chain)?;
        let dev = spectrum
            .eigenvalues
            .iter()
            .map(|ev| [1.0, golden, 1.0 - golden].iter().map(|t| (t - ev).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        let b = compute_bounds(&compute_indicator_set(&sys, &chain)?)?;
        Ok((dev, b.endpoints()))
    })();
    match result {
        Ok((dev, b)) => {
            let want = [1.0 - golden, 1.0 - golden, 1.0, golden];
            let gap = max_endpoint_gap(&b, &want);
            outcome(
                dev <= 1e-8 && gap <= 1e-4,
                format!(
                    "dims {:?}: spectrum within {dev:.2e} of {{1, (1±√5)/2}} (tol 1e-8); bounds {b:.4?}, gap {gap:.2e} (tol 1e-4)",
                    sys.dims()
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

#[derive(Default)]
struct PolyStats {
    root_sets: usize,
    derivative_checks: usize,
    worst_fd: f64,
    sign_checks: usize,
    unresolved: usize,
    failures: Vec<String>,
}

impl PolyStats {
    fn fail(&mut self, msg: String) {
        if self.failures.len() < 5 {
            self.failures.push(msg);
        }
        self.failures.truncate(5);
    }
}

fn perturbed(gamma: &GammaAssignment, which: Param, m: usize, h: f64) -> GammaAssignment {
    let mut g = gamma.clone();
    match which {
        Param::E => g.e[m] += h,
        Param::R => g.r[m - 1] += h,
    }
    g
}

fn param_value(gamma: &GammaAssignment, which: Param, m: usize) -> f64 {
    match which {
        Param::E => gamma.e[m],
        Param::R => gamma.r[m - 1],
    }
}

fn check_gamma(gamma: &GammaAssignment, n: usize, r: &mut impl Rng, st: &mut PolyStats) {
    let mut prev: Option<Vec<f64>> = None;
    for k in 1..=n + 1 {
        let roots = match roots_u(k, gamma) {
            Ok(x) => x,
            Err(e) => return st.fail(format!("{gamma:?} degree {k}: {e}")),
        };
        st.root_sets += 1;
        if let Err(e) = roots.check_invariants() {
            st.fail(format!("{gamma:?}: {e}"));
        }
        if let Some(p) = &prev {
            let interlaced = p.iter().enumerate().all(|(j, x)| roots.roots[j] < *x && *x < roots.roots[j + 1]);
            if !interlaced {
                st.fail(format!("{gamma:?}: U_{} roots do not interlace U_{k}", k - 1));
            }
        }
        let want_sign = if k.div_ceil(2) % 2 == 0 { 1.0 } else { -1.0 };
        if eval_u(k, 0.0, gamma).signum() != want_sign {
            st.fail(format!("{gamma:?}: sign of U_{k}(0)"));
        }
        let samples: Vec<f64> = (0..8).map(|_| r.random_range(-10.0..10.0)).chain(roots.roots.iter().copied()).collect();
        for lam in samples {
            if !(wronskian_a(k, lam, gamma) > 0.0) {
                st.fail(format!("{gamma:?}: a_{k}({lam}) <= 0"));
            }
        }

        let kk = k - 1;
        for (idx, &xi) in roots.roots.iter().enumerate() {
            let (_, du) = eval_with_derivative(k, xi, gamma);
            let params = (0..=kk).map(|m| (Param::E, m)).chain((1..=kk).map(|m| (Param::R, m)));
            for (which, m) in params {
                let formula = match partial_derivative_u(k, m, which, xi, gamma) {
                    Ok(v) => v,
                    Err(e) => {
                        st.fail(format!("{gamma:?} degree {k} m={m}: {e}"));
                        continue;
                    }
                };
                // U_k is affine in each single parameter, so a wide central
                // difference is exact up to rounding.
                let h = 1e-2 * param_value(gamma, which, m).abs().max(1.0);
                let fd = (eval_u(k, xi, &perturbed(gamma, which, m, h)) - eval_u(k, xi, &perturbed(gamma, which, m, -h)))
                    / (2.0 * h);
                let scale = eval_sequence(k, xi, gamma).iter().map(|u| u.abs()).fold(1.0, f64::max);
                let err = (fd - formula).abs() / formula.abs().max(1e-9 * scale);
                st.derivative_checks += 1;
                st.worst_fd = st.worst_fd.max(err);
                if err > 1e-6 {
                    st.fail(format!("{gamma:?} degree {k} {which:?}{m}: formula {formula} vs fd {fd}"));
                }

                // Root movement under a 1e-6 relative push, compared with the
                // implicit-function prediction.
                let predicted = match root_sensitivity_sign(k, m, which, idx, gamma) {
                    Ok(s) => s,
                    Err(e) => {
                        st.fail(format!("{gamma:?}: {e}"));
                        continue;
                    }
                };
                let expected = match which {
                    Param::E => Some(if m % 2 == 0 { 1 } else { -1 }),
                    Param::R if idx == 0 => Some(-1),
                    Param::R if idx == kk => Some(1),
                    Param::R => None,
                };
                if let Some(e) = expected {
                    if e != predicted {
                        st.fail(format!("{gamma:?} degree {k} {which:?}{m} root {idx}: rule {e}, formula {predicted}"));
                    }
                }
                let step = 1e-6 * param_value(gamma, which, m).abs().max(1e-3);
                let moved = match roots_u(k, &perturbed(gamma, which, m, step)) {
                    Ok(rs) => rs.roots[idx] - xi,
                    Err(e) => {
                        st.fail(format!("{gamma:?}: {e}"));
                        continue;
                    }
                };
                let expected_move = -formula / du[k] * step;
                if expected_move.abs() <= 1e-12 * xi.abs().max(1.0) {
                    st.unresolved += 1;
                    continue;
                }
                st.sign_checks += 1;
                if moved.signum() as i8 != predicted {
                    st.fail(format!(
                        "{gamma:?} degree {k} {which:?}{m} root {idx}: moved {moved:.3e}, predicted sign {predicted}"
                    ));
                }
            }
        }
        prev = Some(roots.roots);
    }
}

fn criterion_6() -> Outcome {
    let mut r = rng(6006);
    let mut st = PolyStats::default();
    for _ in 0..1000 {
        let n = r.random_range(1..=6);
        let gamma = random_gamma(&mut r, n);
        check_gamma(&gamma, n, &mut r, &mut st);
    }
    outcome(
        st.failures.is_empty(),
        format!(
            "1000 parameter sets: {} root sets, {} derivative checks (worst rel err {:.2e}, tol 1e-6), {} movement signs ({} below resolution){}",
            st.root_sets,
            st.derivative_checks,
            st.worst_fd,
            st.sign_checks,
            st.unresolved,
            if st.failures.is_empty() { String::new() } else { format!("; {}", st.failures.join("; ")) }
        ),
    )
}

fn iteration_trend() -> saddlebounds::Result<[usize; 3]> {
    let opts = GenOptions { dims: DimensionPolicy { base: 30.0, jitter: 10.0 }, zero_tail: true, ..GenOptions::default() };
    let sys = random_system_with(2, &mut case_rng(77, 0), &opts)?;
    let ones = Vector::from_element(sys.total_dim(), 1.0);
    let b = saddlebounds::minres::apply_system(&sys, &ones)?;
    let mut counts = [0; 3];
    let windows = [
        ApproxStrategy::SpectralWindow { lo: 0.25, hi: 4.0 },
        ApproxStrategy::SpectralWindow { lo: 0.9, hi: 1.1 },
        ApproxStrategy::Exact,
    ];
    for (i, s) in windows.into_iter().enumerate() {
        let chain = build_inexact_chain(&sys, &[s; 3])?;
        let sol = minres(&sys, &chain, &b, 1e-14, 2000)?;
        if !sol.report.converged {
            return Err(saddlebounds::Error::Numerical(format!("{s} did not converge: {:?}", sol.report.termination)));
        }
        counts[i] = sol.report.iterations;
    }
    Ok(counts)
}

fn criterion_7() -> Outcome {
    let mut r = rng(7007);
    let opts = GenOptions { dims: DimensionPolicy { base: 20.0, jitter: 10.0 }, ..GenOptions::default() };
    let mut worst = 0.0_f64;
    let mut checked = 0;
    let mut failures = Vec::new();
    for case in 0..36u64 {
        let n = 1 + (case % 3) as usize;
        let result = (|| -> saddlebounds::Result<(f64, usize)> {
            let sys = random_system_with(n, &mut case_rng(7, case), &opts)?;
            let targets: Vec<(f64, f64)> = (0..=n)
                .map(|_| {
                    let lo = r.random_range(0.1..1.0);
                    (lo, lo + r.random_range(0.0..4.0))
                })
                .collect();
            let chain = controlled_chain(&sys, &targets)?;
            let bounds = compute_bounds(&compute_indicator_set(&sys, &chain)?)?;
            let ones = Vector::from_element(sys.total_dim(), 1.0);
            let b = saddlebounds::minres::apply_system(&sys, &ones)?;
            let sol = minres(&sys, &chain, &b, 1e-14, 5000)?;
            let env = check_envelope(&sol.report.history, &bounds, 1e-10, 1e-6)?;
            Ok((env.worst_ratio, env.checked))
        })();
        match result {
            Ok((ratio, c)) => {
                worst = worst.max(ratio);
                checked += c;
                if ratio > 1.0 + 1e-6 {
                    failures.push(format!("case {case} (N={n}): ratio {ratio:.6}"));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    let trend = iteration_trend();
    let trend_ok = matches!(trend, Ok([a, b, c]) if a > b && b > c);
    outcome(
        failures.is_empty() && trend_ok,
        format!(
            "36 systems (N=1,2,3), {checked} iterations checked, worst residual/envelope {worst:.4} (limit 1+1e-6); window [0.25,4] -> [0.9,1.1] -> exact iterations {trend:?}{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn criterion_8(trend: &Outcome) -> Outcome {
    outcome(
        trend.pass,
        "printed counts 248/132/83/64 come from unpublished matrices; substituted by the desk-scale iteration trend of criterion 7",
    )
}

fn criterion_9() -> Outcome {
    let mut cfg = SuiteConfig::new(2, Grid::Smoke, 1, 9);
    cfg.gen.dims = DimensionPolicy { base: 10.0, jitter: 5.0 };
    let first = run_suite(&cfg);
    cfg.threads = Some(1);
    let second = run_suite(&cfg);
    let (a, b) = match (first, second) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return outcome(false, format!("{:?} / {:?}", a.err(), b.err())),
    };
    let csv_same = to_csv(2, &a.rows) == to_csv(2, &b.rows);
    let ind = table_indicators((0.0099, 1.2358));
    let j1 = serde_json::to_string(&bounds_n2_rect(&ind).unwrap()).unwrap();
    let j2 = serde_json::to_string(&bounds_n2_rect(&ind).unwrap()).unwrap();
    outcome(
        csv_same && j1 == j2 && a.rows.len() == 64,
        format!(
            "smoke suite CSV ({} rows) identical across default and single-thread runs: {csv_same}; bounds JSON identical: {}",
            a.rows.len(),
            j1 == j2
        ),
    )
}

fn main() {
    let results = vec![
        ("1 corner-oracle equivalence", criterion_1()),
        ("2 N=2 closed-form equivalence", criterion_2()),
        ("3 table reproduction (positive side)", criterion_3()),
        ("4 randomized containment suites", criterion_4()),
        ("5 classical N=1 sanity", criterion_5()),
        ("6 polynomial properties", criterion_6()),
        ("7 MINRES envelope and iteration trend", criterion_7()),
    ];
    let c8 = criterion_8(&results[6].1);
    let mut results = results;
    results.push(("8 printed iteration counts (substituted)", c8));
    results.push(("9 reproducibility", criterion_9()));

    println!();
    let mut failed = 0;
    for (name, o) in &results {
        if !o.pass {
            failed += 1;
        }
        println!("criterion {name}: {} -- {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("\nacceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
