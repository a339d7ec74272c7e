use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use saddlebounds::bounds::{
    compute_bounds, compute_with, containment, default_method, ContainmentReport, EigenvalueBounds, Method,
    BRUTEFORCE_MAX_N, CONTAINMENT_REL_TOL,
};
use saddlebounds::indicators::compute_indicator_set;
use saddlebounds::linalg::Vector;
use saddlebounds::minres::{apply_system, check_envelope, envelope_rate, minres, EnvelopeCheck, Termination};
use saddlebounds::mtx::{read_matrix_market, read_system, read_system_dir, system_paths, write_system_dir};
use saddlebounds::polynomials::{roots_u, GammaAssignment};
use saddlebounds::randgen::{case_rng, random_system_with, DimensionPolicy, GenOptions};
use saddlebounds::saddle::{
    build_inexact_chain, validate_system, ApproxStrategy, BlockSaddleSystem, SchurChain, Shape, ValidationReport,
    DEFAULT_VALIDATION_TOL,
};
use saddlebounds::spectrum::{preconditioned_spectrum, SpectrumReport};
use saddlebounds::suite::{run_suite, scatter_svg, to_csv, Grid, SuiteConfig};
use saddlebounds::IndicatorSet;
use serde::Serialize;

use crate::{
    AnalyzeArgs, BoundsArgs, Failure, GenerateArgs, Outcome, PolyRootsArgs, SolveArgs, SuiteArgs, SystemArgs,
};

/// Worker-count override read when `--threads` is absent.
pub const THREADS_ENV: &str = "SADDLEBOUNDS_THREADS";
/// Largest tolerated endpoint gap between the bruteforce and linear methods.
pub const AGREEMENT_TOL: f64 = 1e-10;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::usage(msg))
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    match v {
        Some(v) => Ok(v),
        None => usage(format!("missing required option --{flag}")),
    }
}

fn ensure_readable(p: &Path) -> Result<(), Failure> {
    if p.exists() {
        Ok(())
    } else {
        Err(anyhow!("{} does not exist", p.display()).into())
    }
}

fn ensure_writable(p: &Path) -> Result<(), Failure> {
    let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if parent.is_dir() {
        Ok(())
    } else {
        usage(format!("output directory {} does not exist", parent.display()))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_method(s: &str) -> Result<Method, Failure> {
    s.parse().map_err(|e: saddlebounds::Error| Failure::usage(e.to_string()))
}

/// Checks that `method` applies to `ind` before any work is done.
fn check_method(method: Method, ind: &IndicatorSet) -> Result<(), Failure> {
    match method {
        Method::N2Closed | Method::N2Rect if ind.n != 2 => usage(format!("--method {method} requires N = 2 input, got N = {}", ind.n)),
        Method::N2Closed if ind.rect_tail => usage("--method n2-closed does not apply to a rectangular last block; use n2-rect"),
        Method::Linear | Method::Bruteforce if ind.rect_tail => {
            usage(format!("--method {method} does not apply to a rectangular last block; use n2-rect"))
        }
        Method::Bruteforce if ind.n > BRUTEFORCE_MAX_N => {
            usage(format!("--method bruteforce is limited to N <= {BRUTEFORCE_MAX_N}, got N = {}", ind.n))
        }
        _ => Ok(()),
    }
}

fn load_system(args: &SystemArgs) -> Result<BlockSaddleSystem, Failure> {
    match (&args.system, &args.blocks, &args.offdiag) {
        (Some(dir), None, None) => {
            ensure_readable(dir)?;
            Ok(read_system_dir(dir)?)
        }
        (None, Some(diag), Some(off)) => {
            if diag.len() != off.len() + 1 {
                return usage(format!("--blocks needs one more file than --offdiag ({} vs {})", diag.len(), off.len()));
            }
            for p in diag.iter().chain(off) {
                ensure_readable(p)?;
            }
            Ok(read_system(diag, off)?)
        }
        (None, None, None) => usage("give either --system DIR or --blocks and --offdiag"),
        _ => usage("--system cannot be combined with --blocks/--offdiag, and --blocks needs --offdiag"),
    }
}

fn strategies(args: &SystemArgs, n: usize) -> Result<Vec<ApproxStrategy>, Failure> {
    let specs = args.approx.clone().unwrap_or_else(|| vec!["exact".into()]);
    let parsed = specs
        .iter()
        .map(|s| s.parse::<ApproxStrategy>().map_err(|e| Failure::usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    match parsed.len() {
        1 => Ok(vec![parsed[0]; n + 1]),
        l if l == n + 1 => Ok(parsed),
        l => usage(format!("--approx takes 1 or N + 1 = {} strategies, got {l}", n + 1)),
    }
}

fn validated(sys: &BlockSaddleSystem) -> Result<ValidationReport, Failure> {
    let report = validate_system(sys, DEFAULT_VALIDATION_TOL);
    if !report.pass {
        let names: Vec<String> = report.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(anyhow!("system validation failed: {}", names.join("; ")).into());
    }
    Ok(report)
}

fn prepare(args: &SystemArgs) -> Result<(BlockSaddleSystem, ValidationReport, SchurChain), Failure> {
    let sys = load_system(args)?;
    let strategies = strategies(args, sys.depth())?;
    let report = validated(&sys)?;
    let chain = build_inexact_chain(&sys, &strategies)?;
    Ok((sys, report, chain))
}

#[derive(Serialize)]
struct SystemInfo {
    n: usize,
    dims: Vec<usize>,
    total_dim: usize,
    rectangular_tail: bool,
}

fn system_info(sys: &BlockSaddleSystem) -> SystemInfo {
    SystemInfo {
        n: sys.depth(),
        dims: sys.dims(),
        total_dim: sys.total_dim(),
        rectangular_tail: sys.shape() == Shape::RectangularTail,
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    system: SystemInfo,
    approx: Vec<String>,
    validation: ValidationReport,
    indicators: IndicatorSet,
    bounds: EigenvalueBounds,
    spectrum: SpectrumReport,
    containment: ContainmentReport,
}

fn indicator_table(ind: &IndicatorSet) -> String {
    let mut s = format!("{:<10}{:>14}{:>14}\n", "indicator", "min", "max");
    for (name, lo, hi) in ind.rows() {
        let _ = writeln!(s, "{name:<10}{lo:>14.4e}{hi:>14.4e}");
    }
    s
}

pub fn analyze(a: AnalyzeArgs) -> Outcome {
    if let Some(out) = &a.out {
        ensure_writable(out)?;
    }
    let requested = a.method.as_deref().map(parse_method).transpose()?;
    let (sys, validation, chain) = prepare(&a.input)?;
    let indicators = compute_indicator_set(&sys, &chain)?;
    let method = requested.unwrap_or_else(|| default_method(&indicators));
    check_method(method, &indicators)?;
    let bounds = compute_with(&indicators, method)?;
    let spectrum = preconditioned_spectrum(&sys, &chain)?;
    let verdict = containment(&bounds, &spectrum.eigenvalues, CONTAINMENT_REL_TOL);
    let pass = verdict.pass;

    eprint!("{}", indicator_table(&indicators));
    let [nl, nu] = bounds.neg;
    let [pl, pu] = bounds.pos;
    eprintln!(
        "bounds [{nl:.4}, {nu:.4}] U [{pl:.4}, {pu:.4}]; {} of {} eigenvalues outside",
        verdict.outside,
        spectrum.eigenvalues.len()
    );
    let out = AnalyzeOutput {
        system: system_info(&sys),
        approx: chain.strategies().iter().map(ToString::to_string).collect(),
        validation,
        indicators,
        bounds,
        spectrum,
        containment: verdict,
    };
    emit(a.out.as_deref(), &to_json(&out))?;
    Ok(pass)
}

#[derive(Serialize)]
struct Agreement {
    tolerance: f64,
    max_deviation: f64,
    linear: [f64; 4],
    bruteforce: [f64; 4],
    pass: bool,
}

fn bounds_csv(b: &EigenvalueBounds) -> String {
    let p = &b.provenance;
    let mut s = String::from("endpoint,value,source,degrees\n");
    let rows = [("neg_lb", b.neg[0], &p.neg_lb), ("neg_ub", b.neg[1], &p.neg_ub), ("pos_lb", b.pos[0], &p.pos_lb), ("pos_ub", b.pos[1], &p.pos_ub)];
    for (name, v, src) in rows {
        let deg: Vec<String> = src.degrees.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "{name},{v:.16e},{},{}", src.source, deg.join(" "));
    }
    if let Some([lo, hi]) = b.extra {
        let _ = writeln!(s, "extra_lb,{lo:.16e},extra,");
        let _ = writeln!(s, "extra_ub,{hi:.16e},extra,");
    }
    s
}

pub fn bounds(a: BoundsArgs) -> Outcome {
    let config = require(a.config, "config")?;
    ensure_readable(&config)?;
    for p in [&a.out, &a.agreement].into_iter().flatten() {
        ensure_writable(p)?;
    }
    let requested = a.method.as_deref().map(parse_method).transpose()?;
    if a.agreement.is_some() && requested != Some(Method::Bruteforce) {
        return usage("--agreement requires --method bruteforce");
    }
    let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
    let ind: IndicatorSet =
        serde_json::from_str(&text).with_context(|| format!("parsing indicator set {}", config.display()))?;
    ind.validate()?;
    let method = requested.unwrap_or_else(|| default_method(&ind));
    check_method(method, &ind)?;
    let b = compute_with(&ind, method)?;
    let text = if a.csv { bounds_csv(&b) } else { to_json(&b) };
    emit(a.out.as_deref(), &text)?;

    if method != Method::Bruteforce {
        return Ok(true);
    }
    let linear = compute_bounds(&ind)?.endpoints();
    let brute = b.endpoints();
    let max_deviation = linear.iter().zip(&brute).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let report = Agreement { tolerance: AGREEMENT_TOL, max_deviation, linear, bruteforce: brute, pass: max_deviation <= AGREEMENT_TOL };
    eprintln!(
        "agreement with linear: max endpoint deviation {max_deviation:.3e} ({})",
        if report.pass { "pass" } else { "FAIL" }
    );
    if let Some(p) = &a.agreement {
        emit(Some(p), &to_json(&report))?;
    }
    Ok(report.pass)
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
            ),
            _ => None,
        },
    };
    if n == Some(0) {
        return usage("thread count must be positive");
    }
    Ok(n)
}

fn dim_policy(base: Option<f64>, jitter: Option<f64>) -> Result<DimensionPolicy, Failure> {
    let d = DimensionPolicy::default();
    let p = DimensionPolicy { base: base.unwrap_or(d.base), jitter: jitter.unwrap_or(d.jitter) };
    if !(p.base >= 1.0 && p.jitter >= 0.0 && p.base.is_finite() && p.jitter.is_finite()) {
        return usage("--dim-base must be at least 1 and --dim-jitter non-negative");
    }
    Ok(p)
}

pub fn suite(a: SuiteArgs) -> Outcome {
    let n = require(a.n, "n")?;
    for p in [&a.out, &a.svg, &a.summary].into_iter().flatten() {
        ensure_writable(p)?;
    }
    let grid = match (a.alpha, a.beta) {
        (Some(alpha), Some(beta)) => {
            if a.grid.is_some() {
                return usage("--grid cannot be combined with --alpha/--beta");
            }
            Grid::Custom { alpha, beta }
        }
        (None, None) => a.grid.as_deref().unwrap_or("table1").parse().map_err(|e: saddlebounds::Error| Failure::usage(e.to_string()))?,
        _ => return usage("--alpha and --beta go together"),
    };
    let mut cfg = SuiteConfig::new(n, grid, a.runs.unwrap_or(10), a.seed.unwrap_or(42));
    cfg.combo_stride = a.stride.unwrap_or(1);
    cfg.gen.dims = dim_policy(a.dim_base, a.dim_jitter)?;
    cfg.gen.zero_tail = !a.full_tail;
    cfg.threads = thread_count(a.threads)?;
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;

    let result = run_suite(&cfg)?;
    emit(a.out.as_deref(), &to_csv(n, &result.rows))?;
    if let Some(p) = &a.svg {
        emit(Some(p), &scatter_svg(&result.rows))?;
    }
    if let Some(p) = &a.summary {
        emit(Some(p), &to_json(&result.summary))?;
    }
    let s = &result.summary;
    eprintln!("{} cases: {} contained, {} not contained, {} errors", s.cases, s.contained, s.not_contained, s.errors);
    for e in result.rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r.combo, r.run, e))).take(5) {
        eprintln!("  combo {} run {}: {}", e.0, e.1, e.2);
    }
    Ok(s.pass)
}

#[derive(Serialize)]
struct SolveOutput {
    system: SystemInfo,
    approx: Vec<String>,
    tol: f64,
    maxit: usize,
    iterations: usize,
    termination: Termination,
    converged: bool,
    final_residual: f64,
    /// `‖x − 1‖_∞` when the right-hand side is the image of the all-ones vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    error_vs_ones: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<EigenvalueBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    envelope_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    envelope: Option<EnvelopeCheck>,
}

/// Envelope values below this are not compared against the history.
const ENVELOPE_CUTOFF: f64 = 1e-10;
const ENVELOPE_SLACK: f64 = 1e-6;

pub fn solve(a: SolveArgs) -> Outcome {
    for p in [&a.out, &a.history].into_iter().flatten() {
        ensure_writable(p)?;
    }
    let tol = a.tol.unwrap_or(1e-14);
    let maxit = a.maxit.unwrap_or(2000);
    if !(tol > 0.0 && tol < 1.0) || maxit == 0 {
        return usage("--tol must lie in (0, 1) and --maxit must be positive");
    }
    let (sys, _, chain) = prepare(&a.input)?;
    let ones = Vector::from_element(sys.total_dim(), 1.0);
    let (b, from_ones) = match a.rhs.as_deref() {
        None | Some("ones") => (apply_system(&sys, &ones)?, true),
        Some(path) => {
            let m = read_matrix_market(Path::new(path))?;
            if m.ncols() != 1 || m.nrows() != sys.total_dim() {
                return Err(anyhow!("right-hand side {path} must be a {}x1 column, got {}x{}", sys.total_dim(), m.nrows(), m.ncols()).into());
            }
            (m.column(0).into_owned(), false)
        }
    };
    let sol = minres(&sys, &chain, &b, tol, maxit)?;
    let r = &sol.report;
    let mut pass = r.converged;

    let (mut bounds, mut rate, mut envelope) = (None, None, None);
    if a.envelope {
        let ind = compute_indicator_set(&sys, &chain)?;
        let bd = compute_with(&ind, default_method(&ind))?;
        let check = check_envelope(&r.history, &bd, ENVELOPE_CUTOFF, ENVELOPE_SLACK)?;
        pass &= check.pass;
        rate = Some(envelope_rate(&bd)?);
        bounds = Some(bd);
        envelope = Some(check);
    }
    if let Some(p) = &a.history {
        let mut s = String::from("iteration,relative_residual\n");
        for (k, h) in r.history.iter().enumerate() {
            let _ = writeln!(s, "{k},{h:.16e}");
        }
        emit(Some(p), &s)?;
    }
    eprintln!("{:?} after {} iterations, relative residual {:.3e}", r.termination, r.iterations, r.history.last().copied().unwrap_or(1.0));
    let out = SolveOutput {
        system: system_info(&sys),
        approx: chain.strategies().iter().map(ToString::to_string).collect(),
        tol,
        maxit,
        iterations: r.iterations,
        termination: r.termination,
        converged: r.converged,
        final_residual: r.history.last().copied().unwrap_or(1.0),
        error_vs_ones: from_ones.then(|| (&sol.x - &ones).amax()),
        bounds,
        envelope_rate: rate,
        envelope,
    };
    emit(a.out.as_deref(), &to_json(&out))?;
    Ok(pass)
}

pub fn poly_roots(a: PolyRootsArgs) -> Outcome {
    let e = require(a.gamma_e, "gammaE")?;
    let r = require(a.gamma_r, "gammaR")?;
    if e.len() != r.len() + 1 {
        return usage(format!("--gammaE needs one more value than --gammaR ({} vs {})", e.len(), r.len()));
    }
    if e.iter().chain(&r).any(|v| !v.is_finite()) || r.iter().any(|v| *v <= 0.0) {
        return usage("parameters must be finite and every gammaR positive");
    }
    let gamma = GammaAssignment::new(e, r);
    let degree = a.degree.unwrap_or(gamma.max_degree());
    if degree == 0 || degree > gamma.max_degree() {
        return usage(format!("--degree must lie in 1..={}", gamma.max_degree()));
    }
    let roots = roots_u(degree, &gamma)?;
    if a.json {
        print!("{}", to_json(&roots));
    } else {
        let prec = a.precision.unwrap_or(4);
        let parts: Vec<String> = roots.roots.iter().map(|x| format!("{x:.prec$}")).collect();
        println!("{}", parts.join(","));
    }
    Ok(true)
}

pub fn generate(a: GenerateArgs) -> Outcome {
    let n = require(a.n, "n")?;
    let out: PathBuf = require(a.out, "out")?;
    if n == 0 {
        return usage("--n must be at least 1");
    }
    let opts = GenOptions { dims: dim_policy(a.dim_base, a.dim_jitter)?, zero_tail: a.zero_tail, ..GenOptions::default() };
    let seed = a.seed.unwrap_or(1);
    let sys = random_system_with(n, &mut case_rng(seed, 0), &opts)?;
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    write_system_dir(&out, &sys)?;
    let (diag, off) = system_paths(&out, n);
    eprintln!("wrote {} + {} blocks to {}, dims {:?}", diag.len(), off.len(), out.display(), sys.dims());
    Ok(true)
}
