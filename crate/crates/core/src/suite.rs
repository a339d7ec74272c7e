//! Randomized verification suites: every combination of grid endpoints is
//! turned into a system with a controlled chain, bounded, and compared with
//! the exact preconditioned spectrum.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{compute_bounds, CONTAINMENT_REL_TOL};
use crate::error::{Error, Result};
use crate::indicators::compute_indicator_set;
use crate::randgen::{case_rng, controlled_chain, random_system_with, GenOptions};
use crate::spectrum::preconditioned_spectrum;

/// Candidate values for the lower (`α`) and upper (`β`) interval endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Grid {
    /// `α ∈ {0.1, 0.3, 0.9}`, `β ∈ {1.2, 1.8, 5}` for `N = 2`;
    /// `α ∈ {0.1, 0.9}`, `β ∈ {1.2, 5}` otherwise.
    Table1,
    /// `α ∈ {0.1, 0.9}`, `β ∈ {1.2, 5}` for every `N`.
    Smoke,
    Custom { alpha: Vec<f64>, beta: Vec<f64> },
}

impl Grid {
    pub fn values(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            Grid::Table1 if n == 2 => (vec![0.1, 0.3, 0.9], vec![1.2, 1.8, 5.0]),
            Grid::Table1 | Grid::Smoke => (vec![0.1, 0.9], vec![1.2, 5.0]),
            Grid::Custom { alpha, beta } => (alpha.clone(), beta.clone()),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Table1 => f.write_str("table1"),
            Grid::Smoke => f.write_str("smoke"),
            Grid::Custom { .. } => f.write_str("custom"),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Grid::Table1),
            "smoke" => Ok(Grid::Smoke),
            _ => Err(Error::Parameter(format!("unknown grid {s:?} (expected table1 or smoke)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n: usize,
    pub grid: Grid,
    pub runs: usize,
    pub base_seed: u64,
    #[serde(default = "suite_gen_default")]
    pub gen: GenOptions,
    /// Keep every `combo_stride`-th combination.
    #[serde(default = "one")]
    pub combo_stride: usize,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn one() -> usize {
    1
}

fn suite_gen_default() -> GenOptions {
    GenOptions { zero_tail: true, ..GenOptions::default() }
}

impl SuiteConfig {
    pub fn new(n: usize, grid: Grid, runs: usize, base_seed: u64) -> Self {
        Self { n, grid, runs, base_seed, gen: suite_gen_default(), combo_stride: 1, threads: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parameter("N must be at least 1".into()));
        }
        if self.runs == 0 || self.combo_stride == 0 {
            return Err(Error::Parameter("runs and combo_stride must be positive".into()));
        }
        let (alpha, beta) = self.grid.values(self.n);
        for (name, vals) in [("alpha", &alpha), ("beta", &beta)] {
            if vals.is_empty() || vals.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::Parameter(format!("{name} grid values must be positive")));
            }
            if vals.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Parameter(format!("{name} grid values must be increasing")));
            }
        }
        if alpha[alpha.len() - 1] > beta[0] {
            return Err(Error::Parameter("every alpha value must lie below every beta value".into()));
        }
        Ok(())
    }

    /// `(|α|·|β|)^{N+1}` before striding.
    pub fn total_combinations(&self) -> usize {
        let (a, b) = self.grid.values(self.n);
        (a.len() * b.len()).pow(self.n as u32 + 1)
    }

    pub fn combinations(&self) -> Vec<usize> {
        (0..self.total_combinations()).step_by(self.combo_stride).collect()
    }

    /// Level intervals `(α_k, β_k)`, `k = 0..=N`, for a combination index.
    /// Endpoints are ordered `α_0, β_0, α_1, β_1, …` with the first varying
    /// slowest.
    pub fn targets(&self, combo: usize) -> Vec<(f64, f64)> {
        let (alpha, beta) = self.grid.values(self.n);
        let mut digits = Vec::with_capacity(2 * self.n + 2);
        let mut c = combo;
        for slot in (0..2 * self.n + 2).rev() {
            let radix = if slot % 2 == 0 { alpha.len() } else { beta.len() };
            digits.push(c % radix);
            c /= radix;
        }
        digits.reverse();
        (0..=self.n).map(|k| (alpha[digits[2 * k]], beta[digits[2 * k + 1]])).collect()
    }
}

pub const CLASS_NAMES: [&str; 4] = ["neg_lb", "neg_ub", "pos_lb", "pos_ub"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub combo: usize,
    pub run: usize,
    pub targets: Vec<(f64, f64)>,
    /// `(λ₋min, λ₋max, λ₊min, λ₊max)`.
    pub extremal: [f64; 4],
    /// `(μ₋^LB, μ₋^UB, μ₊^LB, μ₊^UB)`.
    pub bounds: [f64; 4],
    pub contained: bool,
    /// Distance from each extremal eigenvalue to its bound, positive inside.
    pub slacks: [f64; 4],
    #[serde(default)]
    pub error: Option<String>,
}

impl SuiteRow {
    fn widths(&self) -> [f64; 4] {
        let wn = self.bounds[1] - self.bounds[0];
        let wp = self.bounds[3] - self.bounds[2];
        [wn, wn, wp, wp]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub name: String,
    pub min_slack: f64,
    pub max_slack: f64,
    pub mean_slack: f64,
    /// Smallest slack relative to the width of the interval it belongs to.
    pub min_rel_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub n: usize,
    pub cases: usize,
    pub contained: usize,
    pub not_contained: usize,
    pub errors: usize,
    pub classes: Vec<ClassSummary>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub rows: Vec<SuiteRow>,
    pub summary: SuiteSummary,
}

fn run_case(cfg: &SuiteConfig, combo: usize, run: usize) -> SuiteRow {
    let targets = cfg.targets(combo);
    let mut row = SuiteRow {
        combo,
        run,
        targets: targets.clone(),
        extremal: [f64::NAN; 4],
        bounds: [f64::NAN; 4],
        contained: false,
        slacks: [f64::NAN; 4],
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let mut rng = case_rng(cfg.base_seed, (combo * cfg.runs + run) as u64);
        let sys = random_system_with(cfg.n, &mut rng, &cfg.gen)?;
        let chain = controlled_chain(&sys, &targets)?;
        let ind = compute_indicator_set(&sys, &chain)?;
        let bounds = compute_bounds(&ind)?;
        let spectrum = preconditioned_spectrum(&sys, &chain)?;
        let [ln, un, lp, up] = spectrum.extremal;
        let b = bounds.endpoints();
        row.extremal = spectrum.extremal;
        row.bounds = b;
        row.slacks = [ln - b[0], b[1] - un, lp - b[2], b[3] - up];
        row.contained = spectrum.extremal.iter().all(|x| bounds.contains(*x, CONTAINMENT_REL_TOL));
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row
}

fn summarize(cfg: &SuiteConfig, rows: &[SuiteRow]) -> SuiteSummary {
    let ok: Vec<&SuiteRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let classes = (0..4)
        .map(|i| {
            let slacks: Vec<f64> = ok.iter().map(|r| r.slacks[i]).collect();
            let rel = ok.iter().map(|r| r.slacks[i] / r.widths()[i].max(f64::MIN_POSITIVE));
            ClassSummary {
                name: CLASS_NAMES[i].to_string(),
                min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
                max_slack: slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean_slack: slacks.iter().sum::<f64>() / slacks.len().max(1) as f64,
                min_rel_slack: rel.fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    let contained = ok.iter().filter(|r| r.contained).count();
    let errors = rows.len() - ok.len();
    SuiteSummary {
        n: cfg.n,
        cases: rows.len(),
        contained,
        not_contained: ok.len() - contained,
        errors,
        classes,
        pass: errors == 0 && contained == ok.len(),
    }
}

/// Runs every `(combination, run)` pair. Cases execute in parallel; rows come
/// back ordered by combination, then run.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    cfg.validate()?;
    let cases: Vec<(usize, usize)> = cfg
        .combinations()
        .into_iter()
        .flat_map(|c| (0..cfg.runs).map(move |r| (c, r)))
        .collect();
    let work = || cases.par_iter().map(|&(c, r)| run_case(cfg, c, r)).collect::<Vec<_>>();
    let rows = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot build a pool of {t} threads: {e}")))?
            .install(work),
        None => work(),
    };
    let summary = summarize(cfg, &rows);
    Ok(SuiteResult { rows, summary })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(n: usize) -> String {
    let mut cols = vec!["combo_id".to_string(), "run".to_string()];
    for k in 0..=n {
        let which = if k == 0 { "E0".to_string() } else { format!("R{k}") };
        cols.push(format!("alpha_{which}"));
        cols.push(format!("beta_{which}"));
    }
    cols.extend(["lambda_neg_min", "lambda_neg_max", "lambda_pos_min", "lambda_pos_max"].map(String::from));
    cols.extend(CLASS_NAMES.map(|c| format!("mu_{c}")));
    cols.push("containment".into());
    cols.extend(CLASS_NAMES.map(|c| format!("slack_{c}")));
    cols.join(",")
}

/// One line per row with 17 significant digits; errors report `error` in the
/// containment column.
pub fn to_csv(n: usize, rows: &[SuiteRow]) -> String {
    let mut out = csv_header(n);
    out.push('\n');
    for r in rows {
        let mut f = vec![r.combo.to_string(), r.run.to_string()];
        for (lo, hi) in &r.targets {
            f.push(num(*lo));
            f.push(num(*hi));
        }
        f.extend(r.extremal.iter().map(|x| num(*x)));
        f.extend(r.bounds.iter().map(|x| num(*x)));
        f.push(match (&r.error, r.contained) {
            (Some(_), _) => "error".into(),
            (None, true) => "pass".into(),
            (None, false) => "fail".into(),
        });
        f.extend(r.slacks.iter().map(|x| num(*x)));
        out.push_str(&f.join(","));
        out.push('\n');
    }
    out
}

/// Four stacked panels, one per endpoint class: cases ordered by the bound
/// (red line) with the matching extremal eigenvalue as blue dots.
pub fn scatter_svg(rows: &[SuiteRow]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 180.0;
    const PAD: f64 = 30.0;
    let ok: Vec<&SuiteRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{}" font-family="sans-serif" font-size="11">"#,
        4.0 * (H + PAD) + PAD
    );
    let labels = ["lambda_neg_min vs mu_neg_lb", "lambda_neg_max vs mu_neg_ub", "lambda_pos_min vs mu_pos_lb", "lambda_pos_max vs mu_pos_ub"];
    for (i, label) in labels.iter().enumerate() {
        let top = PAD + i as f64 * (H + PAD);
        let mut pts: Vec<(f64, f64)> = ok.iter().map(|r| (r.bounds[i], r.extremal[i])).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let _ = writeln!(svg, r#"<text x="{PAD}" y="{:.1}">{label}</text>"#, top - 8.0);
        let _ = writeln!(
            svg,
            r#"<rect x="{PAD}" y="{top:.1}" width="{:.1}" height="{H}" fill="none" stroke="gray"/>"#,
            W - 2.0 * PAD
        );
        if pts.is_empty() {
            continue;
        }
        let lo = pts.iter().map(|p| p.0.min(p.1)).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.0.max(p.1)).fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let sx = |j: usize| PAD + (W - 2.0 * PAD) * (j as f64 + 0.5) / pts.len() as f64;
        let sy = |v: f64| top + H - 5.0 - (H - 10.0) * (v - lo) / span;
        let line: Vec<String> = pts.iter().enumerate().map(|(j, p)| format!("{:.2},{:.2}", sx(j), sy(p.0))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="red" stroke-width="1.5" points="{}"/>"#, line.join(" "));
        for (j, p) in pts.iter().enumerate() {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="1.6" fill="blue"/>"#, sx(j), sy(p.1));
        }
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{hi:.4}</text>"#, W - PAD + 2.0, top + 10.0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{lo:.4}</text>"#, W - PAD + 2.0, top + H);
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randgen::DimensionPolicy;

    #[test]
    fn combination_counts() {
        assert_eq!(SuiteConfig::new(2, Grid::Table1, 1, 0).total_combinations(), 729);
        assert_eq!(SuiteConfig::new(3, Grid::Table1, 1, 0).total_combinations(), 256);
        assert_eq!(SuiteConfig::new(4, Grid::Table1, 1, 0).total_combinations(), 1024);
        assert_eq!(SuiteConfig::new(2, Grid::Smoke, 1, 0).total_combinations(), 64);
    }

    #[test]
    fn targets_enumerate_lexicographically() {
        let cfg = SuiteConfig::new(1, Grid::Smoke, 1, 0);
        assert_eq!(cfg.targets(0), vec![(0.1, 1.2), (0.1, 1.2)]);
        assert_eq!(cfg.targets(1), vec![(0.1, 1.2), (0.1, 5.0)]);
        assert_eq!(cfg.targets(15), vec![(0.9, 5.0), (0.9, 5.0)]);
    }

    #[test]
    fn small_suite_contains() {
        let mut cfg = SuiteConfig::new(1, Grid::Smoke, 1, 3);
        cfg.gen.dims = DimensionPolicy { base: 6.0, jitter: 3.0 };
        let res = run_suite(&cfg).unwrap();
        assert_eq!(res.rows.len(), 16);
        assert!(res.summary.pass, "{:?}", res.summary);
        let csv = to_csv(1, &res.rows);
        assert_eq!(csv.lines().count(), 17);
        assert!(scatter_svg(&res.rows).starts_with("<svg"));
    }

    #[test]
    fn bad_grids_rejected() {
        let cfg = SuiteConfig::new(2, Grid::Custom { alpha: vec![0.5, 0.2], beta: vec![1.0] }, 1, 0);
        assert!(cfg.validate().is_err());
        let cfg = SuiteConfig::new(2, Grid::Custom { alpha: vec![2.0], beta: vec![1.0] }, 1, 0);
        assert!(cfg.validate().is_err());
    }
}
