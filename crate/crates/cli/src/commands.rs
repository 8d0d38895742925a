use crate::args::{Dims, McArgs, Point, ProbeArgs, Quantity, ScanArgs};
use crate::output::{cells, num, Measured, Render, Table};
use anyhow::{bail, Result};
use nlcone_core::cone_model::ConeParams;
use nlcone_core::curvature_solver::{
    alpha0, mean_curvature, solve_alpha_with, unit_point_factor, ApertureSolution, CurvatureRoute, SolveMethod,
    DEFAULT_ALPHA_TOL,
};
use nlcone_core::oracle::{mc_mean_curvature, mc_surface_integral, McEstimate, SurfaceIntegrand};
use nlcone_core::quadrature::Tolerances;
use nlcone_core::reference::table1_cells;
use nlcone_core::stability::{
    a0_squared, bisect_threshold, c_constant, jacobi_probe, stability_report, stability_report_at, AlphaSource,
    Normalization, StabilityReport, Verdict,
};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Tolerance of `α₀` bisection: the equation is a pair of smooth integrals.
const ALPHA0_TOL: f64 = 1e-12;

/// Default bracket width in `s` for `scan --bracket-threshold`.
const THRESHOLD_TOL: f64 = 1e-3;

/// Oracle disagreement that counts as an inconsistency.
const MAX_SIGMAS: f64 = 6.0;

pub struct Ctx {
    pub tol: Tolerances,
    pub norm: Normalization,
    pub samples: usize,
    pub seed: u64,
}

/// A command's result, plus the reason it should exit as inconsistent.
pub struct Outcome {
    pub body: Box<dyn Render + Send>,
    pub inconsistency: Option<String>,
}

impl Outcome {
    fn ok(body: impl Render + Send + 'static) -> Self {
        Outcome {
            body: Box::new(body),
            inconsistency: None,
        }
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Stable => "stable",
        Verdict::Unstable => "unstable",
    }
}

fn norm_str(n: Normalization) -> &'static str {
    match n {
        Normalization::Table => "table",
        Normalization::Raw => "raw",
    }
}

fn method_str(m: SolveMethod) -> &'static str {
    match m {
        SolveMethod::Bisection => "bisection",
        SolveMethod::ClosedFormSymmetry => "closed-form-symmetry",
    }
}

fn aperture(sol: &ApertureSolution) -> Measured {
    Measured::new(sol.params.alpha, 0.5 * (sol.bracket.1 - sol.bracket.0))
}

/// The minimal-cone aperture: `α₀` at `s = 0`, the root of `H` otherwise.
fn minimal_alpha(m: usize, n: usize, s: f64, ctx: &Ctx) -> Result<ApertureSolution> {
    Ok(if s == 0.0 {
        alpha0(m, n, ALPHA0_TOL)?
    } else {
        solve_alpha_with(m, n, s, DEFAULT_ALPHA_TOL, &ctx.tol)?
    })
}

// --- alpha, alpha0 ---------------------------------------------------------

#[derive(Serialize)]
struct AlphaOut {
    m: usize,
    n: usize,
    s: f64,
    alpha: Measured,
    /// `H(α)` for `s > 0`, `C₀(α)` for the limit.
    residual: Measured,
    bracket: (f64, f64),
    method: SolveMethod,
    evaluations: usize,
}

impl AlphaOut {
    fn new(sol: &ApertureSolution) -> Self {
        AlphaOut {
            m: sol.params.m,
            n: sol.params.n,
            s: sol.params.s,
            alpha: aperture(sol),
            residual: Measured::new(sol.residual, sol.residual_error),
            bracket: sol.bracket,
            method: sol.method,
            evaluations: sol.evaluations,
        }
    }
}

impl Render for AlphaOut {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "m",
            "n",
            "s",
            "alpha",
            "alpha_err",
            "residual",
            "residual_err",
            "method",
        ]);
        let mut row = vec![self.m.to_string(), self.n.to_string(), num(self.s)];
        cells(&mut row, self.alpha);
        cells(&mut row, self.residual);
        row.push(method_str(self.method).into());
        t.push(row);
        t
    }

    fn human(&self) -> String {
        format!(
            "(m, n, s) = ({}, {}, {})\nalpha    = {:.10} ± {:.1e}\nresidual = {:.3e} ± {:.1e}\nmethod   = {}, {} evaluations\n",
            self.m,
            self.n,
            self.s,
            self.alpha.value,
            self.alpha.error,
            self.residual.value,
            self.residual.error,
            method_str(self.method),
            self.evaluations
        )
    }
}

pub fn alpha(d: &Dims, ctx: &Ctx) -> Result<Outcome> {
    let sol = if d.s == 0.0 {
        alpha0(d.m, d.n, d.tol.unwrap_or(ALPHA0_TOL))?
    } else {
        solve_alpha_with(d.m, d.n, d.s, d.tol.unwrap_or(DEFAULT_ALPHA_TOL), &ctx.tol)?
    };
    Ok(Outcome::ok(AlphaOut::new(&sol)))
}

pub fn alpha0_cmd(m: usize, n: usize, tol: Option<f64>) -> Result<Outcome> {
    Ok(Outcome::ok(AlphaOut::new(&alpha0(m, n, tol.unwrap_or(ALPHA0_TOL))?)))
}

// --- stability, table1, scan -----------------------------------------------

#[derive(Serialize, Clone)]
struct StabilityOut {
    m: usize,
    n: usize,
    s: f64,
    alpha: Measured,
    alpha_source: AlphaSource,
    normalization: &'static str,
    h: Measured,
    a0_squared: Measured,
    /// `h − a0_squared`.
    margin: Measured,
    verdict: &'static str,
    /// Whether `|margin|` exceeds its error budget.
    decisive: bool,
}

impl StabilityOut {
    fn new(r: &StabilityReport, norm: Normalization) -> Self {
        let (h, a0) = match norm {
            Normalization::Table => (r.h_normalized, r.a0_normalized),
            Normalization::Raw => (r.h_value, r.a0_squared),
        };
        let margin = Measured::new(h.value - a0.value, h.error_estimate + a0.error_estimate);
        StabilityOut {
            m: r.params.m,
            n: r.params.n,
            s: r.params.s,
            alpha: Measured::new(r.params.alpha, 0.5 * r.alpha_uncertainty),
            alpha_source: r.alpha_source,
            normalization: norm_str(norm),
            h: h.into(),
            a0_squared: a0.into(),
            margin,
            verdict: verdict_str(r.verdict),
            decisive: margin.value.abs() > margin.error,
        }
    }

    const HEADER: [&'static str; 13] = [
        "m",
        "n",
        "s",
        "alpha",
        "alpha_err",
        "h",
        "h_err",
        "a0_squared",
        "a0_squared_err",
        "margin",
        "margin_err",
        "verdict",
        "decisive",
    ];

    fn row(&self) -> Vec<String> {
        let mut row = vec![self.m.to_string(), self.n.to_string(), num(self.s)];
        for v in [self.alpha, self.h, self.a0_squared, self.margin] {
            cells(&mut row, v);
        }
        row.push(self.verdict.into());
        row.push(self.decisive.to_string());
        row
    }

    fn human_block(&self) -> String {
        format!(
            "(m, n, s) = ({}, {}, {})\nalpha      = {:.8} ± {:.1e} ({:?})\nH          = {}\nA0^2       = {}\nH - A0^2   = {}\nverdict    = {}{}\n",
            self.m,
            self.n,
            self.s,
            self.alpha.value,
            self.alpha.error,
            self.alpha_source,
            self.h,
            self.a0_squared,
            self.margin,
            self.verdict,
            if self.decisive { "" } else { " (within error budget)" }
        )
    }
}

impl Render for StabilityOut {
    fn table(&self) -> Table {
        let mut t = Table::new(&Self::HEADER);
        t.push(self.row());
        t
    }

    fn human(&self) -> String {
        format!("normalization: {}\n{}", self.normalization, self.human_block())
    }
}

fn report(m: usize, n: usize, s: f64, alpha: Option<f64>, ctx: &Ctx) -> Result<StabilityReport> {
    Ok(match alpha {
        Some(a) => stability_report_at(&ConeParams::new(m, n, s, a)?, AlphaSource::Supplied, &ctx.tol)?,
        None => stability_report(m, n, s, &ctx.tol)?,
    })
}

pub fn stability(p: &Point, ctx: &Ctx) -> Result<Outcome> {
    let r = report(p.m, p.n, p.s, p.alpha, ctx)?;
    Ok(Outcome::ok(StabilityOut::new(&r, ctx.norm)))
}

#[derive(Serialize)]
struct Table1Out {
    s: f64,
    normalization: &'static str,
    cells: Vec<StabilityOut>,
}

impl Render for Table1Out {
    /// Rows `m`, columns `n`, a sub-row per quantity.
    fn table(&self) -> Table {
        let mut header = vec!["m".to_string(), "quantity".to_string()];
        for n in 1..=7 {
            header.push(format!("n={n}"));
            header.push(format!("n={n}_err"));
        }
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for m in 2..=7 {
            for (name, pick) in [
                ("H", (|c: &StabilityOut| c.h) as fn(&StabilityOut) -> Measured),
                ("A0^2", |c: &StabilityOut| c.a0_squared),
            ] {
                let mut row = vec![m.to_string(), name.to_string()];
                for n in 1..=7 {
                    match self.cells.iter().find(|c| c.m == m && c.n == n) {
                        Some(c) => cells(&mut row, pick(c)),
                        None => row.extend([String::new(), String::new()]),
                    }
                }
                t.push(row);
            }
        }
        t
    }

    fn human(&self) -> String {
        let mut out = format!("H(m,n,0) and A0(m,n,0)^2, {} normalization\n", self.normalization);
        let _ = write!(out, "{:>2} {:>5}", "m", "");
        for n in 1..=7 {
            let _ = write!(out, " {:>9}", format!("n={n}"));
        }
        out.push('\n');
        for m in 2..=7 {
            for (name, pick) in [
                ("H", (|c: &StabilityOut| c.h) as fn(&StabilityOut) -> Measured),
                ("A0^2", |c: &StabilityOut| c.a0_squared),
            ] {
                let _ = write!(
                    out,
                    "{:>2} {:>5}",
                    if name == "H" { m.to_string() } else { String::new() },
                    name
                );
                for c in self.cells.iter().filter(|c| c.m == m) {
                    let _ = write!(out, " {:>9.5}", pick(c).value);
                }
                out.push('\n');
            }
        }
        out.push_str("verdicts (S = stable, U = unstable):\n");
        for m in 2..=7 {
            let _ = write!(out, "{m:>2}  ");
            for c in self.cells.iter().filter(|c| c.m == m) {
                out.push_str(if c.verdict == "stable" { " S" } else { " U" });
            }
            out.push('\n');
        }
        out
    }
}

pub fn table1(ctx: &Ctx) -> Result<Outcome> {
    let grid: Vec<(usize, usize)> = table1_cells().collect();
    let cells = grid
        .par_iter()
        .map(|&(m, n)| stability_report(m, n, 0.0, &ctx.tol).map(|r| StabilityOut::new(&r, ctx.norm)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome::ok(Table1Out {
        s: 0.0,
        normalization: norm_str(ctx.norm),
        cells,
    }))
}

#[derive(Serialize)]
struct Threshold {
    /// The margin has one sign at `s_lo` and the other at `s_hi`.
    s_lo: f64,
    s_hi: f64,
    margin_lo: Measured,
    margin_hi: Measured,
    evaluations: Vec<StabilityOut>,
}

#[derive(Serialize)]
struct ScanOut {
    m: usize,
    n: usize,
    normalization: &'static str,
    rows: Vec<StabilityOut>,
    /// Present with `--bracket-threshold`; `null` if the grid shows no
    /// sign change.
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<Option<Threshold>>,
}

impl Render for ScanOut {
    fn table(&self) -> Table {
        let mut header = vec!["kind"];
        header.extend(StabilityOut::HEADER);
        let mut t = Table::new(&header);
        for r in &self.rows {
            let mut row = vec!["grid".to_string()];
            row.extend(r.row());
            t.push(row);
        }
        if let Some(Some(th)) = &self.threshold {
            for r in &th.evaluations {
                let kind = if r.s == th.s_lo {
                    "bracket-lo"
                } else if r.s == th.s_hi {
                    "bracket-hi"
                } else {
                    "bisection"
                };
                let mut row = vec![kind.to_string()];
                row.extend(r.row());
                t.push(row);
            }
        }
        t
    }

    fn human(&self) -> String {
        let mut out = format!(
            "scan of ({}, {}), {} normalization\n",
            self.m, self.n, self.normalization
        );
        let _ = writeln!(
            out,
            "{:>8} {:>10} {:>10} {:>10} {:>11}  verdict",
            "s", "alpha", "H", "A0^2", "H - A0^2"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>8.4} {:>10.6} {:>10.6} {:>10.6} {:>+11.6}  {}",
                r.s, r.alpha.value, r.h.value, r.a0_squared.value, r.margin.value, r.verdict
            );
        }
        match &self.threshold {
            Some(Some(th)) => {
                let _ = writeln!(
                    out,
                    "sign change of H - A0^2 in s ∈ ({:.6}, {:.6}): {:+.3e} → {:+.3e}",
                    th.s_lo, th.s_hi, th.margin_lo.value, th.margin_hi.value
                );
            }
            Some(None) => out.push_str("no sign change of H - A0^2 on the grid\n"),
            None => {}
        }
        out
    }
}

pub fn scan(a: &ScanArgs, ctx: &Ctx) -> Result<Outcome> {
    if a.steps == 0 {
        bail!(nlcone_core::Error::InvalidParameter(
            "--steps must be at least 1".into()
        ));
    }
    if !(a.s_from <= a.s_to) {
        bail!(nlcone_core::Error::InvalidParameter(format!(
            "--s-from ({}) must not exceed --s-to ({})",
            a.s_from, a.s_to
        )));
    }
    let tol = a.tol.unwrap_or(THRESHOLD_TOL);
    if !(tol > 0.0) {
        bail!(nlcone_core::Error::InvalidParameter(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    let grid: Vec<f64> = if a.steps == 1 {
        vec![a.s_from]
    } else {
        (0..a.steps)
            .map(|k| a.s_from + (a.s_to - a.s_from) * k as f64 / (a.steps - 1) as f64)
            .collect()
    };
    let reports = grid
        .par_iter()
        .map(|&s| stability_report(a.m, a.n, s, &ctx.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let out = |r: &StabilityReport| StabilityOut::new(r, ctx.norm);

    let threshold = if a.bracket_threshold {
        match reports.windows(2).find(|w| w[0].verdict != w[1].verdict) {
            None => Some(None),
            Some(w) => {
                let b = bisect_threshold(w[0], w[1], tol, &ctx.tol)?;
                let (lo, hi) = (out(&b.lo), out(&b.hi));
                Some(Some(Threshold {
                    s_lo: lo.s,
                    s_hi: hi.s,
                    margin_lo: lo.margin,
                    margin_hi: hi.margin,
                    evaluations: b.evaluations.iter().map(out).collect(),
                }))
            }
        }
    } else {
        None
    };
    let rows = reports.iter().map(out).collect();
    Ok(Outcome::ok(ScanOut {
        m: a.m,
        n: a.n,
        normalization: norm_str(ctx.norm),
        rows,
        threshold,
    }))
}

// --- mc-check ----------------------------------------------------------------

#[derive(Serialize)]
struct McCheckOut {
    m: usize,
    n: usize,
    s: f64,
    alpha: Measured,
    quantity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    monte_carlo: Measured,
    samples: usize,
    seed: u64,
    cutoff_radius: Option<f64>,
    excision_radius: Option<f64>,
    quadrature: Measured,
    /// `|mc − quadrature| / stderr`.
    z_score: f64,
    agrees_3sigma: bool,
}

impl Render for McCheckOut {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "m",
            "n",
            "s",
            "alpha",
            "alpha_err",
            "quantity",
            "mc",
            "mc_stderr",
            "quadrature",
            "quadrature_err",
            "z_score",
            "agrees_3sigma",
        ]);
        let mut row = vec![self.m.to_string(), self.n.to_string(), num(self.s)];
        cells(&mut row, self.alpha);
        row.push(self.quantity.into());
        cells(&mut row, self.monte_carlo);
        cells(&mut row, self.quadrature);
        row.push(num(self.z_score));
        row.push(self.agrees_3sigma.to_string());
        t.push(row);
        t
    }

    fn human(&self) -> String {
        format!(
            "(m, n, s, alpha) = ({}, {}, {}, {:.8}), {}{} (raw)\nmonte carlo = {:.6} ± {:.6} ({} samples, seed {})\nquadrature  = {}\nz = {:.2} → {}\n",
            self.m,
            self.n,
            self.s,
            self.alpha.value,
            self.quantity,
            self.beta.map(|b| format!(" β = {b}")).unwrap_or_default(),
            self.monte_carlo.value,
            self.monte_carlo.error,
            self.samples,
            self.seed,
            self.quadrature,
            self.z_score,
            if self.agrees_3sigma { "agree at 3σ" } else { "DISAGREE at 3σ" }
        )
    }
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Curvature => "mean-curvature",
        Quantity::Hardy => "hardy-weight",
        Quantity::Alignment => "normal-alignment",
    }
}

/// Oracle estimate and quadrature value of one quantity, both raw.
fn mc_pair(
    params: &ConeParams,
    quantity: Quantity,
    beta: Option<f64>,
    ctx: &Ctx,
) -> Result<(McEstimate, Measured, Option<f64>)> {
    Ok(match quantity {
        Quantity::Curvature => {
            let mc = mc_mean_curvature(params.m, params.n, params.s, params.alpha, ctx.samples, ctx.seed)?;
            let q = mean_curvature(params, CurvatureRoute::HalfSpaceFlux, &ctx.tol)?.scaled(unit_point_factor(params));
            (mc, q.into(), None)
        }
        Quantity::Hardy => {
            let beta = beta.unwrap_or(params.hardy_beta());
            let mc = mc_surface_integral(params, SurfaceIntegrand::HardyWeight { beta }, ctx.samples, ctx.seed)?;
            let q = c_constant(params, beta, Normalization::Raw, &ctx.tol)?;
            (mc, q.into(), Some(beta))
        }
        Quantity::Alignment => {
            let mc = mc_surface_integral(params, SurfaceIntegrand::NormalAlignment, ctx.samples, ctx.seed)?;
            (mc, a0_squared(params, Normalization::Raw, &ctx.tol)?.into(), None)
        }
    })
}

pub fn mc_check(a: &McArgs, ctx: &Ctx) -> Result<Outcome> {
    let alpha = match a.alpha {
        Some(x) => Measured::exact(x),
        None => aperture(&minimal_alpha(a.m, a.n, a.s, ctx)?),
    };
    let params = ConeParams::new(a.m, a.n, a.s, alpha.value)?;
    let (mc, q, beta) = mc_pair(&params, a.quantity, a.beta, ctx)?;
    let z = mc.z_score(q.value);
    let out = McCheckOut {
        m: a.m,
        n: a.n,
        s: a.s,
        alpha,
        quantity: quantity_name(a.quantity),
        beta,
        monte_carlo: Measured::new(mc.mean, mc.stderr),
        samples: mc.samples,
        seed: mc.seed,
        cutoff_radius: mc.cutoff_radius,
        excision_radius: mc.excision_radius,
        quadrature: q,
        z_score: z,
        agrees_3sigma: mc.agrees_with(q.value, q.error, 3.0),
    };
    let inconsistency =
        (!mc.agrees_with(q.value, q.error, MAX_SIGMAS)).then(|| format!("oracle and quadrature differ by {z:.1}σ"));
    Ok(Outcome {
        body: Box::new(out),
        inconsistency,
    })
}

// --- jacobi-probe ------------------------------------------------------------

#[derive(Serialize)]
struct ProbeOut {
    m: usize,
    n: usize,
    s: f64,
    alpha: Measured,
    beta: f64,
    normalization: &'static str,
    /// Direct principal value of the difference term at `p̂`.
    pv_term: Measured,
    /// `−C(m,n,s,β)`.
    predicted: Measured,
    /// `pv_term − predicted` against the combined error budget.
    discrepancy: Measured,
    agrees: bool,
}

impl Render for ProbeOut {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "m",
            "n",
            "s",
            "alpha",
            "alpha_err",
            "beta",
            "pv_term",
            "pv_term_err",
            "predicted",
            "predicted_err",
            "discrepancy",
            "discrepancy_err",
            "agrees",
        ]);
        let mut row = vec![self.m.to_string(), self.n.to_string(), num(self.s)];
        cells(&mut row, self.alpha);
        row.push(num(self.beta));
        for v in [self.pv_term, self.predicted, self.discrepancy] {
            cells(&mut row, v);
        }
        row.push(self.agrees.to_string());
        t.push(row);
        t
    }

    fn human(&self) -> String {
        format!(
            "(m, n, s, alpha, beta) = ({}, {}, {}, {:.8}, {}) (raw)\npv term   = {}\npredicted = {}\ndifference {:.2e} vs error budget {:.2e} → {}\n",
            self.m,
            self.n,
            self.s,
            self.alpha.value,
            self.beta,
            self.pv_term,
            self.predicted,
            self.discrepancy.value,
            self.discrepancy.error,
            if self.agrees { "agree" } else { "DISAGREE" }
        )
    }
}

fn probe(m: usize, n: usize, s: f64, alpha: Measured, beta: Option<f64>, ctx: &Ctx) -> Result<ProbeOut> {
    let params = ConeParams::new(m, n, s, alpha.value)?;
    let beta = beta.unwrap_or(params.hardy_beta());
    let j = jacobi_probe(&params, beta, &ctx.tol)?;
    let d = Measured::new(j.pv_term.value - j.predicted.value, j.combined_error());
    Ok(ProbeOut {
        m,
        n,
        s,
        alpha,
        beta,
        normalization: "raw",
        pv_term: j.pv_term.into(),
        predicted: j.predicted.into(),
        discrepancy: d,
        agrees: d.value.abs() <= d.error,
    })
}

pub fn jacobi(a: &ProbeArgs, ctx: &Ctx) -> Result<Outcome> {
    let alpha = match a.alpha {
        Some(x) => Measured::exact(x),
        None => aperture(&minimal_alpha(a.m, a.n, a.s, ctx)?),
    };
    let out = probe(a.m, a.n, a.s, alpha, a.beta, ctx)?;
    let inconsistency = (!out.agrees).then(|| "the two evaluations of the probe disagree".to_string());
    Ok(Outcome {
        body: Box::new(out),
        inconsistency,
    })
}

// --- self-check --------------------------------------------------------------

#[derive(Serialize)]
struct Check {
    name: String,
    observed: Measured,
    expected: Measured,
    passed: bool,
}

#[derive(Serialize)]
struct SelfCheckOut {
    checks: Vec<Check>,
    passed: bool,
}

impl Render for SelfCheckOut {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "check",
            "observed",
            "observed_err",
            "expected",
            "expected_err",
            "passed",
        ]);
        for c in &self.checks {
            let mut row = vec![c.name.clone()];
            cells(&mut row, c.observed);
            cells(&mut row, c.expected);
            row.push(c.passed.to_string());
            t.push(row);
        }
        t
    }

    fn human(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<48} observed {}  expected {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.observed,
                c.expected
            );
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed {
                "all checks passed"
            } else {
                "some checks FAILED"
            }
        );
        out
    }
}

/// Agreement within `k` times the combined error, plus a floor.
fn close(obs: Measured, exp: Measured, k: f64, floor: f64) -> bool {
    (obs.value - exp.value).abs() <= k * (obs.error + exp.error) + floor
}

pub fn self_check(ctx: &Ctx) -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut push = |name: &str, observed: Measured, expected: Measured, passed: bool| {
        checks.push(Check {
            name: name.into(),
            observed,
            expected,
            passed,
        })
    };

    let a = alpha0(2, 1, ALPHA0_TOL)?;
    let want = Measured::exact(1.0 / 3f64.sqrt());
    push(
        "alpha0(2,1) = 1/sqrt(3)",
        aperture(&a),
        want,
        (a.params.alpha - want.value).abs() < 1e-8,
    );

    for (m, s) in [(3, 0.3), (5, 0.2)] {
        let a = solve_alpha_with(m, m, s, DEFAULT_ALPHA_TOL, &ctx.tol)?;
        push(
            &format!("alpha({m},{m},{s}) = 1"),
            aperture(&a),
            Measured::exact(1.0),
            a.params.alpha == 1.0,
        );
    }

    let sym = ConeParams::new(3, 3, 0.3, 1.0)?;
    let h: Measured = mean_curvature(&sym, CurvatureRoute::HalfSpaceFlux, &ctx.tol)?.into();
    push(
        "H(3,3,0.3; alpha=1) = 0",
        h,
        Measured::exact(0.0),
        close(h, Measured::exact(0.0), 3.0, 1e-9),
    );

    let cone = ConeParams::new(2, 1, 0.3, 0.6)?;
    let (flux, slab) = rayon::join(
        || mean_curvature(&cone, CurvatureRoute::HalfSpaceFlux, &ctx.tol),
        || mean_curvature(&cone, CurvatureRoute::SlabExcision, &ctx.tol),
    );
    let (flux, slab): (Measured, Measured) = (flux?.into(), slab?.into());
    push(
        "H(2,1,0.3; 0.6): flux vs slab route",
        flux,
        slab,
        close(flux, slab, 3.0, 1e-9),
    );

    let p = probe(3, 3, 0.2, Measured::exact(1.0), None, ctx)?;
    push("jacobi probe (3,3,0.2; 1)", p.pv_term, p.predicted, p.agrees);

    let cone = ConeParams::new(4, 3, 0.1, 0.8379)?;
    let beta = 0.3 * cone.hardy_beta();
    let top = 2.0 * cone.hardy_beta();
    let (c1, c2) = rayon::join(
        || c_constant(&cone, beta, Normalization::Table, &ctx.tol),
        || c_constant(&cone, top - beta, Normalization::Table, &ctx.tol),
    );
    let (c1, c2): (Measured, Measured) = (c1?.into(), c2?.into());
    push("C(4,3,0.1) symmetric in beta", c1, c2, close(c1, c2, 3.0, 1e-12));

    for (m, n, s, alpha, quantity) in [
        (4, 3, 0.2, 0.4, Quantity::Curvature),
        (2, 2, 0.2, 1.0, Quantity::Alignment),
        (3, 1, 0.5, 0.5, Quantity::Hardy),
    ] {
        let params = ConeParams::new(m, n, s, alpha)?;
        let (mc, q, _) = mc_pair(&params, quantity, None, ctx)?;
        let ok = mc.agrees_with(q.value, q.error, MAX_SIGMAS);
        push(
            &format!("oracle {} ({m},{n},{s}; {alpha})", quantity_name(quantity)),
            Measured::new(mc.mean, mc.stderr),
            q,
            ok,
        );
    }

    let passed = checks.iter().all(|c| c.passed);
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    Ok(Outcome {
        body: Box::new(SelfCheckOut { checks, passed }),
        inconsistency: (!passed).then(|| format!("failed checks: {}", failed.join("; "))),
    })
}
