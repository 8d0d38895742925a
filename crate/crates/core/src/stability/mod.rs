//! Stability constants of the cone: the generalized Hardy constant
//! `C(m,n,s,β)`, the Hardy constant `H(m,n,s) = C(m,n,s,(N−2−s)/2)`, the
//! potential coefficient `A₀(m,n,s)²`, and the verdict `H ≥ A₀²`.
//!
//! Two normalizations are used throughout:
//!
//! * **table** — the bare radial integrals, e.g. `∫₀¹ w_β(r) I(r) dr`, which
//!   are the quantities tabulated in the literature;
//! * **raw** — the actual surface integrals over the cone at a unit point
//!   `p̂`, equal to the table value times [`raw_factor`].
//!
//! Identities between different evaluation paths ([`jacobi_probe`]) are
//! checked on raw values.

use crate::cone_model::{angular_integral_scaled, AngularKernel, ConeParams};
use crate::curvature_solver::{alpha0, solve_alpha_with, DEFAULT_ALPHA_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{de_nested_into, integrate_pv_nested, Accumulator, IntegralResult, Node, Tolerances};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Bare radial integral, as tabulated.
    #[default]
    Table,
    /// Surface integral at the unit point.
    Raw,
}

/// Surface measure and kernel scaling that turn a table value into the
/// surface integral at `p̂`: `α^{n−1} (1+α²)^{(2+s)/2} A_{m−2} A_{n−2}`
/// (`A_{n−2}` omitted when `n = 1`).
///
/// With `y = tω₁`, `z = αtω₂` the cone's area element is
/// `√(1+α²) α^{n−1} t^{N−2} dt dω₁ dω₂`; rescaling `t` by `|y(p̂)| =
/// (1+α²)^{−1/2}` contributes the remaining `(1+α²)^{(1+s)/2}`.
pub fn raw_factor(params: &ConeParams) -> f64 {
    let a2 = params.alpha * params.alpha;
    params.alpha.powi(params.n as i32 - 1) * (1.0 + a2).powf(0.5 * (2.0 + params.s)) * params.sphere_factor()
}

fn normalize(r: IntegralResult, params: &ConeParams, norm: Normalization) -> IntegralResult {
    match norm {
        Normalization::Table => r,
        Normalization::Raw => r.scaled(raw_factor(params)),
    }
}

fn check_beta(params: &ConeParams, beta: f64) -> Result<()> {
    let top = params.dim() as f64 - 2.0 - params.s;
    if !(beta > 0.0 && beta < top) {
        return Err(Error::invalid(format!("beta = {beta} outside (0, N−2−s) = (0, {top})")));
    }
    Ok(())
}

/// `∫₀¹ g(r, u) K̃(r) dr` where `K̃ = K·u^E` is the scaled angular kernel and
/// `g` already carries the compensating `u^{−E}`.
fn folded<G: Fn(f64, f64) -> f64>(
    params: &ConeParams,
    kernel: AngularKernel,
    g: G,
    tol: &Tolerances,
) -> IntegralResult {
    let mut acc = Accumulator::new();
    let mut f = |node: Node| {
        let (r, u) = (node.x, node.from_b);
        angular_integral_scaled(params, kernel, r, u, &tol.inner).scaled(g(r, u))
    };
    de_nested_into(&mut acc, &mut f, 0.0, 1.0, tol.outer.abs_tol, tol.outer.rel_tol);
    acc.finish(&tol.outer)
}

/// The weight `r^{N−2} − r^{N−2−β} + r^s − r^{β+s} = r^s (1 − r^β)(1 − r^γ)`,
/// `γ = N−2−s−β`, divided by `u²` (it vanishes to second order at `r = 1`).
pub fn hardy_weight_over_u2(params: &ConeParams, beta: f64, r: f64, u: f64) -> f64 {
    let gamma = params.dim() as f64 - 2.0 - params.s - beta;
    // ln r from u keeps full accuracy next to r = 1.
    let l = if u < 0.5 { (-u).ln_1p() } else { r.ln() };
    r.powf(params.s) * ((beta * l).exp_m1() / u) * ((gamma * l).exp_m1() / u)
}

/// `C(m,n,s,β) = p.v. ∫_Σ (1 − |x|^{−β}) / |p̂ − x|^{N+s} dx`, folded onto
/// `(0, 1)` where it is absolutely convergent. Requires `0 < β < N−2−s`.
pub fn c_constant(params: &ConeParams, beta: f64, norm: Normalization, tol: &Tolerances) -> Result<IntegralResult> {
    check_beta(params, beta)?;
    tol.validate()?;
    let s = params.s;
    let r = folded(
        params,
        AngularKernel::Plain,
        |r, u| hardy_weight_over_u2(params, beta, r, u) * u.powf(-s),
        tol,
    );
    Ok(normalize(r.require("C constant")?, params, norm))
}

/// `H(m,n,s)`: [`c_constant`] at the midpoint `β = (N−2−s)/2`.
pub fn hardy_constant(params: &ConeParams, norm: Normalization, tol: &Tolerances) -> Result<IntegralResult> {
    c_constant(params, params.hardy_beta(), norm, tol).map_err(|e| e.within("hardy constant"))
}

/// `A₀(m,n,s)² = ∫_Σ (1 − ⟨ν(x), ν(p̂)⟩) / |p̂ − x|^{N+s} dx`.
pub fn a0_squared(params: &ConeParams, norm: Normalization, tol: &Tolerances) -> Result<IntegralResult> {
    tol.validate()?;
    let nm2 = params.dim() as i32 - 2;
    let s = params.s;
    let r = folded(
        params,
        AngularKernel::Alignment,
        |r, u| (r.powi(nm2) + r.powf(s)) * u.powf(-s),
        tol,
    );
    Ok(normalize(r.require("A0 squared")?, params, norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Unstable,
}

/// Where the aperture of a report came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSource {
    /// Root of the mean curvature at this `s`.
    Solved,
    /// The `s → 0` limit `α₀(m, n)`.
    Limit,
    /// Given by the caller.
    Supplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub params: ConeParams,
    pub alpha_source: AlphaSource,
    /// Width of the final bracket on `α` (zero when exact or supplied).
    pub alpha_uncertainty: f64,
    /// Raw values at the unit point.
    pub h_value: IntegralResult,
    pub a0_squared: IntegralResult,
    /// Table values.
    pub h_normalized: IntegralResult,
    pub a0_normalized: IntegralResult,
    pub verdict: Verdict,
    /// `h_value − a0_squared` (raw).
    pub margin: f64,
    pub margin_error: f64,
}

impl StabilityReport {
    /// Whether the verdict survives the quadrature error budget.
    pub fn is_decisive(&self) -> bool {
        self.margin.abs() > self.margin_error
    }
}

/// Stability report for a cone with known aperture.
pub fn stability_report_at(params: &ConeParams, source: AlphaSource, tol: &Tolerances) -> Result<StabilityReport> {
    let (h, a0) = rayon::join(
        || hardy_constant(params, Normalization::Table, tol),
        || a0_squared(params, Normalization::Table, tol),
    );
    let (h, a0) = (h?, a0?);
    let f = raw_factor(params);
    let (h_raw, a0_raw) = (h.scaled(f), a0.scaled(f));
    let margin = h_raw.value - a0_raw.value;
    Ok(StabilityReport {
        params: *params,
        alpha_source: source,
        alpha_uncertainty: 0.0,
        h_value: h_raw,
        a0_squared: a0_raw,
        h_normalized: h,
        a0_normalized: a0,
        verdict: if margin >= 0.0 {
            Verdict::Stable
        } else {
            Verdict::Unstable
        },
        margin,
        margin_error: h_raw.error_estimate + a0_raw.error_estimate,
    })
}

/// Stability report for the minimal cone `(m, n, s)`: the aperture is solved
/// for (`s > 0`) or taken as `α₀` (`s = 0`).
pub fn stability_report(m: usize, n: usize, s: f64, tol: &Tolerances) -> Result<StabilityReport> {
    let (sol, source) = if s == 0.0 {
        (alpha0(m, n, 1e-12)?, AlphaSource::Limit)
    } else {
        (solve_alpha_with(m, n, s, DEFAULT_ALPHA_TOL, tol)?, AlphaSource::Solved)
    };
    let mut report = stability_report_at(&sol.params, source, tol).map_err(|e| e.within("stability"))?;
    report.alpha_uncertainty = sol.bracket.1 - sol.bracket.0;
    Ok(report)
}

/// A bracket `[s_lo, s_hi]` across which `H − A₀²` changes sign, for fixed
/// `(m, n)` with the aperture solved at each `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBracket {
    pub lo: StabilityReport,
    pub hi: StabilityReport,
    /// Every report computed while bisecting, in order.
    pub evaluations: Vec<StabilityReport>,
}

/// Bisects in `s` between two reports of opposite verdict until the bracket
/// is narrower than `width`.
pub fn bisect_threshold(
    lo: StabilityReport,
    hi: StabilityReport,
    width: f64,
    tol: &Tolerances,
) -> Result<ThresholdBracket> {
    let (m, n) = (lo.params.m, lo.params.n);
    if (hi.params.m, hi.params.n) != (m, n) || !(lo.params.s < hi.params.s) {
        return Err(Error::invalid(
            "threshold bracket needs two reports for the same (m, n) with s_lo < s_hi",
        ));
    }
    if lo.verdict == hi.verdict {
        return Err(Error::invalid(format!(
            "no sign change of H − A₀² between s = {} and s = {}",
            lo.params.s, hi.params.s
        )));
    }
    if !(width > 0.0) {
        return Err(Error::invalid(format!("bracket width must be positive, got {width}")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut evaluations = Vec::new();
    while hi.params.s - lo.params.s > width {
        let mid = stability_report(m, n, 0.5 * (lo.params.s + hi.params.s), tol).map_err(|e| e.within("threshold"))?;
        if mid.verdict == lo.verdict {
            lo = mid;
        } else {
            hi = mid;
        }
        evaluations.push(mid);
    }
    Ok(ThresholdBracket { lo, hi, evaluations })
}

/// The two evaluations of `p.v. ∫_Σ (|x|^{−β} − 1) / |x − p̂|^{N+s} dx` (raw).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiProbe {
    pub params: ConeParams,
    pub beta: f64,
    /// Direct principal value: symmetric excision about `r = 1` on
    /// `(0, ∞)`, Richardson-extrapolated.
    pub pv_term: IntegralResult,
    /// `−C(m,n,s,β)` from the folded weight.
    pub predicted: IntegralResult,
}

impl JacobiProbe {
    pub fn discrepancy(&self) -> f64 {
        (self.pv_term.value - self.predicted.value).abs()
    }

    pub fn combined_error(&self) -> f64 {
        self.pv_term.error_estimate + self.predicted.error_estimate
    }
}

/// Direct p.v. of `∫₀^∞ (r^{−β} − 1) r^{N−2} I(r) dr` (table normalization).
fn direct_pv(params: &ConeParams, beta: f64, tol: &Tolerances) -> Result<IntegralResult> {
    let s = params.s;
    let big_n = params.dim() as f64;
    let e = AngularKernel::Plain.singular_exponent(s);
    let inner = &tol.inner;
    // The ε-expansion of the symmetric truncation: `|u|^{−1−s}`-type odd
    // terms leave ε^{1−s}, ε^{2−s}, …, the regular part ε, ε², …
    let exponents: Vec<f64> = if s > 1e-3 {
        vec![1.0 - s, 1.0, 2.0 - s, 2.0]
    } else {
        vec![1.0, 2.0, 3.0]
    };
    integrate_pv_nested(
        |r| {
            if !r.is_finite() {
                return IntegralResult {
                    value: 0.0,
                    error_estimate: 0.0,
                    evaluations: 0,
                    converged: true,
                };
            }
            if r <= 4.0 {
                let u = (1.0 - r).abs();
                let k = angular_integral_scaled(params, AngularKernel::Plain, r, u, inner);
                k.scaled((r.powf(-beta) - 1.0) * r.powf(big_n - 2.0) * u.powf(-e))
            } else {
                // Far field through I(r) = r^{−N−s} I(1/r), which keeps the
                // powers of r finite.
                let q = 1.0 / r;
                let u = 1.0 - q;
                let k = angular_integral_scaled(params, AngularKernel::Plain, q, u, inner);
                k.scaled((r.powf(-beta) - 1.0) * r.powf(-2.0 - s) * u.powf(-e))
            }
        },
        0.0,
        f64::INFINITY,
        1.0,
        &exponents,
        &tol.outer,
    )
    .and_then(|r| r.require("jacobi probe p.v."))
}

/// Checks the homogeneity identity `p.v.∫_Σ (w(x) − w(p̂)) K dx = −C(β) w(p̂)`
/// for `w = |x|^{−β}` at the unit point, evaluating both sides by different
/// routes.
pub fn jacobi_probe(params: &ConeParams, beta: f64, tol: &Tolerances) -> Result<JacobiProbe> {
    check_beta(params, beta)?;
    tol.validate()?;
    let (pv, c) = rayon::join(
        || direct_pv(params, beta, tol),
        || c_constant(params, beta, Normalization::Raw, tol),
    );
    Ok(JacobiProbe {
        params: *params,
        beta,
        pv_term: pv?.scaled(raw_factor(params)),
        predicted: c?.scaled(-1.0),
    })
}
