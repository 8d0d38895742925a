//! The nonlocal mean curvature `H(α)` of the cone at a point of the cone, its
//! root `α(s, m, n)`, and the `s → 0` limit `α₀(m, n)`.
//!
//! Normalization: [`mean_curvature`] returns the curvature at
//! `p = (e₁, α e₁)` divided by `A_{m−2} A_{n−2}` (by `A_{m−2}` alone when
//! `n = 1`), i.e. the reduced radial integral `p.v. ∫₀^∞ r^{m−1}(A − B) dr`
//! with no further prefactor. [`unit_point_factor`] converts it to the
//! geometric value at the unit point `p̂`.

mod flux;
mod slab;

use crate::cone_model::ConeParams;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, IntegralResult, QuadSpec, Tolerances};
use serde::{Deserialize, Serialize};

/// Supported `s` range of [`solve_alpha`]; quadrature cost grows as `s → 1`.
pub const S_RANGE: (f64, f64) = (0.01, 0.9);

/// Default bisection tolerance on `α`.
pub const DEFAULT_ALPHA_TOL: f64 = 1e-6;

/// How `H(α)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureRoute {
    /// Divergence theorem: flux of `(x−p)|x−p|^{−N−s}` through the cone,
    /// absolutely convergent after folding. Fast; the default.
    #[default]
    HalfSpaceFlux,
    /// Cylindrical slabs inside/outside the cone with symmetric excision at
    /// `r = 1` and Richardson extrapolation. Slow; used for cross-checks.
    SlabExcision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Bisection,
    ClosedFormSymmetry,
}

/// A root of `H(α)` (or of `C₀(α)` for the `s → 0` limit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApertureSolution {
    pub params: ConeParams,
    /// The function whose root was sought, at the returned `α`.
    pub residual: f64,
    pub residual_error: f64,
    /// Final bracket `(lo, hi)`: positive at `lo`, non-positive at `hi`.
    pub bracket: (f64, f64),
    pub method: SolveMethod,
    /// Slope `(f(lo) − f(hi))/(hi − lo)` over the last bracket that had
    /// both ends evaluated; `None` for closed-form solutions.
    pub slope: Option<f64>,
    pub evaluations: usize,
}

/// `(1+α²)^{s/2} A_{m−2} A_{n−2}`: multiplies [`mean_curvature`] into the
/// curvature at the unit point `p̂` (homogeneity of degree `−s`).
pub fn unit_point_factor(params: &ConeParams) -> f64 {
    (1.0 + params.alpha * params.alpha).powf(0.5 * params.s) * params.sphere_factor()
}

/// The reduced mean curvature of the cone `(m, n, s, α)`, default tolerances
/// and route.
#[allow(non_snake_case)]
pub fn mean_curvature_H(m: usize, n: usize, s: f64, alpha: f64) -> Result<f64> {
    let params = ConeParams::new(m, n, s, alpha)?;
    Ok(mean_curvature(&params, CurvatureRoute::default(), &Tolerances::default())?.value)
}

/// The reduced mean curvature with its error budget.
pub fn mean_curvature(params: &ConeParams, route: CurvatureRoute, tol: &Tolerances) -> Result<IntegralResult> {
    if params.s <= 0.0 {
        return Err(Error::invalid(
            "the mean curvature needs s > 0; use alpha0 for the s → 0 limit",
        ));
    }
    let r = match route {
        CurvatureRoute::HalfSpaceFlux => flux::mean_curvature(params, &tol.outer, &tol.inner),
        CurvatureRoute::SlabExcision => {
            slab::mean_curvature(params, &tol.outer, &tol.inner).map_err(|e| e.within("slab route"))?
        }
    };
    r.require("mean curvature")
}

fn check_s(s: f64) -> Result<()> {
    if !(S_RANGE.0..=S_RANGE.1).contains(&s) {
        return Err(Error::invalid(format!(
            "s = {s} outside the supported range [{}, {}] (s = 0 is the alpha0 limit)",
            S_RANGE.0, S_RANGE.1
        )));
    }
    Ok(())
}

/// `α(s, m, n)` by bisection on `H`, default quadrature tolerances.
pub fn solve_alpha(m: usize, n: usize, s: f64, tol: f64) -> Result<ApertureSolution> {
    solve_alpha_with(m, n, s, tol, &Tolerances::default())
}

pub fn solve_alpha_with(m: usize, n: usize, s: f64, tol: f64, quad: &Tolerances) -> Result<ApertureSolution> {
    ConeParams::check_dims(m, n)?;
    check_s(s)?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if m == n {
        return Ok(ApertureSolution {
            params: ConeParams::new(m, n, s, 1.0)?,
            residual: 0.0,
            residual_error: 0.0,
            bracket: (1.0, 1.0),
            method: SolveMethod::ClosedFormSymmetry,
            slope: None,
            evaluations: 0,
        });
    }

    let mut evaluations = 0usize;
    let mut h = |alpha: f64| -> Result<IntegralResult> {
        evaluations += 1;
        let p = ConeParams::new(m, n, s, alpha)?;
        mean_curvature(&p, CurvatureRoute::HalfSpaceFlux, quad).map_err(|e| e.within("solve_alpha"))
    };

    // The root sits a little below α₀ for small s; start from a bracket
    // around it and widen as needed.
    let a0 = alpha0(m, n, 1e-10)?.params.alpha;
    let mut hi = (a0 + 0.02).min(1.0);
    let mut h_hi = h(hi)?.value;
    if h_hi > 0.0 {
        hi = 1.0;
        h_hi = h(hi)?.value;
        if h_hi > 0.0 {
            return Err(Error::NoBracket {
                stage: "solve_alpha".into(),
                lo: hi,
                hi,
            });
        }
    }
    let mut lo = (a0 - 0.1).max(0.5 * a0);
    let mut h_lo = h(lo)?.value;
    while h_lo <= 0.0 {
        lo *= 0.5;
        if lo < 1e-3 {
            return Err(Error::NoBracket {
                stage: "solve_alpha".into(),
                lo,
                hi,
            });
        }
        h_lo = h(lo)?.value;
    }

    let mut slope = (h_lo - h_hi) / (hi - lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = h(mid)?.value;
        if v > 0.0 {
            lo = mid;
            h_lo = v;
        } else {
            hi = mid;
            h_hi = v;
        }
        slope = (h_lo - h_hi) / (hi - lo);
    }
    let alpha = 0.5 * (lo + hi);
    let at = h(alpha)?;
    Ok(ApertureSolution {
        params: ConeParams::new(m, n, s, alpha)?,
        residual: at.value,
        residual_error: at.error_estimate,
        bracket: (lo, hi),
        method: SolveMethod::Bisection,
        slope: Some(slope),
        evaluations,
    })
}

/// `C₀(α) = ∫_α^∞ t^{n−1}(1+t²)^{−N/2} dt − ∫_0^α t^{n−1}(1+t²)^{−N/2} dt`,
/// with the first integral taken as `∫_0^{1/α} v^{m−1}(1+v²)^{−N/2} dv`.
pub fn c0(m: usize, n: usize, alpha: f64) -> Result<IntegralResult> {
    ConeParams::check_dims(m, n)?;
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let half_n = 0.5 * (m + n) as f64;
    let spec = QuadSpec::inner().with_tolerances(1e-15, 1e-14);
    let far = integrate_1d(
        |v: f64| v.powi(m as i32 - 1) * (1.0 + v * v).powf(-half_n),
        0.0,
        1.0 / alpha,
        &spec,
    );
    let near = integrate_1d(
        |t: f64| t.powi(n as i32 - 1) * (1.0 + t * t).powf(-half_n),
        0.0,
        alpha,
        &spec,
    );
    Ok(IntegralResult {
        value: far.value - near.value,
        error_estimate: far.error_estimate + near.error_estimate,
        evaluations: far.evaluations + near.evaluations,
        converged: far.converged && near.converged,
    })
}

/// The limiting aperture `α₀(m, n)`: the root of [`c0`] in `(0, 1]`.
pub fn alpha0(m: usize, n: usize, tol: f64) -> Result<ApertureSolution> {
    ConeParams::check_dims(m, n)?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if m == n {
        return Ok(ApertureSolution {
            params: ConeParams::new(m, n, 0.0, 1.0)?,
            residual: 0.0,
            residual_error: 0.0,
            bracket: (1.0, 1.0),
            method: SolveMethod::ClosedFormSymmetry,
            slope: None,
            evaluations: 0,
        });
    }
    // C₀ decreases strictly, is positive near 0 and non-positive at 1.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (mut c_lo, mut c_hi) = (f64::NAN, c0(m, n, 1.0)?.value);
    let mut evaluations = 1;
    let mut slope = f64::NAN;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = c0(m, n, mid)?.value;
        evaluations += 1;
        if v > 0.0 {
            lo = mid;
            c_lo = v;
        } else {
            hi = mid;
            c_hi = v;
        }
        if c_lo.is_finite() {
            slope = (c_lo - c_hi) / (hi - lo);
        }
    }
    let alpha = 0.5 * (lo + hi);
    let at = c0(m, n, alpha)?;
    Ok(ApertureSolution {
        params: ConeParams::new(m, n, 0.0, alpha)?,
        residual: at.value,
        residual_error: at.error_estimate,
        bracket: (lo, hi),
        method: SolveMethod::Bisection,
        slope: slope.is_finite().then_some(slope),
        evaluations: evaluations + 1,
    })
}
