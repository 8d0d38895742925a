//! Mean curvature straight from the cylindrical reduction: for each radial
//! ratio `r = |y|` the `z`-integral is split at the cone, `|z| = rα`, into
//! the part inside `E` and the part outside,
//!
//! ```text
//! 𝓗(α) = p.v. ∫₀^∞ r^{m−1} (A(r) − B(r)) dr,
//! ```
//!
//! and the principal value at `r = 1` is taken by symmetric excision.
//!
//! With `a = α cos φ₁`, `b² = α² sin² φ₁ + r² + 1 − 2r cos θ₁` the
//! `ρ = |z|` integral is substituted `ρ = a + b tan ψ`, which turns it into
//! a smooth integral of `(a cos ψ + b sin ψ)^{n−1} cos^{m+s−1} ψ` over a
//! finite ψ-range. This route is much slower than the flux one and serves
//! as an independent check.

use crate::cone_model::{half_versine, ConeParams};
use crate::error::Result;
use crate::quadrature::{
    gk_relative, graded_breaks, integrate_2d_with_breaks, integrate_pv_nested, IntegralResult, QuadSpec,
};
use std::f64::consts::{FRAC_PI_2, PI};

/// `b^{1−2k} (∫_{ψ*}^{π/2} − ∫_{ψ₀}^{ψ*}) (a cos ψ + b sin ψ)^{n−1} cos^{m+s−1} ψ dψ`
/// with `ψ₀ = atan(−a/b)` (ρ = 0) and `ψ* = atan((rα − a)/b)` (ρ = rα).
/// `ln_w` is the log of an extra weight folded into the power of `b`, which
/// keeps the product finite for very large `r`.
fn split_rho(params: &ConeParams, a: f64, b: f64, ln_w: f64, rho_cone: f64, tol: f64) -> (f64, f64) {
    let pn = params.n as i32 - 1;
    let p = params.m as f64 + params.s - 1.0;
    let h = |psi: f64| {
        let c = psi.cos();
        let lin = if pn == 0 {
            1.0
        } else {
            (a * c + b * psi.sin()).max(0.0).powi(pn)
        };
        lin * c.powf(p)
    };
    let psi0 = (-a).atan2(b);
    let psi_cone = (rho_cone - a).atan2(b);
    let mut g = h;
    let upper = gk_relative(&mut g, psi_cone, FRAC_PI_2, tol);
    let lower = gk_relative(&mut g, psi0, psi_cone, tol);
    let scale = ((1.0 - 2.0 * params.kernel_power()) * b.ln() + ln_w).exp();
    ((upper.0 - lower.0) * scale, (upper.1 + lower.1) * scale)
}

/// `√(u² + q)` without overflow in `u²` for huge `r`.
#[inline]
fn hypot_sq(u: f64, q: f64) -> f64 {
    let au = u.abs();
    if au > 1.0 {
        au * (1.0 + (q / au) / au).sqrt()
    } else {
        (u * u + q).sqrt()
    }
}

/// `r^{m−1} (A(r) − B(r))` including the angular weights, without sphere
/// factors.
fn slab_difference(params: &ConeParams, r: f64, inner: &QuadSpec) -> IntegralResult {
    let ln_w = (params.m as f64 - 1.0) * r.ln();
    let alpha = params.alpha;
    let a2 = alpha * alpha;
    let u = 1.0 - r;
    let pm = params.m as i32 - 2;
    let pn = params.n as i32 - 2;
    let tol = 0.01 * inner.rel_tol;
    let theta_scale = if r > 0.0 { u.abs() / r.sqrt() } else { PI };

    if params.n == 1 {
        let mut breaks = Vec::new();
        graded_breaks(0.0, PI, theta_scale, &mut breaks);
        let mut f = |theta: f64| {
            let b = hypot_sq(u, 4.0 * r * half_versine(theta));
            let w = theta.sin().powi(pm);
            let mut total = 0.0;
            // z > 0 (a = α) and z < 0 (a = −α).
            for a in [alpha, -alpha] {
                total += split_rho(params, a, b, ln_w, r * alpha, tol).0;
            }
            w * total
        };
        let mut acc = crate::quadrature::Accumulator::new();
        crate::quadrature::gk_into(
            &mut acc,
            &mut f,
            &breaks,
            inner.abs_tol,
            inner.rel_tol,
            inner.max_subdivisions,
        );
        return acc.finish(inner);
    }

    let mut outer = Vec::new();
    graded_breaks(0.0, PI, u.abs() / alpha, &mut outer);
    integrate_2d_with_breaks(
        |phi, theta| {
            let sp = phi.sin();
            let b = hypot_sq(u, a2 * sp * sp + 4.0 * r * half_versine(theta));
            let w = theta.sin().powi(pm) * sp.powi(pn);
            w * split_rho(params, alpha * phi.cos(), b, ln_w, r * alpha, tol).0
        },
        &outer,
        |phi, out: &mut Vec<f64>| {
            let sp = phi.sin();
            let c = hypot_sq(u, a2 * sp * sp);
            graded_breaks(0.0, PI, if r > 0.0 { c / r.sqrt() } else { PI }, out);
        },
        inner,
    )
}

pub(crate) fn mean_curvature(params: &ConeParams, outer: &QuadSpec, inner: &QuadSpec) -> Result<IntegralResult> {
    let s = params.s;
    // Truncation error of the symmetric excision: odd part ∝ ε^{1−s}, then
    // the regular ε, and their next corrections.
    let exponents = [1.0 - s, 1.0, 2.0 - s, 2.0];
    integrate_pv_nested(
        |r| {
            if r.is_finite() {
                slab_difference(params, r, inner)
            } else {
                // Only reached at nodes whose weight is itself negligible.
                IntegralResult {
                    value: 0.0,
                    error_estimate: 0.0,
                    evaluations: 0,
                    converged: true,
                }
            }
        },
        0.0,
        f64::INFINITY,
        1.0,
        &exponents,
        outer,
    )
}
