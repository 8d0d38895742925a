//! Mean curvature through the normal flux of the cone.
//!
//! Since `div((x−p)|x−p|^{−N−s}) = −s|x−p|^{−N−s}`, the signed volume
//! integral over `E` and its complement turns into a surface integral over
//! the cone of `⟨x−p, ν⟩|x−p|^{−N−s}`. The tangent half-space at `p`
//! contributes nothing to it, which is what makes the result absolutely
//! convergent. On the cone `⟨x, ν(x)⟩ = 0`, so only `⟨p, ν(x)⟩ ∝ cos θ₁ −
//! cos φ₁` survives, and folding `(1, ∞)` onto `(0, 1)` leaves
//!
//! ```text
//! 𝓗(α) = −(2αⁿ/s) ∫₀¹ (r^{N−2} + r^s) K(r) dr,   K = angular flux kernel.
//! ```

use crate::cone_model::{angular_integral_scaled, AngularKernel, ConeParams};
use crate::quadrature::{de_nested_into, Accumulator, IntegralResult, QuadSpec};

/// `∫₀¹ (r^{N−2} + r^s) K(r) dr`.
pub(crate) fn folded_flux(params: &ConeParams, outer: &QuadSpec, inner: &QuadSpec) -> IntegralResult {
    let nm2 = params.dim() as i32 - 2;
    let s = params.s;
    let mut acc = Accumulator::new();
    let mut f = |node: crate::quadrature::Node| {
        let r = node.x;
        let u = node.from_b;
        let k = angular_integral_scaled(params, AngularKernel::Flux, r, u, inner);
        k.scaled((r.powi(nm2) + r.powf(s)) * u.powf(-s))
    };
    de_nested_into(&mut acc, &mut f, 0.0, 1.0, outer.abs_tol, outer.rel_tol);
    acc.finish(outer)
}

pub(crate) fn mean_curvature(params: &ConeParams, outer: &QuadSpec, inner: &QuadSpec) -> IntegralResult {
    let g = folded_flux(params, outer, inner);
    let c = -2.0 * params.alpha.powi(params.n as i32) / params.s;
    let mut r = g.scaled(c);
    // Tolerances refer to the folded integral; re-judge on the scaled value
    // relative to the scaled tolerance.
    r.converged = g.converged;
    r
}
