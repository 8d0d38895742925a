//! Angular reductions of the cone kernels.
//!
//! For a cone point at radial ratio `r` the kernel integrated over
//! `S^{m-1} × S^{n-1}` reduces to
//!
//! ```text
//! A_{m-2} A_{n-2} ∫₀^π ∫₀^π sin^{m-2}θ sin^{n-2}φ · num(θ, φ) / D^{(N+s)/2} dθ dφ
//! ```
//!
//! and for `n = 1` to `A_{m-2}` times the sum over both sheets of the single
//! θ-integral. The functions here return the integral without the sphere
//! factor ([`ConeParams::sphere_factor`]).

use super::{alignment, denominator, half_versine, Branch, ConeParams};
use crate::quadrature::{gk_into, graded_breaks, integrate_2d_with_breaks, Accumulator, IntegralResult, QuadSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Numerator of an angular kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularKernel {
    /// `1`: the bare kernel, used by the Hardy-type constants.
    Plain,
    /// `1 − ⟨ν(x), ν(p̂)⟩`: the potential term.
    Alignment,
    /// `cos φ − cos θ`: the normal flux through the cone, used for the mean
    /// curvature.
    Flux,
}

impl AngularKernel {
    #[inline]
    fn numerator(self, alpha2: f64, st2: f64, sp2: f64, n1: Option<Branch>) -> f64 {
        match self {
            AngularKernel::Plain => 1.0,
            AngularKernel::Alignment => alignment(alpha2, st2, sp2, n1),
            AngularKernel::Flux => {
                let sp2 = match n1 {
                    None => sp2,
                    Some(Branch::Interior) => 0.0,
                    Some(Branch::Exterior) => 1.0,
                };
                2.0 * (st2 - sp2)
            }
        }
    }

    /// Growth exponent `E` of the reduced kernel at the singular ring:
    /// it behaves like `u^{−E}` as `u = 1 − r → 0`. The plain kernel has
    /// `E = 2 + s`; the other two numerators vanish quadratically at the
    /// peak, leaving `E = s`.
    pub fn singular_exponent(self, s: f64) -> f64 {
        match self {
            AngularKernel::Plain => 2.0 + s,
            AngularKernel::Alignment | AngularKernel::Flux => s,
        }
    }
}

/// Below this `u` the integrand is evaluated in log space: `D^{−(N+s)/2}`
/// alone would overflow.
const LOG_SPACE_BELOW: f64 = 1e-6;

/// The scaled kernel has reached its `u → 0` limit long before this (the
/// corrections are `O(u^{1−s})`), while below it subnormal intermediates
/// would degrade the quadrature.
const U_FLOOR: f64 = 1e-100;

/// Pointwise integrand `sin^{m−2}θ sin^{n−2}φ num / D^{(N+s)/2} · u^E`.
struct Integrand {
    kernel: AngularKernel,
    alpha2: f64,
    r: f64,
    u: f64,
    power: f64,
    pm: i32,
    pn: i32,
    e_ln_u: f64,
    u_e: f64,
    log_space: bool,
}

impl Integrand {
    fn new(params: &ConeParams, kernel: AngularKernel, r: f64, u: f64) -> Self {
        let e = kernel.singular_exponent(params.s);
        Integrand {
            kernel,
            alpha2: params.alpha * params.alpha,
            r,
            u,
            power: params.kernel_power(),
            pm: params.m as i32 - 2,
            pn: params.n as i32 - 2,
            e_ln_u: e * u.ln(),
            u_e: u.powf(e),
            log_space: u < LOG_SPACE_BELOW,
        }
    }

    /// `jac` is an extra non-negative Jacobian factor.
    #[inline]
    fn eval(&self, jac: f64, theta: f64, phi: f64, n1: Option<Branch>) -> f64 {
        let st2 = half_versine(theta);
        let sp2 = if n1.is_some() { 0.0 } else { half_versine(phi) };
        let num = self.kernel.numerator(self.alpha2, st2, sp2, n1);
        if num == 0.0 || jac == 0.0 {
            return 0.0;
        }
        let sin_t = theta.sin().max(0.0);
        let sin_p = if n1.is_some() { 1.0 } else { phi.sin().max(0.0) };
        if !self.log_space {
            let d = denominator(self.alpha2, self.r, self.u, st2, sp2, n1);
            return jac * sin_t.powi(self.pm) * sin_p.powi(self.pn) * num * d.powf(-self.power) * self.u_e;
        }
        // ln D without forming u² (which underflows for the smallest u).
        let ln_d = match n1 {
            Some(Branch::Exterior) => denominator(self.alpha2, self.r, self.u, st2, sp2, n1).ln(),
            _ => {
                let q = 4.0 * self.r * (st2 + self.alpha2 * sp2);
                let ratio = q / self.u / self.u;
                if ratio.is_finite() {
                    (1.0 + self.alpha2 + ratio).ln() + 2.0 * self.u.ln()
                } else {
                    q.ln()
                }
            }
        };
        let mut l = jac.ln() + num.abs().ln() - self.power * ln_d + self.e_ln_u;
        if self.pm != 0 {
            l += self.pm as f64 * sin_t.ln();
        }
        if self.pn != 0 {
            l += self.pn as f64 * sin_p.ln();
        }
        num.signum() * l.exp()
    }
}

/// The reduced angular integral of `kernel` at `r ≥ 0` multiplied by
/// `u^E` (see [`AngularKernel::singular_exponent`]), with `u = |1 − r|`
/// passed separately so that points extremely close to the singular ring keep
/// full accuracy. The scaled value stays O(1) as `u → 0`.
pub fn angular_integral_scaled(
    params: &ConeParams,
    kernel: AngularKernel,
    r: f64,
    u: f64,
    spec: &QuadSpec,
) -> IntegralResult {
    debug_assert!(r >= 0.0 && u > 0.0);
    let u = u.max(U_FLOOR);
    let a2 = params.alpha * params.alpha;
    let f = Integrand::new(params, kernel, r, u);

    if params.n == 1 {
        // Both sheets in one integrand: they partly cancel, so splitting the
        // tolerance between them would not control the error of the sum.
        let mut g = |theta: f64| {
            f.eval(1.0, theta, 0.0, Some(Branch::Interior)) + f.eval(1.0, theta, 0.0, Some(Branch::Exterior))
        };
        // Width of the peak of the interior denominator at θ = 0.
        let scale = if r > 0.0 { ((1.0 + a2) / r).sqrt() * u } else { PI };
        let mut buf = Vec::with_capacity(64);
        graded_breaks(0.0, PI, scale, &mut buf);
        let mut acc = Accumulator::new();
        gk_into(
            &mut acc,
            &mut g,
            &buf,
            spec.abs_tol,
            spec.rel_tol,
            spec.max_subdivisions,
        );
        return acc.finish(spec);
    }

    // Polar coordinates about the singular corner: θ = ρ cos χ,
    // φ = ρ sin χ / α, so that D ≈ (1+α²)u² + rρ² depends on ρ alone near
    // the peak. The rectangle [0, π]² becomes ρ < min(π / cos χ, απ / sin χ),
    // with a kink at tan χ = α.
    let alpha = params.alpha;
    let chi_kink = alpha.atan();
    let rho_scale = if r > 0.0 { u * ((1.0 + a2) / r).sqrt() } else { PI };
    // The Jacobian's 1/α goes inside so that tolerances apply to the result.
    let jac = 1.0 / alpha;
    integrate_2d_with_breaks(
        |chi, rho| {
            let (sc, cc) = chi.sin_cos();
            f.eval(jac * rho, rho * cc, rho * sc / alpha, None)
        },
        &[0.0, chi_kink, FRAC_PI_2],
        |chi, out: &mut Vec<f64>| {
            let (sc, cc) = chi.sin_cos();
            let rho_max = if chi <= chi_kink { PI / cc } else { alpha * PI / sc };
            graded_breaks(0.0, rho_max, rho_scale, out);
        },
        spec,
    )
}

/// The reduced angular integral of `kernel` at `r ≥ 0`, `u = |1 − r| > 0`
/// (unscaled).
pub fn angular_integral(params: &ConeParams, kernel: AngularKernel, r: f64, u: f64, spec: &QuadSpec) -> IntegralResult {
    let e = kernel.singular_exponent(params.s);
    angular_integral_scaled(params, kernel, r, u, spec).scaled(u.powf(-e))
}
