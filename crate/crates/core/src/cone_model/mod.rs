//! The two-parameter Lawson cone family `|z| = α|y|` in `R^m × R^n`, its
//! sphere-area constants and the pointwise kernels shared by every integral.
//!
//! Points of the cone are written `x = r·(ω₁, α ω₂)/√(1+α²)` relative to the
//! unit reference point `p̂ = (e₁, α e₁)/√(1+α²)`, with `θ₁` the angle between
//! `ω₁` and `e₁` in `S^{m-1}` and `φ₁` the angle between `ω₂` and `e₁` in
//! `S^{n-1}`. For `n = 1` the second factor is `S⁰ = {±1}`, which splits the
//! cone into the sheet through `p̂` ([`Branch::Interior`]) and its mirror
//! image ([`Branch::Exterior`]).
//!
//! `(m, n)` and `(n, m)` describe complementary cones: swapping the factors
//! sends `α` to `1/α`. Parameters are kept in the canonical order `m ≥ n`.

mod angular;

pub use angular::{angular_integral, angular_integral_scaled, AngularKernel};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// A candidate cone `(m, n, s, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    pub m: usize,
    pub n: usize,
    pub s: f64,
    pub alpha: f64,
}

impl ConeParams {
    /// Validates `m ≥ n ≥ 1`, `m + n ≥ 3`, `0 ≤ s < 1`, `α > 0`.
    pub fn new(m: usize, n: usize, s: f64, alpha: f64) -> Result<Self> {
        Self::check_dims(m, n)?;
        if !(0.0..1.0).contains(&s) {
            return Err(Error::invalid(format!("s must lie in [0, 1), got {s}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(ConeParams { m, n, s, alpha })
    }

    /// Accepts either ordering of the factors; when `m < n` the factors are
    /// swapped and `α` replaced by `1/α`. The flag reports whether a swap
    /// happened.
    pub fn canonical(m: usize, n: usize, s: f64, alpha: f64) -> Result<(Self, bool)> {
        if m < n {
            if !(alpha > 0.0) {
                return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
            }
            Ok((Self::new(n, m, s, 1.0 / alpha)?, true))
        } else {
            Ok((Self::new(m, n, s, alpha)?, false))
        }
    }

    pub(crate) fn check_dims(m: usize, n: usize) -> Result<()> {
        if n < 1 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if m < n {
            return Err(Error::invalid(format!(
                "dimensions must satisfy m >= n (got m={m}, n={n}); swap the factors and invert alpha"
            )));
        }
        if m + n < 3 {
            return Err(Error::invalid(
                "m + n must be at least 3; for m = n = 1 the aperture is 1 by symmetry",
            ));
        }
        Ok(())
    }

    /// Ambient dimension `N = m + n`.
    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    /// Exponent `(N+s)/2` of the kernel denominator.
    pub fn kernel_power(&self) -> f64 {
        0.5 * (self.dim() as f64 + self.s)
    }

    /// Midpoint `(N−2−s)/2` of the admissible Hardy range.
    pub fn hardy_beta(&self) -> f64 {
        0.5 * (self.dim() as f64 - 2.0 - self.s)
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        ConeParams { alpha, ..self }
    }

    pub fn with_s(self, s: f64) -> Self {
        ConeParams { s, ..self }
    }

    /// `(|y|, |z|)` of the unit reference point `p̂`.
    pub fn unit_point(&self) -> (f64, f64) {
        let h = (1.0 + self.alpha * self.alpha).sqrt();
        (1.0 / h, self.alpha / h)
    }

    /// `A_{m-2}` for `n = 1`, `A_{m-2} A_{n-2}` otherwise: the sphere factors
    /// left over after reducing a surface integral to `(r, θ₁, φ₁)`.
    pub fn sphere_factor(&self) -> f64 {
        let a = sphere_area_unchecked(self.m - 2);
        if self.n == 1 {
            a
        } else {
            a * sphere_area_unchecked(self.n - 2)
        }
    }
}

/// Sheet of an `n = 1` cone relative to the reference point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Same sign of `z` as `p̂`.
    Interior,
    /// Opposite sign of `z`.
    Exterior,
}

/// Reduced coordinates of a cone point relative to `p̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub r: f64,
    pub theta1: f64,
    /// Ignored when `n = 1`.
    pub phi1: f64,
}

/// Area of the unit sphere `S^k ⊂ R^{k+1}`: `2π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_area(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::invalid(format!(
            "sphere dimension must be non-negative, got {k}"
        )));
    }
    Ok(sphere_area_unchecked(k as usize))
}

pub(crate) fn sphere_area_unchecked(k: usize) -> f64 {
    let h = 0.5 * (k as f64 + 1.0);
    2.0 * PI.powf(h) / gamma(h)
}

/// `sin²(x/2)`, the cancellation-free form of `(1 − cos x)/2`.
#[inline]
pub(crate) fn half_versine(x: f64) -> f64 {
    let h = (0.5 * x).sin();
    h * h
}

/// Bare denominator `|x − p̂|²·(1+α²)` written with `u = 1 − r` so that it
/// keeps full relative accuracy near the singular point.
#[inline]
pub(crate) fn denominator(alpha2: f64, r: f64, u: f64, st2: f64, sp2: f64, n1: Option<Branch>) -> f64 {
    match n1 {
        None | Some(Branch::Interior) => (1.0 + alpha2) * u * u + 4.0 * r * (st2 + alpha2 * sp2),
        // r² + 1 − 2r cos θ + α²(r + 1)²
        Some(Branch::Exterior) => u * u + 4.0 * r * st2 + alpha2 * (1.0 + r) * (1.0 + r),
    }
}

fn n1_branch(params: &ConeParams, branch: Branch) -> Option<Branch> {
    (params.n == 1).then_some(branch)
}

/// `r² + 1 − 2r cos θ₁ + α²(r² + 1 − 2r cos φ₁)`; for `n = 1` the branch
/// replaces the `φ₁` term by `α²(r ∓ 1)²`. For `n ≥ 2` the branch is ignored.
pub fn kernel_denominator(params: &ConeParams, pt: &KernelPoint, branch: Branch) -> f64 {
    let a2 = params.alpha * params.alpha;
    denominator(
        a2,
        pt.r,
        1.0 - pt.r,
        half_versine(pt.theta1),
        half_versine(pt.phi1),
        n1_branch(params, branch),
    )
}

/// `1 − ⟨ν(x), ν(p̂)⟩` for the unit normals of the cone, in `[0, 2]`.
#[inline]
pub(crate) fn alignment(alpha2: f64, st2: f64, sp2: f64, n1: Option<Branch>) -> f64 {
    let sp2 = match n1 {
        None => sp2,
        Some(Branch::Interior) => 0.0,
        Some(Branch::Exterior) => 1.0,
    };
    2.0 * (alpha2 * st2 + sp2) / (1.0 + alpha2)
}

/// `1 − ⟨ν(x), ν(p̂)⟩` at a cone point; for `n = 1` the branch selects the
/// sheet, for `n ≥ 2` it is ignored.
pub fn normal_alignment(params: &ConeParams, pt: &KernelPoint, branch: Branch) -> f64 {
    let a2 = params.alpha * params.alpha;
    alignment(
        a2,
        half_versine(pt.theta1),
        half_versine(pt.phi1),
        n1_branch(params, branch),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(0).unwrap() - 2.0).abs() < 1e-14);
        assert!((sphere_area(1).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(2).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!(sphere_area(-1).is_err());
        for k in 2..=12 {
            let a = sphere_area(k).unwrap();
            let rec = 2.0 * PI * sphere_area(k - 2).unwrap() / (k as f64 - 1.0);
            assert!((a - rec).abs() <= 1e-13 * a, "k={k}");
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(ConeParams::new(1, 1, 0.2, 1.0).is_err());
        assert!(ConeParams::new(2, 3, 0.2, 1.0).is_err());
        assert!(ConeParams::new(3, 2, 1.0, 1.0).is_err());
        assert!(ConeParams::new(3, 2, 0.2, 0.0).is_err());
        let (p, swapped) = ConeParams::canonical(2, 3, 0.2, 0.5).unwrap();
        assert!(swapped);
        assert_eq!((p.m, p.n), (3, 2));
        assert!((p.alpha - 2.0).abs() < 1e-15);
    }

    #[test]
    fn denominator_examples() {
        let p = ConeParams::new(3, 2, 0.0, 0.7).unwrap();
        let at = |r, t, f| KernelPoint { r, theta1: t, phi1: f };
        assert_eq!(kernel_denominator(&p, &at(1.0, 0.0, 0.0), Branch::Interior), 0.0);
        assert!((kernel_denominator(&p, &at(0.0, 1.3, 2.1), Branch::Interior) - 1.49).abs() < 1e-15);
        let q = ConeParams::new(3, 1, 0.0, 0.7).unwrap();
        assert!((kernel_denominator(&q, &at(1.0, 0.0, 0.0), Branch::Exterior) - 4.0 * 0.49).abs() < 1e-15);
    }

    #[test]
    fn alignment_examples() {
        let p = ConeParams::new(3, 2, 0.0, 0.7).unwrap();
        let at = |t, f| KernelPoint {
            r: 1.0,
            theta1: t,
            phi1: f,
        };
        assert_eq!(normal_alignment(&p, &at(0.0, 0.0), Branch::Interior), 0.0);
        assert!((normal_alignment(&p, &at(PI, PI), Branch::Interior) - 2.0).abs() < 1e-15);
        let q = ConeParams::new(3, 1, 0.0, 0.7).unwrap();
        assert_eq!(normal_alignment(&q, &at(0.0, 1.0), Branch::Interior), 0.0);
    }

    #[test]
    fn denominator_matches_expanded_form() {
        let p = ConeParams::new(4, 3, 0.1, 0.83).unwrap();
        let a2 = p.alpha * p.alpha;
        for &(r, t, f) in &[(0.3, 0.2, 2.0), (1.7, 3.0, 0.1), (1.0, 1.0, 1.0)] {
            let pt = KernelPoint { r, theta1: t, phi1: f };
            let want = r * r + 1.0 - 2.0 * r * f64::cos(t) + a2 * (r * r + 1.0 - 2.0 * r * f64::cos(f));
            assert!((kernel_denominator(&p, &pt, Branch::Interior) - want).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn denominator_positive_off_the_singular_point(
            m in 2usize..8, n in 1usize..8, alpha in 0.05f64..3.0,
            r in 0.0f64..4.0, t in 0.0f64..PI, f in 0.0f64..PI,
        ) {
            prop_assume!(m >= n && m + n >= 3);
            let p = ConeParams::new(m, n, 0.3, alpha).unwrap();
            let pt = KernelPoint { r, theta1: t, phi1: f };
            let singular_interior = r == 1.0 && t == 0.0 && (n == 1 || f == 0.0);
            let d = kernel_denominator(&p, &pt, Branch::Interior);
            prop_assert!(d >= 0.0);
            if !singular_interior {
                prop_assert!(d > 0.0);
            }
            if n == 1 {
                prop_assert!(kernel_denominator(&p, &pt, Branch::Exterior) > 0.0);
            }
        }

        #[test]
        fn alignment_in_range(
            n in 1usize..5, alpha in 0.01f64..5.0, t in 0.0f64..PI, f in 0.0f64..PI,
            exterior in any::<bool>(),
        ) {
            let p = ConeParams::new(6, n, 0.3, alpha).unwrap();
            let b = if exterior { Branch::Exterior } else { Branch::Interior };
            let v = normal_alignment(&p, &KernelPoint { r: 0.5, theta1: t, phi1: f }, b);
            prop_assert!((0.0..=2.0 + 1e-15).contains(&v));
        }
    }

    #[test]
    fn dense_grid_positivity() {
        let p = ConeParams::new(3, 2, 0.5, 0.6).unwrap();
        for i in 0..=40 {
            for j in 0..=40 {
                for k in 0..=40 {
                    let pt = KernelPoint {
                        r: i as f64 / 20.0,
                        theta1: PI * j as f64 / 40.0,
                        phi1: PI * k as f64 / 40.0,
                    };
                    let d = kernel_denominator(&p, &pt, Branch::Interior);
                    if (i, j, k) == (20, 0, 0) {
                        assert_eq!(d, 0.0);
                    } else {
                        assert!(d > 0.0);
                    }
                }
            }
        }
    }
}
