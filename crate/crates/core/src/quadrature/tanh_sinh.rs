//! Tanh-sinh (double exponential) quadrature for endpoint singularities.
//!
//! The substitution `x = c + h tanh(π/2 sinh t)` clusters nodes
//! double-exponentially at both ends. Integrands receive the node together
//! with its exact distance to each endpoint, so a kernel singular at `b` can
//! be evaluated at `b - 1e-200` without the cancellation in `b - x`.

use std::f64::consts::FRAC_PI_2;

/// A quadrature node on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    /// `x - a`, computed without cancellation.
    pub from_a: f64,
    /// `b - x`, computed without cancellation.
    pub from_b: f64,
}

/// Beyond this `|t|` the node distances underflow for unit-length intervals.
const T_MAX: f64 = 6.5;

#[derive(Debug, Clone, Copy)]
pub(crate) struct DeOutcome {
    pub value: f64,
    pub error: f64,
    pub abs_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Integral of the auxiliary channel on the final level.
    pub aux: f64,
}

#[inline]
fn node_at(a: f64, b: f64, t: f64) -> (Node, f64) {
    let len = b - a;
    let z = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * z.abs()).exp();
    // Distance to the nearer endpoint and to the farther one.
    let near = len * e / (1.0 + e);
    let far = len / (1.0 + e);
    let (from_a, from_b) = if z < 0.0 { (near, far) } else { (far, near) };
    let x = if from_a <= from_b { a + from_a } else { b - from_b };
    let w = 0.5 * len * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
    (Node { x, from_a, from_b }, w)
}

/// Integrates `f` over `[a, b]` by level doubling until two successive levels
/// agree to `max(abs_tol, rel_tol |I|)`.
#[cfg(test)]
pub(crate) fn integrate<F: FnMut(Node) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_level: u32,
) -> DeOutcome {
    integrate_aux(&mut |n| (f(n), 0.0), a, b, abs_tol, rel_tol, max_level)
}

/// As [`integrate`], also summing an auxiliary channel with the same weights
/// (used to carry inner error estimates of nested integrals).
pub(crate) fn integrate_aux<F: FnMut(Node) -> (f64, f64)>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_level: u32,
) -> DeOutcome {
    let mut evaluations = 0usize;
    // Weighted value and auxiliary value at `t`, or `None` for a node whose
    // integrand is not finite.
    let mut eval = |f: &mut F, t: f64| -> Option<(f64, f64)> {
        let (node, w) = node_at(a, b, t);
        if node.from_a < f64::MIN_POSITIVE || node.from_b < f64::MIN_POSITIVE {
            // Subnormal distance to an endpoint: the weight is of the same
            // order, and integrands cannot be evaluated reliably there.
            return Some((0.0, 0.0));
        }
        evaluations += 1;
        let (y, x) = f(node);
        let v = w * y;
        v.is_finite().then_some((v, w * x))
    };

    // Level 0 fixes the truncation of the t-range on each side.
    let (mut sum, mut aux) = eval(f, 0.0).unwrap_or((0.0, 0.0));
    let mut abs_sum = sum.abs();
    let mut t_hi = 0.0;
    let mut t_lo = 0.0;
    for side in [1.0_f64, -1.0] {
        let mut small = 0;
        let mut k = 1.0;
        while k <= T_MAX {
            if node_at(a, b, side * k).1 == 0.0 {
                break;
            }
            let Some((v, x)) = eval(f, side * k) else { break };
            sum += v;
            aux += x;
            abs_sum += v.abs();
            if side > 0.0 {
                t_hi = k;
            } else {
                t_lo = k;
            }
            // Terms decay double-exponentially once they start to; one
            // negligible term ends the side. A term that is exactly zero may
            // be an interior zero of the integrand, so it needs a second.
            if v == 0.0 {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else if v.abs() <= 1e-17 * abs_sum {
                break;
            } else {
                small = 0;
            }
            k += 1.0;
        }
    }
    // Allow the finer levels half a unit beyond the last coarse node.
    let t_hi = (t_hi + 0.5_f64).min(T_MAX);
    let t_lo = (t_lo + 0.5_f64).min(T_MAX);

    let mut h = 1.0;
    let mut estimate = sum * h;
    let mut abs_estimate = abs_sum * h;
    let mut aux_estimate = aux * h;
    let mut error = f64::INFINITY;
    let mut converged = false;
    let mut bad_nodes = 0usize;

    for _level in 1..=max_level {
        h *= 0.5;
        // New nodes: odd multiples of h on both sides.
        for (side, limit) in [(1.0, t_hi), (-1.0, t_lo)] {
            let mut t = h;
            while t <= limit {
                match eval(f, side * t) {
                    Some((v, x)) => {
                        sum += v;
                        aux += x;
                        abs_sum += v.abs();
                    }
                    None => bad_nodes += 1,
                }
                t += 2.0 * h;
            }
        }
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        abs_estimate = abs_sum * h;
        aux_estimate = aux * h;
        if error <= abs_tol.max(rel_tol * estimate.abs()) {
            converged = true;
            break;
        }
    }

    DeOutcome {
        value: estimate,
        error: error.max(4.0 * f64::EPSILON * abs_estimate),
        abs_value: abs_estimate,
        evaluations,
        converged: converged && bad_nodes == 0,
        aux: aux_estimate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_stay_strictly_inside() {
        for &t in &[-6.0, -3.0, -0.5, 0.0, 0.5, 3.0, 6.0] {
            let (n, w) = node_at(1.0, 2.0, t);
            assert!(n.from_a > 0.0 && n.from_b > 0.0);
            assert!((n.from_a + n.from_b - 1.0).abs() < 1e-15);
            assert!(w > 0.0);
        }
    }

    #[test]
    fn inverse_square_root_at_the_right_endpoint() {
        // ∫_0^1 (1 - x)^{-1/2} dx = 2, singular where `x` itself rounds to 1.
        let mut f = |n: Node| n.from_b.powf(-0.5);
        let r = integrate(&mut f, 0.0, 1.0, 1e-13, 1e-12, 10);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn strong_endpoint_singularity() {
        // ∫_0^1 x^{-0.95} dx = 20
        let mut f = |n: Node| n.from_a.powf(-0.95);
        let r = integrate(&mut f, 0.0, 1.0, 1e-10, 1e-10, 12);
        assert!((r.value - 20.0).abs() < 1e-6, "{}", r.value);
    }
}
