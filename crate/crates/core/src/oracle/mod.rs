//! Monte Carlo validators that work from the unreduced definitions.
//!
//! **Mean curvature.** Along a ray `p̂ + tω` the cone's defining function
//! `|z|² − α²|y|²` equals `t(b + at)` with
//! `a = |ω_z|² − α²|ω_y|²`, `b = 2α(ω_{z,1} − α ω_{y,1})/√(1+α²)`, so the
//! sign of `χ_E − χ_{E^c}` changes at most once, at `t = −b/a`, and each ray
//! integral of `t^{−1−s}` is elementary. Pairing `ω` with `−ω` (the
//! principal value) gives
//!
//! ```text
//! H(p̂) = (1/s) ∫_{S^{N−1}} sign(a) |a|^s |b|^{−s} dω,
//! ```
//!
//! and subtracting the tangent half-space instead gives an equivalent,
//! independently sampled form. `|b|^{−s}` is absorbed by sampling the normal
//! component `c = ⟨ω, ν⟩` from `|c|^{−s}` times its uniform law, leaving a
//! bounded weight.
//!
//! **Surface integrals.** Points of the cone are drawn from a mixture of a
//! chart about `p̂` (density `∝ |ξ|^{δ−(N−1)}`, antithetic pairs `±ξ`,
//! which also realize the principal value) and a global `(r, ω₁, ω₂)`
//! sampler for the rest of the cone.
//!
//! Samples are generated in fixed batches, each from its own ChaCha stream,
//! and merged in batch order: results do not depend on the thread count.

use crate::cone_model::{half_versine, sphere_area, ConeParams};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 10_000;

/// Smallest `s` for the mean-curvature oracle: its standard error grows
/// like `1/s`.
pub const MIN_S: f64 = 0.01;

const BATCH: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    /// Outer truncation radius; `None` when the estimator covers the whole
    /// space exactly.
    pub cutoff_radius: Option<f64>,
    /// Radius of a ball removed around `p̂`; `None` when the principal value
    /// is realized by symmetric pairing instead.
    pub excision_radius: Option<f64>,
}

impl McEstimate {
    /// `|mean − value| / stderr`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.stderr
    }

    pub fn agrees_with(&self, value: f64, value_error: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.stderr + value_error
    }
}

/// Count, mean and sum of squared deviations (Chan et al. merge).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    /// Variance of the mean.
    fn var_of_mean(&self) -> f64 {
        if self.n < 2.0 {
            f64::INFINITY
        } else {
            self.m2 / (self.n - 1.0) / self.n
        }
    }
}

fn rng_for(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Runs `samples` draws of `draw` (which pushes into one or more moment
/// channels) in deterministic batches and merges them in order.
fn run_batches<const K: usize, F>(samples: usize, seed: u64, draw: F) -> [Moments; K]
where
    F: Fn(&mut ChaCha8Rng, &mut [Moments; K]) + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let parts: Vec<[Moments; K]> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, b);
            let mut m = [Moments::default(); K];
            let count = BATCH.min(samples - b * BATCH);
            for _ in 0..count {
                draw(&mut rng, &mut m);
            }
            m
        })
        .collect();
    parts.into_iter().fold([Moments::default(); K], |acc, p| {
        let mut out = acc;
        for k in 0..K {
            out[k] = acc[k].merge(p[k]);
        }
        out
    })
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    Ok(())
}

/// Fills `out` with a uniform point of the unit sphere in `R^{out.len()}`.
fn sphere_point<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm2 += *x * *x;
        }
        if norm2 > 0.0 {
            let inv = norm2.sqrt().recip();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Angle to the first axis of a unit vector, accurate near 0 and π.
fn polar_angle(v: &[f64]) -> f64 {
    let rest: f64 = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    rest.atan2(v[0])
}

/// How the principal value of the mean curvature is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RayEstimator {
    /// Pair each ray with its antipode.
    #[default]
    Antipodal,
    /// Subtract the tangent half-space at `p̂`, whose own principal value
    /// vanishes.
    HalfSpace,
}

/// The mean curvature at the unit point `p̂` (geometric normalization; compare
/// with the reduced value times
/// [`unit_point_factor`](crate::curvature_solver::unit_point_factor)).
pub fn mc_mean_curvature(m: usize, n: usize, s: f64, alpha: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    let params = ConeParams::new(m, n, s, alpha)?;
    mc_mean_curvature_with(&params, RayEstimator::Antipodal, samples, seed)
}

pub fn mc_mean_curvature_with(
    params: &ConeParams,
    estimator: RayEstimator,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(samples)?;
    let s = params.s;
    if s < MIN_S {
        return Err(Error::invalid(format!(
            "s = {s} below {MIN_S}: the ray estimator's variance grows like 1/s²"
        )));
    }
    let (m, n) = (params.m, params.n);
    let big_n = m + n;
    let alpha = params.alpha;
    let a2 = alpha * alpha;
    let norm = (1.0 + a2).sqrt();
    // Unit normal ν = (−α e₁ʸ, e₁ᶻ)/√(1+α²), so b = 2α⟨ω, ν⟩.
    // Under the uniform law c² ~ Beta(1/2, (N−1)/2); reweighting by |c|^{−s}
    // gives Beta((1−s)/2, (N−1)/2) and the constant below.
    let half_rest = 0.5 * (big_n as f64 - 1.0);
    let ln_beta = |p: f64, q: f64| ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q);
    let moment = (ln_beta(0.5 * (1.0 - s), half_rest) - ln_beta(0.5, half_rest)).exp();
    let scale = sphere_area(big_n as i64 - 1)? * moment * (2.0 * alpha).powf(-s) / s;
    let beta = Beta::new(0.5 * (1.0 - s), half_rest).map_err(|e| Error::invalid(e.to_string()))?;

    let [mo] = run_batches::<1, _>(samples, seed, |rng, acc| {
        // ω = c ν + √(1−c²) v, v uniform on the sphere orthogonal to ν.
        let c2: f64 = beta.sample(rng);
        let c = if rng.random::<bool>() { c2.sqrt() } else { -c2.sqrt() };
        let mut v = [0.0; 32];
        let v = &mut v[..big_n - 1];
        sphere_point(rng, v);
        let w = (1.0 - c2).max(0.0).sqrt();
        // Orthonormal complement of ν: the tangent t = (e₁ʸ + α e₁ᶻ)/√(1+α²)
        // and the remaining axes y₂..y_m, z₂..z_n.
        let tan = w * v[0];
        let y1 = (-alpha * c + tan) / norm;
        let z1 = (c + alpha * tan) / norm;
        let mut y2 = y1 * y1;
        let mut z2 = z1 * z1;
        for &x in &v[1..m] {
            y2 += w * w * x * x;
        }
        for &x in &v[m..] {
            z2 += w * w * x * x;
        }
        let a = z2 - a2 * y2;
        let value = match estimator {
            RayEstimator::Antipodal => a.signum() * a.abs().powf(s),
            RayEstimator::HalfSpace => {
                // Only rays whose far end lies on the other side of the
                // tangent plane contribute: −2 sign(b) |a/b|^s / s.
                if a != 0.0 && a.signum() != c.signum() {
                    -2.0 * c.signum() * a.abs().powf(s)
                } else {
                    0.0
                }
            }
        };
        acc[0].push(value);
    });
    Ok(McEstimate {
        mean: scale * mo.mean,
        stderr: scale * mo.var_of_mean().sqrt(),
        samples,
        seed,
        cutoff_radius: None,
        excision_radius: None,
    })
}

/// What is integrated over the cone against `|x − p̂|^{−N−s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SurfaceIntegrand {
    /// `1 − |x|^{−β}` (principal value): the raw `C(m,n,s,β)`.
    HardyWeight { beta: f64 },
    /// `1 − ⟨ν(x), ν(p̂)⟩`: the raw `A₀²`.
    NormalAlignment,
}

/// Surface integral over the cone at the unit point, raw normalization.
pub fn mc_surface_integral(
    params: &ConeParams,
    integrand: SurfaceIntegrand,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(samples)?;
    let (m, n) = (params.m, params.n);
    let big_n = m + n;
    let s = params.s;
    if let SurfaceIntegrand::HardyWeight { beta } = integrand {
        let top = big_n as f64 - 2.0 - s;
        if !(beta > 0.0 && beta < top) {
            return Err(Error::invalid(format!("beta = {beta} outside (0, N−2−s) = (0, {top})")));
        }
    }
    let alpha = params.alpha;
    let a2 = alpha * alpha;
    let k = params.kernel_power();
    let c0 = (1.0 + a2).sqrt();
    let pref = (1.0 + a2).powf(0.5 * (2.0 + s));
    // Both closures take `u = 1 − r` exactly, so the chart's antithetic pairs
    // at tiny ρ do not lose their cancellation to rounding in `r`.
    let h = |u: f64, st2: f64, sp2: f64| match integrand {
        SurfaceIntegrand::HardyWeight { beta } => -(-beta * (-u).ln_1p()).exp_m1(),
        SurfaceIntegrand::NormalAlignment => 2.0 * (a2 * st2 + sp2) / (1.0 + a2),
    };
    // |x − p̂|^{N+s} (1+α²)^{(N+s)/2}, with the 1/(1+α²) of |x|² absorbed.
    let dk = |u: f64, st2: f64, sp2: f64| {
        let r = 1.0 - u;
        ((1.0 + a2) * u * u + 4.0 * r * (st2 + a2 * sp2)).powf(-k)
    };

    // Chart ξ = (√(1+α²)(r−1), θ v₁, αφ v₂) about p̂, valid while θ, φ < π
    // and r > 0.
    let rho_max = 0.999 * c0.min(std::f64::consts::PI * alpha.min(1.0));
    let delta = 1.0 - s;
    let d = big_n - 1;
    let g_norm = delta / (rho_max.powf(delta) * sphere_area(d as i64 - 1)?);
    let in_chart = |r: f64, theta: f64, phi: f64| {
        let x0 = c0 * (r - 1.0);
        x0 * x0 + theta * theta + a2 * phi * phi < rho_max * rho_max
    };
    // F̃ = F / (dξ/dμ): the integrand in chart coordinates.
    let f_chart = |u: f64, theta: f64, phi: f64| {
        let r = 1.0 - u;
        let st2 = half_versine(theta);
        let sp2 = half_versine(phi);
        let sinc_t = if theta > 0.0 { theta.sin() / theta } else { 1.0 };
        let sinc_p = if phi > 0.0 { phi.sin() / phi } else { 1.0 };
        h(u, st2, sp2) * pref / c0
            * r.powi(big_n as i32 - 2)
            * sinc_t.powi(m as i32 - 2)
            * sinc_p.powi(n as i32 - 2)
            * dk(u, st2, sp2)
    };
    let spheres = sphere_area(m as i64 - 1)? * sphere_area(n as i64 - 1)?;
    let far_pref = alpha.powi(n as i32 - 1) * pref * spheres;

    let [near, far] = run_batches::<2, _>(samples, seed, |rng, acc| {
        // Chart sample with its antithetic partner.
        let mut xi = [0.0; 32];
        let xi = &mut xi[..d];
        sphere_point(rng, xi);
        let u01: f64 = rng.random();
        let rho = rho_max * (1.0 - u01).powf(1.0 / delta);
        let x0 = rho * xi[0];
        let theta = rho * xi[1..m].iter().map(|x| x * x).sum::<f64>().sqrt();
        let phi = rho * xi[m..].iter().map(|x| x * x).sum::<f64>().sqrt() / alpha;
        let g = g_norm * rho.powf(delta - d as f64);
        let du = x0 / c0;
        acc[0].push(0.5 * (f_chart(-du, theta, phi) + f_chart(du, theta, phi)) / g);

        // Global sample: r with density (1+r)^{−2}, uniform directions.
        let u: f64 = rng.random();
        let r = u / (1.0 - u);
        let mut w1 = [0.0; 16];
        let w1 = &mut w1[..m];
        sphere_point(rng, w1);
        let theta = polar_angle(w1);
        let phi = if n == 1 {
            if rng.random::<bool>() {
                0.0
            } else {
                std::f64::consts::PI
            }
        } else {
            let mut w2 = [0.0; 16];
            let w2 = &mut w2[..n];
            sphere_point(rng, w2);
            polar_angle(w2)
        };
        let on_chart_sheet = n > 1 || phi == 0.0;
        let value = if r > 0.0 && r.is_finite() && !(on_chart_sheet && in_chart(r, theta, phi)) {
            let st2 = half_versine(theta);
            let sp2 = half_versine(phi);
            let q = 1.0 / ((1.0 + r) * (1.0 + r));
            far_pref * h(1.0 - r, st2, sp2) * r.powi(big_n as i32 - 2) * dk(1.0 - r, st2, sp2) / q
        } else {
            0.0
        };
        acc[1].push(value);
    });
    let mean = near.mean + far.mean;
    let stderr = (near.var_of_mean() + far.var_of_mean()).sqrt();
    Ok(McEstimate {
        mean,
        stderr,
        samples,
        seed,
        cutoff_radius: None,
        excision_radius: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..377].iter().for_each(|&x| a.push(x));
        xs[377..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert!((merged.mean - all.mean).abs() < 1e-12);
        assert!((merged.m2 - all.m2).abs() < 1e-9 * all.m2);
    }

    #[test]
    fn sample_count_and_s_are_validated() {
        assert!(mc_mean_curvature(2, 1, 0.3, 0.5, 100, 0).is_err());
        assert!(mc_mean_curvature(2, 1, 0.001, 0.5, 20_000, 0).is_err());
        let p = ConeParams::new(3, 2, 0.2, 0.8).unwrap();
        assert!(mc_surface_integral(&p, SurfaceIntegrand::HardyWeight { beta: 5.0 }, 20_000, 0).is_err());
    }

    #[test]
    fn symmetric_cone_has_zero_curvature() {
        let e = mc_mean_curvature(3, 3, 0.3, 1.0, 200_000, 7).unwrap();
        assert!(e.z_score(0.0) < 4.0, "{e:?}");
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let p = ConeParams::new(2, 2, 0.2, 1.0).unwrap();
        let a = mc_surface_integral(&p, SurfaceIntegrand::NormalAlignment, 40_000, 3).unwrap();
        let b = mc_surface_integral(&p, SurfaceIntegrand::NormalAlignment, 40_000, 3).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
}
