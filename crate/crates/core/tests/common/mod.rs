#![allow(dead_code)]

use nlcone_core::cone_model::ConeParams;
use nlcone_core::curvature_solver::{mean_curvature, unit_point_factor, CurvatureRoute};
use nlcone_core::oracle::{mc_mean_curvature, mc_surface_integral, McEstimate, SurfaceIntegrand};
use nlcone_core::quadrature::{IntegralResult, Tolerances};
use nlcone_core::stability::{a0_squared, c_constant, Normalization};

#[derive(Debug, Clone, Copy)]
pub enum Quantity {
    Curvature,
    Hardy,
    Alignment,
}

/// The fixed oracle grid: n = 1 and n ≥ 2, s ∈ {0.2, 0.5}, each quantity
/// twice.
pub const ORACLE_GRID: [(usize, usize, f64, f64, Quantity); 6] = [
    (2, 1, 0.2, 0.5, Quantity::Curvature),
    (4, 3, 0.5, 0.7, Quantity::Curvature),
    (3, 1, 0.5, 0.5, Quantity::Alignment),
    (2, 2, 0.2, 1.0, Quantity::Alignment),
    (5, 1, 0.5, 0.3, Quantity::Hardy),
    (3, 2, 0.2, 0.8, Quantity::Hardy),
];

/// Monte Carlo estimate and quadrature value of a quantity, both raw.
pub fn oracle_pair(p: &ConeParams, q: Quantity, samples: usize, seed: u64) -> (McEstimate, IntegralResult) {
    let t = Tolerances::default();
    match q {
        Quantity::Curvature => (
            mc_mean_curvature(p.m, p.n, p.s, p.alpha, samples, seed).unwrap(),
            mean_curvature(p, CurvatureRoute::HalfSpaceFlux, &t)
                .unwrap()
                .scaled(unit_point_factor(p)),
        ),
        Quantity::Hardy => {
            let beta = p.hardy_beta();
            (
                mc_surface_integral(p, SurfaceIntegrand::HardyWeight { beta }, samples, seed).unwrap(),
                c_constant(p, beta, Normalization::Raw, &t).unwrap(),
            )
        }
        Quantity::Alignment => (
            mc_surface_integral(p, SurfaceIntegrand::NormalAlignment, samples, seed).unwrap(),
            a0_squared(p, Normalization::Raw, &t).unwrap(),
        ),
    }
}

/// `max(abs, rel·|reference|)`.
pub fn within(value: f64, reference: f64, abs: f64, rel: f64) -> bool {
    (value - reference).abs() <= abs.max(rel * reference.abs())
}
