//! Fixed cases shared by the benchmarks.

use nlcone_core::ConeParams;

/// A thin co-dimension-one cone and a balanced one; the second exercises the
/// two-dimensional angular reduction.
pub fn cases() -> [(&'static str, ConeParams); 2] {
    [
        ("3x1", ConeParams::new(3, 1, 0.3, 0.45).unwrap()),
        ("4x3", ConeParams::new(4, 3, 0.1, 0.8379).unwrap()),
    ]
}

/// Radial ratios at which single angular integrals are timed: far from,
/// close to and extremely close to the singular ring.
pub const RADII: [f64; 3] = [0.3, 0.99, 1.0 - 1e-8];
