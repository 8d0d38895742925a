//! Published reference values for the `s = 0` table and the `(4, 3)` scan,
//! in table normalization. Four to five significant digits.

// Transcribed digits, not approximations of constants.
#![allow(clippy::approx_constant)]

/// `H(m, n, 0)` for `m = 2..=7`, `n = 1..=m`; row `m − 2`, column `n − 1`.
pub const TABLE1_H: [&[f64]; 6] = [
    &[0.8140, 1.0679],
    &[1.1978, 1.2346, 0.3926],
    &[1.3968, 1.3649, 0.4477, 0.1613],
    &[1.5117, 1.4570, 0.4895, 0.1845, 0.06978],
    &[1.5833, 1.5231, 0.5215, 0.2031, 0.08013, 0.03113],
    &[1.6303, 1.5719, 0.5465, 0.2182, 0.08885, 0.03583, 0.01416],
];

/// `A₀(m, n, 0)²`, laid out as [`TABLE1_H`].
pub const TABLE1_A0_SQUARED: [&[f64]; 6] = [
    &[3.2669, 2.3015],
    &[2.5984, 1.7918, 0.4463],
    &[2.0413, 1.5534, 0.4288, 0.1356],
    &[1.7332, 1.3981, 0.4118, 0.1398, 0.04849],
    &[1.5318, 1.2841, 0.3955, 0.1412, 0.05173, 0.01885],
    &[1.3872, 1.1951, 0.3802, 0.1409, 0.05381, 0.02051, 0.007704],
];

/// One column of the `(4, 3)` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Column {
    pub s: f64,
    pub alpha: f64,
    pub h: f64,
    pub a0_squared: f64,
}

pub const TABLE2: [Table2Column; 4] = [
    Table2Column {
        s: 0.1,
        alpha: 0.8379,
        h: 0.4113,
        a0_squared: 0.4007,
    },
    Table2Column {
        s: 0.2,
        alpha: 0.8361,
        h: 0.3856,
        a0_squared: 0.3830,
    },
    Table2Column {
        s: 0.3,
        alpha: 0.8341,
        h: 0.3699,
        a0_squared: 0.3756,
    },
    Table2Column {
        s: 0.4,
        alpha: 0.8319,
        h: 0.3639,
        a0_squared: 0.3786,
    },
];

/// All `(m, n)` cells of the `s = 0` table in row order.
pub fn table1_cells() -> impl Iterator<Item = (usize, usize)> {
    (2..=7).flat_map(|m| (1..=m).map(move |n| (m, n)))
}

/// `(H, A₀²)` reference pair for a table cell, if present.
pub fn table1_entry(m: usize, n: usize) -> Option<(f64, f64)> {
    if !(2..=7).contains(&m) || n == 0 || n > m {
        return None;
    }
    Some((TABLE1_H[m - 2][n - 1], TABLE1_A0_SQUARED[m - 2][n - 1]))
}
