//! Generalized Richardson extrapolation `T(ε) = T₀ + Σ c_j ε^{p_j}`.

/// Extrapolated limit with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    pub error: f64,
}

/// Solves the (k+1)×(k+1) system through the last `k+1` ladder points for
/// `T₀`, eliminating the first `k` exponents.
fn solve_limit(eps: &[f64], vals: &[f64], exps: &[f64]) -> Option<f64> {
    let k = exps.len();
    let rows = k + 1;
    if eps.len() < rows {
        return None;
    }
    let start = eps.len() - rows;
    // Scale ε by the largest ladder entry so the columns stay O(1).
    let scale = eps[start];
    let mut a = vec![vec![0.0; rows + 1]; rows];
    for (i, row) in a.iter_mut().enumerate() {
        let e = eps[start + i] / scale;
        row[0] = 1.0;
        for (j, &p) in exps.iter().enumerate() {
            row[j + 1] = e.powf(p);
        }
        row[rows] = vals[start + i];
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..rows {
        let piv = (col..rows).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..rows {
            if r != col {
                let factor = a[r][col] / a[col][col];
                if factor != 0.0 {
                    #[allow(clippy::needless_range_loop)] // rows r and col alias
                    for c in col..=rows {
                        a[r][c] -= factor * a[col][c];
                    }
                }
            }
        }
    }
    Some(a[0][rows] / a[0][0])
}

/// Extrapolates `vals[k] = T(eps[k])` to `ε → 0`. `eps` must be strictly
/// decreasing. The error estimate is the larger of the change from dropping
/// the last exponent and the change from shifting the window one step
/// coarser, so it also catches a ladder that has not yet entered the
/// asymptotic regime.
pub fn extrapolate(eps: &[f64], vals: &[f64], exponents: &[f64]) -> Extrapolated {
    assert_eq!(eps.len(), vals.len());
    assert!(!eps.is_empty());
    let last = *vals.last().unwrap();
    // Use as many exponents as the ladder supports, keeping two spare points
    // for the error estimate.
    let k = exponents.len().min(eps.len().saturating_sub(2));
    if k == 0 {
        let error = if vals.len() >= 2 {
            (last - vals[vals.len() - 2]).abs()
        } else {
            f64::INFINITY
        };
        return Extrapolated { value: last, error };
    }
    let full = solve_limit(eps, vals, &exponents[..k]);
    let fewer = solve_limit(eps, vals, &exponents[..k - 1]);
    let n = eps.len();
    let shifted = solve_limit(&eps[..n - 1], &vals[..n - 1], &exponents[..k]);
    match full {
        Some(v) => {
            let mut error: f64 = 0.0;
            for other in [fewer, shifted].into_iter().flatten() {
                error = error.max((v - other).abs());
            }
            Extrapolated { value: v, error }
        }
        None => Extrapolated {
            value: last,
            error: f64::INFINITY,
        },
    }
}
