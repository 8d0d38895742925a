//! 21-point Gauss-Kronrod rule and a globally adaptive bisection driver.

// Nodes and weights are kept at the digits they are tabulated with.
#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_438_802,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Weights of the embedded 10-point Gauss rule (nodes `XGK[1], XGK[3], ...`).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of one application of the rule on a panel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
    pub abs_value: f64,
    /// Integral of the auxiliary channel (same rule, no error control).
    pub aux: f64,
}

/// Error scaling follows QUADPACK's `qk21`.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

#[cfg(test)]
pub(crate) fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    gk21_aux(&mut |x| (f(x), 0.0), a, b)
}

/// As [`gk21`] for an integrand with an auxiliary channel, which is
/// integrated with the Kronrod weights alongside the main value.
pub(crate) fn gk21_aux<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    let (fc, ac) = f(center);
    let mut aux = WGK[10] * ac;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let (f1, a1) = f(center - dx);
        let (f2, a2) = f(center + dx);
        aux += WGK[jtw] * (a1 + a2);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let (f1, a1) = f(center - dx);
        let (f2, a2) = f(center + dx);
        aux += WGK[jtwm1] * (a1 + a2);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let err = rescale_error((res_k - res_g) * half, res_abs, res_asc);
    Panel {
        a,
        b,
        value: result,
        error: err,
        abs_value: res_abs,
        aux: aux * half,
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Outcome of the adaptive driver.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Adaptive {
    pub value: f64,
    pub error: f64,
    pub abs_value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub aux: f64,
}

/// Globally adaptive bisection over an initial partition given by `breaks`
/// (sorted, at least two points). The panel with the largest error estimate
/// is bisected until the total error meets `max(abs_tol, rel_tol |I|)` or
/// `max_subdivisions` bisections have been spent.
pub(crate) fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Adaptive {
    adaptive_aux(&mut |x| (f(x), 0.0), breaks, abs_tol, rel_tol, max_subdivisions)
}

/// [`adaptive`] with an auxiliary channel carried along on the final
/// partition.
pub(crate) fn adaptive_aux<F: FnMut(f64) -> (f64, f64)>(
    f: &mut F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Adaptive {
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::with_capacity(breaks.len() + 2 * max_subdivisions.min(512));
    let mut value = 0.0;
    let mut error = 0.0;
    let mut abs_value = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let p = gk21_aux(f, w[0], w[1]);
        value += p.value;
        error += p.error;
        abs_value += p.abs_value;
        heap.push(p);
    }
    let mut evaluations = 21 * heap.len();
    let mut converged = error <= abs_tol.max(rel_tol * value.abs());
    let mut spent = 0;

    // A non-finite sample would otherwise attract every bisection.
    while !converged && spent < max_subdivisions && error.is_finite() {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Panel too narrow to split in floating point.
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = gk21_aux(f, worst.a, mid);
        let right = gk21_aux(f, mid, worst.b);
        evaluations += 42;
        spent += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        // Re-sum periodically so the running totals do not drift.
        if spent % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
            abs_value = heap.iter().map(|p| p.abs_value).sum();
        }
        converged = error <= abs_tol.max(rel_tol * value.abs());
    }

    Adaptive {
        value,
        error,
        abs_value,
        evaluations,
        converged,
        aux: heap.iter().map(|p| p.aux).sum(),
    }
}

/// Breakpoints on `[a, b]` graded geometrically (ratio 2) toward `a`, with the
/// finest panel `[a, a + scale]`. Returns just `[a, b]` when `scale` already
/// covers the interval.
pub(crate) fn graded_breaks(a: f64, b: f64, scale: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(a);
    let len = b - a;
    if !(scale > 0.0) || scale >= 0.5 * len {
        out.push(b);
        return;
    }
    let mut h = scale;
    while h < 0.5 * len {
        out.push(a + h);
        h *= 2.0;
    }
    out.push(b);
}
