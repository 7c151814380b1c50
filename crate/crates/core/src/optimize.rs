//! One-dimensional minimization.
//!
//! Everything here minimizes; callers maximizing a likelihood pass its
//! negation. Non-finite objective values are treated as `+inf`.

use alloc::vec::Vec;

use crate::math::{exp, ln};

/// `1 / phi` where `phi` is the golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `tol`. Returns the best point evaluated, which for a unimodal objective is
/// within `tol` of the minimizer.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = sanitize(f(c));
    let mut fd = sanitize(f(d));
    let mut iterations = 0;
    while (b - a) > tol && iterations < 10_000 {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sanitize(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sanitize(f(d));
        }
        // Stop once the interior points collide in floating point.
        if c >= d {
            break;
        }
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum {
        x,
        value,
        iterations,
    }
}

/// `count` points evenly spaced in `ln x` from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (ln(lo), ln(hi));
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else if i == 0 {
                        lo
                    } else {
                        exp(a + step * i as f64)
                    }
                })
                .collect()
        }
    }
}

/// Result of [`minimize_log_scale`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanMinimum {
    pub x: f64,
    pub value: f64,
    /// The minimizer sits at one of the ends of the search range.
    pub at_boundary: bool,
    /// The coarse scan used for bracketing, as `(x, f(x))` pairs.
    pub scan: Vec<(f64, f64)>,
}

/// Minimizes `f` on `[lo, hi]` (both positive): a `grid`-point log-spaced
/// scan brackets the best region, then golden-section search in `ln x`
/// refines it until the bracket is below `rel_tol` in relative terms.
///
/// The returned value is never worse than the best scan point.
pub fn minimize_log_scale<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    rel_tol: f64,
) -> ScanMinimum {
    let grid = grid.max(3);
    let xs = log_space(lo, hi, grid);
    let scan: Vec<(f64, f64)> = xs.iter().map(|&x| (x, sanitize(f(x)))).collect();
    let best = scan
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if p.1 < scan[best].1 { i } else { best });

    let left = xs[best.saturating_sub(1)];
    let right = xs[(best + 1).min(grid - 1)];
    let refined = golden_section(|u| f(exp(u)), ln(left), ln(right), rel_tol);
    let (mut x, mut value) = (exp(refined.x), refined.value);
    // Keep the scan point unless refinement strictly improves on it (NaN included).
    if value.is_nan() || value >= scan[best].1 {
        x = scan[best].0;
        value = scan[best].1;
    }
    // Probe the ends exactly: golden section never evaluates them.
    for &end in &[lo, hi] {
        if (best == 0 && end == lo) || (best == grid - 1 && end == hi) {
            let fe = sanitize(f(end));
            if fe <= value {
                x = end;
                value = fe;
            }
        }
    }
    let near = |e: f64| (x - e).abs() <= 1e-6 * e;
    ScanMinimum {
        x,
        value,
        at_boundary: near(lo) || near(hi),
        scan,
    }
}
