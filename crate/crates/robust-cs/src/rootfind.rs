//! Bracketed root finding for monotone functions.
//!
//! Bisection guarantees convergence; a secant step is tried first on each
//! iteration and accepted whenever it lands strictly inside the current
//! bracket, which gives superlinear convergence on the smooth functions we
//! solve. Termination is on an absolute interval-width tolerance.

use crate::error::{Error, Result};

const MAX_ITER: usize = 256;

/// Solve `g(m) = 0` for a nonincreasing `g` on `[lo, hi]` whose endpoint
/// values are already known, so callers probing warm-start windows do not pay
/// for re-evaluation. Requires `g(lo) >= 0 >= g(hi)`; returns the bracket
/// midpoint once the bracket is narrower than `tol`.
pub(crate) fn solve_decreasing_with(
    g: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    mut g_lo: f64,
    mut g_hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Bracketing(format!("invalid bracket [{lo}, {hi}]")));
    }
    if g_lo < 0.0 || g_hi > 0.0 {
        return Err(Error::Bracketing(format!(
            "no sign change on [{lo}, {hi}]: g(lo)={g_lo}, g(hi)={g_hi}"
        )));
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    for iter in 0..MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        // secant candidate; fall back to bisection when it degenerates or
        // fails to land inside the bracket
        let mut mid = if g_lo != g_hi && iter % 2 == 0 {
            lo + g_lo * (hi - lo) / (g_lo - g_hi)
        } else {
            0.5 * (lo + hi)
        };
        let margin = 0.01 * (hi - lo);
        if !(mid > lo + margin && mid < hi - margin) {
            mid = 0.5 * (lo + hi);
        }
        if mid <= lo || mid >= hi {
            // bracket has hit f64 resolution
            break;
        }
        let g_mid = g(mid);
        if g_mid > 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else if g_mid < 0.0 {
            hi = mid;
            g_hi = g_mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_decreasing(
        f: impl Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        target: f64,
        tol: f64,
    ) -> Result<f64> {
        let g = |m: f64| f(m) - target;
        let (g_lo, g_hi) = (g(lo), g(hi));
        solve_decreasing_with(g, lo, hi, g_lo, g_hi, tol)
    }

    #[test]
    fn finds_root_of_linear() {
        let root = solve_decreasing(|m| 1.0 - m, -10.0, 10.0, 0.0, 1e-12).unwrap();
        assert!((root - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn finds_level_point_of_curved_function() {
        // strictly decreasing, solve atan(-m) = 0.7
        let root = solve_decreasing(|m| (-m).atan(), -5.0, 5.0, 0.7, 1e-12).unwrap();
        assert!((root + 0.7f64.tan()).abs() <= 1e-9);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        let err = solve_decreasing(|m| -m, 1.0, 2.0, 0.0, 1e-9);
        assert!(matches!(err, Err(Error::Bracketing(_))));
    }

    #[test]
    fn handles_flat_regions() {
        // piecewise: flat at 1 for m < 0, then decreasing
        let f = |m: f64| if m < 0.0 { 1.0 } else { 1.0 - m };
        let root = solve_decreasing(f, -100.0, 100.0, 0.5, 1e-10).unwrap();
        assert!((root - 0.5).abs() <= 1e-8);
    }

    #[test]
    fn deterministic_result() {
        let f = |m: f64| (-(m - 0.3)).tanh();
        let a = solve_decreasing(f, -50.0, 50.0, 0.2, 1e-11).unwrap();
        let b = solve_decreasing(f, -50.0, 50.0, 0.2, 1e-11).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
