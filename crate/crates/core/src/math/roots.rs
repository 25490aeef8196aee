//! Bracketed scalar root finding: Newton iterations safeguarded by bisection.

use crate::{Error, Result};
use alloc::format;

#[allow(unused_imports)]
use super::real::Real;

/// Find the root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` have
/// opposite signs (either may be zero). `df` supplies the derivative; a
/// Newton step is taken whenever it stays inside the current bracket,
/// otherwise the bracket is bisected. Converges when `|f| <= ftol`.
pub fn newton_bisect<F, D>(f: F, df: D, lo: f64, hi: f64, ftol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Invariant(format!(
            "root not bracketed on [{lo:e}, {hi:e}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}"
        )));
    }
    // Orient so that f(lo) < 0 < f(hi).
    let flip = f_lo > 0.0;
    let sgn = if flip { -1.0 } else { 1.0 };
    f_lo *= sgn;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let fx = sgn * f(x);
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let d = sgn * df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * x.abs() {
            // Bracket collapsed to adjacent floats; accept the better end.
            return Ok(if f_lo.abs() < (sgn * f(hi)).abs() { lo } else { hi });
        }
    }
    let fx = f(x);
    if fx.abs() <= ftol * 16.0 {
        return Ok(x);
    }
    Err(Error::Numeric(format!(
        "root iteration did not converge: x = {x:e}, residual {fx:e}, ftol {ftol:e}"
    )))
}
