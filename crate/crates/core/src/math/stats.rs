//! Small-sample least squares used by the decay-law analysis.

use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use super::real::Real;
use super::special::student_t_sf;

/// Ordinary least squares of `y` on `x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the residuals.
    pub residual_rms: f64,
    pub n: usize,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::Domain(format!("line fit needs >= 2 paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain("line fit with degenerate abscissas".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for i in 0..n {
        let r = y[i] - (intercept + slope * x[i]);
        ss += r * r;
    }
    Ok(LineFit { slope, intercept, residual_rms: (ss / nf).sqrt(), n })
}

/// Quadratic least squares `y = c0 + c1 x + c2 x^2` with a one-sided test of
/// the curvature coefficient.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Standard error of `c2`.
    pub se_c2: f64,
    /// p-value of the one-sided test H1: c2 > 0.
    pub p_positive_curvature: f64,
    pub n: usize,
}

pub fn fit_quadratic(x: &[f64], y: &[f64]) -> Result<CurvatureFit> {
    let n = x.len();
    if n != y.len() || n < 4 {
        return Err(Error::Domain(format!("curvature fit needs >= 4 paired points, got {n}")));
    }
    // Center and scale the abscissa for a well-conditioned normal system.
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let sx = {
        let v = x.iter().map(|&v| (v - mx) * (v - mx)).sum::<f64>() / nf;
        v.sqrt().max(f64::MIN_POSITIVE)
    };
    let z: Vec<f64> = x.iter().map(|&v| (v - mx) / sx).collect();

    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for i in 0..n {
        let row = [1.0, z[i], z[i] * z[i]];
        for (r, rv) in row.iter().enumerate() {
            for (c, cv) in row.iter().enumerate() {
                m[r][c] += rv * cv;
            }
            b[r] += rv * y[i];
        }
    }
    let minv = invert3(&m)
        .ok_or_else(|| Error::Domain("curvature fit with degenerate design matrix".into()))?;
    let mut beta = [0.0f64; 3];
    for r in 0..3 {
        for c in 0..3 {
            beta[r] += minv[r][c] * b[c];
        }
    }
    let mut ss = 0.0;
    for i in 0..n {
        let fit = beta[0] + beta[1] * z[i] + beta[2] * z[i] * z[i];
        let r = y[i] - fit;
        ss += r * r;
    }
    let df = (n - 3) as f64;
    let sigma2 = ss / df;
    let se_c2_scaled = (sigma2 * minv[2][2]).sqrt();

    // Un-scale back to the original abscissa: y = c0 + c1 x + c2 x^2.
    let c2 = beta[2] / (sx * sx);
    let c1 = beta[1] / sx - 2.0 * beta[2] * mx / (sx * sx);
    let c0 = beta[0] - beta[1] * mx / sx + beta[2] * mx * mx / (sx * sx);
    let se_c2 = se_c2_scaled / (sx * sx);

    // An (almost) exact fit leaves only rounding noise in the residuals; the
    // t statistic is then meaningless and the curvature verdict falls back
    // to comparing the coefficient against the data scale.
    let y_scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let p = if se_c2_scaled <= 1e-10 * y_scale {
        if beta[2] > 1e-7 * y_scale {
            0.0
        } else {
            1.0
        }
    } else {
        student_t_sf(c2 / se_c2, df)
    };
    Ok(CurvatureFit { c0, c1, c2, se_c2, p_positive_curvature: p, n })
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0f64; 3]; 3];
    #[allow(clippy::needless_range_loop)] // r/c double as cofactor labels
    for r in 0..3 {
        for c in 0..3 {
            let (r1, r2) = match r {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c1, c2) = match c {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = m[c1][r1] * m[c2][r2] - m[c1][r2] * m[c2][r1];
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            out[r][c] = sign * minor * inv_det;
        }
    }
    Some(out)
}
