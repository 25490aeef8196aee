//! Embedded Dormand-Prince 5(4) integrator with adaptive step control.

use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use super::real::Real;

/// Tolerances and limits for [`solve`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-9, atol: 1e-12, max_steps: 50_000_000 }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = rhs(t, y)` from `t0`, sampling the solution at the
/// strictly increasing `t_out` times (all >= t0). Returns one state vector
/// per output time.
pub fn solve<F>(
    mut rhs: F,
    t0: f64,
    y0: &[f64],
    t_out: &[f64],
    opts: OdeOptions,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y0.len();
    let mut outputs = Vec::with_capacity(t_out.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: [Vec<f64>; 7] = core::array::from_fn(|_| vec![0.0; dim]);
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    rhs(t, &y, &mut k[0])?;
    let t_final = match t_out.last() {
        Some(&tf) => tf,
        None => return Ok(outputs),
    };
    let mut h = initial_step(t0, t_final, &y, &k[0], opts);
    let mut out_idx = 0;
    while out_idx < t_out.len() && t_out[out_idx] <= t {
        outputs.push(y.clone());
        out_idx += 1;
    }

    let mut steps = 0usize;
    while out_idx < t_out.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Numeric(format!("ODE step limit exceeded at t = {t:.6e}")));
        }
        let target = t_out[out_idx];
        let mut h_try = h.min(target - t);
        if h_try <= f64::MIN_POSITIVE * t.abs().max(1.0) * 4.0 {
            h_try = f64::MIN_POSITIVE * t.abs().max(1.0) * 4.0;
        }

        // stages 2..7 (k[0] is fresh from FSAL or the initial evaluation)
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s - 1][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                y_stage[i] = y[i] + h_try * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            rhs(t + C[s] * h_try, &y_stage, &mut tail[0])?;
        }
        // 5th-order solution and embedded error
        let mut err_norm_sq = 0.0;
        for i in 0..dim {
            let mut y5 = 0.0;
            let mut y4 = 0.0;
            for (j, kj) in k.iter().enumerate() {
                y5 += B5[j] * kj[i];
                y4 += B4[j] * kj[i];
            }
            y_new[i] = y[i] + h_try * y5;
            let err = h_try * (y5 - y4);
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_norm_sq += (err / scale) * (err / scale);
        }
        let err_norm = (err_norm_sq / dim as f64).sqrt();

        if err_norm <= 1.0 {
            t += h_try;
            core::mem::swap(&mut y, &mut y_new);
            // FSAL: the 7th stage is the derivative at the accepted point.
            let k6 = k[6].clone();
            k[0].copy_from_slice(&k6);
            while out_idx < t_out.len() && t_out[out_idx] <= t + 1e-14 * t.abs().max(1.0) {
                outputs.push(y.clone());
                out_idx += 1;
            }
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h_try * factor).min((t_final - t).abs().max(f64::MIN_POSITIVE));
        if h < 1e-14 * t.abs().max(1.0) && err_norm > 1.0 {
            return Err(Error::Numeric(format!("ODE step size underflow at t = {t:.6e}")));
        }
    }
    Ok(outputs)
}

fn initial_step(t0: f64, t_final: f64, y: &[f64], dy: &[f64], opts: OdeOptions) -> f64 {
    let span = (t_final - t0).abs().max(f64::MIN_POSITIVE);
    let y_scale: f64 = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(opts.atol);
    let dy_scale: f64 = dy.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if dy_scale > 0.0 {
        (0.01 * y_scale / dy_scale).min(span)
    } else {
        (span * 1e-3).max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let t_out: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let sol = solve(
            |_, y, dy| {
                dy[0] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0],
            &t_out,
            OdeOptions::default(),
        )
        .unwrap();
        for (i, y) in sol.iter().enumerate() {
            // Per-step rtol 1e-9 accumulates over the integration.
            let exact = (-(t_out[i])).exp();
            assert!((y[0] - exact).abs() <= 1e-7 * exact + 1e-12, "t={} {}", t_out[i], y[0]);
        }
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let sol = solve(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            0.0,
            &[1.0, 0.0],
            &[50.0],
            OdeOptions::default(),
        )
        .unwrap();
        let e = sol[0][0] * sol[0][0] + sol[0][1] * sol[0][1];
        assert!((e - 1.0).abs() < 1e-7);
    }

    #[test]
    fn rhs_error_propagates() {
        let r = solve(
            |_, _, _| Err(Error::Numeric("boom".into())),
            0.0,
            &[1.0],
            &[1.0],
            OdeOptions::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn output_at_t0_is_initial_state() {
        let sol = solve(
            |_, y, dy| {
                dy[0] = y[0];
                Ok(())
            },
            0.0,
            &[2.5],
            &[0.0, 1.0],
            OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(sol[0][0], 2.5);
        assert!((sol[1][0] - 2.5 * 1.0f64.exp()).abs() < 1e-8);
    }
}
