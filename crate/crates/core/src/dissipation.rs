//! Energy-dissipation potential and entropy-production kernel.
//!
//! `psi(r)` is the kernel-averaged kinetic-energy loss per colliding pair as
//! a function of the squared relative speed,
//!
//! ```text
//! psi(r) = r^(3/2) / 2 * int_0^1 (1 - e^2(sqrt(r) z)) z^3 dz,
//! ```
//!
//! and `phi(rho)` is the inelastic excess term in the entropy balance,
//!
//! ```text
//! phi(rho) = 2 / rho^2 * int_0^{theta^-1(rho)} (r - theta(r) theta'(r)) dr.
//! ```
//!
//! Constant restitution admits closed forms: `psi(r) = (1-e0^2)/8 r^(3/2)`
//! and `phi = (1-e0^2)/e0^2`; the general branches integrate with adaptive
//! Gauss-Legendre panels.

use crate::math::quad;
use crate::restitution::{LogGrid, RestitutionModel};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::math::real::Real;

/// Monotonicity/convexity verdict for the dissipation potential on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub monotone: bool,
    /// Adjacent pair with the smallest increment of `psi`.
    pub worst_pair: (f64, f64),
    /// Smallest increment (negative or zero when monotonicity fails).
    pub monotonicity_margin: f64,
    pub convex: bool,
    /// Consecutive triple with the smallest slope increment.
    pub worst_triple: (f64, f64, f64),
    /// Smallest normalized slope increment (below -1e-10 fails).
    pub convexity_margin: f64,
    /// Grid points the verdict was computed on.
    pub grid: Vec<f64>,
}

/// Result of the asymptotic checks on `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiAsymptotics {
    pub small_ok: bool,
    pub large_ok: bool,
    /// `(rho, phi(rho) / (2 alpha rho^gamma))` at the three smallest grid points.
    pub small_ratios: Vec<(f64, f64)>,
    /// `(rho, phi(rho) / rho^(2(m-1)))` over the largest grid decade.
    pub large_ratios: Vec<(f64, f64)>,
}

/// Energy-dissipation potential at squared relative speed `r >= 0`.
pub fn psi(model: &RestitutionModel, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("psi needs r >= 0, got {r}")));
    }
    if let RestitutionModel::Constant { e0 } = model {
        return Ok((1.0 - e0 * e0) / 8.0 * r.powf(1.5));
    }
    psi_by_quadrature(model, r)
}

/// Generic quadrature path of [`psi`], exposed so the constant-model closed
/// form can be cross-checked against it.
pub fn psi_by_quadrature(model: &RestitutionModel, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("psi needs r >= 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let sqrt_r = r.sqrt();
    let f = |z: f64| {
        let e = model.eval_e(sqrt_r * z).unwrap_or(f64::NAN);
        (1.0 - e * e) * z * z * z
    };
    // psi = r^(3/2)/2 * I with |I| <= 1/4; an absolute 1e-13 on I keeps the
    // result well inside 1e-12 * max(1, r^(3/2)).
    let scale = r.powf(1.5) / 2.0;
    let integral = quad::integrate(&f, 0.0, 1.0, 1e-13)?;
    Ok(scale * integral)
}

/// Entropy-production kernel at relative speed `rho > 0`.
pub fn phi(model: &RestitutionModel, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("phi needs rho > 0, got {rho}")));
    }
    if let RestitutionModel::Constant { e0 } = model {
        return Ok((1.0 - e0 * e0) / (e0 * e0));
    }
    let upper = model.invert_theta(rho)?;
    let f = |r: f64| {
        let theta = model.eval_theta(r).unwrap_or(f64::NAN);
        let j = match model.jacobian(r) {
            Ok(j) => j.value,
            Err(_) => f64::NAN,
        };
        r - theta * j
    };
    // The integrand is bounded by r, so the integral is at most upper^2 / 2.
    let tol = 1e-13 * (upper * upper / 2.0).max(f64::MIN_POSITIVE);
    let integral = quad::integrate(&f, 0.0, upper, tol)?;
    Ok(2.0 / (rho * rho) * integral)
}

/// Check that `psi` is strictly increasing and convex on `grid`.
pub fn verify_psi_shape(model: &RestitutionModel, grid: &LogGrid) -> Result<ShapeReport> {
    if grid.points < 64 {
        return Err(Error::Domain(format!(
            "shape verification needs a grid of >= 64 points, got {}",
            grid.points
        )));
    }
    let rs = grid.values();
    let values: Result<Vec<f64>> = rs.iter().map(|&r| psi(model, r)).collect();
    let values = values?;

    let mut monotone = true;
    let mut worst_pair = (rs[0], rs[1]);
    let mut mono_margin = f64::INFINITY;
    for i in 1..rs.len() {
        let diff = values[i] - values[i - 1];
        if diff < mono_margin {
            mono_margin = diff;
            worst_pair = (rs[i - 1], rs[i]);
        }
        if diff <= 0.0 {
            monotone = false;
        }
    }

    // Convexity through divided differences on the non-uniform grid;
    // -1e-10 (relative to the local slope scale) absorbs roundoff.
    let mut convex = true;
    let mut worst_triple = (rs[0], rs[1], rs[2]);
    let mut conv_margin = f64::INFINITY;
    for i in 2..rs.len() {
        let s1 = (values[i - 1] - values[i - 2]) / (rs[i - 1] - rs[i - 2]);
        let s2 = (values[i] - values[i - 1]) / (rs[i] - rs[i - 1]);
        let scale = s1.abs().max(s2.abs()).max(1.0);
        let margin = (s2 - s1) / scale;
        if margin < conv_margin {
            conv_margin = margin;
            worst_triple = (rs[i - 2], rs[i - 1], rs[i]);
        }
        if margin < -1e-10 {
            convex = false;
        }
    }

    Ok(ShapeReport {
        monotone,
        worst_pair,
        monotonicity_margin: mono_margin,
        convex,
        worst_triple,
        convexity_margin: conv_margin,
        grid: rs,
    })
}

/// Verify the small- and large-argument behaviour of `phi`.
///
/// Small: `phi(rho) / (2 alpha rho^gamma)` must sit in the 20% band
/// `[0.8, 1.2]` at the three smallest grid points (skipped when `gamma = 0`,
/// where the limit statement does not apply; the constant case is covered by
/// its closed form). Large: the growth `phi(rho) / rho^(2(m-1))` must not
/// trend upwards over the largest grid decade (log-log slope <= 0.1).
pub fn phi_asymptotics(
    model: &RestitutionModel,
    alpha: f64,
    gamma: f64,
    m: f64,
    grid: &LogGrid,
) -> Result<PhiAsymptotics> {
    let rs = grid.values();
    let mut small_ratios = Vec::new();
    for &rho in rs.iter().take(3) {
        let ratio = phi(model, rho)? / (2.0 * alpha * rho.powf(gamma));
        small_ratios.push((rho, ratio));
    }
    let small_ok = gamma == 0.0
        || small_ratios.iter().all(|&(_, ratio)| (0.8..=1.2).contains(&ratio));

    let rho_lo = grid.max / 10.0;
    let mut large_ratios = Vec::new();
    for i in 0..8 {
        let rho = rho_lo * 10f64.powf(i as f64 / 7.0);
        let ratio = phi(model, rho)? / rho.powf(2.0 * (m - 1.0));
        large_ratios.push((rho, ratio));
    }
    let xs: Vec<f64> = large_ratios.iter().map(|&(rho, _)| rho.ln()).collect();
    let ys: Vec<f64> = large_ratios.iter().map(|&(_, ratio)| ratio.max(f64::MIN_POSITIVE).ln()).collect();
    let slope = crate::math::stats::fit_line(&xs, &ys)?.slope;
    let large_ok = slope <= 0.1;

    Ok(PhiAsymptotics { small_ok, large_ok, small_ratios, large_ratios })
}
