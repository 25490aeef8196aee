//! Restitution-coefficient models and the impact-speed map `theta`.
//!
//! A collision with impact speed `r = |u . n|` is damped by the coefficient
//! of normal restitution `e(r)`. Three models are supported:
//!
//! - `Constant`: `e(r) = e0`;
//! - `PowerLaw`: `e(r) = max(1 - alpha r^gamma, e_floor)`, a clamped version
//!   of the prescribed small-impact behaviour (`e_floor = 0` disables the
//!   clamp, in which case positivity can fail and the assumption report
//!   says so);
//! - `Viscoelastic`: `e(r)` solves `e + a r^(1/5) e^(3/5) = 1`, the implicit
//!   law for viscoelastic hard spheres.
//!
//! The map `theta(r) = r e(r)` carries the collision geometry: its strict
//! monotonicity makes the collision transformation invertible and its
//! derivative is the transformation Jacobian. Everything downstream
//! (dissipation kernels, entropy production, DSMC) evaluates these
//! functions, so they are kept pure and allocation free.

use crate::dissipation;
use crate::math::roots;
use crate::math::stats::fit_line;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::math::real::Real;

/// Default positivity clamp for the power-law model.
pub const DEFAULT_E_FLOOR: f64 = 0.05;

/// Residual tolerance of the implicit viscoelastic solve.
const VISCO_FTOL: f64 = 1e-14;

/// A coefficient-of-normal-restitution model.
///
/// ```
/// use granular_core::restitution::RestitutionModel;
///
/// let model = RestitutionModel::viscoelastic(1.0)?;
/// let e = model.eval_e(1.0)?;
/// // e solves the implicit law exactly (residual at solver precision).
/// assert!((e + e.powf(0.6) - 1.0).abs() < 1e-12);
/// # Ok::<(), granular_core::Error>(())
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RestitutionModel {
    /// `e(r) = e0`, `e0` in (0, 1].
    Constant { e0: f64 },
    /// `e(r) = max(1 - alpha r^gamma, e_floor)`.
    PowerLaw { alpha: f64, gamma: f64, e_floor: f64 },
    /// `e + a r^(1/5) e^(3/5) = 1`.
    Viscoelastic { a: f64 },
}

/// Jacobian of the collision transformation, `J(r) = theta'(r)`.
///
/// `one_sided` flags evaluation at a clamp kink of the power-law model,
/// where only a one-sided derivative exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub value: f64,
    pub one_sided: bool,
}

/// Log-spaced evaluation grid for model validity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid { min: 1e-8, max: 1e8, points: 2048 }
    }
}

impl LogGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<LogGrid> {
        if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) {
            return Err(Error::Domain(format!("invalid grid bounds [{min}, {max}]")));
        }
        if points < 2 {
            return Err(Error::Domain("grid needs at least 2 points".into()));
        }
        Ok(LogGrid { min, max, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let lmin = self.min.ln();
        let lmax = self.max.ln();
        let n = self.points;
        (0..n)
            .map(|i| (lmin + (lmax - lmin) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    pub fn decades(&self) -> f64 {
        (self.max / self.min).log10()
    }
}

/// Worst-margin verdict for one model assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionItem {
    pub pass: bool,
    /// Grid point with the worst margin.
    pub witness_r: f64,
    /// Signed margin at the witness; negative means the assumption fails.
    pub margin: f64,
}

/// Numerical check of the model assumptions on a grid.
///
/// The four `hyp1` items are: (1) `e` maps into (0, 1]; (2) `theta` is
/// strictly increasing; (3) `e` stays below 1 at large impact speeds;
/// (4) the dissipation potential is strictly increasing and convex. The
/// growth diagnostics are fitted: `gamma_detected` from the small-impact
/// behaviour of `1 - e`, (`m_detected`, `c_large`) from the large-argument
/// growth of `theta^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub hyp1: [AssumptionItem; 4],
    pub gamma_detected: f64,
    pub m_detected: f64,
    pub c_large: f64,
    /// `sup (1 - e(r)) / r^gamma` over the grid at the model's nominal gamma.
    pub ell_gamma: f64,
}

impl AssumptionReport {
    pub fn hyp1_pass(&self) -> bool {
        self.hyp1.iter().all(|i| i.pass)
    }
}

impl RestitutionModel {
    pub fn constant(e0: f64) -> Result<RestitutionModel> {
        if !(e0 > 0.0 && e0 <= 1.0) {
            return Err(Error::Config(format!("constant restitution needs e0 in (0, 1], got {e0}")));
        }
        Ok(RestitutionModel::Constant { e0 })
    }

    pub fn power_law(alpha: f64, gamma: f64, e_floor: f64) -> Result<RestitutionModel> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("power-law restitution needs alpha > 0, got {alpha}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("power-law restitution needs gamma >= 0, got {gamma}")));
        }
        if !(0.0..1.0).contains(&e_floor) {
            return Err(Error::Config(format!("e_floor must lie in [0, 1), got {e_floor}")));
        }
        Ok(RestitutionModel::PowerLaw { alpha, gamma, e_floor })
    }

    pub fn viscoelastic(a: f64) -> Result<RestitutionModel> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Config(format!("viscoelastic restitution needs a > 0, got {a}")));
        }
        Ok(RestitutionModel::Viscoelastic { a })
    }

    /// Exponent of the small-impact inelasticity `1 - e(r) ~ alpha r^gamma`.
    pub fn nominal_gamma(&self) -> f64 {
        match self {
            RestitutionModel::Constant { .. } => 0.0,
            RestitutionModel::PowerLaw { gamma, .. } => *gamma,
            RestitutionModel::Viscoelastic { .. } => 0.2,
        }
    }

    /// Prefactor of the small-impact inelasticity (equals `ell_gamma` for
    /// these models).
    pub fn nominal_alpha(&self) -> f64 {
        match self {
            RestitutionModel::Constant { e0 } => 1.0 - e0,
            RestitutionModel::PowerLaw { alpha, .. } => *alpha,
            RestitutionModel::Viscoelastic { a } => *a,
        }
    }

    /// Evaluate the restitution coefficient at impact speed `r >= 0`.
    pub fn eval_e(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("impact speed must be finite and >= 0, got {r}")));
        }
        Ok(match self {
            RestitutionModel::Constant { e0 } => *e0,
            RestitutionModel::PowerLaw { alpha, gamma, e_floor } => {
                (1.0 - alpha * r.powf(*gamma)).max(*e_floor)
            }
            RestitutionModel::Viscoelastic { a } => visco_e(*a, r)?,
        })
    }

    /// `theta(r) = r e(r)`.
    pub fn eval_theta(&self, r: f64) -> Result<f64> {
        Ok(r * self.eval_e(r)?)
    }

    /// Invert `theta`: find `r` with `theta(r) = y`, to
    /// `|theta(r) - y| <= 1e-12 max(1, y)`.
    ///
    /// Relies on `theta` being strictly increasing; a model that cannot
    /// bracket `y` (non-monotone or bounded `theta`) yields an invariant
    /// violation.
    pub fn invert_theta(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::Domain(format!("theta inverse needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if let RestitutionModel::Constant { e0 } = self {
            return Ok(y / e0);
        }
        // theta(r) <= r, so r = y is a lower bracket end.
        let lo = y;
        let mut hi = y;
        let mut theta_hi = self.eval_theta(hi)?;
        let mut expansions = 0;
        while theta_hi < y {
            hi *= 2.0;
            if !hi.is_finite() || expansions > 1100 {
                return Err(Error::Invariant(format!(
                    "failed to bracket theta^-1({y:e}); theta may not be increasing or is bounded"
                )));
            }
            expansions += 1;
            theta_hi = self.eval_theta(hi)?;
        }
        if theta_hi == y {
            return Ok(hi);
        }
        let ftol = 0.5e-12 * y.max(1.0);
        let f = |r: f64| self.eval_theta(r).unwrap_or(f64::NAN) - y;
        let df = |r: f64| match self.jacobian(r) {
            Ok(j) if j.value > 0.0 => j.value,
            _ => 0.0, // force a bisection step
        };
        roots::newton_bisect(f, df, lo, hi, ftol, 200)
    }

    /// Jacobian of the collision transformation at `r > 0`.
    pub fn jacobian(&self, r: f64) -> Result<Jacobian> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("jacobian needs r > 0, got {r}")));
        }
        Ok(match self {
            RestitutionModel::Constant { e0 } => Jacobian { value: *e0, one_sided: false },
            RestitutionModel::PowerLaw { alpha, gamma, e_floor } => {
                // Clamp kink where 1 - alpha r^gamma crosses e_floor.
                let r_clamp = ((1.0 - e_floor) / alpha).powf(1.0 / gamma.max(f64::MIN_POSITIVE));
                let at_kink =
                    *gamma > 0.0 && (r - r_clamp).abs() <= 1e-12 * r_clamp.max(1.0);
                if 1.0 - alpha * r.powf(*gamma) > *e_floor {
                    Jacobian { value: 1.0 - alpha * (1.0 + gamma) * r.powf(*gamma), one_sided: at_kink }
                } else {
                    Jacobian { value: *e_floor, one_sided: at_kink }
                }
            }
            RestitutionModel::Viscoelastic { a } => {
                let e = visco_e(*a, r)?;
                let denom = 1.0 + 0.6 * a * r.powf(0.2) * e.powf(-0.4);
                let value = if denom.abs() < 1e-14 {
                    // Degenerate implicit derivative; central difference fallback.
                    let h = 1e-6 * r.max(1.0);
                    let lo = (r - h).max(0.0);
                    (self.eval_theta(r + h)? - self.eval_theta(lo)?) / (r + h - lo)
                } else {
                    let e_prime = -(a / 5.0) * r.powf(-0.8) * e.powf(0.6) / denom;
                    e + r * e_prime
                };
                Jacobian { value, one_sided: false }
            }
        })
    }

    /// Grid estimate of `ell_gamma = sup (1 - e(r)) / r^gamma`.
    ///
    /// `gamma = 0` is only meaningful for the constant model (where the sup
    /// is `1 - e0`); the grid must span at least six decades around `r = 1`.
    pub fn ell_gamma(&self, gamma: f64, grid: &LogGrid) -> Result<f64> {
        if gamma < 0.0 || (gamma == 0.0 && !matches!(self, RestitutionModel::Constant { .. })) {
            return Err(Error::Domain(format!(
                "ell_gamma needs gamma > 0 (gamma = 0 only for constant models), got {gamma}"
            )));
        }
        if grid.decades() < 6.0 || grid.min > 1.0 || grid.max < 1.0 {
            return Err(Error::Domain(
                "ell_gamma grid must span >= 6 decades around r = 1".into(),
            ));
        }
        let mut sup = 0.0f64;
        for r in grid.values() {
            let v = (1.0 - self.eval_e(r)?) / r.powf(gamma);
            if v > sup {
                sup = v;
            }
        }
        Ok(sup)
    }

    /// Evaluate the model assumptions on `grid`.
    pub fn check_assumptions(&self, grid: &LogGrid) -> Result<AssumptionReport> {
        let rs = grid.values();
        let es: Result<Vec<f64>> = rs.iter().map(|&r| self.eval_e(r)).collect();
        let es = es?;
        let thetas: Vec<f64> = rs.iter().zip(&es).map(|(&r, &e)| r * e).collect();

        // (1) e maps into (0, 1]: the margin is distance to the nearer bound
        // (zero margin at e = 1 still passes, the interval is closed there).
        let mut item1 = AssumptionItem { pass: true, witness_r: rs[0], margin: f64::INFINITY };
        for (&r, &e) in rs.iter().zip(&es) {
            let margin = e.min(1.0 + f64::EPSILON - e);
            if margin < item1.margin {
                item1 = AssumptionItem { pass: item1.pass && e > 0.0 && e <= 1.0, witness_r: r, margin };
            } else if !(e > 0.0 && e <= 1.0) {
                item1.pass = false;
            }
        }

        // (2) theta strictly increasing: successive differences.
        let mut item2 = AssumptionItem { pass: true, witness_r: rs[0], margin: f64::INFINITY };
        for i in 1..rs.len() {
            let diff = thetas[i] - thetas[i - 1];
            if diff < item2.margin {
                item2 = AssumptionItem { pass: diff > 0.0, witness_r: rs[i], margin: diff };
            }
        }

        // (3) limsup e(r) < 1: examined over the last decade of the grid.
        let r_lo = grid.max / 10.0;
        let mut e_sup = 0.0f64;
        let mut witness = grid.max;
        for (&r, &e) in rs.iter().zip(&es) {
            if r >= r_lo && e > e_sup {
                e_sup = e;
                witness = r;
            }
        }
        let item3 = AssumptionItem { pass: e_sup < 1.0, witness_r: witness, margin: 1.0 - e_sup };

        // (4) Psi strictly increasing and convex (delegated).
        let shape = dissipation::verify_psi_shape(self, grid)?;
        let item4 = AssumptionItem {
            pass: shape.monotone && shape.convex,
            witness_r: if shape.monotone { shape.worst_triple.0 } else { shape.worst_pair.0 },
            margin: if shape.monotone { shape.convexity_margin } else { shape.monotonicity_margin },
        };

        // Detected small-impact exponent: log-log slope of 1 - e over the
        // smallest decade (zero when the model is elastic there).
        let small_hi = grid.min * 10.0;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (&r, &e) in rs.iter().zip(&es) {
            if r <= small_hi && 1.0 - e > 0.0 {
                xs.push(r.ln());
                ys.push((1.0 - e).ln());
            }
        }
        let gamma_detected = if xs.len() >= 2 {
            let slope = fit_line(&xs, &ys)?.slope;
            if slope.abs() < 1e-6 {
                0.0
            } else {
                slope
            }
        } else {
            0.0
        };

        // Detected growth of theta^-1 over the largest decade of y values.
        // Skipped (NaN) when theta is not invertible on the grid.
        let y_max = self.eval_theta(grid.max)?;
        let (m_detected, c_large) = if item2.pass && y_max > 0.0 {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for i in 0..32 {
                let y = y_max / 10f64.powf(1.0 - i as f64 / 31.0);
                let r = self.invert_theta(y)?;
                xs.push(y.ln());
                ys.push(r.ln());
            }
            let m = fit_line(&xs, &ys)?.slope;
            let mut c = 0.0f64;
            for (x, y) in xs.iter().zip(&ys) {
                c = c.max((y - m * x).exp());
            }
            (m, c)
        } else {
            (f64::NAN, f64::NAN)
        };

        let nominal_gamma = self.nominal_gamma();
        let ell = if nominal_gamma == 0.0 {
            match self {
                RestitutionModel::Constant { e0 } => 1.0 - e0,
                _ => f64::NAN,
            }
        } else {
            self.ell_gamma(nominal_gamma, grid)?
        };

        Ok(AssumptionReport {
            hyp1: [item1, item2, item3, item4],
            gamma_detected,
            m_detected,
            c_large,
            ell_gamma: ell,
        })
    }
}

/// Solve `e + a r^(1/5) e^(3/5) = 1` for `e` in (0, 1].
///
/// Substituting `y = e^(1/5)` turns the equation into the polynomial
/// `y^5 + a r^(1/5) y^3 - 1 = 0`, strictly increasing in `y` on [0, 1], so
/// the root is unique and a bracketed Newton converges without fractional
/// powers of the unknown.
fn visco_e(a: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(1.0);
    }
    let b = a * r.powf(0.2);
    let g = |y: f64| y * y * y * (y * y + b) - 1.0;
    let dg = |y: f64| y * y * (5.0 * y * y + 3.0 * b);
    let y = roots::newton_bisect(g, dg, 0.0, 1.0, VISCO_FTOL, 200)?;
    Ok(y.powi(5))
}
