//! Cooling-law analysis: decay fits, sandwich bounds, moment-scaling and
//! entropy-growth verdicts, and the experiment matrix.
//!
//! The generalized cooling law says the granular temperature behaves like
//! `E(t) ~ (1 + t)^(-2/(1+gamma))`, with `gamma` the small-impact exponent
//! of the restitution model (0 for constant restitution, 1/5 for
//! viscoelastic spheres). Each check here turns one testable consequence of
//! that law into a pass/fail verdict over a recorded time series.

use crate::dsmc::{self, SimulationConfig};
use crate::math::stats::{fit_line, fit_quadratic};
use crate::moments;
use crate::restitution::RestitutionModel;
use crate::timeseries::{Column, TimeSeries};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

#[allow(unused_imports)]
use crate::math::real::Real;

/// Result of a power-law fit `value ~ prefactor (1 + t)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    /// RMS of the log-residuals.
    pub residual: f64,
    pub n_points: usize,
}

/// Default fit window: the last 60% of the `log(1 + t)` range, which
/// excludes the initial transient.
pub fn default_window(series: &TimeSeries) -> (f64, f64) {
    let t_end = series.rows.last().map(|r| r.t).unwrap_or(0.0);
    let lo = (1.0 + t_end).powf(0.4) - 1.0;
    (lo, t_end)
}

/// Least squares of `log(value)` on `log(1 + t)` over `window` (inclusive).
pub fn fit_decay(series: &TimeSeries, column: Column, window: (f64, f64)) -> Result<DecayFit> {
    let values = series.column(column);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, &v) in series.rows.iter().zip(&values) {
        if row.t < window.0 || row.t > window.1 {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "fit column must be strictly positive in the window (t = {}, value = {v})",
                row.t
            )));
        }
        xs.push((1.0 + row.t).ln());
        ys.push(v.ln());
    }
    if xs.len() < 8 {
        return Err(Error::Domain(format!(
            "decay fit needs >= 8 points in the window, got {}",
            xs.len()
        )));
    }
    let line = fit_line(&xs, &ys)?;
    Ok(DecayFit {
        exponent: line.slope,
        prefactor: line.intercept.exp(),
        window,
        residual: line.residual_rms,
        n_points: xs.len(),
    })
}

/// Sandwich constants for `E(t) (1 + t)^(2/(1+gamma))` over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichCheck {
    pub c_hat: f64,
    pub big_c_hat: f64,
    pub ratio_bound: f64,
    pub pass: bool,
}

/// Compensate the energy by `(1 + t)^(2/(1+gamma))` over the default window
/// and verify that min and max stay within `ratio_bound` of each other.
/// The series must cover at least two decades of `1 + t`.
pub fn check_sandwich(series: &TimeSeries, gamma: f64, ratio_bound: f64) -> Result<SandwichCheck> {
    let t_end = series.rows.last().map(|r| r.t).unwrap_or(0.0);
    if (1.0 + t_end).log10() < 2.0 {
        return Err(Error::Domain(
            "sandwich check needs at least two decades of 1 + t".into(),
        ));
    }
    let window = default_window(series);
    let exponent = 2.0 / (1.0 + gamma);
    let mut c_hat = f64::INFINITY;
    let mut big_c_hat = 0.0f64;
    for row in &series.rows {
        if row.t < window.0 || row.t > window.1 {
            continue;
        }
        let compensated = row.energy * (1.0 + row.t).powf(exponent);
        c_hat = c_hat.min(compensated);
        big_c_hat = big_c_hat.max(compensated);
    }
    let pass = c_hat > 0.0
        && c_hat.is_finite()
        && big_c_hat.is_finite()
        && big_c_hat / c_hat <= ratio_bound;
    Ok(SandwichCheck { c_hat, big_c_hat, ratio_bound, pass })
}

/// Scaling check `m_p(t) <= K E(t)^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentScalingCheck {
    pub k_hat: f64,
    /// Relative increase of the running max over the last decade of `1 + t`.
    pub last_decade_increase: f64,
    pub pass: bool,
}

/// Track the running max of `m_p / E^p`; it must stabilize (at most 20%
/// growth over the last decade of `1 + t`).
pub fn check_moment_scaling(series: &TimeSeries, p: f64) -> Result<MomentScalingCheck> {
    let idx = series
        .moment_index(p)
        .ok_or_else(|| Error::Domain(format!("series does not record m_{p}")))?;
    let t_end = series.rows.last().map(|r| r.t).unwrap_or(0.0);
    let decade_start = (1.0 + t_end) / 10.0 - 1.0;
    let mut running_max = 0.0f64;
    let mut max_at_decade_start: Option<f64> = None;
    for row in &series.rows {
        if !(row.energy > 0.0) {
            return Err(Error::Domain(format!("energy not positive at t = {}", row.t)));
        }
        let ratio = row.moments[idx] / row.energy.powf(p);
        if row.t >= decade_start && max_at_decade_start.is_none() {
            max_at_decade_start = Some(running_max.max(ratio));
        }
        running_max = running_max.max(ratio);
    }
    let base = max_at_decade_start.unwrap_or(running_max);
    let increase = if base > 0.0 { running_max / base - 1.0 } else { f64::INFINITY };
    Ok(MomentScalingCheck { k_hat: running_max, last_decade_increase: increase, pass: increase <= 0.2 })
}

/// Entropy-growth verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyGrowthCheck {
    /// Slope of `h_signed` against `log(1 + t)`.
    pub slope: f64,
    /// Quadratic coefficient in `log(1 + t)` and its one-sided p-value.
    pub curvature: f64,
    pub p_positive_curvature: f64,
    pub pass: bool,
}

/// Regress the signed entropy on `log(1 + t)` over the default late window.
/// Logarithmic growth means no statistically significant positive curvature
/// (5% level, one-sided).
pub fn check_entropy_growth(series: &TimeSeries) -> Result<EntropyGrowthCheck> {
    check_entropy_growth_in(series, default_window(series))
}

/// [`check_entropy_growth`] over an explicit window. The window matters:
/// before the transient dies out the slope of the entropy against
/// `log(1 + t)` is still ramping up, which reads as positive curvature even
/// though the growth is logarithmic.
pub fn check_entropy_growth_in(
    series: &TimeSeries,
    window: (f64, f64),
) -> Result<EntropyGrowthCheck> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in &series.rows {
        if row.entropy.is_finite() && row.t >= window.0 && row.t <= window.1 {
            xs.push((1.0 + row.t).ln());
            ys.push(row.entropy);
        }
    }
    if xs.len() < 8 {
        return Err(Error::Domain(format!(
            "entropy growth check needs >= 8 entropy samples, got {}",
            xs.len()
        )));
    }
    // Nominally two decades of 1 + t; the 10% slack absorbs window edges
    // landing between log-spaced samples.
    let span = xs.last().unwrap() - xs[0];
    if span < 1.8 * core::f64::consts::LN_10 {
        return Err(Error::Domain(
            "entropy growth check needs >= 2 decades of 1 + t".into(),
        ));
    }
    let line = fit_line(&xs, &ys)?;
    let quad = fit_quadratic(&xs, &ys)?;
    Ok(EntropyGrowthCheck {
        slope: line.slope,
        curvature: quad.c2,
        p_positive_curvature: quad.p_positive_curvature,
        pass: quad.p_positive_curvature > 0.05,
    })
}

/// Integrated cooling-law verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedHaffCheck {
    /// Smallest `I(t) / log(1 + t)` over the last decade,
    /// `I(t) = int_0^t sqrt(E)`.
    pub inf_ratio: f64,
    /// Max/min of the ratio over the last decade.
    pub stability: f64,
    pub pass: bool,
}

/// The thermal-velocity integral `I(t) = int_0^t sqrt(E) ds` must grow at
/// least logarithmically: its ratio to `log(1 + t)` stays positive and
/// stable (within 20%) over the last decade of `1 + t`.
pub fn check_integrated_haff(series: &TimeSeries) -> Result<IntegratedHaffCheck> {
    if series.rows.len() < 8 {
        return Err(Error::Domain("integrated check needs >= 8 rows".into()));
    }
    let t_end = series.rows.last().unwrap().t;
    if (1.0 + t_end).log10() < 2.0 {
        return Err(Error::Domain(
            "integrated check needs at least two decades of 1 + t".into(),
        ));
    }
    let decade_start = (1.0 + t_end) / 10.0 - 1.0;
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut inf_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    for row in &series.rows {
        if !(row.energy >= 0.0) {
            return Err(Error::Domain(format!("negative energy at t = {}", row.t)));
        }
        let sqrt_e = row.energy.sqrt();
        if let Some((t0, s0)) = prev {
            integral += 0.5 * (s0 + sqrt_e) * (row.t - t0);
        }
        prev = Some((row.t, sqrt_e));
        if row.t >= decade_start && row.t > 0.0 {
            let ratio = integral / (1.0 + row.t).ln();
            inf_ratio = inf_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
        }
    }
    let stability = if inf_ratio > 0.0 { max_ratio / inf_ratio } else { f64::INFINITY };
    Ok(IntegratedHaffCheck { inf_ratio, stability, pass: inf_ratio > 0.0 && stability <= 1.2 })
}

/// One run of the experiment matrix.
#[derive(Debug, Clone)]
pub struct MatrixEntry {
    pub run_id: String,
    pub config: SimulationConfig,
}

/// Summary row of one matrix run, in the summary CSV column order.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub run_id: String,
    pub model: String,
    pub gamma: f64,
    pub theory_exp: f64,
    pub fitted_exp: f64,
    pub residual: f64,
    pub c_hat: f64,
    pub big_c_hat: f64,
    pub threshold_verdict: String,
    pub entropy_slope: f64,
}

/// Successful matrix run: both trajectories plus the analysis summary.
#[derive(Debug)]
pub struct MatrixSuccess {
    pub dsmc: TimeSeries,
    pub meanfield: TimeSeries,
    pub summary: SummaryRow,
}

/// Matrix outcome per entry; failures carry the error and do not stop the
/// other runs.
#[derive(Debug)]
pub struct MatrixRun {
    pub run_id: String,
    pub result: Result<MatrixSuccess>,
}

fn model_label(model: &RestitutionModel) -> String {
    match model {
        RestitutionModel::Constant { e0 } => format!("constant(e0={e0})"),
        RestitutionModel::PowerLaw { alpha, gamma, e_floor } => {
            format!("power-law(alpha={alpha},gamma={gamma},e_floor={e_floor})")
        }
        RestitutionModel::Viscoelastic { a } => format!("viscoelastic(a={a})"),
    }
}

/// Threshold verdict for a run: constant models compare against the
/// critical restitution, impact-dependent models compare `ell_gamma`
/// against the data-driven `ell_0`.
fn threshold_verdict(model: &RestitutionModel, series: &TimeSeries) -> String {
    match model {
        RestitutionModel::Constant { e0 } => {
            let critical = moments::constant_threshold().critical_e;
            let side = if moments::satisfies_small_condition(*e0) { "above" } else { "below" };
            format!("e={e0} {side} critical~{critical:.3}")
        }
        _ => {
            let gamma = model.nominal_gamma();
            let ell = model.nominal_alpha();
            let verdict = estimate_ell0(series, gamma)
                .map(|ell0| {
                    let side = if ell < ell0 { "below" } else { "above" };
                    format!("ell={ell:.3} {side} ell0={ell0:.3e}")
                })
                .unwrap_or_else(|_| format!("ell={ell:.3} (ell0 unavailable)"));
            verdict
        }
    }
}

/// Estimate `ell_0` from a run: `A = sup_t m_(2 gamma)^(1/3)` past the
/// first decade and `rho_t0 = m_(3/2)(t0) / E(t0)^(3/2)` at the first
/// recorded time past zero.
fn estimate_ell0(series: &TimeSeries, gamma: f64) -> Result<f64> {
    let idx_2g = series
        .moment_index(2.0 * gamma)
        .ok_or_else(|| Error::Domain(format!("series does not record m_{}", 2.0 * gamma)))?;
    let idx_32 = series
        .moment_index(1.5)
        .ok_or_else(|| Error::Domain("series does not record m_1.5".into()))?;
    let mut a_bound = 0.0f64;
    let mut rho_t0 = None;
    for row in &series.rows {
        if row.t > 0.0 {
            a_bound = a_bound.max(row.moments[idx_2g].cbrt());
            if rho_t0.is_none() {
                rho_t0 = Some(row.moments[idx_32] / row.energy.powf(1.5));
            }
        }
    }
    let rho_t0 = rho_t0.ok_or_else(|| Error::Domain("no rows past t = 0".into()))?;
    Ok(moments::ell0_threshold(gamma, a_bound, rho_t0)?
        .ell0
        .expect("ell0 present for gamma > 0"))
}

/// The matrix fit window: the last two decades of `1 + t` (deep enough into
/// the asymptotic regime for the fitted exponents to be meaningful).
pub fn late_window(series: &TimeSeries) -> (f64, f64) {
    let t_end = series.rows.last().map(|r| r.t).unwrap_or(0.0);
    (((1.0 + t_end) / 100.0 - 1.0).max(0.0), t_end)
}

/// Run one matrix entry: particle run, mean-field companion, analysis.
pub fn run_matrix_entry(entry: &MatrixEntry) -> Result<MatrixSuccess> {
    let result = dsmc::run(&entry.config)?;
    if let Some(err) = result.aborted {
        return Err(err);
    }
    let series = result.series;
    let e0 = series
        .rows
        .first()
        .map(|r| r.energy)
        .ok_or_else(|| Error::Numeric("empty run".into()))?;
    let meanfield =
        moments::integrate_meanfield_energy(&entry.config.model, e0, entry.config.t_end)?;

    let gamma = entry.config.model.nominal_gamma();
    let window = late_window(&series);
    let fit = fit_decay(&series, Column::Energy, window)?;
    let sandwich = check_sandwich(&series, gamma, 10.0)?;
    let entropy_slope = check_entropy_growth(&series).map(|c| c.slope).unwrap_or(f64::NAN);

    let summary = SummaryRow {
        run_id: entry.run_id.clone(),
        model: model_label(&entry.config.model),
        gamma,
        theory_exp: -2.0 / (1.0 + gamma),
        fitted_exp: fit.exponent,
        residual: fit.residual,
        c_hat: sandwich.c_hat,
        big_c_hat: sandwich.big_c_hat,
        threshold_verdict: threshold_verdict(&entry.config.model, &series),
        entropy_slope,
    };
    Ok(MatrixSuccess { dsmc: series, meanfield, summary })
}

/// Run every entry, collecting per-run outcomes; failures are recorded and
/// the matrix continues.
pub fn experiment_matrix(entries: &[MatrixEntry]) -> Vec<MatrixRun> {
    entries
        .iter()
        .map(|entry| {
            let result = run_matrix_entry(entry);
            if let Err(err) = &result {
                log::warn!("matrix run {} failed: {err}", entry.run_id);
            }
            MatrixRun { run_id: entry.run_id.clone(), result }
        })
        .collect()
}

/// The standard model sweep: constant restitution over
/// `{0.3, 0.5, 0.8, 0.9, 0.95}` and viscoelastic over `a in {0.5, 1, 2}`.
pub fn default_matrix(base: &SimulationConfig) -> Vec<MatrixEntry> {
    let mut entries = Vec::new();
    for &e0 in &[0.3, 0.5, 0.8, 0.9, 0.95] {
        let mut config = base.clone();
        config.model = RestitutionModel::Constant { e0 };
        entries.push(MatrixEntry { run_id: format!("constant_e{e0}"), config });
    }
    for &a in &[0.5, 1.0, 2.0] {
        let mut config = base.clone();
        config.model = RestitutionModel::Viscoelastic { a };
        // ell0 estimation needs m_(2 gamma) = m_0.4 and m_1.5.
        if config.moment_ps.iter().all(|&p| (p - 0.4).abs() > 1e-12) {
            config.moment_ps.push(0.4);
        }
        entries.push(MatrixEntry { run_id: format!("viscoelastic_a{a}"), config });
    }
    entries
}

/// Render summary rows as the summary CSV.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "run_id,model,gamma,theory_exp,fitted_exp,residual,c_hat,C_hat,threshold_verdict,entropy_slope\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6e},{:.6e},{},{:.6}",
            r.run_id,
            r.model,
            r.gamma,
            r.theory_exp,
            r.fitted_exp,
            r.residual,
            r.c_hat,
            r.big_c_hat,
            r.threshold_verdict,
            r.entropy_slope
        );
    }
    out
}
