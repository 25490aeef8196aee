//! Velocity moments: transfer constants, the bounding hierarchy, the
//! mean-field energy law and the weak-inelasticity thresholds.
//!
//! Moments are `m_p = int f |v|^(2p) dv` with `E = m_1` the granular
//! temperature. The collision operator obeys the transfer inequality
//!
//! ```text
//! d m_p / dt <= -(1 - kappa_p) m_(p+1/2) + kappa_p S_p
//! ```
//!
//! with the explicit constant `kappa_p` and a bilinear sum `S_p` over lower
//! moments. The hierarchy here integrates those relations as equalities to
//! obtain a computable bounding trajectory; every output is labelled
//! "upper bound only" because it is not the true dynamics.

use crate::dissipation;
use crate::math::ode::{self, OdeOptions};
use crate::math::special::binomial;
use crate::restitution::RestitutionModel;
use crate::timeseries::{log_output_times, Sample, TimeSeries};
use crate::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::math::real::Real;

/// Label attached to hierarchy output: the integrated system is a bound on
/// the moment evolution, not the physical dynamics.
pub const HIERARCHY_LABEL: &str = "upper bound only";

/// Moments `m_p` of one distribution at one time, stored sorted by `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub time: f64,
    entries: Vec<(f64, f64)>,
}

impl MomentVector {
    /// Build from `(p, m_p)` pairs; orders must be distinct, nonnegative and
    /// finite, values nonnegative and finite. A stored `p = 0` entry must
    /// equal 1 (unit mass).
    pub fn new(time: f64, entries: &[(f64, f64)]) -> Result<MomentVector> {
        let mut sorted = entries.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        for w in sorted.windows(2) {
            if (w[0].0 - w[1].0).abs() <= 1e-12 {
                return Err(Error::Domain(format!("duplicate moment order p = {}", w[0].0)));
            }
        }
        for &(p, m) in &sorted {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::Domain(format!("moment order must be finite and >= 0, got {p}")));
            }
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::Domain(format!("moment m_{p} must be finite and >= 0, got {m}")));
            }
        }
        Ok(MomentVector { time, entries: sorted })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Stored value at order `p`, matched within 1e-12.
    pub fn get(&self, p: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|(q, _)| (q - p).abs() <= 1e-12)
            .map(|&(_, m)| m)
    }

    /// `m_0`, defaulting to 1 (unit mass) when not stored.
    pub fn mass(&self) -> f64 {
        self.get(0.0).unwrap_or(1.0)
    }

    pub fn is_unit_mass(&self) -> bool {
        (self.mass() - 1.0).abs() <= 1e-12
    }

    /// Value at order `p`, filling gaps by log-linear (geometric)
    /// interpolation between stored neighbours, anchored at `m_0 = 1`.
    /// Beyond the largest stored order `s` the power rule `m_s^(p/s)` is
    /// used, which is the unit-mass Jensen closure.
    pub fn value_or_interpolated(&self, p: f64) -> Result<f64> {
        if p < -1e-12 {
            return Err(Error::Numeric(format!("moment order below 0 requested: {p}")));
        }
        if p.abs() <= 1e-12 {
            return Ok(self.mass());
        }
        if let Some(m) = self.get(p) {
            return Ok(m);
        }
        // Bracketing stored orders, treating (0, mass) as an anchor.
        let mut lower = (0.0, self.mass());
        let mut upper: Option<(f64, f64)> = None;
        for &(q, m) in &self.entries {
            if q <= 1e-12 {
                continue;
            }
            if q < p {
                lower = (q, m);
            } else {
                upper = Some((q, m));
                break;
            }
        }
        match upper {
            Some((q_hi, m_hi)) => {
                let (q_lo, m_lo) = lower;
                if m_lo == 0.0 || m_hi == 0.0 {
                    return Ok(0.0);
                }
                let w = (p - q_lo) / (q_hi - q_lo);
                Ok((m_lo.ln() * (1.0 - w) + m_hi.ln() * w).exp())
            }
            None => {
                let (q_lo, m_lo) = lower;
                if q_lo == 0.0 {
                    return Err(Error::Domain(format!(
                        "cannot extrapolate m_{p} from mass alone"
                    )));
                }
                if m_lo == 0.0 {
                    return Ok(0.0);
                }
                Ok(m_lo.powf(p / q_lo))
            }
        }
    }

    /// Jensen chain `m_(p+1/2) >= m_p^(1 + 1/(2p))` over consecutive stored
    /// half-integer steps (unit mass). Returns the worst signed slack.
    pub fn jensen_slack(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for w in self.entries.windows(2) {
            let (p, m_p) = w[0];
            let (q, m_q) = w[1];
            if p > 0.0 && (q - p - 0.5).abs() <= 1e-12 && m_p > 0.0 {
                worst = worst.min(m_q - m_p.powf(1.0 + 1.0 / (2.0 * p)));
            }
        }
        worst
    }

    /// Worst violation of log-convexity over stored triples
    /// (`m_q <= m_p^((r-q)/(r-p)) m_r^((q-p)/(r-p))` for `p < q < r`);
    /// nonnegative means the inequality holds.
    pub fn log_convexity_slack(&self) -> f64 {
        let mut worst = f64::INFINITY;
        let e = &self.entries;
        for i in 0..e.len() {
            for j in (i + 1)..e.len() {
                for k in (j + 1)..e.len() {
                    let (p, mp) = e[i];
                    let (q, mq) = e[j];
                    let (r, mr) = e[k];
                    if mp <= 0.0 || mq <= 0.0 || mr <= 0.0 {
                        continue;
                    }
                    let bound =
                        ((r - q) / (r - p)) * mp.ln() + ((q - p) / (r - p)) * mr.ln();
                    worst = worst.min(bound - mq.ln());
                }
            }
        }
        worst
    }
}

/// Transfer constant `kappa_p` for `p >= 1`:
/// `4/(p+1) [1 - (3/4)^(p+1) + (1/4)^(p+1)]`, the closed form of
/// `int_0^1 ((3+t)/4)^p + ((1-t)/4)^p dt`. Satisfies `kappa_1 = 1` and
/// `kappa_p < 1` for `p > 1`.
pub fn kappa(p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("kappa needs p >= 1, got {p}")));
    }
    Ok(4.0 / (p + 1.0) * (1.0 - 0.75f64.powf(p + 1.0) + 0.25f64.powf(p + 1.0)))
}

/// The bilinear transfer sum
/// `S_p = sum_(k=1)^([(p+1)/2]) C(p, k) (m_(k+1/2) m_(p-k) + m_k m_(p-k+1/2))`.
/// Missing half-integer orders are filled by log-convex interpolation.
pub fn povzner_sum(mv: &MomentVector, p: f64) -> Result<f64> {
    let k_max = ((p + 1.0) / 2.0).floor() as usize;
    let mut s = 0.0;
    for k in 1..=k_max {
        let kf = k as f64;
        let c = binomial(p, kf);
        s += c
            * (mv.value_or_interpolated(kf + 0.5)? * mv.value_or_interpolated(p - kf)?
                + mv.value_or_interpolated(kf)? * mv.value_or_interpolated(p - kf + 0.5)?);
    }
    Ok(s)
}

/// Right-hand side of the transfer bound for order `p >= 1`:
/// `-(1 - kappa_p) m_(p+1/2) + kappa_p S_p`.
pub fn povzner_rhs(mv: &MomentVector, p: f64) -> Result<f64> {
    if !mv.is_unit_mass() {
        return Err(Error::Domain(format!(
            "transfer bound needs unit mass, got m_0 = {}",
            mv.mass()
        )));
    }
    let kp = kappa(p)?;
    Ok(-(1.0 - kp) * mv.value_or_interpolated(p + 0.5)? + kp * povzner_sum(mv, p)?)
}

/// Thresholds of the weakly inelastic regime.
///
/// `critical_e = sqrt(8 kappa_(3/2) / 3 - 5/3)` is the smallest constant
/// restitution for which the moment route proves the cooling law. For
/// impact-dependent models the analogue is `ell_0`, computed from
/// `c_gamma = 2^(3+gamma)/(4+gamma)`, `alpha = (1 - kappa_(3/2))/2`, the
/// positive root `K0` of `-alpha X^2 + (1 + 3 c_gamma) X + 1 = 0` and
/// `ell_0 = 8 alpha / (9 A c_gamma K)` with `K = max(K0, rho_t0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub kappa_32: f64,
    pub critical_e: f64,
    pub c_gamma: Option<f64>,
    pub k0: Option<f64>,
    pub ell0: Option<f64>,
}

/// Thresholds of the constant-restitution regime.
pub fn constant_threshold() -> ThresholdReport {
    let kappa_32 = kappa(1.5).expect("1.5 >= 1");
    let critical_e = (8.0 * kappa_32 / 3.0 - 5.0 / 3.0).sqrt();
    ThresholdReport { kappa_32, critical_e, c_gamma: None, k0: None, ell0: None }
}

/// Does a constant restitution `e` satisfy the smallness condition
/// `3 (1 - e^2) / 8 < 1 - kappa_(3/2)`?
pub fn satisfies_small_condition(e: f64) -> bool {
    3.0 * (1.0 - e * e) / 8.0 < 1.0 - constant_threshold().kappa_32
}

/// Weak-inelasticity threshold for impact-dependent restitution.
///
/// `a_bound` is a uniform bound on `m_(2 gamma)^(1/3)` past the initial
/// transient and `rho_t0 = m_(3/2)(t0) / E(t0)^(3/2)`. The returned `ell0`
/// is capped at 8, the standing bound assumed of `ell_gamma` in the
/// underlying argument.
pub fn ell0_threshold(gamma: f64, a_bound: f64, rho_t0: f64) -> Result<ThresholdReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("ell0 threshold needs gamma > 0, got {gamma}")));
    }
    if !(a_bound > 0.0 && a_bound.is_finite()) {
        return Err(Error::Domain(format!("ell0 threshold needs A > 0, got {a_bound}")));
    }
    if !(rho_t0 > 0.0 && rho_t0.is_finite()) {
        return Err(Error::Domain(format!("ell0 threshold needs rho_t0 > 0, got {rho_t0}")));
    }
    let base = constant_threshold();
    let c_gamma = 2f64.powf(3.0 + gamma) / (4.0 + gamma);
    let alpha = (1.0 - base.kappa_32) / 2.0;
    let b = 1.0 + 3.0 * c_gamma;
    let k0 = (b + (b * b + 4.0 * alpha).sqrt()) / (2.0 * alpha);
    let k = k0.max(rho_t0);
    let ell0 = (8.0 * alpha / (9.0 * a_bound * c_gamma * k)).min(8.0);
    Ok(ThresholdReport {
        kappa_32: base.kappa_32,
        critical_e: base.critical_e,
        c_gamma: Some(c_gamma),
        k0: Some(k0),
        ell0: Some(ell0),
    })
}

/// Mean-field granular temperature: integrate `dE/dt = -psi(E)`, the
/// Jensen envelope of the energy balance (an upper bound on the true
/// temperature), sampling at `times`.
pub fn meanfield_energy_at(
    model: &RestitutionModel,
    e0: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    if !(e0 > 0.0 && e0.is_finite()) {
        return Err(Error::Domain(format!("initial energy must be > 0, got {e0}")));
    }
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let e = y[0].max(0.0);
        dy[0] = -dissipation::psi(model, e)?;
        Ok(())
    };
    let states = ode::solve(rhs, 0.0, &[e0], times, OdeOptions::default())?;
    Ok(states.into_iter().map(|s| s[0]).collect())
}

/// [`meanfield_energy_at`] on the standard log-spaced output grid,
/// packaged as a time series.
pub fn integrate_meanfield_energy(
    model: &RestitutionModel,
    e0: f64,
    t_end: f64,
) -> Result<TimeSeries> {
    if !(t_end > 0.0) {
        return Err(Error::Domain(format!("t_end must be > 0, got {t_end}")));
    }
    let times = log_output_times(t_end, 64);
    let energies = meanfield_energy_at(model, e0, &times)?;
    let mut series = TimeSeries::new(vec![]);
    for (&t, &e) in times.iter().zip(&energies) {
        if !(e > 0.0) {
            return Err(Error::Numeric(format!("mean-field energy not positive at t = {t}")));
        }
        series.push(Sample { t, energy: e, moments: vec![], entropy: f64::NAN, collisions: 0 });
    }
    Ok(series)
}

/// Bounding moment trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchySolution {
    pub series: TimeSeries,
    /// Always [`HIERARCHY_LABEL`]; the system bounds the moments, it does
    /// not reproduce them.
    pub label: &'static str,
}

/// Integrate the bounding hierarchy for `p in {1, 3/2, ..., p_max}` from
/// `mv0` up to `t_end`.
///
/// Orders `p >= 3/2` evolve by the Jensen-closed transfer bounds
///
/// ```text
/// d m_p / dt = -(1 - kappa_p) m_p^(1 + 1/(2p)) + kappa_p S_p,
/// ```
///
/// the computable equality form of the transfer inequality after the
/// unit-mass Jensen step `m_(p+1/2) >= m_p^(1 + 1/(2p))` (applying Jensen at
/// every order keeps the system quasimonotone, hence an upper bound, and
/// positivity-preserving; coupling `-(1-kappa_p) m_(p+1/2)` directly to the
/// stored higher moment drives interior orders negative). The per-order
/// bound constants are not a log-convex sequence, so only positivity is
/// guaranteed along the bounding trajectory. `m_1` evolves by
/// the mean-field energy law `dm_1/dt = -psi(m_1)`: the transfer relation
/// carries no dissipation at `p = 1` since `kappa_1 = 1`, and integrating it
/// as an equality there blows up in finite time.
pub fn integrate_moment_hierarchy(
    model: &RestitutionModel,
    mv0: &MomentVector,
    p_max: f64,
    t_end: f64,
) -> Result<HierarchySolution> {
    if !(p_max >= 1.5) {
        return Err(Error::Domain(format!("hierarchy needs p_max >= 3/2, got {p_max}")));
    }
    if ((2.0 * p_max) - (2.0 * p_max).round()).abs() > 1e-9 {
        return Err(Error::Domain(format!("p_max must be a half-integer, got {p_max}")));
    }
    if !(t_end > 0.0) {
        return Err(Error::Domain(format!("t_end must be > 0, got {t_end}")));
    }
    if !mv0.is_unit_mass() {
        return Err(Error::Domain(format!(
            "hierarchy initial data must have unit mass, got m_0 = {}",
            mv0.mass()
        )));
    }

    // State lattice p = 1, 3/2, ..., p_max  (twice-index 2..=2 p_max).
    let lattice: Vec<f64> = (2..=((2.0 * p_max).round() as u32)).map(|k| k as f64 / 2.0).collect();
    let mut y0 = Vec::with_capacity(lattice.len());
    for &p in &lattice {
        let m = mv0.value_or_interpolated(p)?;
        if !(m > 0.0) {
            return Err(Error::Domain(format!("hierarchy needs m_{p} > 0 initially")));
        }
        y0.push(m);
    }

    let state_vector = |t: f64, y: &[f64]| -> Result<MomentVector> {
        let mut entries: Vec<(f64, f64)> = Vec::with_capacity(lattice.len() + 2);
        entries.push((0.0, 1.0));
        // m_(1/2) interpolates between mass and energy (Cauchy-Schwarz
        // equality case), consistent with the bounding role of the system.
        entries.push((0.5, y[0].max(0.0).sqrt()));
        for (i, &p) in lattice.iter().enumerate() {
            entries.push((p, y[i]));
        }
        let mut mv = MomentVector::new(t, &entries)?;
        mv.time = t;
        Ok(mv)
    };

    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        for &v in y {
            if !v.is_finite() {
                return Err(Error::Numeric("hierarchy state became non-finite".into()));
            }
        }
        let mv = state_vector(t, y)?;
        dy[0] = -dissipation::psi(model, y[0].max(0.0))?;
        for i in 1..lattice.len() {
            let p = lattice[i];
            let kp = kappa(p)?;
            let jensen = y[i].max(0.0).powf(1.0 + 1.0 / (2.0 * p));
            dy[i] = -(1.0 - kp) * jensen + kp * povzner_sum(&mv, p)?;
        }
        if dy.iter().any(|d| !d.is_finite()) {
            return Err(Error::Numeric("hierarchy closure produced a non-finite value".into()));
        }
        Ok(())
    };

    let times = log_output_times(t_end, 64);
    let states = ode::solve(rhs, 0.0, &y0, &times, OdeOptions::default())?;

    let mut series = TimeSeries::new(lattice.clone());
    for (&t, state) in times.iter().zip(&states) {
        if state.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Numeric(format!(
                "hierarchy moment not positive at t = {t}"
            )));
        }
        series.push(Sample {
            t,
            energy: state[0],
            moments: state.clone(),
            entropy: f64::NAN,
            collisions: 0,
        });
    }
    Ok(HierarchySolution { series, label: HIERARCHY_LABEL })
}

/// Closed-form mean-field temperature for constant restitution:
/// `E(t) = E0 / (1 + (1 - e0^2)/16 sqrt(E0) t)^2`.
pub fn constant_meanfield_solution(e0_restitution: f64, e0: f64, t: f64) -> f64 {
    let c = (1.0 - e0_restitution * e0_restitution) / 16.0;
    let denom = 1.0 + c * e0.sqrt() * t;
    e0 / (denom * denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::special::gamma as gamma_fn;

    /// Composite-Simpson oracle for the kappa integral, independent of the
    /// closed form under test.
    fn kappa_simpson(p: f64) -> f64 {
        let n = 20_000usize; // even
        let h = 1.0 / n as f64;
        let f = |t: f64| ((3.0 + t) / 4.0).powf(p) + ((1.0 - t) / 4.0).powf(p);
        let mut acc = f(0.0) + f(1.0);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 0 { 2.0 } else { 4.0 };
        }
        acc * h / 3.0
    }

    /// Moments of a Maxwellian with per-component variance theta:
    /// `m_p = (2 theta)^p Gamma(p + 3/2) / Gamma(3/2)`.
    fn maxwellian_moment(theta: f64, p: f64) -> f64 {
        (2.0 * theta).powf(p) * gamma_fn(p + 1.5) / gamma_fn(1.5)
    }

    fn maxwellian_mv(theta: f64, ps: &[f64]) -> MomentVector {
        let entries: alloc::vec::Vec<(f64, f64)> =
            ps.iter().map(|&p| (p, maxwellian_moment(theta, p))).collect();
        MomentVector::new(0.0, &entries).unwrap()
    }

    #[test]
    fn kappa_one_is_exactly_one() {
        assert!((kappa(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_closed_form_vs_quadrature() {
        for &p in &[1.0, 1.25, 1.5, 2.0, 3.0, 5.0] {
            let closed = kappa(p).unwrap();
            let quad = kappa_simpson(p);
            assert!((closed - quad).abs() <= 1e-10, "p={p}: {closed} vs {quad}");
            if p > 1.0 {
                assert!(closed < 1.0);
            }
        }
        // kappa_2 = 4/3 (1 - 27/64 + 1/64) = 19/24 exactly.
        assert!((kappa(2.0).unwrap() - 19.0 / 24.0).abs() < 1e-15);
        assert!(kappa(0.5).is_err());
    }

    #[test]
    fn critical_restitution_matches_reported_value() {
        let rep = constant_threshold();
        assert!((rep.kappa_32 - 0.870577136594005218).abs() < 1e-12);
        assert!((rep.critical_e - 0.809241845340860127).abs() < 1e-12);
        assert!(rep.critical_e > 0.805 && rep.critical_e < 0.813);
        assert!(satisfies_small_condition(0.9));
        assert!(!satisfies_small_condition(0.5));
    }

    #[test]
    fn povzner_rhs_point_mass_is_zero() {
        let mv = MomentVector::new(
            0.0,
            &[(0.0, 1.0), (0.5, 0.0), (1.0, 0.0), (1.5, 0.0), (2.0, 0.0)],
        )
        .unwrap();
        assert_eq!(povzner_rhs(&mv, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn povzner_rhs_hand_expanded_three_halves() {
        // With m_(1/2) = m_1 = m_(3/2) = m_2 = 1 the k = 1 term is
        // C(3/2, 1) (m_(3/2) m_(1/2) + m_1 m_1) = 1.5 * 2, so
        // rhs = -(1 - kappa) + 3 kappa = 4 kappa_(3/2) - 1.
        let mv =
            MomentVector::new(0.0, &[(0.5, 1.0), (1.0, 1.0), (1.5, 1.0), (2.0, 1.0)]).unwrap();
        let expect = 4.0 * kappa(1.5).unwrap() - 1.0;
        assert!((povzner_rhs(&mv, 1.5).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn povzner_rhs_maxwellian_matches_direct_expansion() {
        // Independent evaluation of the p = 2 transfer bound from analytic
        // Gaussian moments. (The bound is positive here: the negative
        // m_(5/2) term carries the small weight 1 - kappa_2 = 5/24.)
        let theta = 1.0;
        let mv = maxwellian_mv(theta, &[0.5, 1.0, 1.5, 2.0, 2.5]);
        let k2 = 19.0 / 24.0;
        let s2 = 2.0
            * (maxwellian_moment(theta, 1.5) * maxwellian_moment(theta, 1.0)
                + maxwellian_moment(theta, 1.0) * maxwellian_moment(theta, 1.5));
        let expect = -(1.0 - k2) * maxwellian_moment(theta, 2.5) + k2 * s2;
        let got = povzner_rhs(&mv, 2.0).unwrap();
        assert!((got - expect).abs() <= 1e-10 * expect.abs(), "{got} vs {expect}");
        assert!(got.is_finite());
    }

    #[test]
    fn povzner_rhs_requires_unit_mass() {
        let mv = MomentVector::new(0.0, &[(0.0, 2.0), (1.0, 1.0), (1.5, 1.0)]).unwrap();
        assert!(povzner_rhs(&mv, 1.5).is_err());
    }

    #[test]
    fn interpolation_rules() {
        let mv = MomentVector::new(0.0, &[(1.0, 4.0), (2.0, 64.0)]).unwrap();
        // Geometric interpolation between stored orders.
        let v = mv.value_or_interpolated(1.5).unwrap();
        assert!((v - 16.0).abs() < 1e-12);
        // Power-rule extrapolation above the top order.
        let v = mv.value_or_interpolated(2.5).unwrap();
        assert!((v - 64.0f64.powf(1.25)).abs() < 1e-9);
        // Anchored at unit mass below the smallest stored order.
        let v = mv.value_or_interpolated(0.5).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(mv.value_or_interpolated(-1.0).is_err());
    }

    #[test]
    fn maxwellian_moments_are_log_convex_with_jensen() {
        let mv = maxwellian_mv(0.7, &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(mv.jensen_slack() >= 0.0);
        assert!(mv.log_convexity_slack() >= -1e-12);
    }

    #[test]
    fn meanfield_elastic_is_constant() {
        let m = RestitutionModel::constant(1.0).unwrap();
        let e = meanfield_energy_at(&m, 1.0, &[0.0, 5.0, 50.0]).unwrap();
        for v in e {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn meanfield_matches_separable_solution() {
        // At t = 16 / (1 - e^2), E drops to E0 / (1 + sqrt(E0))^2.
        let m = RestitutionModel::constant(0.5).unwrap();
        let t = 16.0 / 0.75;
        let e = meanfield_energy_at(&m, 1.0, &[t]).unwrap()[0];
        assert!((e - 0.25).abs() < 1e-6 * 0.25, "{e}");

        for &e0r in &[0.3, 0.5, 0.9] {
            let model = RestitutionModel::constant(e0r).unwrap();
            let times: alloc::vec::Vec<f64> = (0..=20).map(|i| 5.0 * i as f64).collect();
            let es = meanfield_energy_at(&model, 1.0, &times).unwrap();
            for (&t, &e) in times.iter().zip(&es) {
                let exact = constant_meanfield_solution(e0r, 1.0, t);
                assert!(
                    (e - exact).abs() <= 1e-6 * exact,
                    "e0r={e0r} t={t}: {e} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn meanfield_constant_late_window_exponent() {
        let m = RestitutionModel::constant(0.5).unwrap();
        let series = integrate_meanfield_energy(&m, 1.0, 1e6).unwrap();
        let fit = crate::haff::fit_decay(&series, crate::timeseries::Column::Energy, (1e4, 1e6))
            .unwrap();
        assert!((fit.exponent + 2.0).abs() < 0.01, "slope {}", fit.exponent);
    }

    #[test]
    fn meanfield_power_law_haff_slope() {
        // The local exponent approaches -5/3 only as slowly as the E^0.1
        // correction in the dissipation integrand decays, hence the loose
        // band.
        let m = RestitutionModel::power_law(1.0, 0.2, 0.05).unwrap();
        let series = integrate_meanfield_energy(&m, 1.0, 5e6).unwrap();
        let window = (5e4, 5e6);
        let fit = crate::haff::fit_decay(&series, crate::timeseries::Column::Energy, window)
            .unwrap();
        assert!((fit.exponent + 5.0 / 3.0).abs() < 0.05, "slope {}", fit.exponent);
    }

    #[test]
    fn hierarchy_rejects_bad_input() {
        let model = RestitutionModel::constant(0.9).unwrap();
        let bad = MomentVector::new(0.0, &[(0.0, 2.0), (1.0, 1.0)]).unwrap();
        assert!(integrate_moment_hierarchy(&model, &bad, 2.0, 1.0).is_err());
        let ok = maxwellian_mv(1.0 / 3.0, &[1.0, 1.5, 2.0]);
        assert!(integrate_moment_hierarchy(&model, &ok, 1.2, 1.0).is_err());
    }

    #[test]
    fn hierarchy_elastic_returns_labelled_bound() {
        let model = RestitutionModel::constant(1.0).unwrap();
        let mv0 = maxwellian_mv(1.0 / 3.0, &[1.0, 1.5, 2.0]);
        let sol = integrate_moment_hierarchy(&model, &mv0, 2.0, 10.0).unwrap();
        assert_eq!(sol.label, HIERARCHY_LABEL);
        // Elastic energy envelope stays flat; the higher bounds grow.
        let e: alloc::vec::Vec<f64> = sol.series.column(crate::timeseries::Column::Energy);
        assert!((e[e.len() - 1] - e[0]).abs() < 1e-9);
    }

    #[test]
    fn hierarchy_trajectories_positive_and_ratio_bounded() {
        let model = RestitutionModel::constant(0.9).unwrap();
        let mv0 = maxwellian_mv(1.0 / 3.0, &[1.0, 1.5, 2.0, 2.5]);
        let sol = integrate_moment_hierarchy(&model, &mv0, 2.5, 2000.0).unwrap();
        let mut max_ratio = 0.0f64;
        let mut last_ratio = 0.0;
        for row in &sol.series.rows {
            for (&p, &m) in sol.series.moment_ps.iter().zip(&row.moments) {
                assert!(m > 0.0, "m_{p} at t={} not positive", row.t);
            }
            let m32 = row.moments[sol.series.moment_index(1.5).unwrap()];
            last_ratio = m32 / row.energy.powf(1.5);
            max_ratio = max_ratio.max(last_ratio);
        }
        // The scaled bound settles at its self-consistent constant instead
        // of escaping (the analogue of the m_(3/2) <= C E^(3/2) control).
        assert!(max_ratio.is_finite());
        assert!(last_ratio >= 0.5 * max_ratio, "ratio collapsed: {last_ratio} vs {max_ratio}");
        assert!(max_ratio < 1e5, "ratio blew up: {max_ratio}");
    }

    #[test]
    fn ell0_threshold_report() {
        // Frozen from the defining relations at gamma = 1/5, A = 1,
        // rho_t0 <= K0.
        let rep = ell0_threshold(0.2, 1.0, 1.0).unwrap();
        let c_gamma = rep.c_gamma.unwrap();
        let k0 = rep.k0.unwrap();
        assert!((c_gamma - 2.18799686666101906).abs() < 1e-12);
        assert!((k0 - 117.020068069843408).abs() < 1e-9);
        assert!((rep.ell0.unwrap() - 2.24657770101357515e-4).abs() < 1e-13);
        // Quadratic-root residual oracle.
        let alpha = (1.0 - rep.kappa_32) / 2.0;
        let residual = -alpha * k0 * k0 + (1.0 + 3.0 * c_gamma) * k0 + 1.0;
        assert!(residual.abs() < 1e-9, "residual {residual}");

        // Monotonicity in A and in rho_t0.
        let rep10 = ell0_threshold(0.2, 10.0, 1.0).unwrap();
        assert!(rep10.ell0.unwrap() < rep.ell0.unwrap());
        let rep2k = ell0_threshold(0.2, 1.0, 2.0 * k0).unwrap();
        assert!((rep2k.ell0.unwrap() - rep.ell0.unwrap() / 2.0).abs() < 1e-12);

        assert!(ell0_threshold(-1.0, 1.0, 1.0).is_err());
        assert!(ell0_threshold(0.2, 0.0, 1.0).is_err());
    }
}
