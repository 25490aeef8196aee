//! Entropy estimation and the functional inequalities tying moments to
//! entropy.
//!
//! The sign convention follows the kinetic-theory literature:
//! `h_signed = int f log f` (the negative of the differential entropy) and
//! `h_abs = int f |log f|`. Particle clouds are estimated with the
//! Kozachenko-Leonenko k-nearest-neighbour estimator; inequality
//! verification runs on analytic radial families where both integrals are
//! exact or quadrature-grade, because `h_abs` from particles is
//! estimator-fragile.

use crate::math::kdtree::KdTree;
use crate::math::quad;
use crate::math::special::{digamma, gamma, unit_sphere_area};
use crate::{Error, Result, Vec3};
use alloc::format;
use alloc::vec::Vec;
use rand::Rng;

#[allow(unused_imports)]
use crate::math::real::Real;

/// How an entropy estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMethod {
    Knn { neighbors: usize },
    Histogram { bins: usize },
}

/// Entropy estimate of a velocity cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Estimate of `int f log f` (negative differential entropy).
    pub h_signed: f64,
    /// Estimate of `int f |log f|`; always >= `|h_signed|` by construction.
    pub h_abs: f64,
    pub method: EntropyMethod,
    /// Bootstrap standard error (`None` when resampling was disabled).
    pub stderr: Option<f64>,
}

/// Estimator options; `bootstrap_resamples = 0` disables the error bar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnnOptions {
    pub neighbors: usize,
    pub bootstrap_resamples: usize,
}

impl Default for KnnOptions {
    fn default() -> Self {
        KnnOptions { neighbors: 5, bootstrap_resamples: 16 }
    }
}

/// Kozachenko-Leonenko estimate with the default options (k = 5, 16
/// bootstrap resamples).
pub fn entropy_knn<R: Rng>(velocities: &[Vec3], k: usize, rng: &mut R) -> Result<EntropyEstimate> {
    entropy_knn_with(velocities, &KnnOptions { neighbors: k, ..KnnOptions::default() }, rng)
}

/// Kozachenko-Leonenko estimate with explicit options.
///
/// Exact duplicate velocities make the k-th neighbour distance vanish; the
/// cloud is then jittered (uniformly, amplitude `1e-12 sqrt(E)`) and the
/// estimate recomputed. Bootstrap resamples contain duplicates by
/// construction and are always jittered.
pub fn entropy_knn_with<R: Rng>(
    velocities: &[Vec3],
    opts: &KnnOptions,
    rng: &mut R,
) -> Result<EntropyEstimate> {
    let n = velocities.len();
    let k = opts.neighbors;
    if k < 3 {
        return Err(Error::Domain(format!("kNN entropy needs k >= 3, got {k}")));
    }
    if n < 10 * k {
        return Err(Error::Domain(format!(
            "kNN entropy needs N >= 10 k, got N = {n}, k = {k}"
        )));
    }
    let energy = velocities.iter().map(|v| v.norm_sq()).sum::<f64>() / n as f64;
    let jitter = 1e-12 * energy.sqrt();

    let (h_signed, h_abs) = match knn_log_density_sums(velocities, k) {
        Some(sums) => sums,
        None => {
            log::debug!("duplicate velocities; jittering cloud at amplitude {jitter:e}");
            let jittered = jitter_cloud(velocities, jitter, rng);
            knn_log_density_sums(&jittered, k).ok_or_else(|| {
                Error::Numeric("duplicate velocities persist after jitter".into())
            })?
        }
    };

    let stderr = if opts.bootstrap_resamples >= 2 {
        let mut estimates = Vec::with_capacity(opts.bootstrap_resamples);
        let mut resample = Vec::with_capacity(n);
        for _ in 0..opts.bootstrap_resamples {
            resample.clear();
            for _ in 0..n {
                resample.push(velocities[rng.gen_range(0..n)]);
            }
            let jittered = jitter_cloud(&resample, jitter, rng);
            let (h, _) = knn_log_density_sums(&jittered, k).ok_or_else(|| {
                Error::Numeric("bootstrap resample still contains duplicates".into())
            })?;
            estimates.push(h);
        }
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let var = estimates.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>()
            / (estimates.len() - 1) as f64;
        Some(var.sqrt())
    } else {
        None
    };

    Ok(EntropyEstimate {
        h_signed,
        h_abs,
        method: EntropyMethod::Knn { neighbors: k },
        stderr,
    })
}

/// Per-point log-density surrogates of the KL estimator:
/// `log f_i = psi(k) - psi(N) - log V_3 - 3 log eps_i`, averaged signed and
/// in absolute value. `None` when some `eps_i` vanishes (duplicates).
fn knn_log_density_sums(pts: &[Vec3], k: usize) -> Option<(f64, f64)> {
    let n = pts.len();
    let tree = KdTree::build(pts);
    let unit_ball_volume = 4.0 * core::f64::consts::PI / 3.0;
    let offset = digamma(k as f64) - digamma(n as f64) - unit_ball_volume.ln();
    let mut signed = 0.0;
    let mut absolute = 0.0;
    for (i, &p) in pts.iter().enumerate() {
        let d2 = tree.knn_distance_sq(p, k, i as u32)?;
        if d2 <= 0.0 {
            return None;
        }
        let log_f = offset - 1.5 * d2.ln();
        signed += log_f;
        absolute += log_f.abs();
    }
    Some((signed / n as f64, absolute / n as f64))
}

fn jitter_cloud<R: Rng>(pts: &[Vec3], amplitude: f64, rng: &mut R) -> Vec<Vec3> {
    pts.iter()
        .map(|&p| {
            let d = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            p + d * amplitude
        })
        .collect()
}

/// Principal branch of the Lambert W function (`W(x) exp(W(x)) = x` for
/// `x >= -1/e`).
///
/// ```
/// let w = granular_core::entropy::lambert_w(1.0).unwrap();
/// assert!((w * w.exp() - 1.0).abs() < 1e-12);
/// ```
pub fn lambert_w(x: f64) -> Result<f64> {
    const NEG_INV_E: f64 = -0.36787944117144233;
    if !(x >= NEG_INV_E) {
        return Err(Error::Domain(format!("lambert_w needs x >= -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == NEG_INV_E {
        return Ok(-1.0);
    }
    // For large arguments iterate on w + log w = log x, which cannot
    // overflow; otherwise Halley on w e^w - x from a branch-aware guess.
    if x > 3.0 {
        let lx = x.ln();
        let mut w = lx - lx.ln().max(0.0);
        for _ in 0..64 {
            let f = w + w.ln() - lx;
            let d = 1.0 + 1.0 / w;
            let step = f / d;
            w -= step;
            if step.abs() <= 1e-15 * w.abs().max(1.0) {
                break;
            }
        }
        return Ok(w);
    }
    let mut w = if x < -0.25 {
        // Series around the branch point x = -1/e.
        let p = (2.0 * (core::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let fp = (w + 1.0) * ew;
        let fpp = (w + 2.0) * ew;
        let denom = fp - 0.5 * f * fpp / fp;
        let step = f / denom;
        if !step.is_finite() {
            // Degenerate Halley denominator right at the branch point.
            break;
        }
        w -= step;
        if step.abs() <= 1e-15 * w.abs().max(1e-3) {
            break;
        }
    }
    Ok(w)
}

/// Upper bound on `h_abs` from `h_signed` and the moment `M_k` in `R^n`:
/// minimize `h_signed + 2 a M_k + 2 J_{n,k}(a)` over `a > 0`, where
/// `J_{n,k}(a) = |S^(n-1)|/k (2/a)^(n/k) Gamma(n/k)`.
pub fn hbar_bound(h_signed: f64, m_k: f64, n: usize, k: f64) -> Result<f64> {
    if !(k > 0.0 && k < n as f64) {
        return Err(Error::Domain(format!("hbar bound needs 0 < k < n, got k = {k}, n = {n}")));
    }
    if !(m_k > 0.0 && m_k.is_finite()) {
        return Err(Error::Domain(format!("hbar bound needs M_k > 0, got {m_k}")));
    }
    let nf = n as f64;
    let c = unit_sphere_area(n) / k * 2f64.powf(nf / k) * gamma(nf / k);
    let objective = |ln_a: f64| {
        let a = ln_a.exp();
        h_signed + 2.0 * a * m_k + 2.0 * c * a.powf(-nf / k)
    };
    // The analytic minimizer of the two a-dependent terms brackets the
    // golden-section search.
    let a_star = (c * nf / (k * m_k)).powf(k / (nf + k));
    let (mut lo, mut hi) = (a_star.ln() - 3.0, a_star.ln() + 3.0);
    const PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - PHI * (hi - lo);
    let mut x2 = lo + PHI * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - PHI * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + PHI * (hi - lo);
            f2 = objective(x2);
        }
    }
    Ok(objective(0.5 * (lo + hi)))
}

/// Lower bound on the moment `M_k` from `h_abs` in `R^n`:
/// `C(n, k, eps) exp(-k h_abs / (n (1 - eps)))` with
/// `C = eps (n (1 - eps) / |S^(n-1)|)^(k/n)`.
pub fn moment_lower_bound(h_abs: f64, n: usize, k: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("moment order must be >= 0, got {k}")));
    }
    let nf = n as f64;
    let c = eps * (nf * (1.0 - eps) / unit_sphere_area(n)).powf(k / nf);
    Ok(c * (-k * h_abs / (nf * (1.0 - eps))).exp())
}

/// A centered, radially symmetric distribution on `R^3` whose entropies and
/// moments are analytic or quadrature-grade.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialDistribution {
    /// `sum_j w_j N(0, theta_j I)`, isotropic components.
    GaussianMixture { components: Vec<(f64, f64)> },
    /// Uniform on the ball of radius `radius`.
    UniformBall { radius: f64 },
}

impl RadialDistribution {
    pub fn maxwellian(theta: f64) -> RadialDistribution {
        RadialDistribution::GaussianMixture { components: alloc::vec![(1.0, theta)] }
    }

    /// Density at radius `r`.
    pub fn density(&self, r: f64) -> f64 {
        match self {
            RadialDistribution::GaussianMixture { components } => components
                .iter()
                .map(|&(w, theta)| {
                    w * (2.0 * core::f64::consts::PI * theta).powf(-1.5)
                        * (-r * r / (2.0 * theta)).exp()
                })
                .sum(),
            RadialDistribution::UniformBall { radius } => {
                if r <= *radius {
                    1.0 / (4.0 / 3.0 * core::f64::consts::PI * radius.powi(3))
                } else {
                    0.0
                }
            }
        }
    }

    /// Analytic moment `M_k = int f |v|^k`.
    pub fn moment(&self, k: f64) -> f64 {
        match self {
            RadialDistribution::GaussianMixture { components } => components
                .iter()
                .map(|&(w, theta)| {
                    w * (2.0 * theta).powf(k / 2.0) * gamma((k + 3.0) / 2.0) / gamma(1.5)
                })
                .sum(),
            RadialDistribution::UniformBall { radius } => 3.0 * radius.powf(k) / (k + 3.0),
        }
    }

    /// `int f log f`, exact for balls and single Gaussians, radial
    /// quadrature otherwise.
    pub fn h_signed(&self) -> Result<f64> {
        match self {
            RadialDistribution::UniformBall { radius } => {
                Ok(-(4.0 / 3.0 * core::f64::consts::PI * radius.powi(3)).ln())
            }
            RadialDistribution::GaussianMixture { components } if components.len() == 1 => {
                let theta = components[0].1;
                Ok(-1.5 * (2.0 * core::f64::consts::PI * theta).ln() - 1.5)
            }
            _ => self.radial_integral(|f| f.ln()),
        }
    }

    /// `int f |log f|`, exact for balls, radial quadrature otherwise (split
    /// at the radius where `f = 1` so the kink is never inside a panel).
    pub fn h_abs(&self) -> Result<f64> {
        match self {
            RadialDistribution::UniformBall { radius } => {
                Ok((4.0 / 3.0 * core::f64::consts::PI * radius.powi(3)).ln().abs())
            }
            _ => self.radial_integral(|f| f.ln().abs()),
        }
    }

    /// `int_0^inf 4 pi r^2 f(r) g(f(r)) dr` for mixtures, split at `f = 1`.
    fn radial_integral<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let components = match self {
            RadialDistribution::GaussianMixture { components } => components,
            RadialDistribution::UniformBall { .. } => unreachable!("balls are closed-form"),
        };
        let theta_max = components.iter().map(|&(_, t)| t).fold(0.0, f64::max);
        let r_max = 15.0 * theta_max.sqrt();
        let integrand = |r: f64| {
            let f = self.density(r);
            if f <= 0.0 {
                0.0
            } else {
                4.0 * core::f64::consts::PI * r * r * f * g(f)
            }
        };
        // The mixture density decreases in r, so f = 1 is crossed at most
        // once; splitting there keeps |log f| smooth on each side.
        let mut split = None;
        if self.density(0.0) > 1.0 {
            let (mut lo, mut hi) = (0.0, r_max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.density(mid) > 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            split = Some(0.5 * (lo + hi));
        }
        let tol = 1e-12;
        match split {
            Some(r0) => Ok(quad::integrate(&integrand, 0.0, r0, tol)?
                + quad::integrate(&integrand, r0, r_max, tol)?),
            None => quad::integrate(&integrand, 0.0, r_max, tol),
        }
    }
}

/// Outcome of checking the two functional inequalities over a family.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub checked: usize,
    pub violations: usize,
    /// Smallest slack of `hbar_bound - h_abs` over the family (k = 1 and 2).
    pub worst_hbar_slack: f64,
    /// Smallest slack of `M_2 - moment_lower_bound` over the family.
    pub worst_moment_slack: f64,
}

/// Verify `h_abs <= hbar_bound(h_signed, M_k)` for `k in {1, 2}` and
/// `M_2 >= moment_lower_bound(h_abs, 3, 2, 1/2)` for every family member.
pub fn check_inequalities(family: &[RadialDistribution]) -> Result<InequalityReport> {
    let mut report = InequalityReport {
        checked: 0,
        violations: 0,
        worst_hbar_slack: f64::INFINITY,
        worst_moment_slack: f64::INFINITY,
    };
    for dist in family {
        let h_signed = dist.h_signed()?;
        let h_abs = dist.h_abs()?;
        let mut violated = false;
        for k in [1.0, 2.0] {
            let bound = hbar_bound(h_signed, dist.moment(k), 3, k)?;
            let slack = bound - h_abs;
            report.worst_hbar_slack = report.worst_hbar_slack.min(slack);
            // Quadrature-level tolerance on the comparison itself.
            if slack < -1e-9 * h_abs.abs().max(1.0) {
                violated = true;
            }
        }
        let m2 = dist.moment(2.0);
        let bound = moment_lower_bound(h_abs, 3, 2.0, 0.5)?;
        let slack = m2 - bound;
        report.worst_moment_slack = report.worst_moment_slack.min(slack);
        if slack < -1e-9 * m2.abs().max(1e-300) {
            violated = true;
        }
        report.checked += 1;
        if violated {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// Deterministic random family for inequality sweeps: `mixtures` Gaussian
/// mixtures with 2-5 components (log-uniform variances over
/// `[1e-3, 1e3]`) plus `balls` uniform balls with log-spaced radii.
pub fn random_family<R: Rng>(mixtures: usize, balls: usize, rng: &mut R) -> Vec<RadialDistribution> {
    let mut family = Vec::with_capacity(mixtures + balls);
    for _ in 0..mixtures {
        let n_comp = rng.gen_range(2..=5);
        let mut components = Vec::with_capacity(n_comp);
        let mut total = 0.0;
        for _ in 0..n_comp {
            let w: f64 = rng.gen_range(0.05..1.0);
            let theta = 10f64.powf(rng.gen_range(-3.0..3.0));
            components.push((w, theta));
            total += w;
        }
        for c in &mut components {
            c.0 /= total;
        }
        family.push(RadialDistribution::GaussianMixture { components });
    }
    for i in 0..balls {
        let exponent = if balls == 1 { 0.0 } else { -3.0 + 6.0 * i as f64 / (balls - 1) as f64 };
        family.push(RadialDistribution::UniformBall { radius: 10f64.powf(exponent) });
    }
    family
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn maxwellian_cloud(n: usize, theta: f64, rng: &mut ChaCha12Rng) -> alloc::vec::Vec<Vec3> {
        let s = theta.sqrt();
        (0..n)
            .map(|_| {
                let g = |rng: &mut ChaCha12Rng| -> f64 {
                    let x: f64 = StandardNormal.sample(rng);
                    x * s
                };
                Vec3::new(g(rng), g(rng), g(rng))
            })
            .collect()
    }

    fn ball_cloud(n: usize, radius: f64, rng: &mut ChaCha12Rng) -> alloc::vec::Vec<Vec3> {
        (0..n)
            .map(|_| loop {
                let v = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if v.norm_sq() <= 1.0 {
                    break v * radius;
                }
            })
            .collect()
    }

    #[test]
    fn lambert_w_fixed_points() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert!((lambert_w(core::f64::consts::E).unwrap() - 1.0).abs() < 1e-14);
        assert!((lambert_w(-1.0 / core::f64::consts::E).unwrap() + 1.0).abs() < 1e-12);
        assert!(lambert_w(-0.4).is_err());
    }

    #[test]
    fn lambert_w_against_newton_oracle() {
        // Test-side Newton iteration on w e^w = 1 from w = 1.
        let mut w = 1.0f64;
        for _ in 0..100 {
            let f = w * w.exp() - 1.0;
            w -= f / ((w + 1.0) * w.exp());
        }
        let got = lambert_w(1.0).unwrap();
        assert!((got - w).abs() < 1e-13);
        assert!((got - 0.5671432904097838).abs() < 1e-10);
    }

    #[test]
    fn lambert_w_round_trip() {
        const NEG_INV_E: f64 = -0.36787944117144233;
        let mut xs = alloc::vec![NEG_INV_E + 1e-6];
        for i in 0..=60 {
            xs.push(10f64.powf(-6.0 + 12.0 * i as f64 / 60.0));
        }
        for x in xs {
            let w = lambert_w(x).unwrap();
            let back = w * w.exp();
            assert!(
                (back - x).abs() <= 1e-12 * x.abs().max(1.0),
                "x = {x:e}: W = {w}, W e^W = {back:e}"
            );
        }
    }

    #[test]
    fn knn_matches_gaussian_entropy() {
        let mut r = rng(1);
        for &n in &[10_000usize, 100_000] {
            let cloud = maxwellian_cloud(n, 1.0, &mut r);
            let est = entropy_knn(&cloud, 5, &mut r).unwrap();
            let analytic = -1.5 * (2.0 * core::f64::consts::PI).ln() - 1.5;
            let stderr = est.stderr.unwrap();
            assert!(
                (est.h_signed - analytic).abs() <= 3.0 * stderr,
                "N={n}: estimate {} vs {analytic} (stderr {stderr})",
                est.h_signed
            );
            assert!(est.h_abs >= est.h_signed.abs() - 1e-12);
        }
    }

    #[test]
    fn knn_matches_uniform_ball_entropy() {
        let mut r = rng(2);
        let cloud = ball_cloud(100_000, 2.0, &mut r);
        let est = entropy_knn(&cloud, 5, &mut r).unwrap();
        let analytic = -(4.0 / 3.0 * core::f64::consts::PI * 8.0).ln();
        let stderr = est.stderr.unwrap();
        assert!(
            (est.h_signed - analytic).abs() <= 3.0 * stderr,
            "estimate {} vs {analytic} (stderr {stderr})",
            est.h_signed
        );
    }

    #[test]
    fn knn_scaling_shift() {
        // v -> 2v shifts h_signed by exactly -3 log 2.
        let mut r = rng(3);
        let cloud = maxwellian_cloud(5_000, 1.0, &mut r);
        let scaled: alloc::vec::Vec<Vec3> = cloud.iter().map(|&v| v * 2.0).collect();
        let opts = KnnOptions { neighbors: 5, bootstrap_resamples: 0 };
        let a = entropy_knn_with(&cloud, &opts, &mut r).unwrap();
        let b = entropy_knn_with(&scaled, &opts, &mut r).unwrap();
        assert!((b.h_signed - (a.h_signed - 3.0 * 2.0f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn knn_translation_invariance() {
        let mut r = rng(4);
        let cloud = maxwellian_cloud(5_000, 0.5, &mut r);
        let shifted: alloc::vec::Vec<Vec3> =
            cloud.iter().map(|&v| v + Vec3::new(10.0, -3.0, 0.5)).collect();
        let opts = KnnOptions { neighbors: 5, bootstrap_resamples: 0 };
        let a = entropy_knn_with(&cloud, &opts, &mut r).unwrap();
        let b = entropy_knn_with(&shifted, &opts, &mut r).unwrap();
        assert!((a.h_signed - b.h_signed).abs() < 1e-9);
    }

    #[test]
    fn knn_handles_duplicates_with_jitter() {
        let mut r = rng(5);
        let mut cloud = maxwellian_cloud(1_000, 1.0, &mut r);
        for i in 0..600 {
            cloud[i] = cloud[0]; // heavy duplication
        }
        let opts = KnnOptions { neighbors: 5, bootstrap_resamples: 0 };
        let est = entropy_knn_with(&cloud, &opts, &mut r).unwrap();
        assert!(est.h_signed.is_finite());
    }

    #[test]
    fn knn_preconditions() {
        let mut r = rng(6);
        let cloud = maxwellian_cloud(100, 1.0, &mut r);
        assert!(entropy_knn(&cloud, 2, &mut r).is_err());
        assert!(entropy_knn(&cloud, 11, &mut r).is_err());
    }

    #[test]
    fn hbar_bound_matches_analytic_minimizer() {
        // The golden-section minimum must agree with the closed-form
        // stationary point of h + 2 a M + 2 c a^(-n/k).
        let n = 3usize;
        for k in [1.0, 2.0] {
            for &m_k in &[0.1, 1.0, 100.0] {
                let h = -2.0;
                let c = unit_sphere_area(n) / k * 2f64.powf(3.0 / k) * gamma(3.0 / k);
                let a_star = (c * 3.0 / (k * m_k)).powf(k / (3.0 + k));
                let exact = h + 2.0 * a_star * m_k + 2.0 * c * a_star.powf(-3.0 / k);
                let got = hbar_bound(h, m_k, n, k).unwrap();
                assert!((got - exact).abs() <= 1e-9 * exact.abs().max(1.0), "k={k} M={m_k}");
            }
        }
        assert!(hbar_bound(0.0, 1.0, 3, 3.0).is_err());
        assert!(hbar_bound(0.0, 0.0, 3, 2.0).is_err());
    }

    #[test]
    fn hbar_bound_dominates_knn_estimate() {
        // Estimator-vs-bound consistency on a Maxwellian cloud: the bound
        // built from the estimated h_signed and the measured M_2 must sit
        // above the estimated h_abs.
        let mut r = rng(8);
        let cloud = maxwellian_cloud(50_000, 1.0, &mut r);
        let opts = KnnOptions { neighbors: 5, bootstrap_resamples: 0 };
        let est = entropy_knn_with(&cloud, &opts, &mut r).unwrap();
        let m2 = cloud.iter().map(|v| v.norm_sq()).sum::<f64>() / cloud.len() as f64;
        let bound = hbar_bound(est.h_signed, m2, 3, 2.0).unwrap();
        assert!(bound >= est.h_abs, "bound {bound} below estimate {}", est.h_abs);
    }

    #[test]
    fn hbar_objective_is_unimodal_in_log_a() {
        // Grid scan: the minimized objective has a single descent/ascent.
        let (h, m_k, k) = (-2.5, 3.0, 2.0);
        let c = unit_sphere_area(3) / k * 2f64.powf(3.0 / k) * gamma(3.0 / k);
        let values: alloc::vec::Vec<f64> = (0..200)
            .map(|i| {
                let a = 10f64.powf(-6.0 + 12.0 * i as f64 / 199.0);
                h + 2.0 * a * m_k + 2.0 * c * a.powf(-3.0 / k)
            })
            .collect();
        let min_idx = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        for w in values[..=min_idx].windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        for w in values[min_idx..].windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
    }

    #[test]
    fn hbar_bound_growth_rate() {
        // bound - h ~ const * M^(n/(n+k)): ratios on a decade sweep settle.
        let h = 0.0;
        let mut prev: Option<f64> = None;
        for i in 0..8 {
            let m = 10f64.powf(i as f64);
            let b = hbar_bound(h, m, 3, 2.0).unwrap();
            let rate = b / m.powf(3.0 / 5.0);
            if let Some(p) = prev {
                assert!((rate / p - 1.0).abs() < 0.05, "rate drifted: {rate} vs {p}");
            }
            prev = Some(rate);
        }
    }

    #[test]
    fn moment_bound_explicit_constant() {
        // eps = 1/2, n = 3, k = 2: C = (1/2) (3 / (8 pi))^(2/3).
        let b = moment_lower_bound(0.0, 3, 2.0, 0.5).unwrap();
        assert!((b - 0.12121534475549661).abs() < 1e-12);
        // Monotone decreasing in h_abs.
        assert!(
            moment_lower_bound(1.0, 3, 2.0, 0.5).unwrap()
                > moment_lower_bound(2.0, 3, 2.0, 0.5).unwrap()
        );
        assert!(moment_lower_bound(0.0, 3, 2.0, 1.5).is_err());
    }

    #[test]
    fn maxwellian_moment_bound_across_scales() {
        for &theta in &[1e-3, 1.0, 1e3] {
            let dist = RadialDistribution::maxwellian(theta);
            let m2 = dist.moment(2.0);
            assert!((m2 - 3.0 * theta).abs() < 1e-12 * m2);
            let bound = moment_lower_bound(dist.h_abs().unwrap(), 3, 2.0, 0.5).unwrap();
            assert!(bound <= m2, "theta={theta}: bound {bound} vs M2 {m2}");
        }
    }

    #[test]
    fn gaussian_h_abs_is_quadrature_consistent() {
        // For theta = 1 the density is below 1 everywhere, so
        // h_abs = -h_signed exactly.
        let dist = RadialDistribution::maxwellian(1.0);
        let hs = dist.h_signed().unwrap();
        let ha = dist.h_abs().unwrap();
        assert!((hs - (-4.256815599614018)).abs() < 1e-10);
        assert!((ha + hs).abs() < 1e-10);
    }

    #[test]
    fn inequalities_on_random_family() {
        let mut r = rng(9);
        let family = random_family(100, 20, &mut r);
        let report = check_inequalities(&family).unwrap();
        assert_eq!(report.checked, 120);
        assert_eq!(report.violations, 0, "{report:?}");
        assert!(report.worst_hbar_slack >= 0.0);
        assert!(report.worst_moment_slack >= 0.0);
    }

    #[test]
    fn shrinking_maxwellians_keep_bound_below_m2() {
        for i in 0..10 {
            let theta = 10f64.powf(-(i as f64));
            let dist = RadialDistribution::maxwellian(theta);
            let bound = moment_lower_bound(dist.h_abs().unwrap(), 3, 2.0, 0.5).unwrap();
            let m2 = dist.moment(2.0);
            assert!(bound <= m2, "theta={theta}");
        }
    }
}
