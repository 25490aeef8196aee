//! Stochastic particle solver for the homogeneous inelastic Boltzmann
//! equation with hard-sphere rates.
//!
//! The gas is represented by `N` equally weighted velocities. Candidate
//! collision pairs are drawn at the majorant rate `N g_max dt / 2` per step
//! and accepted with probability `|u|/g_max`, which realizes the physical
//! per-pair rate `|u|/N`; the accepted pair is scattered with impact
//! direction density proportional to `|u . n|` on the hemisphere and damped
//! by the restitution model:
//!
//! ```text
//! v'  = v  - (1 + e)/2 (u . n) n,     v*' = v* + (1 + e)/2 (u . n) n.
//! ```
//!
//! Time is therefore directly comparable with the mean-field energy law.
//! There are no spatial cells: the equation is homogeneous and the whole
//! ensemble is one collision cell. All randomness derives from the config
//! seed through per-purpose ChaCha streams, so runs are bit-reproducible.

use crate::entropy;
use crate::moments::MomentVector;
use crate::restitution::RestitutionModel;
use crate::timeseries::{log_output_times, Sample, TimeSeries};
use crate::{Error, Result, Vec3};
use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

#[allow(unused_imports)]
use crate::math::real::Real;

/// Target expected collisions per particle per step; sets the step size.
const COLLISIONS_PER_PARTICLE_STEP: f64 = 0.1;

/// RNG stream ids carved out of the run seed.
const STREAM_INIT: u64 = 0;
const STREAM_COLLISIONS: u64 = 1;
const STREAM_ENTROPY: u64 = 2;

/// Initial velocity distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Isotropic Gaussian with per-component variance `theta` (energy `3 theta`).
    Maxwellian { theta: f64 },
    /// Uniform on the ball of radius `radius`.
    UniformBall { radius: f64 },
    /// Mixture of two Maxwellians; `fraction` is the weight of `theta1`.
    TwoTemperature { theta1: f64, theta2: f64, fraction: f64 },
}

/// Full specification of one particle run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub n_particles: usize,
    pub model: RestitutionModel,
    pub init: InitialCondition,
    pub t_end: f64,
    /// Log-spaced output resolution in `1 + t`.
    pub samples_per_decade: usize,
    pub seed: u64,
    /// Steps between majorant refreshes.
    pub majorant_refresh: usize,
    /// Moment orders recorded at every output time.
    pub moment_ps: Vec<f64>,
    /// `Some(k)`: record a k-nearest-neighbour entropy column.
    pub entropy_neighbors: Option<usize>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(Error::Config(format!(
                "need at least 2 particles, got {}",
                self.n_particles
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if self.samples_per_decade == 0 {
            return Err(Error::Config("samples_per_decade must be >= 1".into()));
        }
        if self.majorant_refresh == 0 {
            return Err(Error::Config("majorant_refresh must be >= 1".into()));
        }
        match self.init {
            InitialCondition::Maxwellian { theta } => {
                if !(theta > 0.0) {
                    return Err(Error::Config("Maxwellian theta must be > 0".into()));
                }
            }
            InitialCondition::UniformBall { radius } => {
                if !(radius > 0.0) {
                    return Err(Error::Config("ball radius must be > 0".into()));
                }
            }
            InitialCondition::TwoTemperature { theta1, theta2, fraction } => {
                if !(theta1 > 0.0 && theta2 > 0.0) {
                    return Err(Error::Config("both temperatures must be > 0".into()));
                }
                if !(0.0..=1.0).contains(&fraction) {
                    return Err(Error::Config("mixture fraction must lie in [0, 1]".into()));
                }
            }
        }
        for &p in &self.moment_ps {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::Config(format!("moment order must be >= 0, got {p}")));
            }
        }
        if let Some(k) = self.entropy_neighbors {
            if k < 3 || self.n_particles < 10 * k {
                return Err(Error::Config(format!(
                    "entropy estimation needs k >= 3 and N >= 10k (k = {k}, N = {})",
                    self.n_particles
                )));
            }
        }
        Ok(())
    }

    fn default_ps() -> Vec<f64> {
        alloc::vec![0.5, 1.0, 1.5, 2.0]
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            n_particles: 100_000,
            model: RestitutionModel::Constant { e0: 0.9 },
            init: InitialCondition::Maxwellian { theta: 1.0 / 3.0 },
            t_end: 100.0,
            samples_per_decade: 64,
            seed: 0,
            majorant_refresh: 64,
            moment_ps: SimulationConfig::default_ps(),
            entropy_neighbors: None,
        }
    }
}

/// The empirical velocity distribution: `N` velocities of weight `1/N`.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    velocities: Vec<Vec3>,
    time: f64,
    collision_count: u64,
    rng: ChaCha12Rng,
    /// Current bound on pairwise relative speeds.
    majorant: f64,
    steps_since_refresh: usize,
    majorant_refresh: usize,
    /// Running sum of |v|^2, re-synced at every majorant refresh.
    speed_sq_sum: f64,
    majorant_breaches: u64,
}

impl ParticleEnsemble {
    pub fn velocities(&self) -> &[Vec3] {
        &self.velocities
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn collision_count(&self) -> u64 {
        self.collision_count
    }

    pub fn majorant_breaches(&self) -> u64 {
        self.majorant_breaches
    }

    /// Kinetic energy `E = (1/N) sum |v_i|^2`.
    pub fn energy(&self) -> f64 {
        self.speed_sq_sum / self.velocities.len() as f64
    }

    /// Mean velocity (conserved, zero after initialization).
    pub fn mean_velocity(&self) -> Vec3 {
        let mut s = Vec3::ZERO;
        for v in &self.velocities {
            s += *v;
        }
        s / self.velocities.len() as f64
    }

    fn recompute_cached(&mut self) {
        let mut sum = 0.0;
        let mut max_sq = 0.0f64;
        for v in &self.velocities {
            let n2 = v.norm_sq();
            sum += n2;
            max_sq = max_sq.max(n2);
        }
        self.speed_sq_sum = sum;
        self.majorant = 2.0 * max_sq.sqrt();
        self.steps_since_refresh = 0;
    }

    /// Empirical moments `m_p = (1/N) sum |v_i|^(2p)`.
    pub fn measure_moments(&self, ps: &[f64]) -> MomentVector {
        let n = self.velocities.len() as f64;
        let mut entries = Vec::with_capacity(ps.len());
        for &p in ps {
            let twice = (2.0 * p).round();
            let half_integer = (2.0 * p - twice).abs() <= 1e-12;
            let mut acc = 0.0;
            if p == 0.0 {
                acc = n;
            } else if half_integer {
                // |v|^(2p) via integer powers of |v|^2 (one sqrt for odd k).
                let k = twice as i32;
                if k % 2 == 0 {
                    for v in &self.velocities {
                        acc += v.norm_sq().powi(k / 2);
                    }
                } else {
                    for v in &self.velocities {
                        let n2 = v.norm_sq();
                        acc += n2.sqrt() * n2.powi((k - 1) / 2);
                    }
                }
            } else {
                for v in &self.velocities {
                    acc += v.norm_sq().powf(p);
                }
            }
            entries.push((p, acc / n));
        }
        MomentVector::new(self.time, &entries).expect("measured moments are valid")
    }

    /// Advance by `dt`, processing candidate pairs at the majorant rate.
    /// The majorant is re-armed every `majorant_refresh` steps and after
    /// every breach.
    pub fn step(&mut self, dt: f64, model: &RestitutionModel) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("step needs dt > 0, got {dt}")));
        }
        if self.steps_since_refresh >= self.majorant_refresh {
            self.recompute_cached();
        }
        let n = self.velocities.len();
        let candidates = if self.majorant > 0.0 {
            let mean = n as f64 * self.majorant * dt / 2.0;
            Poisson::new(mean)
                .map_err(|_| Error::Numeric(format!("invalid candidate rate {mean}")))?
                .sample(&mut self.rng) as u64
        } else {
            0
        };
        for _ in 0..candidates {
            let i = self.rng.gen_range(0..n);
            let mut j = self.rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let u = self.velocities[i] - self.velocities[j];
            let speed = u.norm();
            if speed == 0.0 {
                continue; // coincident velocities carry no collision geometry
            }
            let breach = speed > self.majorant;
            if breach {
                // Accept unconditionally, then re-arm below.
                log::debug!(
                    "majorant breach at t = {:.6e}: |u| = {speed:.6e} > {:.6e}",
                    self.time,
                    self.majorant
                );
                self.majorant_breaches += 1;
            } else if self.rng.gen::<f64>() * self.majorant > speed {
                continue;
            }
            let n_hat = sample_direction(u, &mut self.rng)
                .expect("speed > 0 guarantees a direction");
            let un = u.dot(n_hat);
            let e = model.eval_e(un.abs())?;
            let transfer = n_hat * ((1.0 + e) / 2.0 * un);
            self.velocities[i] -= transfer;
            self.velocities[j] += transfer;
            // Exact per-collision energy change: -(1 - e^2)/2 (u.n)^2.
            self.speed_sq_sum -= (1.0 - e * e) / 2.0 * un * un;
            self.collision_count += 1;
            if breach {
                self.recompute_cached();
            }
        }
        self.time += dt;
        self.steps_since_refresh += 1;
        Ok(())
    }
}

/// Draw velocities for `config`, shift them to exactly zero mean and seed
/// the collision stream. Deterministic in the seed.
pub fn init_ensemble(config: &SimulationConfig) -> Result<ParticleEnsemble> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, STREAM_INIT);
    let n = config.n_particles;
    let mut velocities = Vec::with_capacity(n);
    for _ in 0..n {
        velocities.push(sample_initial(&config.init, &mut rng));
    }
    let mut mean = Vec3::ZERO;
    for v in &velocities {
        mean += *v;
    }
    mean = mean / n as f64;
    for v in &mut velocities {
        *v -= mean;
    }
    let mut ensemble = ParticleEnsemble {
        velocities,
        time: 0.0,
        collision_count: 0,
        rng: stream_rng(config.seed, STREAM_COLLISIONS),
        majorant: 0.0,
        steps_since_refresh: 0,
        majorant_refresh: config.majorant_refresh,
        speed_sq_sum: 0.0,
        majorant_breaches: 0,
    };
    ensemble.recompute_cached();
    Ok(ensemble)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_initial<R: Rng>(init: &InitialCondition, rng: &mut R) -> Vec3 {
    match *init {
        InitialCondition::Maxwellian { theta } => {
            let s = theta.sqrt();
            let g = |rng: &mut R| -> f64 { StandardNormal.sample(rng) };
            Vec3::new(g(rng) * s, g(rng) * s, g(rng) * s)
        }
        InitialCondition::UniformBall { radius } => {
            let g = |rng: &mut R| -> f64 { StandardNormal.sample(rng) };
            let dir = Vec3::new(g(rng), g(rng), g(rng));
            let norm = dir.norm();
            let r = radius * rng.gen::<f64>().cbrt();
            if norm == 0.0 {
                Vec3::ZERO
            } else {
                dir * (r / norm)
            }
        }
        InitialCondition::TwoTemperature { theta1, theta2, fraction } => {
            let theta = if rng.gen::<f64>() < fraction { theta1 } else { theta2 };
            sample_initial(&InitialCondition::Maxwellian { theta }, rng)
        }
    }
}

/// Draw an impact direction with density proportional to `|u . n|` on the
/// hemisphere `{n : u . n > 0}` (the collision rule is invariant under
/// `n -> -n`, so the hemisphere suffices): `cos theta = sqrt(U)` about the
/// axis `u/|u|`, azimuth uniform. Returns `None` for `|u| = 0`, where the
/// caller must skip the pair.
pub fn sample_direction<R: Rng>(u: Vec3, rng: &mut R) -> Option<Vec3> {
    let speed = u.norm();
    if speed == 0.0 {
        return None;
    }
    let axis = u / speed;
    let cos_t = rng.gen::<f64>().sqrt();
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = 2.0 * core::f64::consts::PI * rng.gen::<f64>();
    // Orthonormal frame around the axis.
    let helper = if axis.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
    let mut t1 = Vec3::new(
        axis.y * helper.z - axis.z * helper.y,
        axis.z * helper.x - axis.x * helper.z,
        axis.x * helper.y - axis.y * helper.x,
    );
    t1 = t1 / t1.norm();
    let t2 = Vec3::new(
        axis.y * t1.z - axis.z * t1.y,
        axis.z * t1.x - axis.x * t1.z,
        axis.x * t1.y - axis.y * t1.x,
    );
    Some(axis * cos_t + (t1 * phi.cos() + t2 * phi.sin()) * sin_t)
}

/// Apply the inelastic collision rule to one pair. The restitution
/// coefficient is evaluated at the impact speed `|u . n|`.
pub fn collide_pair(
    v: Vec3,
    v_star: Vec3,
    n_hat: Vec3,
    model: &RestitutionModel,
) -> Result<(Vec3, Vec3)> {
    let u = v - v_star;
    let un = u.dot(n_hat);
    let e = model.eval_e(un.abs())?;
    let transfer = n_hat * ((1.0 + e) / 2.0 * un);
    Ok((v - transfer, v_star + transfer))
}

/// Outcome of a particle run: the recorded series, plus the abort error if
/// the run stopped early (the series then holds the rows recorded so far).
#[derive(Debug)]
pub struct RunResult {
    pub series: TimeSeries,
    pub aborted: Option<Error>,
}

/// Run a full simulation, recording diagnostics at log-spaced times.
pub fn run(config: &SimulationConfig) -> Result<RunResult> {
    let mut ensemble = init_ensemble(config)?;
    let times = log_output_times(config.t_end, config.samples_per_decade);
    let mut series = TimeSeries::new(config.moment_ps.clone());
    let mut entropy_rng = stream_rng(config.seed, STREAM_ENTROPY);

    let record = |series: &mut TimeSeries,
                  ensemble: &ParticleEnsemble,
                  entropy_rng: &mut ChaCha12Rng|
     -> Result<()> {
        let mv = ensemble.measure_moments(&config.moment_ps);
        let entropy_value = match config.entropy_neighbors {
            Some(k) => {
                let opts = entropy::KnnOptions { neighbors: k, bootstrap_resamples: 0 };
                entropy::entropy_knn_with(ensemble.velocities(), &opts, entropy_rng)?.h_signed
            }
            None => f64::NAN,
        };
        series.push(Sample {
            t: ensemble.time(),
            energy: ensemble.energy(),
            moments: mv.entries().iter().map(|&(_, m)| m).collect(),
            entropy: entropy_value,
            collisions: ensemble.collision_count(),
        });
        Ok(())
    };

    record(&mut series, &ensemble, &mut entropy_rng)?;
    for &target in times.iter().skip(1) {
        while ensemble.time < target {
            // Expected collisions per particle per step stay below the
            // target: the per-particle rate is about sqrt(2 E).
            let rate = (2.0 * ensemble.energy()).sqrt();
            let dt_cap = if rate > 0.0 {
                COLLISIONS_PER_PARTICLE_STEP / rate
            } else {
                target - ensemble.time
            };
            let dt = dt_cap.min(target - ensemble.time);
            if let Err(err) = ensemble.step(dt, &config.model) {
                return Ok(RunResult { series, aborted: Some(err) });
            }
        }
        // Clamp the recorded time onto the grid (fp drift accumulates over
        // many steps).
        ensemble.time = target;
        if let Err(err) = record(&mut series, &ensemble, &mut entropy_rng) {
            return Ok(RunResult { series, aborted: Some(err) });
        }
    }
    Ok(RunResult { series, aborted: None })
}
