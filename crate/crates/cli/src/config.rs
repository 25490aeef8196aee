//! Run configuration files (TOML).
//!
//! ```toml
//! seed = 42
//! n_particles = 100000
//! t_end = 1000.0
//! samples_per_decade = 16
//! majorant_refresh = 64
//! moment_ps = [0.5, 1.0, 1.5, 2.0]
//! entropy_knn = 5            # optional: enables the entropy column
//!
//! [restitution]
//! kind = "constant"          # constant | power-law | viscoelastic
//! e0 = 0.9                   # constant
//! # alpha = 0.1, gamma = 0.2, e_floor = 0.05   (power-law)
//! # a = 1.0                                    (viscoelastic)
//!
//! [init]
//! kind = "maxwellian"        # maxwellian | uniform-ball | two-temperature
//! theta = 0.3333333333333333
//! # radius = 1.0
//! # theta1 = 1.0, theta2 = 0.1, fraction = 0.5
//! ```

use granular_core::dsmc::{InitialCondition, SimulationConfig};
use granular_core::restitution::{RestitutionModel, DEFAULT_E_FLOOR};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub n_particles: usize,
    pub t_end: f64,
    #[serde(default = "default_samples_per_decade")]
    pub samples_per_decade: usize,
    #[serde(default = "default_majorant_refresh")]
    pub majorant_refresh: usize,
    #[serde(default = "default_moment_ps")]
    pub moment_ps: Vec<f64>,
    pub entropy_knn: Option<usize>,
    pub restitution: RestitutionSection,
    pub init: InitSection,
}

fn default_samples_per_decade() -> usize {
    64
}

fn default_majorant_refresh() -> usize {
    64
}

fn default_moment_ps() -> Vec<f64> {
    vec![0.5, 1.0, 1.5, 2.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestitutionSection {
    pub kind: String,
    pub e0: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub e_floor: Option<f64>,
    pub a: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub kind: String,
    pub theta: Option<f64>,
    pub radius: Option<f64>,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub fraction: Option<f64>,
}

impl RestitutionSection {
    pub fn to_model(&self) -> Result<RestitutionModel, String> {
        match self.kind.as_str() {
            "constant" => {
                let e0 = self.e0.ok_or("restitution.kind = constant needs e0")?;
                RestitutionModel::constant(e0).map_err(|e| e.to_string())
            }
            "power-law" => {
                let alpha = self.alpha.ok_or("restitution.kind = power-law needs alpha")?;
                let gamma = self.gamma.ok_or("restitution.kind = power-law needs gamma")?;
                let e_floor = self.e_floor.unwrap_or(DEFAULT_E_FLOOR);
                RestitutionModel::power_law(alpha, gamma, e_floor).map_err(|e| e.to_string())
            }
            "viscoelastic" => {
                let a = self.a.ok_or("restitution.kind = viscoelastic needs a")?;
                RestitutionModel::viscoelastic(a).map_err(|e| e.to_string())
            }
            other => Err(format!(
                "unknown restitution kind {other:?} (expected constant, power-law or viscoelastic)"
            )),
        }
    }
}

impl InitSection {
    pub fn to_init(&self) -> Result<InitialCondition, String> {
        match self.kind.as_str() {
            "maxwellian" => {
                let theta = self.theta.ok_or("init.kind = maxwellian needs theta")?;
                Ok(InitialCondition::Maxwellian { theta })
            }
            "uniform-ball" => {
                let radius = self.radius.ok_or("init.kind = uniform-ball needs radius")?;
                Ok(InitialCondition::UniformBall { radius })
            }
            "two-temperature" => Ok(InitialCondition::TwoTemperature {
                theta1: self.theta1.ok_or("init.kind = two-temperature needs theta1")?,
                theta2: self.theta2.ok_or("init.kind = two-temperature needs theta2")?,
                fraction: self.fraction.ok_or("init.kind = two-temperature needs fraction")?,
            }),
            other => Err(format!(
                "unknown init kind {other:?} (expected maxwellian, uniform-ball or two-temperature)"
            )),
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_simulation(&self, seed_override: Option<u64>) -> Result<SimulationConfig, String> {
        let config = SimulationConfig {
            n_particles: self.n_particles,
            model: self.restitution.to_model()?,
            init: self.init.to_init()?,
            t_end: self.t_end,
            samples_per_decade: self.samples_per_decade,
            seed: seed_override.or(self.seed).unwrap_or(0),
            majorant_refresh: self.majorant_refresh,
            moment_ps: self.moment_ps.clone(),
            entropy_neighbors: self.entropy_knn,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}
