//! Kinetic-theory kernels for freely cooling granular gases.
//!
//! The crate models a spatially homogeneous gas of inelastic hard spheres
//! whose collisions dissipate kinetic energy according to a (possibly
//! impact-velocity-dependent) coefficient of normal restitution. It provides:
//!
//! - [`restitution`]: restitution-coefficient models and the kinematic map
//!   `theta(r) = r * e(r)` together with its inverse and Jacobian;
//! - [`dissipation`]: the energy-dissipation potential `Psi` and the
//!   entropy-production kernel `Phi` of the collision operator;
//! - [`moments`]: Povzner constants, the bounding moment hierarchy, the
//!   mean-field energy equation and weak-inelasticity thresholds;
//! - [`dsmc`]: a stochastic particle (DSMC) solver for the homogeneous
//!   inelastic Boltzmann equation with hard-sphere collision rates;
//! - [`entropy`]: k-nearest-neighbour entropy estimation and functional
//!   inequalities relating moments and entropy (with a Lambert W solver);
//! - [`haff`]: decay-exponent fits and verdicts for the generalized cooling
//!   law `E(t) ~ (1+t)^(-2/(1+gamma))`.
//!
//! Everything is deterministic given a seed, and the crate is `no_std`
//! compatible (with `alloc`); the `std` feature only switches float math to
//! the platform intrinsics and is enabled by default.
//!
//! ```
//! use granular_core::moments;
//! use granular_core::restitution::RestitutionModel;
//!
//! // Mean-field cooling of a gas with constant restitution 0.5 matches the
//! // separable solution E(t) = E0 / (1 + (1 - e^2)/16 sqrt(E0) t)^2.
//! let model = RestitutionModel::constant(0.5)?;
//! let energy = moments::meanfield_energy_at(&model, 1.0, &[0.0, 16.0 / 0.75])?;
//! assert!((energy[1] - 0.25).abs() < 1e-6);
//! # Ok::<(), granular_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-domain values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dissipation;
pub mod dsmc;
pub mod entropy;
mod error;
pub mod haff;
pub mod math;
pub mod moments;
pub mod restitution;
pub mod timeseries;
mod vec3;

pub use error::{Error, Result};
pub use vec3::Vec3;
