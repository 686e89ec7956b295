//! Kinetic geometry, kinetic Hölder estimators and ellipticity checks for the non-cutoff
//! Boltzmann collision kernel.
//!
//! Velocities are stored as [`Vec3`] in every dimension; for `d = 2` the third component is zero.

// `!(x > 0.0)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geometry;
pub mod harness;
pub mod holder;
pub mod kernel;
pub mod numerics;
pub mod params;
pub mod profile;
pub mod verifier;

pub use params::{make_inverse_power_params, KernelMode, ModelParams};
pub use profile::{Hydro, HydroBounds, Profile, ProfileSpec};

/// Velocity and position vectors. The third component is zero when `d = 2`.
pub type Vec3 = nalgebra::Vector3<f64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("numerics: {0}")]
    Numerics(String),
    #[error("{what} did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { what: String, achieved: f64, requested: f64 },
    #[error("kernel: {0}")]
    Kernel(String),
    #[error("holder: {0}")]
    Holder(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
