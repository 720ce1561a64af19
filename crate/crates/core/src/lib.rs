//! Desk-scale laboratory for sequential Monte Carlo with multinomial
//! resampling on finite state spaces.
//!
//! The crate is organized around a measure-valued model (`fk`): a chain of
//! probability measures linked by positive weight functions and stochastic
//! kernels, together with the propagator that transports test functions
//! between levels. On top of it sit
//!
//! - `particle`: the interacting particle system (resample + mutate), a
//!   deterministic parallel replication harness and an exact enumeration
//!   oracle over particle occupancies,
//! - `tree`: leveled tree models of multimodal state spaces with explicit
//!   propagators and mass-shift constants,
//! - `theta`: a fully worked one-parameter family of tree models with
//!   closed forms for masses, propagator norms and error bounds,
//! - `sis`: sequential importance sampling with its exact error formula and
//!   degeneracy diagnostics,
//! - `bounds`: assembly of non-asymptotic mean-squared-error bounds from
//!   stability constants,
//! - `local`: nested partition hierarchies, local norms, mixing and
//!   hyperboundedness certification, and the stability-constant chain.
//!
//! Measure and propagator arithmetic is generic over the scalar type via
//! [`Scalar`]; simulation, spectral machinery and the file formats are pinned
//! to [`Real`] (`f64`).

pub mod bounds;
pub mod error;
pub mod fixtures;
pub mod fk;
pub mod io;
pub mod local;
pub mod particle;
pub mod sampling;
pub mod scalar;
pub mod sis;
pub mod theta;
pub mod tree;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub use bounds::{BoundReport, ConstantKind, StabilityConstants, VarianceProfile};
pub use fk::{FkModel, FnOnLevel, Measure};
pub use particle::{EstimatorSample, ExactLaw, MseEstimate, ParticleState};
pub use sis::SisSetup;
pub use theta::ThetaExample;
pub use tree::{TreeConstants, TreeModel};
