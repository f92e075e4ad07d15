//! Simulation and verification toolkit for a massless quantized fermion
//! field on a periodic 1+1-dimensional box coupled to a classical scalar
//! potential.
//!
//! The toolkit builds exact finite Fock-space states, evaluates their
//! vacuum-subtracted observables as closed mode sums, solves the interacting
//! field dynamics exactly through diagonal phase fields, and runs the
//! flagship experiment: switch a potential window on and off and account for
//! the change in field energy with three independent estimators. With the
//! feedback choice `V = -f dJ/dz` the extracted energy grows without bound
//! in the coupling, which the coupling sweeps demonstrate directly.
//!
//! Module map:
//!
//! - [`spectral_basis`] — periodic box, momentum lattice, plane-wave spinors.
//! - [`fock`] — exact state algebra and brute-force bilinear expectations.
//! - [`observables`] — current, chiral densities, field energy as mode sums.
//! - [`potential_dynamics`] — potential windows and the characteristic
//!   solver for the phase fields.
//! - [`extraction`] — the energy accounting experiment and coupling sweeps.
//! - [`verification`] — the standard invariant battery with pinned
//!   tolerances.
//!
//! All numerics are generic over the scalar type via [`Scalar`]; the
//! concrete aliases below pin the common double-precision instantiation.

pub mod error;
mod linalg;
pub mod quadrature;
pub mod scalar;

pub mod extraction;
pub mod fock;
pub mod observables;
pub mod potential_dynamics;
pub mod spectral_basis;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision simulation domain.
pub type Domain64 = spectral_basis::SimulationDomain<f64>;
/// Double-precision Fock state.
pub type FockState64 = fock::FockStateVector<f64>;
/// Double-precision potential field.
pub type Potential64 = potential_dynamics::PotentialField<f64>;
/// Double-precision experiment configuration.
pub type Config64 = extraction::ExperimentConfig<f64>;
/// Double-precision extraction report.
pub type Report64 = extraction::ExtractionReport<f64>;

/// Single-precision aliases for quick exploration; verification tolerances
/// assume `f64`.
pub type Domain32 = spectral_basis::SimulationDomain<f32>;
pub type FockState32 = fock::FockStateVector<f32>;
pub type Potential32 = potential_dynamics::PotentialField<f32>;
pub type Config32 = extraction::ExperimentConfig<f32>;
