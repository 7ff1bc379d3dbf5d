//! Time-dependent Dunkl–Pauli oscillator with Aharonov–Bohm flux.
//!
//! Closed forms for the angular and radial spectra, the Ermakov–Pinney
//! scaling dynamics and the Lewis–Riesenfeld phase, each paired with an
//! independent numerical check. Numerical kernels are generic over
//! [`Real`] (`f32`, `f64`); the polynomial operator calculus also runs in
//! exact rationals.

pub mod angular;
pub mod cli;
pub mod dunkl_ops;
pub mod ermakov;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod radial;
pub mod scalar;
pub mod solution;
pub mod specfun;

pub use angular::{ab_constrain, eval_phi, lambda_of, verify_mode, AngularIndex, AngularMode};
pub use dunkl_ops::{DunklParams, ParitySector};
pub use ermakov::{pinney_oracle, solve, ErmakovTrajectory, ProfileSpec, TimeProfiles};
pub use error::{Error, Result};
pub use radial::{energy, k_minus, k_plus, FluxSpin, RadialMode, Region};
pub use scalar::{Real, Sign};
pub use solution::{lr_phase, phase_split, unitary_factor, PhaseRecord, Solution, StateSpec};

use num_rational::BigRational;

pub type DunklParams64 = DunklParams<f64>;
pub type DunklParams32 = DunklParams<f32>;
pub type ExactParams = DunklParams<BigRational>;
pub type ExactMonomials = dunkl_ops::MonomialFunction<BigRational>;
pub type AngularMode64 = AngularMode<f64>;
pub type RadialMode64 = RadialMode<f64>;
pub type FluxSpin64 = FluxSpin<f64>;
