//! Simulation of a three-mode linearized optomechanical network: two cavity
//! modes `a1`, `a2` coupled through one mechanical mode `b` with tunable
//! beam-splitter couplings `g1(t)`, `g2(t)`.
//!
//! The crate covers two experiments:
//!
//! * adiabatic state conversion from `a1` to `a2` through the mechanical dark
//!   mode ([`spectral`], [`adiabatic`], [`gaussian`]);
//! * transmission of traveling pulses from the input channel of `a1` to the
//!   output channel of `a2` ([`transmission`], [`pulse`]).
//!
//! All rates share one reference unit chosen per scenario; times are in the
//! inverse of that unit. [`scenario`] drives both experiments from plain-text
//! configuration files and writes CSV artifacts.
//!
//! Runnable walkthroughs for each capability live in `examples/`:
//!
//! ```bash
//! cargo run --release --example adiabatic_conversion
//! ```

pub mod adiabatic;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod pulse;
pub mod scenario;
pub mod spectral;
pub mod transmission;

mod csv;
mod quad;

pub use error::{Error, Result};
pub use model::{CouplingSchedule, DynamicMatrix, SystemParams};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// 3×3 complex matrix over the mode basis `(a1, b, a2)`.
pub type Mat3 = nalgebra::Matrix3<C64>;
/// Complex 3-vector over the mode basis `(a1, b, a2)`.
pub type Vec3 = nalgebra::Vector3<C64>;
