//! Single-atom cavity QED with a fiber-overcoupled microtoroidal resonator.
//!
//! A two-level atom couples to the two counter-propagating whispering-gallery
//! modes `a` and `b` of a microtoroid, which is driven through a tapered fiber.
//! The crate computes
//!
//! * weak-drive (linear) transmission and reflection spectra and the
//!   frequency-resolved transfer coefficients of every output channel ([`linear`]),
//! * full quantum steady states of the Lindblad master equation together with
//!   output fluxes and zero-delay photon correlations ([`master`]),
//! * the semiclassical optical-bistability curve of the coupled normal mode and
//!   the saturation-limited pulse budget ([`semiclassical`]),
//! * output pulses and the fidelity of entangled-path coherent-state
//!   preparation for Gaussian input pulses ([`pulse`]).
//!
//! # Units
//!
//! Rates are angular frequencies in rad/us, so a rate quoted as `x` MHz
//! (meaning `rate / 2pi = x MHz`) is stored as `2pi * x`. Times are in
//! microseconds and photon fluxes in photons per microsecond. Use
//! [`SystemParams::from_mhz`] and [`units::mhz`] to enter values the way they
//! are usually quoted.
//!
//! ```
//! use toroidq::{linear, SystemParams};
//!
//! // Critical coupling with a strongly coupled atom.
//! let params = SystemParams::from_mhz(10.0, 10.0, 0.0, 5.2).with_coupling_mhz(100.0);
//! let ss = linear::linear_steady_state(&params).unwrap();
//! assert!((ss.t_f - 0.25).abs() < 0.01);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
mod error;
pub mod linear;
pub mod master;
pub mod model;
pub mod operator;
pub mod pulse;
pub mod quadrature;
pub mod semiclassical;
pub mod units;

pub use error::{Error, Result};
pub use model::{FockConfig, SystemParams};
pub use num_complex::Complex64;
pub use operator::ComplexOperator;
