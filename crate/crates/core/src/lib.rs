//! Coherent and nonclassical states of the minimal-length (noncommutative)
//! non-Hermitian oscillator and its q-deformed cousin, built in a truncated
//! Fock space.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: q-numbers, Pochhammer symbols, Hermite polynomials,
//!   terminating ₂F₁, modified Bessel K and log-gamma.
//! * [`deform`]: the three deformation kernels and their derived sequences
//!   f²(n), f²(n)!, ρₙ and eₙ.
//! * [`states`]: Glauber, nonlinear, q-deformed, Gazeau–Klauder, squeezed,
//!   cat and photon-added states as normalized [`states::FockState`]s.
//! * [`metrics`]: quadrature variances, uncertainty bounds, Mandel Q, g²(0),
//!   photon distributions, autocorrelation and revival times.
//! * [`beamsplitter`]: two-mode output states, reduced density matrices and
//!   entanglement entropies.
//! * [`measure`]: moment checks for the resolution-of-identity measure.
//! * [`fock_io`]: CSV/JSON/SVG emission.
//!
//! Everything is deterministic.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamsplitter;
pub mod deform;
pub mod error;
pub mod fock_io;
pub mod logamp;
pub mod measure;
pub mod metrics;
pub mod quadrature;
pub mod specfun;
pub mod states;

pub use deform::Deformation;
pub use error::{Error, Result};
pub use logamp::LogAmplitude;
pub use states::{FockState, Truncation};

pub use num_complex::Complex64 as C64;
