//! Special-function kernels. Everything factorial-like has a log-domain twin.

pub mod bessel;
pub mod gamma;
pub mod hermite;
pub mod hypergeometric;
pub mod qcalc;

pub use bessel::{bessel_k, bessel_k_scaled, ln_bessel_k};
pub use gamma::{ln_factorial, ln_pochhammer, log_gamma, pochhammer};
pub use hermite::{hermite, scaled_hermite_sequence};
pub use hypergeometric::{gauss_2f1_terminating, gauss_2f1_terminating_dd, gauss_2f1_terminating_log};
pub use qcalc::{ln_q_factorial, q_bracket, q_exp, q_exp_radius, q_factorial};
