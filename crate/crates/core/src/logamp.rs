//! Complex numbers stored as (ln|z|, arg z).
//!
//! Series coefficients such as αⁿ/√(n! f²(n)!) overflow `f64` long before the
//! truncation dimensions used here, so every coefficient sequence is built in
//! this form and only exponentiated after normalization.

use std::ops::{Mul, Neg};

use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogAmplitude {
    pub ln_abs: f64,
    pub phase: f64,
}

impl LogAmplitude {
    pub const ZERO: Self = Self {
        ln_abs: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: Self = Self {
        ln_abs: 0.0,
        phase: 0.0,
    };

    pub fn new(ln_abs: f64, phase: f64) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { ln_abs, phase }
        }
    }

    pub fn from_complex(z: C64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self {
                ln_abs: z.norm().ln(),
                phase: z.arg(),
            }
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(C64::new(x, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }

    pub fn to_complex(&self) -> C64 {
        self.scaled(0.0)
    }

    /// `self · e^{-ln_scale}` as an ordinary complex number.
    pub fn scaled(&self, ln_scale: f64) -> C64 {
        if self.is_zero() {
            C64::new(0.0, 0.0)
        } else {
            C64::from_polar((self.ln_abs - ln_scale).exp(), self.phase)
        }
    }

    /// Integer power with 0⁰ = 1.
    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            Self::ONE
        } else if self.is_zero() {
            Self::ZERO
        } else {
            Self {
                ln_abs: self.ln_abs * n as f64,
                phase: self.phase * n as f64,
            }
        }
    }

    /// Multiply by `e^{ln_factor}` (a positive real).
    pub fn mul_ln(&self, ln_factor: f64) -> Self {
        if self.is_zero() {
            *self
        } else {
            Self::new(self.ln_abs + ln_factor, self.phase)
        }
    }

    /// Multiply by a unit phase `e^{i θ}`.
    pub fn rotate(&self, theta: f64) -> Self {
        if self.is_zero() {
            *self
        } else {
            Self {
                ln_abs: self.ln_abs,
                phase: self.phase + theta,
            }
        }
    }
}

impl Mul for LogAmplitude {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            Self::ZERO
        } else {
            Self {
                ln_abs: self.ln_abs + rhs.ln_abs,
                phase: self.phase + rhs.phase,
            }
        }
    }
}

impl Neg for LogAmplitude {
    type Output = Self;

    fn neg(self) -> Self {
        self.rotate(std::f64::consts::PI)
    }
}

/// Sum of log-form terms, rescaled by the largest magnitude.
pub fn log_sum(terms: &[LogAmplitude]) -> LogAmplitude {
    let peak = terms.iter().map(|t| t.ln_abs).fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return LogAmplitude::ZERO;
    }
    let s: C64 = terms.iter().map(|t| t.scaled(peak)).sum();
    LogAmplitude::from_complex(s).mul_ln(peak)
}

/// ln ∑|tᵢ|², or -∞ for an all-zero sequence.
pub fn ln_sum_sq(terms: &[LogAmplitude]) -> f64 {
    let peak = terms.iter().map(|t| t.ln_abs).fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| (2.0 * (t.ln_abs - peak)).exp())
        .sum();
    s.ln() + 2.0 * peak
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        let z = C64::new(-1.5, 0.25);
        let back = LogAmplitude::from_complex(z).to_complex();
        assert!((back - z).norm() < 1e-15);
        assert!(LogAmplitude::from_complex(C64::new(0.0, 0.0)).is_zero());
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        assert_eq!(LogAmplitude::ZERO.powi(0), LogAmplitude::ONE);
        assert!(LogAmplitude::ZERO.powi(3).is_zero());
    }

    #[test]
    fn sums_survive_huge_magnitudes() {
        let a = LogAmplitude::new(2000.0, 0.0);
        let b = LogAmplitude::new(2000.0 + 2f64.ln(), std::f64::consts::PI);
        let s = log_sum(&[a, b]);
        // e^2000 - 2 e^2000 = -e^2000
        assert!((s.ln_abs - 2000.0).abs() < 1e-12);
        assert!((s.phase.cos() + 1.0).abs() < 1e-12);
        let l = ln_sum_sq(&[a, a]);
        assert!((l - (4000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
