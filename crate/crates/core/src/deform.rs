//! Deformation kernels f²(n) and the sequences built on them.
//!
//! Products start at k = 1: f²(n)! = ∏_{k=1}^{n} f²(k), so that for the
//! perturbative kernel f²(n)! = (τ/2)ⁿ (2 + 2/τ)^{(n)}.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::qcalc::bracket_unchecked;

/// Above this τ the first-order spectrum is a poor model; we warn, not fail.
pub const TAU_WARN: f64 = 0.5;

static TAU_WARNED: AtomicBool = AtomicBool::new(false);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Deformation {
    Harmonic,
    PerturbativeNc { tau: f64 },
    QDeformed { q: f64 },
}

/// E_n = ħω(An + Bn²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumCoeffs {
    pub a: f64,
    pub b: f64,
}

impl SpectrumCoeffs {
    pub fn new(tau: f64) -> Self {
        Self {
            a: 1.0 + tau / 2.0,
            b: tau / 2.0,
        }
    }
}

impl Deformation {
    pub fn nc(tau: f64) -> Result<Self> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::domain(format!("tau must be finite and >= 0, got {tau}")));
        }
        if tau > TAU_WARN && !TAU_WARNED.swap(true, Ordering::Relaxed) {
            log::warn!("tau = {tau} is beyond the first-order regime of the perturbative spectrum");
        }
        Ok(Deformation::PerturbativeNc { tau })
    }

    pub fn q_deformed(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("q must lie in (0, 1], got {q}")));
        }
        Ok(Deformation::QDeformed { q })
    }

    pub fn tau(&self) -> f64 {
        match *self {
            Deformation::PerturbativeNc { tau } => tau,
            _ => 0.0,
        }
    }

    /// A and B of the quadratic spectrum; q-deformations have none.
    pub fn spectrum(&self) -> Option<SpectrumCoeffs> {
        match *self {
            Deformation::Harmonic => Some(SpectrumCoeffs::new(0.0)),
            Deformation::PerturbativeNc { tau } => Some(SpectrumCoeffs::new(tau)),
            Deformation::QDeformed { .. } => None,
        }
    }

    pub fn f_squared(&self, n: usize) -> f64 {
        match *self {
            Deformation::Harmonic => 1.0,
            Deformation::PerturbativeNc { tau } => {
                let s = SpectrumCoeffs::new(tau);
                s.a + s.b * n as f64
            }
            Deformation::QDeformed { q } => {
                if n == 0 {
                    1.0
                } else {
                    bracket_unchecked(n, q) / n as f64
                }
            }
        }
    }

    /// eₙ = n f²(n), the eigenvalue of A†A on |n⟩.
    pub fn dimensionless_e(&self, n: usize) -> f64 {
        match *self {
            Deformation::QDeformed { q } => bracket_unchecked(n, q),
            _ => n as f64 * self.f_squared(n),
        }
    }

    pub fn f_factorial_squared(&self, n: usize) -> f64 {
        (1..=n).map(|k| self.f_squared(k)).product()
    }

    pub fn ln_f_factorial_squared(&self, n: usize) -> f64 {
        (1..=n).map(|k| self.f_squared(k).ln()).sum()
    }

    /// ρₙ = n! f²(n)! = ∏ eₖ.
    pub fn rho(&self, n: usize) -> f64 {
        (1..=n).map(|k| self.dimensionless_e(k)).product()
    }

    pub fn ln_rho(&self, n: usize) -> f64 {
        (1..=n).map(|k| self.dimensionless_e(k).ln()).sum()
    }

    pub fn table(&self, len: usize) -> DeformTable {
        DeformTable::new(*self, len)
    }
}

/// Eₙ = ħω eₙ.
pub fn energy_level(d: &Deformation, n: usize, omega: f64, hbar: f64) -> Result<f64> {
    if !(omega > 0.0) || !(hbar > 0.0) {
        return Err(Error::domain("omega and hbar must be positive"));
    }
    if matches!(d, Deformation::QDeformed { .. }) {
        return Err(Error::domain(
            "energy levels are defined for the harmonic and NC spectra only",
        ));
    }
    Ok(hbar * omega * d.dimensionless_e(n))
}

/// Precomputed sequences for indices 0..len, shared read-only by constructors.
#[derive(Clone, Debug)]
pub struct DeformTable {
    pub deformation: Deformation,
    pub f2: Vec<f64>,
    pub e: Vec<f64>,
    pub ln_ffact2: Vec<f64>,
    pub ln_rho: Vec<f64>,
}

impl DeformTable {
    pub fn new(d: Deformation, len: usize) -> Self {
        let f2: Vec<f64> = (0..len).map(|n| d.f_squared(n)).collect();
        let e: Vec<f64> = (0..len).map(|n| d.dimensionless_e(n)).collect();
        let mut ln_ffact2 = Vec::with_capacity(len);
        let mut ln_rho = Vec::with_capacity(len);
        let (mut lf, mut lr) = (0.0, 0.0);
        for n in 0..len {
            if n > 0 {
                lf += f2[n].ln();
                lr += e[n].ln();
            }
            ln_ffact2.push(lf);
            ln_rho.push(lr);
        }
        Self {
            deformation: d,
            f2,
            e,
            ln_ffact2,
            ln_rho,
        }
    }

    pub fn len(&self) -> usize {
        self.f2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f2.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{pochhammer, q_bracket};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn f_squared_examples() {
        assert_eq!(Deformation::Harmonic.f_squared(9), 1.0);
        let nc = Deformation::nc(0.1).unwrap();
        assert!((nc.f_squared(2) - 1.15).abs() < 1e-15);
        let q = Deformation::q_deformed(0.5).unwrap();
        assert!((q.f_squared(2) - 0.625).abs() < 1e-15);
        assert_eq!(q.f_squared(0), 1.0);
    }

    #[test]
    fn factorial_examples() {
        let nc = Deformation::nc(0.1).unwrap();
        assert_eq!(nc.f_factorial_squared(0), 1.0);
        assert!((nc.f_factorial_squared(1) - 1.1).abs() < 1e-15);
        assert_eq!(nc.rho(0), 1.0);
        assert_eq!(Deformation::Harmonic.rho(4), 24.0);
        assert!((nc.rho(2) - 2.0 * 1.1 * 1.15).abs() < 1e-14);
        assert!((nc.rho(2) - 2.53).abs() < 1e-14);
    }

    #[test]
    fn energy_examples() {
        let nc = Deformation::nc(0.1).unwrap();
        assert_eq!(energy_level(&nc, 0, 0.5, 1.0).unwrap(), 0.0);
        assert!((energy_level(&nc, 1, 0.5, 1.0).unwrap() - 0.55).abs() < 1e-15);
        let h = Deformation::nc(0.0).unwrap();
        assert_eq!(energy_level(&h, 7, 0.5, 2.0).unwrap(), 7.0);
        assert!(energy_level(&nc, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn closed_form_factorial() {
        for &tau in &[0.01, 0.1, 0.5, 2.0] {
            let d = Deformation::nc(tau).unwrap();
            for n in 0..=100usize {
                let want = (tau / 2.0).powi(n as i32) * pochhammer(2.0 + 2.0 / tau, n);
                assert!(rel(d.f_factorial_squared(n), want) < 1e-12, "tau={tau} n={n}");
            }
        }
    }

    #[test]
    fn first_order_expansion() {
        let resid = |tau: f64, n: usize| {
            let d = Deformation::nc(tau).unwrap();
            let nf = n as f64;
            (1.0 / d.f_factorial_squared(n) - (1.0 - tau / 4.0 * nf * (3.0 + nf))).abs()
        };
        for n in 1..=10usize {
            let r1 = resid(0.01, n);
            let r2 = resid(0.005, n);
            assert!(r1 <= 600.0 * 0.01 * 0.01, "n={n}");
            let ratio = r1 / r2;
            assert!((3.5..4.5).contains(&ratio), "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn limits_reproduce_harmonic_bitwise() {
        let h = Deformation::Harmonic.table(200);
        for d in [
            Deformation::nc(0.0).unwrap(),
            Deformation::q_deformed(1.0).unwrap(),
        ] {
            let t = d.table(200);
            assert_eq!(t.f2, h.f2);
            assert_eq!(t.e, h.e);
            assert_eq!(t.ln_ffact2, h.ln_ffact2);
            assert_eq!(t.ln_rho, h.ln_rho);
        }
    }

    #[test]
    fn q_rho_is_q_factorial() {
        let d = Deformation::q_deformed(0.7).unwrap();
        for n in 0..20 {
            let b: f64 = (1..=n).map(|k| q_bracket(k, 0.7).unwrap()).product();
            assert!(rel(d.rho(n), b) < 1e-14);
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(Deformation::nc(-0.1).is_err());
        assert!(Deformation::nc(f64::NAN).is_err());
        assert!(Deformation::q_deformed(0.0).is_err());
        assert!(Deformation::q_deformed(1.01).is_err());
    }

    proptest! {
        #[test]
        fn rho_ratio_is_e(n in 1usize..150, tau in 0.0f64..3.0) {
            let d = Deformation::nc(tau).unwrap();
            let t = d.table(n + 1);
            let ratio = (t.ln_rho[n] - t.ln_rho[n - 1]).exp();
            prop_assert!(rel(ratio, t.e[n]) < 1e-11);
            prop_assert!(rel(t.e[n], n as f64 * t.f2[n]) < 1e-15);
        }
    }
}
