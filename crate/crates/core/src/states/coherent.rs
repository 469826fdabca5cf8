use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{assemble, check_finite, dress_log, dressing_coupling, FockState, Truncation};
use crate::deform::{DeformTable, Deformation};
use crate::error::{Error, Result};
use crate::logamp::{log_sum, LogAmplitude};
use crate::specfun::gamma::ln_factorial;
use crate::specfun::q_exp_radius;

/// Keeps q-coherent states a finite distance inside the convergence disc.
pub const DIVERGENCE_MARGIN: f64 = 1e-6;

/// αⁿ/√(n!) e^{−|α|²/2}.
pub fn glauber(alpha: C64, trunc: &Truncation) -> Result<FockState> {
    check_finite("alpha", alpha)?;
    let a = LogAmplitude::from_complex(alpha);
    assemble(format!("glauber alpha={alpha}"), trunc, |len| {
        Ok((0..len)
            .map(|n| a.powi(n as u32).mul_ln(-0.5 * ln_factorial(n)))
            .collect())
    })
}

/// First-order perturbed eigenstate |φₙ⟩ in the bare basis.
pub fn phi_eigenstate(n: usize, tau: f64, n_max: usize) -> Result<FockState> {
    if n + 4 >= n_max {
        return Err(Error::Range(format!(
            "|phi_{n}> needs n_max > {}, got {n_max}",
            n + 4
        )));
    }
    Deformation::nc(tau)?;
    let mut amps = vec![C64::new(0.0, 0.0); n_max];
    amps[n] = C64::new(1.0, 0.0);
    amps[n + 4] = C64::new(dressing_coupling(tau, n), 0.0);
    if n >= 4 {
        amps[n - 4] = C64::new(-dressing_coupling(tau, n - 4), 0.0);
    }
    FockState::from_amplitudes(amps, format!("phi n={n} tau={tau}"))
}

/// αⁿ/(√(n!) f(n)!) for n < len.
fn nlcs_undressed(alpha: C64, table: &DeformTable, len: usize) -> Vec<LogAmplitude> {
    let a = LogAmplitude::from_complex(alpha);
    (0..len)
        .map(|n| a.powi(n as u32).mul_ln(-0.5 * table.ln_rho[n]))
        .collect()
}

/// Nonlinear coherent state of the perturbative NC oscillator, bare basis.
pub fn nlcs(alpha: C64, tau: f64, trunc: &Truncation) -> Result<FockState> {
    check_finite("alpha", alpha)?;
    let d = Deformation::nc(tau)?;
    assemble(format!("nlcs alpha={alpha} tau={tau}"), trunc, |len| {
        let table = d.table(len + 4);
        Ok(dress_log(&nlcs_undressed(alpha, &table, len + 4), tau))
    })
}

/// 𝒞(α, n) from its defining three-term expression.
pub fn displaced_coefficient_log(alpha: C64, tau: f64, n: usize) -> LogAmplitude {
    let d = Deformation::PerturbativeNc { tau };
    let a = LogAmplitude::from_complex(alpha);
    let lf = |k: usize| 0.5 * d.ln_f_factorial_squared(k);
    let c = tau / 16.0;
    let mut terms = vec![a.powi(n as u32)];
    if c > 0.0 {
        terms.push(-a.powi(n as u32 + 4).mul_ln(c.ln() + lf(n) - lf(n + 4)));
        if n >= 4 {
            let ln_ff = ln_factorial(n) - ln_factorial(n - 4);
            terms.push(a.powi(n as u32 - 4).mul_ln(c.ln() + ln_ff + lf(n) - lf(n - 4)));
        }
    }
    log_sum(&terms)
}

pub fn displaced_coefficient(alpha: C64, tau: f64, n: usize) -> C64 {
    displaced_coefficient_log(alpha, tau, n).to_complex()
}

/// αⁿ/√([n]_q!).
pub fn q_coherent(alpha: C64, q: f64, trunc: &Truncation) -> Result<FockState> {
    check_finite("alpha", alpha)?;
    let d = Deformation::q_deformed(q)?;
    check_radius(alpha.norm_sqr(), q)?;
    let a = LogAmplitude::from_complex(alpha);
    assemble(format!("q_coherent alpha={alpha} q={q}"), trunc, |len| {
        let t = d.table(len);
        Ok((0..len)
            .map(|n| a.powi(n as u32).mul_ln(-0.5 * t.ln_rho[n]))
            .collect())
    })
}

pub(crate) fn check_radius(x: f64, q: f64) -> Result<()> {
    let radius = q_exp_radius(q);
    if x >= radius * (1.0 - DIVERGENCE_MARGIN) {
        return Err(Error::Divergence { value: x, radius });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GkBasis {
    Bare,
    #[default]
    Perturbed,
}

/// J^{n/2} e^{−iγeₙ}/√ρₙ for n < len.
pub fn gk_weights(j: f64, gamma: f64, d: &Deformation, len: usize) -> Vec<LogAmplitude> {
    let t = d.table(len);
    let sj = LogAmplitude::from_real(j.sqrt());
    (0..len)
        .map(|n| {
            sj.powi(n as u32)
                .mul_ln(-0.5 * t.ln_rho[n])
                .rotate(-gamma * t.e[n])
        })
        .collect()
}

/// Gazeau–Klauder state |J, γ⟩ of the perturbative NC spectrum.
pub fn gk_coherent(j: f64, gamma: f64, tau: f64, basis: GkBasis, trunc: &Truncation) -> Result<FockState> {
    if !(j >= 0.0) || !j.is_finite() {
        return Err(Error::domain(format!("J must be finite and >= 0, got {j}")));
    }
    if !gamma.is_finite() {
        return Err(Error::domain("gamma must be finite"));
    }
    let d = Deformation::nc(tau)?;
    let label = format!("gk J={j} gamma={gamma} tau={tau} basis={basis:?}");
    assemble(label, trunc, |len| match basis {
        GkBasis::Bare => Ok(gk_weights(j, gamma, &d, len)),
        GkBasis::Perturbed => Ok(dress_log(&gk_weights(j, gamma, &d, len + 4), tau)),
    })
}
