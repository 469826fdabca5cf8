//! Moment checks for the Borel measure of the perturbative-NC coherent states.
//!
//! Ω(t) = c · 2^{(4+μ+β)/2}/(τΓ(1+β)) · (t/τ)^{(μ+β)/2} · K_{μ−β}(2√(2t/τ)).
//! With β = 0 and μ = 1 + 2/τ its moments are ∫ tⁿ Ω = c · Γ(μ+1) · ρₙ, so
//! calibrating c on the n = 0 moment leaves every higher moment as a check.
//! All evaluation is in log form; Γ(μ+1) overflows a double for τ ≲ 0.006.

use serde::{Deserialize, Serialize};

use crate::deform::Deformation;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun::{ln_bessel_k, log_gamma};

/// Drop in the log-integrand past which the tail is ignored (e⁻⁴⁰ ≈ 4e−18).
const TAIL_LN_DROP: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub tau: f64,
    pub mu: f64,
    pub beta: f64,
    /// ln of the overall constant c.
    pub ln_norm: f64,
}

impl MeasureParams {
    pub fn new(tau: f64, mu: f64, beta: f64, norm: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::domain(format!("tau must be positive, got {tau}")));
        }
        if !(mu - beta >= 0.0) || !(beta > -1.0) || !mu.is_finite() {
            return Err(Error::domain(format!(
                "need mu >= beta > -1, got mu={mu} beta={beta}"
            )));
        }
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain(format!("norm must be positive, got {norm}")));
        }
        Ok(Self {
            tau,
            mu,
            beta,
            ln_norm: norm.ln(),
        })
    }

    pub fn norm(&self) -> f64 {
        self.ln_norm.exp()
    }
}

pub fn ln_omega(t: f64, p: &MeasureParams) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("omega needs t > 0, got {t}")));
    }
    Ok(ln_omega_unchecked(t, p))
}

fn ln_omega_unchecked(t: f64, p: &MeasureParams) -> f64 {
    let s = p.mu + p.beta;
    let x = 2.0 * (2.0 * t / p.tau).sqrt();
    let lk = ln_bessel_k(p.mu - p.beta, x).unwrap_or(f64::INFINITY);
    p.ln_norm + 0.5 * (4.0 + s) * std::f64::consts::LN_2
        - p.tau.ln()
        - log_gamma(1.0 + p.beta).unwrap_or(f64::NAN)
        + 0.5 * s * (t / p.tau).ln()
        + lk
}

/// Ω(t); underflows to 0 for large t.
pub fn omega(t: f64, p: &MeasureParams) -> Result<f64> {
    Ok(ln_omega(t, p)?.exp())
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

/// ln of 2u^{2n+1} Ω(u²), the moment integrand after t = u².
fn ln_integrand(u: f64, n: usize, p: &MeasureParams) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    std::f64::consts::LN_2 + (2 * n + 1) as f64 * u.ln() + ln_omega_unchecked(u * u, p)
}

/// Maximizer of the (unimodal) log-integrand, by a log-spaced scan and golden section.
fn peak(n: usize, p: &MeasureParams) -> (f64, f64) {
    let f = |lu: f64| ln_integrand(lu.exp(), n, p);
    let (mut best, mut best_v) = (0.0, f64::NEG_INFINITY);
    let mut lu = -20.0;
    while lu <= 12.0 {
        let v = f(lu);
        if v > best_v {
            best = lu;
            best_v = v;
        }
        lu += 0.05;
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (best - 0.05, best + 0.05);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let lu = 0.5 * (a + b);
    (lu.exp(), f(lu))
}

/// First u > u_peak where the log-integrand has fallen by [`TAIL_LN_DROP`].
fn tail_edge(n: usize, p: &MeasureParams, u_peak: f64, l_peak: f64) -> f64 {
    let mut u = u_peak.max(1e-300);
    loop {
        u *= 1.25;
        if l_peak - ln_integrand(u, n, p) > TAIL_LN_DROP || u > 1e150 {
            return u;
        }
    }
}

/// ln ∫₀^{√R} 2u^{2n+1} Ω(u²) du.
fn ln_moment(n: usize, p: &MeasureParams, r: f64) -> Result<f64> {
    let (up, lp) = peak(n, p);
    if !lp.is_finite() {
        return Err(Error::Numerical(format!(
            "moment {n} integrand has no finite peak"
        )));
    }
    let edge = tail_edge(n, p, up, lp).min(r.sqrt());
    let f = |u: f64| (ln_integrand(u, n, p) - lp).exp();
    let mid = up.min(edge);
    let (lo, _) = integrate(f, 0.0, mid, &opts())?;
    let (hi, _) = integrate(f, mid, edge, &opts())?;
    let total = lo + hi;
    if !(total > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(lp + total.ln())
}

/// β = 0, μ = 1 + 2/τ, and c fixed by ∫ Ω = 1.
pub fn calibrate(tau: f64) -> Result<MeasureParams> {
    let mut p = MeasureParams::new(tau, 1.0 + 2.0 / tau, 0.0, 1.0)?;
    p.ln_norm = -ln_moment(0, &p, f64::INFINITY)?;
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub n: usize,
    pub computed: f64,
    pub target: f64,
    pub rel_err: f64,
}

/// ∫₀^∞ tⁿ Ω(t) dt against ρₙ of the perturbative-NC deformation.
pub fn moment_check(n: usize, p: &MeasureParams) -> Result<MomentCheck> {
    let ln_c = ln_moment(n, p, f64::INFINITY)?;
    let ln_t = Deformation::PerturbativeNc { tau: p.tau }.ln_rho(n);
    Ok(MomentCheck {
        n,
        computed: ln_c.exp(),
        target: ln_t.exp(),
        rel_err: (ln_c - ln_t).exp_m1().abs(),
    })
}

/// ∫₀^R tⁿ Ω(t) dt.
pub fn moment_up_to(n: usize, r: f64, p: &MeasureParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("upper limit must be positive, got {r}")));
    }
    Ok(ln_moment(n, p, r)?.exp())
}
