//! Single-state diagnostics: quadrature variances, photon statistics,
//! autocorrelation and revival times of Gazeau–Klauder states.
//!
//! Expectation values are taken by applying ladder operators to amplitude
//! vectors. Vectors are zero-padded first so that every raise stays inside
//! the vector and the arithmetic is exact for the truncated state.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deform::Deformation;
use crate::error::{Error, Result};
use crate::states::{gk_coherent, to_energy_frame, FockState, GkBasis, Truncation};

/// Largest boundary amplitude tolerated before a raise.
pub const HEADROOM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Raise,
}

/// Which number operator the photon statistics use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumberConvention {
    /// n̂ = a†a
    Bare,
    /// N̂ = A†A of the active deformation
    Deformed,
}

/// Basis in which a perturbative-NC state is read before counting photons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// amplitudes as stored (bare Fock basis)
    #[default]
    Fock,
    /// components along the first-order eigenstates |φₙ⟩
    Energy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderAction {
    pub deformation: Deformation,
    pub direction: Direction,
    pub number_convention: NumberConvention,
    #[serde(default)]
    pub frame: Frame,
}

impl LadderAction {
    pub fn new(deformation: Deformation, direction: Direction, convention: NumberConvention) -> Self {
        Self {
            deformation,
            direction,
            number_convention: convention,
            frame: Frame::Fock,
        }
    }

    pub fn bare(deformation: Deformation) -> Self {
        Self::new(deformation, Direction::Lower, NumberConvention::Bare)
    }

    pub fn deformed(deformation: Deformation) -> Self {
        Self::new(deformation, Direction::Lower, NumberConvention::Deformed)
    }

    pub fn in_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    /// √eₙ under this action's convention.
    fn sqrt_e(&self, len: usize) -> Vec<f64> {
        match self.number_convention {
            NumberConvention::Bare => (0..len).map(|n| (n as f64).sqrt()).collect(),
            NumberConvention::Deformed => sqrt_e_table(&self.deformation, len),
        }
    }

    fn e(&self, n: usize) -> f64 {
        match self.number_convention {
            NumberConvention::Bare => n as f64,
            NumberConvention::Deformed => self.deformation.dimensionless_e(n),
        }
    }
}

fn sqrt_e_table(d: &Deformation, len: usize) -> Vec<f64> {
    (0..len).map(|n| d.dimensionless_e(n).sqrt()).collect()
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// out[n−1] = √eₙ v[n]; same length as v.
fn lower(v: &[C64], se: &[f64]) -> Vec<C64> {
    let mut out = vec![zero(); v.len()];
    for n in 1..v.len() {
        out[n - 1] = se[n] * v[n];
    }
    out
}

/// out[n+1] = √e_{n+1} v[n]; one element longer than v.
fn raise(v: &[C64], se: &[f64]) -> Vec<C64> {
    let mut out = vec![zero(); v.len() + 1];
    for n in 0..v.len() {
        out[n + 1] = se[n + 1] * v[n];
    }
    out
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

fn combine(a: &[C64], ca: C64, b: &[C64], cb: C64) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| ca * a.get(k).copied().unwrap_or_default() + cb * b.get(k).copied().unwrap_or_default())
        .collect()
}

fn check_headroom(s: &FockState, levels: usize) -> Result<()> {
    let n = s.n_max();
    let edge = s.amps[n.saturating_sub(levels)..]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if edge >= HEADROOM_TOL {
        return Err(Error::Truncation {
            n_max: n,
            tail_mass: edge * edge,
            threshold: HEADROOM_TOL * HEADROOM_TOL,
        });
    }
    Ok(())
}

/// Apply A or A† to a state without renormalizing; the dimension is kept.
pub fn apply_ladder(s: &FockState, l: &LadderAction) -> Result<FockState> {
    let n = s.n_max();
    let se = l.sqrt_e(n + 1);
    let amps = match l.direction {
        Direction::Lower => lower(&s.amps, &se),
        Direction::Raise => {
            check_headroom(s, 1)?;
            let mut v = raise(&s.amps, &se);
            v.truncate(n);
            v
        }
    };
    Ok(FockState {
        amps,
        tail_mass: s.tail_mass,
        ln_norm: s.ln_norm,
        label: format!("{:?}({})", l.direction, s.label),
    })
}

/// Variances of two Hermitian quadratures and ½|⟨[Y, Z]⟩|.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureStats {
    pub var_y: f64,
    pub var_z: f64,
    pub gur_rhs: f64,
}

impl QuadratureStats {
    fn from_images(v: &[C64], yv: &[C64], zv: &[C64]) -> Self {
        let my = inner(v, yv).re;
        let mz = inner(v, zv).re;
        Self {
            var_y: (norm_sqr(yv) - my * my).max(0.0),
            var_z: (norm_sqr(zv) - mz * mz).max(0.0),
            // ⟨[Y,Z]⟩ = 2i Im⟨Y ψ|Z ψ⟩
            gur_rhs: inner(yv, zv).im.abs(),
        }
    }

    /// √(var_y var_z) − gur_rhs; zero for an intelligent state.
    pub fn saturation_gap(&self) -> f64 {
        (self.var_y * self.var_z).sqrt() - self.gur_rhs
    }
}

/// Y = (A + A†)/2, Z = (A − A†)/(2i) with the ladders of `d`.
pub fn ladder_quadrature_stats(s: &FockState, d: &Deformation) -> Result<QuadratureStats> {
    check_headroom(s, 2)?;
    let v = s.padded(2);
    let se = sqrt_e_table(d, v.len() + 2);
    let av = lower(&v, &se);
    let adv = raise(&v, &se);
    let yv = combine(&av, C64::new(0.5, 0.0), &adv, C64::new(0.5, 0.0));
    let zv = combine(&av, C64::new(0.0, -0.5), &adv, C64::new(0.0, 0.5));
    Ok(QuadratureStats::from_images(&v, &yv, &zv))
}

/// Dimensionless position and momentum of the minimal-length oscillator:
/// Y = x + (τ/2)(p²x + xp²), Z = p with x = (a + a†)/√2, p = i(a† − a)/√2.
/// Then [Y, Z] = i(1 + τZ²) to first order, so gur_rhs ≈ ½ + τ⟨p²⟩/2.
pub fn position_momentum_stats(s: &FockState, tau: f64) -> Result<QuadratureStats> {
    check_headroom(s, 4)?;
    let v = s.padded(4);
    let se = sqrt_e_table(&Deformation::Harmonic, v.len() + 4);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let x = |u: &[C64]| combine(&lower(u, &se), C64::new(h, 0.0), &raise(u, &se), C64::new(h, 0.0));
    let p = |u: &[C64]| {
        combine(
            &lower(u, &se),
            C64::new(0.0, -h),
            &raise(u, &se),
            C64::new(0.0, h),
        )
    };
    let xv = x(&v);
    let pv = p(&v);
    let yv = if tau == 0.0 {
        xv
    } else {
        let ppx = p(&p(&xv));
        let xpp = x(&p(&pv));
        let corr = combine(&ppx, C64::new(0.5 * tau, 0.0), &xpp, C64::new(0.5 * tau, 0.0));
        combine(&xv, C64::new(1.0, 0.0), &corr, C64::new(1.0, 0.0))
    };
    Ok(QuadratureStats::from_images(&v, &yv, &pv))
}

/// Quadrature statistics in the conventions of each family.
///
/// Harmonic and q-deformed states use the ladder quadratures of
/// [`ladder_quadrature_stats`] (coherent states give ¼). Perturbative-NC
/// states use [`position_momentum_stats`], whose right-hand side is
/// ½(1 + τ⟨Z²⟩); note that this makes `nc(0)` differ from `Harmonic` by the
/// factor 2 of the normalization.
pub fn quadrature_stats(s: &FockState, d: &Deformation) -> Result<QuadratureStats> {
    match *d {
        Deformation::PerturbativeNc { tau } => position_momentum_stats(s, tau),
        _ => ladder_quadrature_stats(s, d),
    }
}

fn in_frame(s: &FockState, l: &LadderAction) -> Result<FockState> {
    match (l.frame, l.deformation) {
        (Frame::Energy, Deformation::PerturbativeNc { tau }) if tau > 0.0 => to_energy_frame(s, tau),
        _ => Ok(s.clone()),
    }
}

/// (⟨N⟩, ⟨N²⟩, ⟨A†²A²⟩) under the action's convention, normalized by ⟨ψ|ψ⟩.
fn number_moments(s: &FockState, l: &LadderAction) -> Result<(f64, f64, f64)> {
    let s = in_frame(s, l)?;
    let norm = s.norm_sqr();
    let (mut m1, mut m2, mut f2) = (0.0, 0.0, 0.0);
    for (n, c) in s.amps.iter().enumerate() {
        let p = c.norm_sqr();
        let e = l.e(n);
        m1 += p * e;
        m2 += p * e * e;
        if n >= 1 {
            f2 += p * e * l.e(n - 1);
        }
    }
    if !(m1 > 0.0) {
        return Err(Error::Degenerate("photon statistics need <N> > 0".into()));
    }
    Ok((m1 / norm, m2 / norm, f2 / norm))
}

/// Q = ⟨(ΔN)²⟩/⟨N⟩ − 1.
pub fn mandel_q(s: &FockState, l: &LadderAction) -> Result<f64> {
    let (m1, m2, _) = number_moments(s, l)?;
    Ok((m2 - m1 * m1) / m1 - 1.0)
}

/// g²(0) = ⟨A†²A²⟩/⟨A†A⟩².
pub fn g2_zero(s: &FockState, l: &LadderAction) -> Result<f64> {
    let (m1, _, f2) = number_moments(s, l)?;
    Ok(f2 / (m1 * m1))
}

/// Pₙ = |cₙ|².
pub fn photon_distribution(s: &FockState) -> Vec<f64> {
    s.probabilities()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonclassicalityReport {
    pub var_y: f64,
    pub var_z: f64,
    pub gur_rhs: f64,
    pub mandel_q: f64,
    pub g2_zero: f64,
    /// Scaled so that it sums to 1 − tail_mass.
    pub photon_dist: Vec<f64>,
    pub mean_n: f64,
}

pub fn nonclassicality_report(s: &FockState, l: &LadderAction) -> Result<NonclassicalityReport> {
    let q = quadrature_stats(s, &l.deformation)?;
    let keep = 1.0 - s.tail_mass;
    let norm = s.norm_sqr();
    Ok(NonclassicalityReport {
        var_y: q.var_y,
        var_z: q.var_z,
        gur_rhs: q.gur_rhs,
        mandel_q: mandel_q(s, l)?,
        g2_zero: g2_zero(s, l)?,
        photon_dist: photon_distribution(s).iter().map(|p| p / norm * keep).collect(),
        mean_n: s.mean_n(),
    })
}

/// Photon distribution of |J, γ⟩, which does not depend on γ.
fn gk_distribution(j: f64, tau: f64, trunc: &Truncation) -> Result<Vec<f64>> {
    Ok(gk_coherent(j, 0.0, tau, GkBasis::Bare, trunc)?.probabilities())
}

/// A(t) = |⟨J,γ|J,γ+ωt⟩|² = |Σ Pₙ e^{−i eₙ ω t}|².
pub fn gk_autocorrelation(
    j: f64,
    gamma: f64,
    tau: f64,
    omega: f64,
    t_grid: &[f64],
    trunc: &Truncation,
) -> Result<Vec<f64>> {
    if !gamma.is_finite() || !omega.is_finite() {
        return Err(Error::domain("gamma and omega must be finite"));
    }
    if let Some(t) = t_grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::domain(format!("time {t} is not finite")));
    }
    let p = gk_distribution(j, tau, trunc)?;
    let d = Deformation::nc(tau)?;
    let phases: Vec<f64> = (0..p.len()).map(|n| d.dimensionless_e(n) * omega).collect();
    Ok(t_grid
        .par_iter()
        .map(|&t| {
            let z: C64 = p
                .iter()
                .zip(&phases)
                .map(|(&pn, &w)| C64::from_polar(pn, -w * t))
                .sum();
            z.norm_sqr()
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NbarRule {
    /// ⟨n̂⟩ of the GK photon distribution
    Mean,
    Explicit(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevivalTimes {
    pub t_cl: f64,
    /// Infinite for the harmonic spectrum.
    pub t_rev: f64,
    pub nbar: f64,
    pub revives: bool,
}

/// T_cl = 2πħ/|E′(n̄)| and T_rev = 4πħ/|E″(n̄)| for Eₙ = ħω(An + Bn²).
pub fn revival_times(
    j: f64,
    tau: f64,
    omega: f64,
    hbar: f64,
    rule: NbarRule,
    trunc: &Truncation,
) -> Result<RevivalTimes> {
    if !(omega > 0.0) || !(hbar > 0.0) || !omega.is_finite() || !hbar.is_finite() {
        return Err(Error::domain("omega and hbar must be positive and finite"));
    }
    let sp = Deformation::nc(tau)?
        .spectrum()
        .expect("NC spectrum is quadratic");
    let nbar = match rule {
        NbarRule::Explicit(n) if n.is_finite() && n >= 0.0 => n,
        NbarRule::Explicit(n) => return Err(Error::domain(format!("nbar must be >= 0, got {n}"))),
        NbarRule::Mean => {
            let p = gk_distribution(j, tau, trunc)?;
            p.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum()
        }
    };
    let tau2pi = 2.0 * std::f64::consts::PI;
    let d1 = hbar * omega * (sp.a + 2.0 * sp.b * nbar);
    let d2 = 2.0 * hbar * omega * sp.b;
    let revives = d2 > 0.0;
    Ok(RevivalTimes {
        t_cl: tau2pi * hbar / d1,
        t_rev: if revives {
            2.0 * tau2pi * hbar / d2
        } else {
            f64::INFINITY
        },
        nbar,
        revives,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyProduct {
    pub numeric: f64,
    pub closed_form: f64,
}

/// ΔXΔP on the perturbed GK state, with X = √(ħ/mω) Y and P = √(mωħ) Z from
/// [`position_momentum_stats`]. `closed_form` is (ħ/2)[1 + (τ/2)(1 + 4J sin²γ)].
pub fn gk_uncertainty_product(
    j: f64,
    gamma: f64,
    tau: f64,
    m: f64,
    omega: f64,
    hbar: f64,
    trunc: &Truncation,
) -> Result<UncertaintyProduct> {
    if !(m > 0.0) || !(omega > 0.0) || !(hbar > 0.0) {
        return Err(Error::domain("m, omega and hbar must be positive"));
    }
    let s = gk_coherent(j, gamma, tau, GkBasis::Perturbed, trunc)?;
    let st = position_momentum_stats(&s, tau)?;
    let dx = (hbar / (m * omega)).sqrt() * st.var_y.sqrt();
    let dp = (m * omega * hbar).sqrt() * st.var_z.sqrt();
    let sg = gamma.sin();
    Ok(UncertaintyProduct {
        numeric: dx * dp,
        closed_form: 0.5 * hbar * (1.0 + 0.5 * tau * (1.0 + 4.0 * j * sg * sg)),
    })
}

/// Interior local maxima of a sampled curve, refined by a parabola through
/// the three samples around each discrete peak.
pub fn find_local_maxima(t: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let n = t.len().min(y.len());
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        let h = 0.5 * (t[i + 1] - t[i - 1]);
        if denom < 0.0 {
            let off = 0.5 * (y0 - y2) / denom;
            out.push((t[i] + off * h, y1 - 0.25 * (y0 - y2) * off));
        } else {
            out.push((t[i], y1));
        }
    }
    out
}
