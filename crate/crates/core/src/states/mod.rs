//! State constructors on a truncated Fock space.
//!
//! Every family is produced as a raw coefficient sequence in log form, then
//! normalized by exact summation. The sequence is evaluated to twice the
//! requested dimension so the weight beyond the cut can be measured; when it
//! exceeds the threshold the dimension is doubled (up to `max_n_max`).
//!
//! Perturbative-NC states live in the "dressed" representation: a vector d
//! expressed in the first-order eigenbasis |φₙ⟩ becomes
//! Σₙ dₙ|φₙ⟩ = (1 + τK) d in the bare basis. [`dress`] and [`undress`] move
//! between the two; the latter is what metrics call the energy frame.

mod cat;
mod coherent;
mod squeezed;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logamp::{ln_sum_sq, log_sum, LogAmplitude};

pub use cat::{cat_normalization_sq, cat_q, pacs_normalization_sq, pacs_q, Parity};
pub use coherent::{
    displaced_coefficient, displaced_coefficient_log, gk_coherent, gk_weights, glauber, nlcs, phi_eigenstate,
    q_coherent, GkBasis,
};
pub use squeezed::{ho_squeezed, nc_squeezed, squeezed_coeff_closed_form, squeezed_coeffs_recurrence};

pub const DEFAULT_N_MAX: usize = 64;
pub const DEFAULT_THRESHOLD: f64 = 1e-10;
pub const DEFAULT_MAX_N_MAX: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_max: usize,
    /// Largest acceptable probability beyond `n_max`.
    pub threshold: f64,
    pub max_n_max: usize,
    pub auto_grow: bool,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            threshold: DEFAULT_THRESHOLD,
            max_n_max: DEFAULT_MAX_N_MAX,
            auto_grow: true,
        }
    }
}

impl Truncation {
    /// Exactly `n_max` levels; too heavy a tail is an error rather than a resize.
    pub fn fixed(n_max: usize) -> Self {
        Self {
            n_max,
            max_n_max: n_max,
            auto_grow: false,
            ..Self::default()
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::domain("n_max must be at least 1"));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::domain("truncation threshold must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    pub amps: Vec<C64>,
    pub tail_mass: f64,
    /// ln 𝒩, the factor divided out when normalizing the raw coefficients.
    pub ln_norm: f64,
    pub label: String,
}

#[derive(Serialize, Deserialize)]
struct FockStateDoc {
    label: String,
    n_max: usize,
    tail_mass: f64,
    #[serde(default)]
    ln_norm: f64,
    amps: Vec<[f64; 2]>,
}

impl Serialize for FockState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FockStateDoc {
            label: self.label.clone(),
            n_max: self.n_max(),
            tail_mass: self.tail_mass,
            ln_norm: self.ln_norm,
            amps: self.amps.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = FockStateDoc::deserialize(d)?;
        if doc.n_max != doc.amps.len() {
            return Err(serde::de::Error::custom(format!(
                "n_max = {} but {} amplitudes given",
                doc.n_max,
                doc.amps.len()
            )));
        }
        Ok(FockState {
            amps: doc.amps.iter().map(|a| C64::new(a[0], a[1])).collect(),
            tail_mass: doc.tail_mass,
            ln_norm: doc.ln_norm,
            label: doc.label,
        })
    }
}

impl FockState {
    pub fn n_max(&self) -> usize {
        self.amps.len()
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(0, n_max.max(1)).expect("index 0 is always in range")
    }

    /// The number state |n⟩ in an `n_max`-level space.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n >= n_max {
            return Err(Error::Range(format!("|{n}> needs n_max > {n}, got {n_max}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n_max];
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self {
            amps,
            tail_mass: 0.0,
            ln_norm: 0.0,
            label: format!("fock n={n}"),
        })
    }

    /// Wrap and normalize an arbitrary amplitude vector.
    pub fn from_amplitudes(amps: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        let mut s = Self {
            amps,
            tail_mass: 0.0,
            ln_norm: 0.0,
            label: label.into(),
        };
        s.normalize()?;
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate(format!(
                "cannot normalize a vector of norm {n}"
            )));
        }
        for c in &mut self.amps {
            *c /= n;
        }
        self.ln_norm += n.ln();
        Ok(())
    }

    /// ⟨self|other⟩ over the common support.
    pub fn inner(&self, other: &FockState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn mean_n(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Copy with `extra` zero levels appended.
    pub fn padded(&self, extra: usize) -> Vec<C64> {
        let mut v = self.amps.clone();
        v.resize(self.amps.len() + extra, C64::new(0.0, 0.0));
        v
    }
}

/// Raw (unnormalized) coefficients and their normalization 𝒩.
#[derive(Clone, Debug)]
pub struct CoeffTable {
    pub raw: Vec<LogAmplitude>,
    /// ln 𝒩 with 𝒩² = Σ|raw|².
    pub ln_norm: f64,
}

impl CoeffTable {
    pub fn new(raw: Vec<LogAmplitude>) -> Self {
        let ln_norm = 0.5 * ln_sum_sq(&raw);
        Self { raw, ln_norm }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn get(&self, n: usize) -> C64 {
        self.raw[n].to_complex()
    }

    pub fn normalized(&self) -> Vec<C64> {
        self.raw.iter().map(|c| c.scaled(self.ln_norm)).collect()
    }
}

/// Normalize a raw series, growing the dimension until the tail is light.
///
/// `raw(len)` must return exactly `len` coefficients for indices 0..len.
pub(crate) fn assemble<F>(label: String, trunc: &Truncation, raw: F) -> Result<FockState>
where
    F: Fn(usize) -> Result<Vec<LogAmplitude>>,
{
    trunc.validate()?;
    let mut n = trunc.n_max;
    loop {
        let coeffs = raw(2 * n)?;
        debug_assert_eq!(coeffs.len(), 2 * n);
        let ln_head = ln_sum_sq(&coeffs[..n]);
        let ln_tail = ln_sum_sq(&coeffs[n..]);
        if ln_head == f64::NEG_INFINITY && ln_tail == f64::NEG_INFINITY {
            return Err(Error::Degenerate(format!("{label}: every coefficient vanishes")));
        }
        if ln_head.is_nan() || ln_tail.is_nan() || ln_head == f64::INFINITY {
            return Err(Error::Overflow(format!(
                "{label}: coefficient series is not finite"
            )));
        }
        let ln_total = log_add(ln_head, ln_tail);
        let tail = (ln_tail - ln_total).exp();
        if tail <= trunc.threshold && ln_head > f64::NEG_INFINITY {
            let amps = coeffs[..n].iter().map(|c| c.scaled(0.5 * ln_head)).collect();
            return Ok(FockState {
                amps,
                tail_mass: tail,
                ln_norm: 0.5 * ln_head,
                label,
            });
        }
        if trunc.auto_grow && 2 * n <= trunc.max_n_max {
            log::debug!("{label}: tail {tail:.3e} at n_max = {n}, doubling");
            n *= 2;
            continue;
        }
        return Err(Error::Truncation {
            n_max: n,
            tail_mass: tail,
            threshold: trunc.threshold,
        });
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// (τ/16)√((k+1)(k+2)(k+3)(k+4)), the |k⟩ ↔ |k+4⟩ coupling of the first-order eigenstates.
pub fn dressing_coupling(tau: f64, k: usize) -> f64 {
    let k = k as f64;
    tau / 16.0 * ((k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0)).sqrt()
}

/// Bare-basis coefficients of Σ dₖ|φₖ⟩ for k < d.len() − 4 (the last four
/// inputs only feed their neighbours).
pub fn dress_log(d: &[LogAmplitude], tau: f64) -> Vec<LogAmplitude> {
    let len = d.len().saturating_sub(4);
    if tau == 0.0 {
        return d[..len].to_vec();
    }
    (0..len)
        .map(|k| {
            let up = -d[k + 4].mul_ln(dressing_coupling(tau, k).ln());
            if k >= 4 {
                let down = d[k - 4].mul_ln(dressing_coupling(tau, k - 4).ln());
                log_sum(&[d[k], up, down])
            } else {
                log_sum(&[d[k], up])
            }
        })
        .collect()
}

/// Same map on plain amplitudes, with components beyond the vector taken as zero.
pub fn dress(d: &[C64], tau: f64) -> Vec<C64> {
    let n = d.len();
    (0..n)
        .map(|k| {
            let mut v = d[k];
            if k + 4 < n {
                v -= dressing_coupling(tau, k) * d[k + 4];
            }
            if k >= 4 {
                v += dressing_coupling(tau, k - 4) * d[k - 4];
            }
            v
        })
        .collect()
}

/// Inverse of [`dress`] on a finite vector: solves (1 + τK) d = v.
///
/// The map couples only indices of equal residue mod 4, leaving four
/// tridiagonal systems with unit diagonal and skew off-diagonals; every
/// Thomas pivot is ≥ 1 so no pivoting is needed.
pub fn undress(v: &[C64], tau: f64) -> Vec<C64> {
    let n = v.len();
    if tau == 0.0 {
        return v.to_vec();
    }
    let mut out = vec![C64::new(0.0, 0.0); n];
    for r in 0..4.min(n) {
        let idx: Vec<usize> = (r..n).step_by(4).collect();
        let m = idx.len();
        // row j: e_j − a_j e_{j+1} + a_{j−1} e_{j−1} = v_j, with a_j = coupling(idx[j])
        let a: Vec<f64> = idx.iter().map(|&k| dressing_coupling(tau, k)).collect();
        let mut cp = vec![0.0; m];
        let mut dp = vec![C64::new(0.0, 0.0); m];
        for j in 0..m {
            let sub = if j > 0 { a[j - 1] } else { 0.0 };
            let sup = -a[j];
            let (piv, rhs) = if j == 0 {
                (1.0, v[idx[0]])
            } else {
                (1.0 - sub * cp[j - 1], v[idx[j]] - sub * dp[j - 1])
            };
            cp[j] = sup / piv;
            dp[j] = rhs / piv;
        }
        let mut next = C64::new(0.0, 0.0);
        for j in (0..m).rev() {
            let e = if j + 1 < m { dp[j] - cp[j] * next } else { dp[j] };
            out[idx[j]] = e;
            next = e;
        }
    }
    out
}

/// Express a perturbative-NC state in the first-order energy eigenbasis.
pub fn to_energy_frame(s: &FockState, tau: f64) -> Result<FockState> {
    let mut out = FockState {
        amps: undress(&s.amps, tau),
        tail_mass: s.tail_mass,
        ln_norm: s.ln_norm,
        label: s.label.clone(),
    };
    out.normalize()?;
    Ok(out)
}

pub fn from_energy_frame(s: &FockState, tau: f64) -> Result<FockState> {
    let mut out = FockState {
        amps: dress(&s.amps, tau),
        tail_mass: s.tail_mass,
        ln_norm: s.ln_norm,
        label: s.label.clone(),
    };
    out.normalize()?;
    Ok(out)
}

pub(crate) fn check_finite(name: &str, z: C64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {z}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undress_inverts_dress() {
        let v: Vec<C64> = (0..37)
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        for &tau in &[0.0, 0.01, 0.5, 2.0] {
            let back = dress(&undress(&v, tau), tau);
            for (a, b) in back.iter().zip(&v) {
                assert!((a - b).norm() < 1e-12 * (1.0 + tau * 100.0), "tau={tau}");
            }
        }
    }

    #[test]
    fn dress_log_matches_plain() {
        let d: Vec<C64> = (0..30)
            .map(|k| C64::new(0.9f64.powi(k), 0.1 * k as f64))
            .collect();
        let logs: Vec<LogAmplitude> = d.iter().map(|&c| LogAmplitude::from_complex(c)).collect();
        let a = dress_log(&logs, 0.3);
        let b = dress(&d, 0.3);
        for k in 0..26 {
            assert!((a[k].to_complex() - b[k]).norm() < 1e-12 * b[k].norm().max(1.0));
        }
    }

    #[test]
    fn truncation_errors() {
        let t = Truncation::fixed(4);
        let r = assemble("flat".into(), &t, |len| Ok(vec![LogAmplitude::ONE; len]));
        assert!(matches!(r, Err(Error::Truncation { n_max: 4, .. })));
        let r = assemble("zero".into(), &t, |len| Ok(vec![LogAmplitude::ZERO; len]));
        assert!(matches!(r, Err(Error::Degenerate(_))));
        assert!(assemble("x".into(), &Truncation::fixed(0), |len| Ok(vec![
            LogAmplitude::ONE;
            len
        ]))
        .is_err());
    }

    #[test]
    fn auto_grow_doubles() {
        let t = Truncation {
            n_max: 8,
            ..Truncation::default()
        };
        // geometric weights 0.9^{2n}: tail beyond N is 0.81^N
        let s = assemble("geo".into(), &t, |len| {
            Ok((0..len)
                .map(|n| LogAmplitude::new(n as f64 * 0.9f64.ln(), 0.0))
                .collect())
        })
        .unwrap();
        assert_eq!(s.n_max(), 128);
        assert!(s.tail_mass <= 1e-10);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fock_and_vacuum() {
        let s = FockState::fock(3, 5).unwrap();
        assert_eq!(s.mean_n(), 3.0);
        assert!(FockState::fock(5, 5).is_err());
        assert_eq!(FockState::vacuum(4).amps[0], C64::new(1.0, 0.0));
    }
}
