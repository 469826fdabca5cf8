//! Beam splitter with vacuum at the second input, reduced density matrices
//! and entanglement entropies.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deform::Deformation;
use crate::error::{Error, Result};
use crate::fock_io::ScanTable;
use crate::specfun::ln_factorial;
use crate::states::{
    displaced_coefficient_log, glauber, ho_squeezed, nc_squeezed, nlcs, FockState, Truncation,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitter {
    pub theta: f64,
    pub phi: f64,
}

impl Default for BeamSplitter {
    /// 50:50, no reflection phase.
    fn default() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
    }
}

impl BeamSplitter {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::domain("beam splitter angles must be finite"));
        }
        Ok(Self { theta, phi })
    }

    /// r = −e^{−iφ} sin(θ/2)
    pub fn r(&self) -> C64 {
        -C64::from_polar(1.0, -self.phi) * (self.theta / 2.0).sin()
    }

    /// t = cos(θ/2)
    pub fn t(&self) -> f64 {
        (self.theta / 2.0).cos()
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// √C(q+m, q) tᵠ rᵐ, the amplitude of |n⟩|0⟩ → |q⟩|m⟩ with n = q + m.
fn split_amplitude(q: usize, m: usize, bs: &BeamSplitter) -> C64 {
    let amp = (0.5 * ln_binomial(q + m, q)).exp();
    amp * bs.t().powi(q as i32) * bs.r().powu(m as u32)
}

/// |n⟩|0⟩ → Σ_q √C(n,q) tᵠ r^{n−q} |q⟩|n−q⟩, as (q, amplitude) pairs.
pub fn split_fock(n: usize, bs: &BeamSplitter) -> Vec<(usize, C64)> {
    (0..=n).map(|q| (q, split_amplitude(q, n - q, bs))).collect()
}

/// Output state M[q][m] on |q⟩_c|m⟩_d.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    pub amps: DMatrix<C64>,
}

impl TwoModeState {
    pub fn dims(&self) -> (usize, usize) {
        self.amps.shape()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// B(|ψ⟩ ⊗ |0⟩) on an N × N grid, N = s.n_max(); renormalized.
pub fn apply_beamsplitter(s: &FockState, bs: &BeamSplitter) -> Result<TwoModeState> {
    let n = s.n_max();
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for (k, c) in s.amps.iter().enumerate() {
        if *c == C64::new(0.0, 0.0) {
            continue;
        }
        for (q, a) in split_fock(k, bs) {
            m[(q, k - q)] += c * a;
        }
    }
    let norm = m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Degenerate("beam splitter input is the zero vector".into()));
    }
    Ok(TwoModeState {
        amps: m / C64::new(norm, 0.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Port {
    C,
    D,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub rho: DMatrix<C64>,
}

impl DensityMatrix {
    /// Checks trace one and Hermiticity.
    pub fn new(rho: DMatrix<C64>) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::domain("density matrix must be square"));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::domain(format!("density matrix trace is {tr}")));
        }
        let skew = (&rho - rho.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if skew > 1e-12 {
            return Err(Error::domain(format!(
                "density matrix is not Hermitian (deviation {skew:.2e})"
            )));
        }
        Ok(Self { rho })
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Partial trace over the other port.
pub fn reduce(two: &TwoModeState, port: Port) -> DensityMatrix {
    let m = &two.amps;
    let rho = match port {
        Port::C => m * m.adjoint(),
        Port::D => m.transpose() * m.conjugate(),
    };
    DensityMatrix { rho }
}

/// S = 1 − tr ρ².
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// Diagonal weight below which a level is left out of the eigensolve.
/// For ρ ⪰ 0, |ρⱼₖ| ≤ √(ρⱼⱼρₖₖ), so this moves no eigenvalue by more than dim·1e−16.
const EIGEN_SUPPORT: f64 = 1e-32;

/// −Σ λ ln λ over eigenvalues ≥ 1e−14.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let keep: Vec<usize> = (0..rho.dim())
        .filter(|&k| rho.rho[(k, k)].re >= EIGEN_SUPPORT)
        .collect();
    let sub = rho.rho.select_rows(&keep).select_columns(&keep);
    let eig = sub.try_symmetric_eigen(1e-15, 10_000).ok_or_else(|| {
        let fro = rho.rho.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Error::Numerical(format!(
            "Hermitian eigensolver did not converge (dim {}, Frobenius norm {fro:.3e})",
            rho.dim()
        ))
    })?;
    if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(Error::Numerical(format!(
            "Hermitian eigensolver returned non-finite eigenvalues (dim {})",
            keep.len()
        )));
    }
    Ok(eig
        .eigenvalues
        .iter()
        .filter(|&&l| l >= 1e-14)
        .map(|&l| -l * l.ln())
        .sum())
}

/// cₖ = 𝒞(α,k)/(√k! f(k)! 𝒩) for k < n_max, normalized over the table.
fn nlcs_table(alpha: C64, tau: f64, n_max: usize) -> Result<Vec<C64>> {
    let d = Deformation::nc(tau)?;
    let t = d.table(n_max);
    let logs: Vec<_> = (0..n_max)
        .map(|k| displaced_coefficient_log(alpha, tau, k).mul_ln(-0.5 * t.ln_rho[k]))
        .collect();
    let peak = logs.iter().map(|l| l.ln_abs).fold(f64::NEG_INFINITY, f64::max);
    let c: Vec<C64> = logs.iter().map(|l| l.scaled(-peak)).collect();
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Numerical(format!(
            "NLCS table for alpha={alpha} has norm {norm}"
        )));
    }
    Ok(c.into_iter().map(|x| x / norm).collect())
}

fn closed_form_inputs(bs: &BeamSplitter, n_max: usize) -> Result<(f64, f64)> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    Ok((bs.t().abs(), bs.r().norm()))
}

/// Linear entropy of port c for an NLCS input from the closed-form sum
/// S = 1 − Σ_{q,s} |H_{qs}|², H_{qs} = Σ_m c_{q+m} c*_{s+m} √(C(q+m,q) C(s+m,s)) |t|^{q+s} |r|^{2m},
/// which regroups the quadruple sum over (q, s, m, n) into O(N³) work.
/// Every composite index stays below `n_max`.
pub fn linear_entropy_closed_form(alpha: C64, tau: f64, bs: &BeamSplitter, n_max: usize) -> Result<f64> {
    let (t, r) = closed_form_inputs(bs, n_max)?;
    let c = nlcs_table(alpha, tau, n_max)?;
    let n = n_max;
    // g[q][m] = c_{q+m} √C(q+m,q) |t|^q |r|^m
    let mut g = vec![vec![C64::new(0.0, 0.0); n]; n];
    for q in 0..n {
        for m in 0..n - q {
            let w = (0.5 * ln_binomial(q + m, q)).exp() * t.powi(q as i32) * r.powi(m as i32);
            g[q][m] = c[q + m] * w;
        }
    }
    let mut purity = 0.0;
    let mut boundary = 0.0;
    for q in 0..n {
        for s in 0..n {
            let h: C64 = (0..n - q.max(s)).map(|m| g[q][m] * g[s][m].conj()).sum();
            let v = h.norm_sqr();
            purity += v;
            if q.max(s) == n - 1 {
                boundary += v;
            }
        }
    }
    if boundary > 1e-12 * purity {
        log::warn!(
            "closed-form entropy at n_max = {n_max}: boundary terms are {:.2e} of the sum",
            boundary / purity
        );
    }
    Ok(1.0 - purity)
}

/// Term-by-term quadruple sum
/// 1 − 𝒩⁻⁴ Σ |t|^{2(q+s)} |r|^{2(m+n)} 𝒞_{m+q} 𝒞*_{m+s} 𝒞_{n+s} 𝒞*_{n+q} / (q! s! m! n! f(m+q)! f(m+s)! f(n+s)! f(n+q)!).
/// O(N⁴); kept as a reference for the regrouped form.
pub fn linear_entropy_closed_form_naive(
    alpha: C64,
    tau: f64,
    bs: &BeamSplitter,
    n_max: usize,
) -> Result<f64> {
    let (t, r) = closed_form_inputs(bs, n_max)?;
    let d = Deformation::nc(tau)?;
    let n = n_max;
    // 𝒞ₖ/(f(k)! 𝒩) with 𝒩² = Σ |𝒞ₖ|²/(k! f²(k)!)
    let raw: Vec<C64> = (0..n)
        .map(|k| {
            displaced_coefficient_log(alpha, tau, k)
                .mul_ln(-0.5 * d.ln_f_factorial_squared(k))
                .to_complex()
        })
        .collect();
    let norm2: f64 = raw
        .iter()
        .enumerate()
        .map(|(k, x)| x.norm_sqr() / ln_factorial(k).exp())
        .sum();
    let cf: Vec<C64> = raw.iter().map(|x| x / norm2.sqrt()).collect();
    let fact: Vec<f64> = (0..n).map(|k| ln_factorial(k).exp()).collect();
    let mut sum = C64::new(0.0, 0.0);
    for q in 0..n {
        for s in 0..n {
            let lim = n - q.max(s);
            let ts = t.powi(2 * (q + s) as i32) / (fact[q] * fact[s]);
            for m in 0..lim {
                for k in 0..lim {
                    let w = ts * r.powi(2 * (m + k) as i32) / (fact[m] * fact[k]);
                    sum += w * cf[m + q] * cf[m + s].conj() * cf[k + s] * cf[k + q].conj();
                }
            }
        }
    }
    Ok(1.0 - sum.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Nlcs,
    NcSqueezed,
    HoSqueezed,
    Glauber,
}

impl Family {
    pub fn build(&self, alpha: C64, tau: f64, zeta: C64, trunc: &Truncation) -> Result<FockState> {
        match self {
            Family::Nlcs => nlcs(alpha, tau, trunc),
            Family::NcSqueezed => nc_squeezed(alpha, zeta, tau, trunc),
            Family::HoSqueezed => ho_squeezed(alpha, zeta, trunc),
            Family::Glauber => glauber(alpha, trunc),
        }
    }
}

/// Row flag codes of [`entropy_scan`].
pub mod flag {
    pub const OK: f64 = 0.0;
    /// probability beyond n_max exceeded the threshold; S is still reported
    pub const TRUNCATION: f64 = 1.0;
    /// the point failed; S columns are NaN
    pub const ERROR: f64 = 2.0;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyScan {
    pub family: Family,
    pub alphas: Vec<f64>,
    pub taus: Vec<f64>,
    pub zeta: f64,
    pub bs: BeamSplitter,
    pub n_max: usize,
    /// Tail probability above which a row is flagged.
    pub threshold: f64,
}

/// Linear entropy at port c for one (α, τ) point. Returns (S_direct, S_closed, flag).
pub fn entropy_point(spec: &EntropyScan, alpha: f64, tau: f64) -> (f64, f64, f64) {
    let run = || -> Result<(f64, f64, f64)> {
        let a = C64::new(alpha, 0.0);
        let trunc = Truncation::fixed(spec.n_max).with_threshold(f64::INFINITY);
        let s = spec.family.build(a, tau, C64::new(spec.zeta, 0.0), &trunc)?;
        let direct = linear_entropy(&reduce(&apply_beamsplitter(&s, &spec.bs)?, Port::C));
        let closed = match spec.family {
            Family::Nlcs => linear_entropy_closed_form(a, tau, &spec.bs, spec.n_max)?,
            _ => f64::NAN,
        };
        let fl = if s.tail_mass > spec.threshold {
            flag::TRUNCATION
        } else {
            flag::OK
        };
        Ok((direct, closed, fl))
    };
    run().unwrap_or_else(|e| {
        log::warn!("entropy scan point alpha={alpha} tau={tau}: {e}");
        (f64::NAN, f64::NAN, flag::ERROR)
    })
}

/// Grid over α (outer) × τ (inner), evaluated in parallel, rows in grid order.
pub fn entropy_scan(spec: &EntropyScan) -> Result<ScanTable> {
    if spec.alphas.is_empty() || spec.taus.is_empty() {
        return Err(Error::domain("entropy scan grids must be non-empty"));
    }
    if spec.n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let points: Vec<(f64, f64)> = spec
        .alphas
        .iter()
        .flat_map(|&a| spec.taus.iter().map(move |&t| (a, t)))
        .collect();
    let values: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|&(a, t)| entropy_point(spec, a, t))
        .collect();
    let mut table = ScanTable::new(["alpha", "tau", "zeta", "S_direct", "S_closed", "flag"])
        .with_provenance("family", format!("{:?}", spec.family))
        .with_provenance("theta", spec.bs.theta)
        .with_provenance("phi", spec.bs.phi)
        .with_provenance("n_max", spec.n_max)
        .with_provenance("threshold", spec.threshold)
        .with_provenance("version", env!("CARGO_PKG_VERSION"));
    for (&(a, t), &(sd, sc, fl)) in points.iter().zip(&values) {
        table.push_row(vec![a, t, spec.zeta, sd, sc, fl])?;
    }
    Ok(table)
}
