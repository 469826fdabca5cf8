use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::coherent::check_radius;
use super::{assemble, check_finite, FockState, Truncation};
use crate::deform::Deformation;
use crate::error::{Error, Result};
use crate::logamp::LogAmplitude;
use crate::specfun::q_exp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn keeps(&self, n: usize) -> bool {
        match self {
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => n % 2 == 1,
        }
    }
}

/// |α⟩_q ± |−α⟩_q, normalized.
pub fn cat_q(alpha: C64, q: f64, parity: Parity, trunc: &Truncation) -> Result<FockState> {
    check_finite("alpha", alpha)?;
    let d = Deformation::q_deformed(q)?;
    if parity == Parity::Odd && alpha == C64::new(0.0, 0.0) {
        return Err(Error::Degenerate(
            "the odd cat state of alpha = 0 is the zero vector".into(),
        ));
    }
    check_radius(alpha.norm_sqr(), q)?;
    let a = LogAmplitude::from_complex(alpha);
    assemble(
        format!("cat alpha={alpha} q={q} parity={parity:?}"),
        trunc,
        |len| {
            let t = d.table(len);
            Ok((0..len)
                .map(|n| {
                    if parity.keeps(n) {
                        a.powi(n as u32).mul_ln(2f64.ln() - 0.5 * t.ln_rho[n])
                    } else {
                        LogAmplitude::ZERO
                    }
                })
                .collect())
        },
    )
}

/// ‖|α⟩_q ± |−α⟩_q‖² for normalized |±α⟩_q: 2{1 ± E_q(−|α|²)/E_q(|α|²)}.
pub fn cat_normalization_sq(alpha: C64, q: f64, parity: Parity) -> Result<f64> {
    let x = alpha.norm_sqr();
    let r = q_exp(-x, q)? / q_exp(x, q)?;
    Ok(match parity {
        Parity::Even => 2.0 * (1.0 + r),
        Parity::Odd => 2.0 * (1.0 - r),
    })
}

/// m-photon-added q-coherent state: αⁿ √([n+m]_q!)/[n]_q! on |n+m⟩.
pub fn pacs_q(alpha: C64, q: f64, m: usize, trunc: &Truncation) -> Result<FockState> {
    check_finite("alpha", alpha)?;
    let d = Deformation::q_deformed(q)?;
    check_radius(alpha.norm_sqr(), q)?;
    let a = LogAmplitude::from_complex(alpha);
    assemble(format!("pacs alpha={alpha} q={q} m={m}"), trunc, |len| {
        let t = d.table(len);
        Ok((0..len)
            .map(|k| {
                if k < m {
                    LogAmplitude::ZERO
                } else {
                    let n = k - m;
                    a.powi(n as u32).mul_ln(0.5 * t.ln_rho[k] - t.ln_rho[n])
                }
            })
            .collect())
    })
}

/// ⟨α|A_q^m A_q^{†m}|α⟩_q = Σ |α|^{2n} [n+m]_q!/[n]_q!² / E_q(|α|²).
pub fn pacs_normalization_sq(alpha: C64, q: f64, m: usize) -> Result<f64> {
    let d = Deformation::q_deformed(q)?;
    let x = alpha.norm_sqr();
    let e = q_exp(x, q)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    loop {
        let term = if x == 0.0 {
            if n == 0 {
                d.rho(m)
            } else {
                0.0
            }
        } else {
            (n as f64 * x.ln() + d.ln_rho(n + m) - 2.0 * d.ln_rho(n)).exp()
        };
        sum += term;
        if (term <= 1e-17 * sum && n > m + 2) || n > 100_000 {
            break;
        }
        n += 1;
    }
    Ok(sum / e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::q_coherent;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cat_parity() {
        let t = Truncation::default();
        let e = cat_q(c(1.1, 0.4), 0.8, Parity::Even, &t).unwrap();
        let o = cat_q(c(1.1, 0.4), 0.8, Parity::Odd, &t).unwrap();
        for n in 0..e.n_max() {
            if n % 2 == 1 {
                assert_eq!(e.amps[n], c(0.0, 0.0));
            } else {
                assert_eq!(o.amps[n], c(0.0, 0.0));
            }
        }
        assert!(matches!(
            cat_q(c(0.0, 0.0), 0.8, Parity::Odd, &t),
            Err(Error::Degenerate(_))
        ));
        assert!(cat_q(c(0.0, 0.0), 0.8, Parity::Even, &t).is_ok());
    }

    #[test]
    fn cat_normalization_matches_series() {
        for &q in &[0.7, 0.9, 1.0] {
            for &a in &[0.3, 1.0, 1.2] {
                let x: f64 = a * a;
                let d = Deformation::q_deformed(q).unwrap();
                for parity in [Parity::Even, Parity::Odd] {
                    // direct ‖ψ₊ ± ψ₋‖² with normalized coherent components
                    let mut s = 0.0;
                    for n in 0..200usize {
                        if parity.keeps(n) {
                            s += 4.0 * (n as f64 * x.ln() - d.ln_rho(n)).exp();
                        }
                    }
                    let direct = s / q_exp(x, q).unwrap();
                    let closed = cat_normalization_sq(c(a, 0.0), q, parity).unwrap();
                    assert!((direct - closed).abs() < 1e-12 * closed, "q={q} a={a}");
                }
            }
        }
        let n2 = cat_normalization_sq(c(1.0, 0.0), 1.0, Parity::Even).unwrap();
        assert!((n2 - 2.0 * (1.0 + (-2f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn pacs_support_and_limits() {
        let t = Truncation::default();
        let p = pacs_q(c(0.7, 0.2), 0.85, 3, &t).unwrap();
        assert!(p.amps[..3].iter().all(|a| *a == c(0.0, 0.0)));
        let p0 = pacs_q(c(0.7, 0.2), 0.85, 0, &t).unwrap();
        let q0 = q_coherent(c(0.7, 0.2), 0.85, &t).unwrap();
        for (x, y) in p0.amps.iter().zip(&q0.amps) {
            assert!((x - y).norm() < 1e-14);
        }
        let n2 = pacs_normalization_sq(c(1.0, 0.0), 1.0, 1).unwrap();
        assert!((n2 - 2.0).abs() < 1e-14);
    }
}
