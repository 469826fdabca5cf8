//! q-numbers in the symmetric-free convention [n]_q = (1 − q²ⁿ)/(1 − q²).

use crate::error::{Error, Result};

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("q must lie in (0, 1], got {q}")))
    }
}

/// [n]_q = 1 + q² + … + q^{2(n−1)}.
pub fn q_bracket(n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(bracket_unchecked(n, q))
}

pub(crate) fn bracket_unchecked(n: usize, q: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if q == 1.0 {
        return n as f64;
    }
    let l = 2.0 * q.ln();
    (n as f64 * l).exp_m1() / l.exp_m1()
}

pub fn q_factorial(n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok((1..=n).map(|k| bracket_unchecked(k, q)).product())
}

pub fn ln_q_factorial(n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok((1..=n).map(|k| bracket_unchecked(k, q).ln()).sum())
}

/// Radius of convergence of E_q in |x|: 1/(1 − q²), infinite at q = 1.
pub fn q_exp_radius(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else {
        1.0 / (1.0 - q * q)
    }
}

/// E_q(x) = Σ xⁿ/[n]_q!.
pub fn q_exp(x: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let radius = q_exp_radius(q);
    if x.abs() >= radius {
        return Err(Error::Divergence {
            value: x.abs(),
            radius,
        });
    }
    const MAX_TERMS: usize = 1_000_000;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    for n in 1..MAX_TERMS {
        term *= x / bracket_unchecked(n, q);
        // Kahan summation: alternating series at negative x lose digits otherwise
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() <= 1e-17 * sum.abs() && (n as f64) > x.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Numerical(format!(
        "E_q({x}) with q = {q} did not converge in {MAX_TERMS} terms"
    )))
}
