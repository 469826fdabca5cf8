//! Terminating Gauss series ₂F₁(−n, b; c; z).
//!
//! At z = 2 with c ≈ 2b the terms alternate and grow to ~10²⁰ times the
//! final value for the squeezed-state parameters, so the sum is carried in
//! double-double arithmetic. Magnitudes are rescaled as they grow, so the
//! result is returned in log form.

use num_complex::{Complex, Complex64 as C64};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::logamp::LogAmplitude;

pub type DdComplex = Complex<TwoFloat>;

pub fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

pub fn dd_complex(z: C64) -> DdComplex {
    Complex::new(dd(z.re), dd(z.im))
}

/// a/b to double-double accuracy.
///
/// `TwoFloat`'s own dd/dd quotient forms its residual without a fused
/// multiply-add and is only good to f64 precision, so this does long
/// division with the (accurate) dd×f64 product instead.
pub fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

fn to_c64(z: DdComplex) -> C64 {
    C64::new(f64::from(z.re), f64::from(z.im))
}

fn check_c(n: usize, c: f64) -> Result<()> {
    if c <= 0.0 && c.fract() == 0.0 && -c <= n as f64 {
        return Err(Error::domain(format!(
            "2F1 lower parameter c = {c} is a nonpositive integer within the series"
        )));
    }
    Ok(())
}

/// ₂F₁(−n, b; c; z) as an ordinary complex number.
pub fn gauss_2f1_terminating(n: usize, b: C64, c: f64, z: f64) -> Result<C64> {
    let v = gauss_2f1_terminating_log(n, b, c, z)?;
    let out = v.to_complex();
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::Overflow(format!(
            "2F1(-{n}, b; c; z) magnitude e^{:.1} exceeds f64",
            v.ln_abs
        )));
    }
    Ok(out)
}

pub fn gauss_2f1_terminating_log(n: usize, b: C64, c: f64, z: f64) -> Result<LogAmplitude> {
    check_c(n, c)?;
    Ok(sum_dd(n, dd_complex(b), dd(c), dd(z)))
}

/// Same series with parameters already in double-double; used when b and c
/// come out of a formula whose rounding would otherwise be amplified.
pub fn gauss_2f1_terminating_dd(n: usize, b: DdComplex, c: TwoFloat, z: TwoFloat) -> Result<LogAmplitude> {
    check_c(n, f64::from(c))?;
    Ok(sum_dd(n, b, c, z))
}

fn sum_dd(n: usize, b: DdComplex, c: TwoFloat, z: TwoFloat) -> LogAmplitude {
    const BIG: f64 = 1e200;
    let one = Complex::new(dd(1.0), dd(0.0));
    let mut term = one;
    let mut sum = one;
    let mut ln_scale = 0.0f64;
    for k in 0..n {
        let kf = k as f64;
        let num = (b + Complex::new(dd(kf), dd(0.0))) * (dd(kf) - dd(n as f64)) * z;
        let den = (c + dd(kf)) * dd(kf + 1.0);
        term = Complex::new(dd_div(num.re, den), dd_div(num.im, den)) * term;
        sum += term;
        let m = f64::from(term.re)
            .abs()
            .max(f64::from(term.im).abs())
            .max(f64::from(sum.re).abs())
            .max(f64::from(sum.im).abs());
        if m > BIG {
            let inv = dd(1.0 / BIG);
            term = Complex::new(term.re * inv, term.im * inv);
            sum = Complex::new(sum.re * inv, sum.im * inv);
            ln_scale += BIG.ln();
        }
    }
    LogAmplitude::from_complex(to_c64(sum)).mul_ln(ln_scale)
}
