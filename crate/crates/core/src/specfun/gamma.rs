#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// ln n!, exact summation for small n.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else if n <= 170 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    } else {
        ln_gamma_pos(n as f64 + 1.0)
    }
}

/// Rising factorial x^{(n)} = x(x+1)…(x+n−1).
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).map(|k| x + k as f64).product()
}

/// ln |x^{(n)}| together with the sign of the product.
pub fn ln_pochhammer(x: f64, n: usize) -> (f64, f64) {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for k in 0..n {
        let f = x + k as f64;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if f < 0.0 {
            sign = -sign;
        }
        ln += f.abs().ln();
    }
    (ln, sign)
}
