use num_complex::Complex64 as C64;

use crate::logamp::LogAmplitude;

/// Physicists' Hermite polynomial Hₙ(x).
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// sⁿ Hₙ(z)/√(n!) for n < len, complex s and z.
///
/// Runs the recurrence on uₙ = Hₙ(z)/√(2ⁿ n!), which stays O(1)-ish for
/// moderate z, and rescales when it does not.
pub fn scaled_hermite_sequence(s: C64, z: C64, len: usize) -> Vec<LogAmplitude> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let base = LogAmplitude::from_complex(s * 2f64.sqrt());
    let mut ln_scale = 0.0;
    let mut u0 = C64::new(1.0, 0.0);
    let mut u1 = z * 2f64.sqrt();
    let push = |out: &mut Vec<LogAmplitude>, n: usize, u: C64, ln_scale: f64| {
        out.push(base.powi(n as u32) * LogAmplitude::from_complex(u).mul_ln(ln_scale));
    };
    push(&mut out, 0, u0, ln_scale);
    if len > 1 {
        push(&mut out, 1, u1, ln_scale);
    }
    for n in 1..len.saturating_sub(1) {
        let nf = n as f64;
        let u2 = z * (2.0 / (nf + 1.0)).sqrt() * u1 - (nf / (nf + 1.0)).sqrt() * u0;
        u0 = u1;
        u1 = u2;
        let m = u0.norm().max(u1.norm());
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            let l = m.ln();
            u0 /= m;
            u1 /= m;
            ln_scale += l;
        }
        push(&mut out, n + 1, u1, ln_scale);
    }
    out
}
