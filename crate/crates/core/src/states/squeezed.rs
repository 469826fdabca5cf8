use num_complex::{Complex, Complex64 as C64};
use twofloat::TwoFloat;

use super::{assemble, check_finite, dress_log, glauber, CoeffTable, FockState, Truncation};
use crate::deform::Deformation;
use crate::error::{Error, Result};
use crate::logamp::LogAmplitude;
use crate::specfun::gamma::ln_pochhammer;
use crate::specfun::hermite::scaled_hermite_sequence;
use crate::specfun::hypergeometric::{dd, dd_div, gauss_2f1_terminating_dd};

/// ℐ(0..len) from ℐ(n+1) = αℐ(n) − ζ n f²(n) ℐ(n−1), ℐ(0) = 1, ℐ(1) = α.
pub fn squeezed_coeffs_recurrence(alpha: C64, zeta: C64, d: &Deformation, len: usize) -> CoeffTable {
    let mut raw = Vec::with_capacity(len);
    let mut prev = C64::new(1.0, 0.0);
    let mut cur = alpha;
    let mut ln_scale = 0.0;
    if len > 0 {
        raw.push(LogAmplitude::ONE);
    }
    if len > 1 {
        raw.push(LogAmplitude::from_complex(alpha));
    }
    for n in 1..len.saturating_sub(1) {
        let next = alpha * cur - zeta * d.dimensionless_e(n) * prev;
        prev = cur;
        cur = next;
        let m = prev.norm().max(cur.norm());
        if m > 1e100 || (m > 0.0 && m < 1e-100) {
            prev /= m;
            cur /= m;
            ln_scale += m.ln();
        }
        raw.push(LogAmplitude::from_complex(cur).mul_ln(ln_scale));
    }
    CoeffTable::new(raw)
}

/// ℐ(α, ζ, n) = iⁿ (ζB)^{n/2} (1 + A/B)^{(n)} ₂F₁(−n, ½ + A/2B + iα/(2√(ζB)); 1 + A/B; 2).
///
/// For real α, ζ, τ the ₂F₁ value carries the phase (−i)ⁿ, so the product
/// is real and equals the recurrence. The parameters are formed in
/// double-double because the series cancels by up to twenty digits.
pub fn squeezed_coeff_closed_form(alpha: C64, zeta: C64, tau: f64, n: usize) -> Result<C64> {
    Ok(squeezed_coeff_closed_form_log(alpha, zeta, tau, n)?.to_complex())
}

pub fn squeezed_coeff_closed_form_log(alpha: C64, zeta: C64, tau: f64, n: usize) -> Result<LogAmplitude> {
    check_finite("alpha", alpha)?;
    check_finite("zeta", zeta)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::domain(format!(
            "the closed form needs tau > 0 (got {tau}); use the recurrence"
        )));
    }
    if zeta == C64::new(0.0, 0.0) {
        return Err(Error::domain("the closed form needs zeta != 0"));
    }
    let real_zeta = zeta.im == 0.0 && zeta.re > 0.0;
    if !real_zeta {
        log::warn!("squeezed closed form has only been validated for real zeta > 0, got {zeta}");
    }
    // A/B = 1 + 2/τ, c = 1 + A/B, Re b = ½ + A/2B = 1 + 1/τ
    let inv_tau = dd(1.0) / tau;
    let c = dd(2.0) + inv_tau * 2.0;
    let b_re = dd(1.0) + inv_tau;
    // iα/(2√(ζB))
    let shift: Complex<TwoFloat> = if real_zeta {
        let two_w = (dd(zeta.re) * (tau / 2.0)).sqrt() * 2.0;
        Complex::new(dd_div(dd(-alpha.im), two_w), dd_div(dd(alpha.re), two_w))
    } else {
        let s = C64::new(0.0, 1.0) * alpha / (2.0 * (zeta * (tau / 2.0)).sqrt());
        Complex::new(dd(s.re), dd(s.im))
    };
    let b = Complex::new(b_re + shift.re, shift.im);
    let f = gauss_2f1_terminating_dd(n, b, c, dd(2.0))?;

    let zb = zeta * (tau / 2.0);
    let nf = n as f64;
    let (ln_poch, sign) = ln_pochhammer(f64::from(c), n);
    let prefactor = LogAmplitude::new(
        0.5 * nf * zb.norm().ln() + ln_poch,
        nf * std::f64::consts::FRAC_PI_2 + 0.5 * nf * zb.arg(),
    );
    let prefactor = if sign < 0.0 { -prefactor } else { prefactor };
    Ok(prefactor * f)
}

/// ℐₖ/(√k! f(k)!) for k < len.
fn squeezed_undressed(alpha: C64, zeta: C64, d: &Deformation, len: usize) -> Vec<LogAmplitude> {
    let table = d.table(len);
    squeezed_coeffs_recurrence(alpha, zeta, d, len)
        .raw
        .into_iter()
        .enumerate()
        .map(|(k, c)| c.mul_ln(-0.5 * table.ln_rho[k]))
        .collect()
}

/// Squeezed state of the perturbative NC oscillator, bare basis.
pub fn nc_squeezed(alpha: C64, zeta: C64, tau: f64, trunc: &Truncation) -> Result<FockState> {
    check_finite("alpha", alpha)?;
    check_finite("zeta", zeta)?;
    let d = Deformation::nc(tau)?;
    assemble(
        format!("nc_squeezed alpha={alpha} zeta={zeta} tau={tau}"),
        trunc,
        |len| Ok(dress_log(&squeezed_undressed(alpha, zeta, &d, len + 4), tau)),
    )
}

/// (ζ/2)^{n/2} Hₙ(α/√(2ζ))/√(n!), the ordinary-oscillator squeezed state.
pub fn ho_squeezed(alpha: C64, zeta: C64, trunc: &Truncation) -> Result<FockState> {
    check_finite("alpha", alpha)?;
    check_finite("zeta", zeta)?;
    if zeta == C64::new(0.0, 0.0) {
        return glauber(alpha, trunc);
    }
    let s = (zeta / 2.0).sqrt();
    let z = alpha / (2.0 * s);
    assemble(format!("ho_squeezed alpha={alpha} zeta={zeta}"), trunc, |len| {
        Ok(scaled_hermite_sequence(s, z, len))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::nlcs;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn recurrence_examples() {
        let h = Deformation::Harmonic;
        let t = squeezed_coeffs_recurrence(c(1.3), c(0.0), &h, 10);
        for n in 0..10 {
            assert!((t.get(n) - c(1.3f64.powi(n as i32))).norm() < 1e-13);
        }
        let t = squeezed_coeffs_recurrence(c(0.0), c(0.4), &h, 12);
        for n in (1..12).step_by(2) {
            assert!(t.raw[n].is_zero());
        }
        let t = squeezed_coeffs_recurrence(c(1.0), c(0.25), &h, 3);
        assert!((t.get(2) - c(0.75)).norm() < 1e-15);
    }

    #[test]
    fn recurrence_survives_long_runs() {
        let d = Deformation::nc(0.5).unwrap();
        let t = squeezed_coeffs_recurrence(c(2.0), c(0.5), &d, 600);
        assert!(t.raw.iter().all(|x| x.ln_abs.is_finite() || x.is_zero()));
        assert!(t.ln_norm.is_finite());
    }

    #[test]
    fn closed_form_small_n() {
        let v0 = squeezed_coeff_closed_form(c(1.0), c(0.25), 0.1, 0).unwrap();
        assert!((v0 - c(1.0)).norm() < 1e-15);
        for &a in &[0.5, 1.0, 2.0] {
            let v1 = squeezed_coeff_closed_form(c(a), c(0.3), 0.2, 1).unwrap();
            assert!((v1 - c(a)).norm() < 1e-13, "alpha={a}: {v1}");
        }
        let v2 = squeezed_coeff_closed_form(c(1.0), c(0.25), 0.1, 2).unwrap();
        // 1 − 0.25·f²(1) = 1 − 0.25·1.1
        assert!((v2 - c(0.725)).norm() < 1e-13, "{v2}");
    }

    #[test]
    fn closed_form_domain() {
        assert!(squeezed_coeff_closed_form(c(1.0), c(0.25), 0.0, 3).is_err());
        assert!(squeezed_coeff_closed_form(c(1.0), c(0.0), 0.1, 3).is_err());
    }

    #[test]
    fn closed_form_matches_recurrence() {
        for &a in &[0.5, 1.0, 2.0] {
            for &z in &[0.1, 0.25, 0.5] {
                for &tau in &[0.05, 0.1, 0.5] {
                    let d = Deformation::nc(tau).unwrap();
                    let rec = squeezed_coeffs_recurrence(c(a), c(z), &d, 31);
                    for n in 0..=30 {
                        let r = rec.get(n);
                        let cf = squeezed_coeff_closed_form(c(a), c(z), tau, n).unwrap();
                        assert!((cf - r).norm() <= 1e-8 * r.norm(), "a={a} z={z} tau={tau} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn nc_squeezed_limits() {
        let t = Truncation::default();
        let a = C64::new(0.8, 0.3);
        let s = nc_squeezed(a, c(0.0), 0.3, &t).unwrap();
        let n = nlcs(a, 0.3, &t).unwrap();
        for (x, y) in s.amps.iter().zip(&n.amps) {
            assert!((x - y).norm() < 1e-10);
        }
        let s = nc_squeezed(a, c(0.25), 0.0, &t).unwrap();
        let h = ho_squeezed(a, c(0.25), &t).unwrap();
        assert_eq!(s.n_max(), h.n_max());
        for (x, y) in s.amps.iter().zip(&h.amps) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn ho_squeezed_examples() {
        let t = Truncation::default();
        let s = ho_squeezed(c(0.0), c(0.3), &t).unwrap();
        for n in (1..s.n_max()).step_by(2) {
            assert_eq!(s.amps[n], c(0.0));
        }
        // ratio c₂/c₀ = (ζ/2)H₂(x)/√2 with x = α/√(2ζ)
        let (a, z) = (1.0f64, 0.25f64);
        let s = ho_squeezed(c(a), c(z), &t).unwrap();
        let x = a / (2.0 * z).sqrt();
        let want = z / 2.0 * crate::specfun::hermite(2, x) / 2f64.sqrt();
        assert!(((s.amps[2] / s.amps[0]).re - want).abs() < 1e-13);
        let rec = squeezed_coeffs_recurrence(c(a), c(z), &Deformation::Harmonic, 3);
        assert!((want * 2f64.sqrt() - rec.get(2).re).abs() < 1e-13);
        // ζ → 0⁺ approaches the coherent state
        let g = glauber(c(a), &t).unwrap();
        let s = ho_squeezed(c(a), c(1e-9), &t).unwrap();
        for (x, y) in s.amps.iter().zip(&g.amps) {
            assert!((x - y).norm() < 1e-7);
        }
    }
}
