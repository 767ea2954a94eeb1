//! Special functions: Hurwitz zeta, Riemann zeta, digamma at rationals,
//! the Euler–Mascheroni constant, and principal complex roots.
//!
//! ζ(s,a) and ψ(a) are evaluated by Euler–Maclaurin summation with the
//! remainder bounded explicitly. For f(x) = (x+a)^{−s} (s real > 1) and for
//! the ψ asymptotic series, all relevant high derivatives keep one sign
//! (complete monotonicity), so the classical remainder estimate
//! |R_K| ≤ |first omitted correction| applies; a safety factor of 4 is used
//! throughout, and the stopping rule additionally requires the computed
//! correction terms to have entered their geometric-decay regime.
//!
//! Arguments in this crate are almost always exact rationals at integer s,
//! so both routines carry an exact-rational main path (every term is a
//! `Rational`, rounded once on conversion), falling back to a general float
//! path for non-integer s.

use super::{bernoulli, two_pow, working_prec, Approx, ApproxC, ERR_PREC};
use crate::error::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

/// Euler–Mascheroni constant γ with absolute error ≤ 2^{−(prec−8)}
/// (in fact ≤ 2^{1−prec−32} here).
pub fn euler_gamma(prec: u32) -> Approx {
    if prec < 16 {
        // Below the documented domain; clamp rather than reject, the bound
        // stays honest.
        return euler_gamma(16);
    }
    let wp = working_prec(prec);
    let v = Float::with_val(wp, Constant::Euler);
    Approx::new(v, two_pow(1 - wp as i64))
}

/// Riemann ζ(s) for real s > 1.
pub fn zeta(s: &Float, prec: u32) -> Result<Approx> {
    hurwitz_zeta(s, &Rational::from(1), prec)
}

/// Hurwitz ζ(s, a) = Σ_{n≥0} (n+a)^{−s} for real s > 1 and rational
/// a ∈ (0, 1].
pub fn hurwitz_zeta(s: &Float, a: &Rational, prec: u32) -> Result<Approx> {
    if !(*s > 1u32) || !s.is_finite() {
        return Err(Error::domain(format!("hurwitz_zeta: s must be a finite real > 1, got {s}")));
    }
    if !(*a > 0u32) || *a > 1u32 {
        return Err(Error::domain(format!("hurwitz_zeta: a must lie in (0, 1], got {a}")));
    }
    let wp = working_prec(prec);
    match small_integer_s(s) {
        Some(si) => Ok(hurwitz_int(si, a, wp)),
        None => Ok(hurwitz_real(s, a, wp)),
    }
}

/// Digamma ψ(a) for rational a ∈ (0, 1).
pub fn digamma_rational(a: &Rational, prec: u32) -> Result<Approx> {
    if !(*a > 0u32) || !(*a < 1u32) {
        return Err(Error::domain(format!("digamma_rational: a must lie in (0, 1), got {a}")));
    }
    let wp = working_prec(prec);
    Ok(digamma_impl(a, wp))
}

/// Principal n-th root of z ≠ 0: the root with argument in (−π/n, π/n],
/// computed as exp(log(z)/n) on the principal log branch.
pub fn principal_root(z: &Complex, n: u32, prec: u32) -> Result<ApproxC> {
    if n == 0 {
        return Err(Error::domain("principal_root: n must be positive"));
    }
    if z.real().is_zero() && z.imag().is_zero() {
        return Err(Error::domain("principal_root: z must be nonzero"));
    }
    let wp = working_prec(prec);
    // Normalize a negative-zero imaginary part so the branch cut lands on
    // the (−π, π] convention deterministically.
    let mut zz = Complex::with_val(wp, z);
    if zz.imag().is_zero() {
        let re = zz.real().clone();
        zz = Complex::with_val(wp, (re, Float::with_val(wp, 0u32)));
    }
    let mut w = zz.ln();
    w /= n;
    let w = w.exp();
    let m = Float::with_val(ERR_PREC, w.clone().abs().real());
    let err = m * two_pow(4 - wp as i64);
    Ok(ApproxC::new(w, err))
}

/// s as a small positive integer if it is one (the exact-arithmetic regime).
fn small_integer_s(s: &Float) -> Option<u32> {
    if s.is_integer() {
        let v = s.to_integer()?;
        v.to_u32().filter(|&v| (2..=4096).contains(&v))
    } else {
        None
    }
}

/// Shared Euler–Maclaurin driver state for ζ(s,a), exact-rational flavor.
fn hurwitz_int(s: u32, a: &Rational, wp: u32) -> Approx {
    let u = a.numer().clone();
    let q = a.denom().clone();
    let mut n_terms: u64 = ((wp as u64) / 5).max(8);

    for _attempt in 0..4 {
        let qs = q.clone().pow(s); // q^s
        // Main sum Σ_{n<N} (n+a)^{−s}, each term exact then rounded once.
        let mut main = Float::new(wp as u32);
        for n in 0..n_terms {
            let d = (Integer::from(&q * n) + &u).pow(s);
            main += Float::with_val(wp, Rational::from((qs.clone(), d)));
        }
        // x = N + a; endpoint terms (x^{1−s})/(s−1) + x^{−s}/2, exact.
        let xn = Integer::from(&q * n_terms) + &u; // numerator of x·q
        let xq_s1 = xn.clone().pow(s - 1);
        let tail1 = Rational::from((q.clone().pow(s - 1), Integer::from(&xq_s1 * (s - 1))));
        let xq_s = Integer::from(&xq_s1 * &xn);
        let tail2 = Rational::from((qs.clone(), Integer::from(2u32) * &xq_s));
        let mut value = main + Float::with_val(wp, tail1) + Float::with_val(wp, tail2);

        let mag = Float::with_val(ERR_PREC, value.clone().abs()) + 1u32;
        let eps = mag.clone() * two_pow(-(wp as i64) - 6);

        // Correction terms T_k = B_{2k}/(2k)! · (s)_{2k−1} · x^{−s−2k+1}.
        let xn2 = Integer::from(&xn * &xn);
        let q2 = Integer::from(&q * &q);
        let mut xq_pow = Integer::from(&xq_s * &xn); // (xq)^{s+1}
        let mut qq_pow = Integer::from(&qs * &q); // q^{s+1}
        let mut poch = Integer::from(s); // (s)_{2k−1}
        let mut fact = Integer::from(2); // (2k)!
        let mut k: u32 = 1;
        let mut prev_mag: Option<Float> = None;
        let kcap = (3 * n_terms as u32).max(64);
        loop {
            let b = bernoulli(2 * k);
            let term = Rational::from((Integer::from(&poch * &qq_pow), Integer::from(&fact * &xq_pow))) * b;
            let tf = Float::with_val(wp, &term);
            value += &tf;
            let tmag = Float::with_val(ERR_PREC, tf.abs());
            let decayed = prev_mag.as_ref().map(|p| {
                let half = Float::with_val(ERR_PREC, p / 2u32);
                tmag <= half
            });
            if tmag < eps && decayed == Some(true) && 2 * k >= s + 2 {
                // |R| ≤ 4|T_{k+1}| ≤ 4|T_k| in the decay regime.
                let trunc = tmag * 4u32;
                let rounds = Float::with_val(ERR_PREC, n_terms + 2 * k as u64 + 16)
                    * &mag
                    * two_pow(-(wp as i64) + 1);
                return Approx::new(value, trunc + rounds);
            }
            if k >= kcap {
                break; // decay regime not reached: enlarge N and retry
            }
            prev_mag = Some(tmag);
            // advance to k+1
            poch *= Integer::from(s + 2 * k - 1) * (s + 2 * k);
            fact *= Integer::from(2 * k + 1) * (2 * k + 2);
            xq_pow *= &xn2;
            qq_pow *= &q2;
            k += 1;
        }
        n_terms *= 2;
    }
    unreachable!("Euler–Maclaurin failed to converge at any attempted N");
}

/// General-s (non-integer) flavor; same structure with float terms.
fn hurwitz_real(s: &Float, a: &Rational, wp: u32) -> Approx {
    let s = Float::with_val(wp, s);
    let mut n_terms: u64 = ((wp as u64) / 5).max(8);

    for _attempt in 0..4 {
        let mut main = Float::new(wp);
        for n in 0..n_terms {
            let na = Float::with_val(wp, Rational::from(a + Rational::from(n)));
            main += na.pow(Float::with_val(wp, -&s));
        }
        let x = Float::with_val(wp, Rational::from(a + Rational::from(n_terms)));
        let one_minus_s = Float::with_val(wp, 1u32 - &s);
        let tail1 = x.clone().pow(&one_minus_s) / Float::with_val(wp, &s - 1u32);
        let x_pow_ms = x.clone().pow(Float::with_val(wp, -&s));
        let tail2 = x_pow_ms.clone() / 2u32;
        let mut value = main + tail1 + tail2;

        let mag = Float::with_val(ERR_PREC, value.clone().abs()) + 1u32;
        let eps = mag.clone() * two_pow(-(wp as i64) - 6);

        let x_m2 = x.clone().pow(-2i32);
        let mut power = x_pow_ms / &x; // x^{−s−1}
        let mut poch = s.clone(); // (s)_{2k−1}
        let mut fact = Integer::from(2);
        let mut k: u32 = 1;
        let mut prev_mag: Option<Float> = None;
        let kcap = (3 * n_terms as u32).max(64);
        let s_ceil = s.clone().ceil().to_integer().and_then(|i| i.to_u32()).unwrap_or(u32::MAX);
        loop {
            let b = bernoulli(2 * k);
            let coeff = Float::with_val(wp, Rational::from((b.numer().clone(), b.denom().clone() * &fact)));
            let tf = coeff * &poch * &power;
            value += &tf;
            let tmag = Float::with_val(ERR_PREC, tf.abs());
            let decayed = prev_mag.as_ref().map(|p| {
                let half = Float::with_val(ERR_PREC, p / 2u32);
                tmag <= half
            });
            if tmag < eps && decayed == Some(true) && 2 * k >= s_ceil.saturating_add(2) {
                let trunc = tmag * 4u32;
                let rounds = Float::with_val(ERR_PREC, (n_terms + 2 * k as u64 + 16) * 4)
                    * &mag
                    * two_pow(-(wp as i64) + 1);
                return Approx::new(value, trunc + rounds);
            }
            if k >= kcap {
                break;
            }
            prev_mag = Some(tmag);
            let f1 = Float::with_val(wp, &s + (2 * k - 1));
            let f2 = Float::with_val(wp, &s + (2 * k));
            poch *= f1 * f2;
            fact *= Integer::from(2 * k + 1) * (2 * k + 2);
            power *= &x_m2;
            k += 1;
        }
        n_terms *= 2;
    }
    unreachable!("Euler–Maclaurin failed to converge at any attempted N");
}

/// ψ(a) via upward recurrence to x = a + m and the asymptotic series
/// ψ(x) = ln x − 1/(2x) − Σ_k B_{2k}/(2k x^{2k}) + R.
fn digamma_impl(a: &Rational, wp: u32) -> Approx {
    let mut m: u64 = ((wp as u64) / 8).max(10);

    for _attempt in 0..4 {
        let x = Rational::from(a + Rational::from(m));
        // Recurrence sum Σ_{i<m} 1/(a+i), exact.
        let mut shift = Rational::new();
        for i in 0..m {
            let ai = Rational::from(a + Rational::from(i));
            shift += ai.recip();
        }
        let xf = Float::with_val(wp, &x);
        let lnx = xf.ln();
        let half_inv = Rational::from(&x * Rational::from(2)).recip();
        let mut value = lnx - Float::with_val(wp, half_inv);

        let mag = Float::with_val(ERR_PREC, value.clone().abs()) + 1u32;
        let eps = mag.clone() * two_pow(-(wp as i64) - 6);

        let x2 = Rational::from(&x * &x);
        let mut xpow = x2.clone(); // x^{2k}
        let mut k: u32 = 1;
        let mut prev_mag: Option<Float> = None;
        let kcap = (4 * m as u32).max(64);
        let mut converged = false;
        let mut trunc = Float::new(ERR_PREC);
        loop {
            let b = bernoulli(2 * k);
            let term = b / (Rational::from(2 * k) * &xpow);
            let tf = Float::with_val(wp, &term);
            value -= &tf;
            let tmag = Float::with_val(ERR_PREC, tf.abs());
            let decayed = prev_mag.as_ref().map(|p| {
                let half = Float::with_val(ERR_PREC, p / 2u32);
                tmag <= half
            });
            if tmag < eps && decayed == Some(true) {
                trunc = tmag * 4u32;
                converged = true;
                break;
            }
            if k >= kcap {
                break;
            }
            prev_mag = Some(tmag);
            xpow *= &x2;
            k += 1;
        }
        if converged {
            let value = value - Float::with_val(wp, &shift);
            let rounds = Float::with_val(ERR_PREC, m + 2 * k as u64 + 16)
                * (Float::with_val(ERR_PREC, value.clone().abs()) + &mag)
                * two_pow(-(wp as i64) + 1);
            return Approx::new(value, trunc + rounds);
        }
        m *= 2;
    }
    unreachable!("digamma asymptotic series failed to converge");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::pi;

    fn assert_close(a: &Approx, target: &Float, budget_exp: i64) {
        let gap = Float::with_val(ERR_PREC, &a.value - target).abs();
        let allow = Float::with_val(ERR_PREC, &a.err + &two_pow(budget_exp));
        assert!(
            gap <= allow,
            "gap {:e} exceeds bound {:e} (err {:e})",
            gap.to_f64(),
            allow.to_f64(),
            a.err.to_f64()
        );
    }

    #[test]
    fn zeta_two_is_pi2_over_6() {
        let prec = 256;
        let z = zeta(&Float::with_val(prec, 2), prec).unwrap();
        let target = pi(prec + 32).square() / 6u32;
        assert_close(&z, &target, -280);
    }

    #[test]
    fn zeta_four_is_pi4_over_90() {
        let prec = 192;
        let z = zeta(&Float::with_val(prec, 4), prec).unwrap();
        let target = pi(prec + 32).pow(4u32) / 90u32;
        assert_close(&z, &target, -216);
    }

    #[test]
    fn hurwitz_half_doubling_identity() {
        // ζ(s, 1/2) = (2^s − 1) ζ(s)
        let prec = 200;
        let s = Float::with_val(prec, 2);
        let h = hurwitz_zeta(&s, &Rational::from((1, 2)), prec).unwrap();
        let z = zeta(&s, prec).unwrap();
        let target = z.value * 3u32;
        assert_close(&h, &target, -190);
    }

    #[test]
    fn digamma_half_closed_form() {
        // ψ(1/2) = −γ − 2 ln 2
        let prec = 256;
        let d = digamma_rational(&Rational::from((1, 2)), prec).unwrap();
        let wp = prec + 32;
        let target = -euler_gamma(prec).value - Float::with_val(wp, 2u32).ln() * 2u32;
        assert_close(&d, &target, -260);
    }

    #[test]
    fn digamma_quarter_closed_form() {
        // ψ(1/4) = −γ − 3 ln 2 − π/2
        let prec = 256;
        let d = digamma_rational(&Rational::from((1, 4)), prec).unwrap();
        let wp = prec + 32;
        let target = -euler_gamma(prec).value
            - Float::with_val(wp, 2u32).ln() * 3u32
            - pi(wp) / 2u32;
        assert_close(&d, &target, -260);
    }

    #[test]
    fn principal_root_of_minus_one_is_i() {
        let prec = 128;
        let z = Complex::with_val(prec, (-1, 0));
        let r = principal_root(&z, 2, prec).unwrap();
        let gap_re = Float::with_val(64, r.value.real()).abs();
        let gap_im = Float::with_val(64, r.value.imag() - 1u32).abs();
        assert!(gap_re < two_pow(-120));
        assert!(gap_im < two_pow(-120));
    }

    #[test]
    fn domain_rejections() {
        assert!(zeta(&Float::with_val(64, 1), 64).is_err());
        assert!(hurwitz_zeta(&Float::with_val(64, 2), &Rational::from(2), 64).is_err());
        assert!(digamma_rational(&Rational::from(1), 64).is_err());
        let zero = Complex::with_val(64, (0, 0));
        assert!(principal_root(&zero, 3, 64).is_err());
    }
}
