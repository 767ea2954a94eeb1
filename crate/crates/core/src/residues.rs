//! Residues ρ(k,ℓ) of class-restricted Euler products, and the Mertens
//! constants μ(k,ℓ) they encode.
//!
//! For gcd(k,ℓ) = 1 define
//!
//! ```text
//! ρ(k,ℓ) = lim_{s→1} (s−1) ∏_{p ≡ k (mod ℓ)} (1 − p^{−s})^{−φ(ℓ)},
//! ```
//!
//! the natural normalization under which the φ(ℓ) classes share the pole of
//! ζ equally: each restricted product behaves like ζ(s)^{1/φ(ℓ)} near s = 1,
//! so raising it to the φ(ℓ) recovers a simple pole. Two routes are
//! implemented and cross-checked against each other.
//!
//! **Closed forms** ([`rho_closed`]). For φ(ℓ) = 2 the quotient
//! L₁(s)L₂(s)/L₁(2s) telescopes into ∏_{p≡1}(1+p^{−s})/(1−p^{−s}), which
//! rearranges to a constant times ∏_{p≡1}(1−p^{−2})^{−1}; for the two
//! φ(ℓ) = 4 families the same game with four L-series gives a constant
//! times ∏_{p≡1}(1−p^{−2})^{−2}. The constants involve nothing worse than
//! π, ln(1+√2), ln(2+√3), ln(2+√5). All products converge at s = 2, where
//! [`products::class_euler_product`] is cheap.
//!
//! **Analytic route** ([`rho_analytic`]), any (k,ℓ) with gcd(k,ℓ) = 1.
//! Taking logs, log ρ(k,ℓ) = lim_{s→1} [log(s−1) + φ(ℓ) Σ_{m≥1} (1/m)
//! PZ_k(ms)], and resumming the m = 1 prime zeta through the character
//! group (with Euler factors p ≤ P stripped, as in [`products`]) isolates
//! the divergence in log L^{(P)}(s, χ₀) = log[ζ(s) ∏_{p≤P or p|ℓ}(1−p^{−s})].
//! The pole of ζ cancels log(s−1) exactly, and what survives the limit is
//!
//! ```text
//! log ρ(k,ℓ) = φ(ℓ) Σ_{p≤P, p≡k} −log(1 − 1/p)            (finite block)
//!            + log W(P,ℓ)                                   (pole residue)
//!            + Σ_{j≥2} (μ(j)/j) log L^{(P)}(j, χ₀)          (principal)
//!            + Σ_{χ≠χ₀} χ̄(k) F^{(P)}_χ(1)                   (non-principal)
//!            + φ(ℓ) Σ_{m≥2} (1/m) PZ^{(>P)}_k(m)            (prime powers)
//! ```
//!
//! with W(P,ℓ) = ∏_{p|ℓ}(1−1/p) · ∏_{p≤P, p∤ℓ}(1−1/p) and
//! F^{(P)}_χ(1) = Σ_{j≥1} (μ(j)/j) log L^{(P)}(j, χ^j). The j = 1 terms
//! are stripped L-values at s = 1, finite for non-principal χ. Every
//! truncated sum carries the geometric tail bound of [`products`], and the
//! imaginary residue of the character block (zero in exact arithmetic, since
//! χ and χ̄ contribute conjugates) is folded into the error bound.
//!
//! **Mertens constants.** With γ the Euler–Mascheroni constant,
//!
//! ```text
//! μ(k,ℓ) = lim_{P→∞} ln(P)^{1/φ(ℓ)} ∏_{p<P, p≡k (mod ℓ)} (1 − 1/p)
//!        = (e^{−γ} / ρ(k,ℓ))^{1/φ(ℓ)},
//! ```
//!
//! the progression-wise analogue of Mertens' third theorem (ℓ = 1, k = 1
//! recovers μ = e^{−γ}). Where a closed form exists both ρ routes are
//! computed; disagreement beyond the combined error bounds is a hard
//! [`Error::CrossCheck`] — the two derivations share no code path beyond
//! the underlying L-machinery, so their agreement to dozens of digits is
//! the strongest internal evidence of correctness.
//!
//! Consistency anchors used by the tests:
//!
//! * ∏_{k} ρ(k,ℓ) over all coprime k equals ∏_{p|ℓ}(1−1/p)^{φ(ℓ)} exactly
//!   (multiply the defining limits; ζ's residue is 1).
//! * ρ(1,4) = π/(16κ²) with κ = 2^{−1/2} ∏_{p≡3 (mod 4)}(1−p^{−2})^{−1/2}
//!   the Landau–Ramanujan constant — a cross-class identity.
//! * ρ(1,5) admits a second published product form (over classes 1 and 4
//!   at s ∈ {2,4}) that must agree with the s = 2 form.
//! * mertens_partial(ℓ,k,P) → μ(k,ℓ) as P grows.

use rug::{Complex, Float, Rational};

use crate::characters::CharValue;
use crate::error::{Error, Result};
use crate::numerics::{self, special, Approx, ApproxC};
use crate::products::{
    class_euler_product_in, depth_for, gcd, moebius, tail_bound, Accel, AccelParams,
    ClassProductSpec,
};

/// Moduli for which [`rho_closed`] knows a closed form (all with k = 1).
pub const CLOSED_FORM_MODULI: [u64; 8] = [2, 3, 4, 5, 6, 8, 10, 12];

// ----------------------------------------------------------------------
// Result type
// ----------------------------------------------------------------------

/// Which derivation produced the primary ρ value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoMethod {
    /// A closed form: explicit constant × class Euler product at s = 2.
    ClosedForm,
    /// The stripped character-resummation limit formula.
    Analytic,
}

impl RhoMethod {
    pub fn label(self) -> &'static str {
        match self {
            RhoMethod::ClosedForm => "closed-form",
            RhoMethod::Analytic => "analytic",
        }
    }
}

/// ρ(k,ℓ) and μ(k,ℓ) with rigorous error bounds.
#[derive(Clone, Debug)]
pub struct ResidueResult {
    pub modulus: u64,
    pub class: u64,
    /// Residue ρ(k,ℓ) > 0.
    pub rho: Approx,
    /// Mertens constant μ(k,ℓ) = (e^{−γ}/ρ)^{1/φ(ℓ)} > 0.
    pub mu: Approx,
    /// Derivation behind `rho`.
    pub method: RhoMethod,
    /// ρ from the *other* route, when both were computed (see [`mu`]).
    pub alternate_rho: Option<Approx>,
    /// Acceleration parameters used.
    pub params: AccelParams,
    /// Target precision in bits.
    pub precision: u32,
}

impl ResidueResult {
    fn assemble(
        modulus: u64,
        class: u64,
        rho: Approx,
        method: RhoMethod,
        params: AccelParams,
        prec: u32,
    ) -> ResidueResult {
        let phi = totient(modulus);
        let mu = mu_from_rho(&rho, phi, prec);
        debug_assert!(rho.value > 0u32);
        debug_assert!(mu.value > 0u32);
        ResidueResult {
            modulus,
            class,
            rho,
            mu,
            method,
            alternate_rho: None,
            params,
            precision: prec,
        }
    }
}

/// μ = (e^{−γ}/ρ)^{1/φ}, first-order error propagation throughout.
fn mu_from_rho(rho: &Approx, phi: u64, prec: u32) -> Approx {
    let wp = numerics::working_prec(prec) + 16;
    let gamma = special::euler_gamma(wp);
    gamma
        .neg()
        .exp()
        .div(rho)
        .pow_rational(&Rational::from((1u32, phi)))
}

fn totient(n: u64) -> u64 {
    let (mut m, mut phi) = (n, n);
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            phi -= phi / p;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi -= phi / m;
    }
    phi
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ----------------------------------------------------------------------
// Closed forms
// ----------------------------------------------------------------------

/// An explicitly computed constant: value at working precision, error a
/// generous multiple of one ulp (each MPFR primitive is correctly rounded,
/// and no constant below takes more than eight of them).
pub(crate) fn const_approx(v: Float) -> Approx {
    let e = numerics::slack(numerics::err_up(numerics::ulp(&v) * 16u32));
    Approx::new(v, e)
}

/// ρ(1,ℓ) by the paper-closed route: prefactor × ∏_{p≡1 (mod ℓ)}
/// (1−p^{−2})^{−e} with e = φ(ℓ)/2, evaluated through the accelerated
/// class Euler product at s = 2.
///
/// ℓ = 2 is exact: the full Euler product is ζ(s)(1−2^{−s}), so
/// ρ(1,2) = 1/2 with zero error.
pub fn rho_closed(ell: u64, prec: u32) -> Result<ResidueResult> {
    let params = AccelParams::auto(2.0, prec);
    let wp = numerics::working_prec(prec) + 16;
    if ell == 2 {
        let rho = Approx::exact(Float::with_val(wp, 0.5f32));
        return Ok(ResidueResult::assemble(
            2,
            1,
            rho,
            RhoMethod::ClosedForm,
            params,
            prec,
        ));
    }

    // Prefactors. π and every elementary operation are correctly rounded.
    let pi = numerics::pi(wp);
    let prefactor = match ell {
        3 | 6 => {
            // √3 / (2π)
            let n = Float::with_val(wp, 3u32).sqrt();
            const_approx(n / (Float::with_val(wp, 2u32) * pi))
        }
        4 => {
            // 1/π
            const_approx(Float::with_val(wp, 1u32) / pi)
        }
        5 | 10 => {
            // 5 ln(2+√5) / (3π²)
            let mut u = Float::with_val(wp, 5u32).sqrt();
            u += 2u32;
            let n = Float::with_val(wp, 5u32) * u.ln();
            const_approx(n / (Float::with_val(wp, 3u32) * pi.square()))
        }
        8 => {
            // 2 ln(1+√2) / π²
            let mut u = Float::with_val(wp, 2u32).sqrt();
            u += 1u32;
            let n = Float::with_val(wp, 2u32) * u.ln();
            const_approx(n / pi.square())
        }
        12 => {
            // 3 ln(2+√3) / (2π²)
            let mut u = Float::with_val(wp, 3u32).sqrt();
            u += 2u32;
            let n = Float::with_val(wp, 3u32) * u.ln();
            const_approx(n / (Float::with_val(wp, 2u32) * pi.square()))
        }
        _ => {
            return Err(Error::domain(format!(
                "no closed form for modulus {ell}; use the analytic route"
            )))
        }
    };

    let exponent = (totient(ell) / 2) as i64;
    let spec = ClassProductSpec {
        modulus: ell,
        classes: vec![1],
        exponent,
        s: Float::with_val(wp, 2u32),
    };
    let ctx = Accel::new(ell, params.strip_below, prec)?;
    let product = class_euler_product_in(&ctx, &spec, params)?;
    let rho = prefactor.mul(&product);
    Ok(ResidueResult::assemble(
        ell,
        1,
        rho,
        RhoMethod::ClosedForm,
        params,
        prec,
    ))
}

/// The alternative published product form of ρ(1,5),
///
/// ```text
///     ρ(1,5) = (50 ln(2+√5))/(13 π² √5)
///              · ∏_{p≡1 (5)} (1 − p^{−4})^{−1}
///              · ∏_{p≡4 (5)} (1 − p^{−2})^{2} (1 − p^{−4})^{−1},
/// ```
///
/// which reshuffles the two-class identity
/// ∏_{p≡1,4 (5)} (p²+1)/(p²−1) = 6√5/13 into the direct closed form.
/// Useful as an independent cross-check of [`rho_closed`] at ℓ = 5.
pub fn rho_mod_five_alternative(prec: u32) -> Result<Approx> {
    let wp = numerics::working_prec(prec) + 16;
    let params = AccelParams::auto(2.0, prec);
    let ctx = Accel::new(5, params.strip_below, prec)?;

    // 50 ln(2+√5) / (13 π² √5)
    let mut u = Float::with_val(wp, 5u32).sqrt();
    u += 2u32;
    let num = Float::with_val(wp, 50u32) * u.ln();
    let den = Float::with_val(wp, 13u32)
        * numerics::pi(wp).square()
        * Float::with_val(wp, 5u32).sqrt();
    let prefactor = const_approx(num / den);

    let s2 = Float::with_val(wp, 2u32);
    let s4 = Float::with_val(wp, 4u32);
    let p1 = class_euler_product_in(
        &ctx,
        &ClassProductSpec {
            modulus: 5,
            classes: vec![1],
            exponent: 1,
            s: s4.clone(),
        },
        params,
    )?;
    // ((1+p^{−2})/(1−p^{−2}))^{−1} = (1−p^{−2})^{2} (1−p^{−4})^{−1}.
    let p2 = class_euler_product_in(
        &ctx,
        &ClassProductSpec {
            modulus: 5,
            classes: vec![4],
            exponent: -2,
            s: s2,
        },
        params,
    )?;
    let p3 = class_euler_product_in(
        &ctx,
        &ClassProductSpec {
            modulus: 5,
            classes: vec![4],
            exponent: 1,
            s: s4,
        },
        params,
    )?;
    Ok(prefactor.mul(&p1).mul(&p2).mul(&p3))
}

// ----------------------------------------------------------------------
// Analytic route
// ----------------------------------------------------------------------

/// ρ(k,ℓ) by the limit formula, with automatic depths.
pub fn rho_analytic(ell: u64, k: u64, prec: u32) -> Result<ResidueResult> {
    rho_analytic_with(ell, k, &AccelParams::auto(1.0, prec), prec)
}

/// ρ(k,ℓ) by the limit formula with explicit acceleration parameters.
pub fn rho_analytic_with(
    ell: u64,
    k: u64,
    params: &AccelParams,
    prec: u32,
) -> Result<ResidueResult> {
    if ell == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if ell == 1 {
        // Unrestricted: ρ(1,1) is the residue of ζ itself.
        let rho = Approx::exact(Float::with_val(numerics::working_prec(prec), 1u32));
        return Ok(ResidueResult::assemble(
            1,
            1,
            rho,
            RhoMethod::Analytic,
            *params,
            prec,
        ));
    }
    let k = k % ell;
    if gcd(k, ell) != 1 {
        return Err(Error::domain(format!(
            "class {k} is not coprime to the modulus {ell}"
        )));
    }
    let ctx = Accel::new(ell, params.strip_below, prec)?;
    let rho = rho_analytic_in(&ctx, k, params)?;
    Ok(ResidueResult::assemble(
        ell,
        k,
        rho,
        RhoMethod::Analytic,
        *params,
        prec,
    ))
}

/// The limit formula on a shared context (cache reuse across classes k).
pub fn rho_analytic_in(ctx: &Accel, k: u64, params: &AccelParams) -> Result<Approx> {
    let ell = ctx.modulus();
    let prec = ctx.precision();
    let wp = numerics::working_prec(prec);
    let k = k % ell;
    if gcd(k, ell) != 1 {
        return Err(Error::domain(format!(
            "class {k} is not coprime to the modulus {ell}"
        )));
    }
    let phi = ctx.phi();
    let phi_f = Float::with_val(32, phi);
    let one = Float::with_val(32, 1u32);

    // Finite block: φ Σ_{p≤P, p≡k} −log(1 − 1/p), exact rationals under ln.
    let mut finite = Approx::exact(Float::with_val(wp, 0u32));
    for &p in ctx.prime_table().primes() {
        if p % ell == k {
            let f = Approx::from_rational(&Rational::from((p - 1, p)), wp);
            finite = finite.add(&f.ln().neg());
        }
    }
    let finite = finite.mul_exact(&Float::with_val(wp, phi));

    // Pole residue: log W(P,ℓ) = Σ_{p|ℓ} log(1−1/p) + Σ_{p≤P, p∤ℓ} log(1−1/p).
    let mut log_w = Approx::exact(Float::with_val(wp, 0u32));
    for p in prime_divisors(ell) {
        let f = Approx::from_rational(&Rational::from((p - 1, p)), wp);
        log_w = log_w.add(&f.ln());
    }
    for &p in ctx.prime_table().primes() {
        if ell % p != 0 {
            let f = Approx::from_rational(&Rational::from((p - 1, p)), wp);
            log_w = log_w.add(&f.ln());
        }
    }

    // Character blocks, all truncated at J = moebius_depth with the s = 1
    // geometric tail bound each (φ sums in total).
    let depth_j = params.moebius_depth;
    let mut grand = ApproxC::exact(Complex::with_val(wp, (0, 0)));
    let mut trunc = Float::with_val(numerics::ERR_PREC, 0u32);

    // Principal, j ≥ 2: Σ (μ(j)/j) log L^{(P)}(j, χ₀).
    let chi0 = &ctx.characters()[0];
    debug_assert!(chi0.is_principal());
    for j in 2..=depth_j {
        let mu_j = moebius(j as u64);
        if mu_j == 0 {
            continue;
        }
        let js = Float::with_val(wp, j);
        let log = ctx.log_l_stripped(chi0, &js)?;
        grand = grand.add(&log.mul_rational(&Rational::from((mu_j, j))));
    }
    trunc += tail_bound(params.strip_below, depth_j, &one);

    // Non-principal: Σ_{χ≠χ₀} χ̄(k) Σ_{j≥1} (μ(j)/j) log L^{(P)}(j, χ^j).
    // The j = 1 term is the stripped L-value at s = 1 (finite: χ ≠ χ₀).
    for chi in &ctx.characters()[1..] {
        let mut inner = ApproxC::exact(Complex::with_val(wp, (0, 0)));
        for j in 1..=depth_j {
            let mu_j = moebius(j as u64);
            if mu_j == 0 {
                continue;
            }
            let js = Float::with_val(wp, j);
            let log = ctx.log_l_stripped(&chi.power(j as u64), &js)?;
            inner = inner.add(&log.mul_rational(&Rational::from((mu_j, j))));
        }
        let wk = match chi.value(k) {
            CharValue::Zero => unreachable!("k is coprime to the modulus"),
            CharValue::Root(w) => w.conj(),
        };
        grand = grand.add(&inner.mul(&wk.to_complex(prec)));
        trunc += tail_bound(params.strip_below, depth_j, &one);
    }

    // Prime-power block: φ Σ_{m=2..M} (1/m) PZ^{(>P)}_k(m); every inner
    // resummation only needs depth ≈ J/m to hit the same tail size.
    let depth_m = params.power_depth;
    let mut powers = Approx::exact(Float::with_val(wp, 0u32));
    for m in 2..=depth_m {
        let sm = Float::with_val(wp, m);
        let jm = depth_for(params.strip_below, m as f64, prec);
        let pz = ctx.prime_zeta_tail(k, &sm, jm)?;
        let inv_m = Approx::from_rational(&Rational::from((1u32, m)), wp);
        powers = powers.add(&pz.mul(&inv_m));
    }
    let powers = powers.mul_exact(&Float::with_val(wp, phi));
    trunc += Float::with_val(numerics::ERR_PREC, &phi_f)
        * tail_bound(params.strip_below, depth_m, &one);

    // Assemble: the exact sum is real; the numeric imaginary residue is
    // folded into the bound by into_real.
    let real_blocks = finite.add(&log_w).add(&powers);
    grand = grand.add(&ApproxC::from_real(&real_blocks));
    let mut log_rho = grand.into_real();
    log_rho.err += trunc;
    Ok(log_rho.exp())
}

// ----------------------------------------------------------------------
// Mertens constants
// ----------------------------------------------------------------------

/// μ(k,ℓ) with ρ cross-checked: the analytic route always runs; when a
/// closed form exists (k = 1, ℓ in [`CLOSED_FORM_MODULI`]) it runs too,
/// becomes the primary value, and any disagreement beyond the combined
/// error bounds aborts with [`Error::CrossCheck`]. Both values are kept.
pub fn mu(ell: u64, k: u64, prec: u32) -> Result<ResidueResult> {
    let analytic = rho_analytic(ell, k, prec)?;
    let closed_applies =
        analytic.class == 1 && CLOSED_FORM_MODULI.contains(&ell);
    if !closed_applies {
        return Ok(analytic);
    }
    let mut closed = rho_closed(ell, prec)?;
    if !closed.rho.is_consistent_with(&analytic.rho) {
        return Err(Error::CrossCheck(format!(
            "rho({},{ell}) routes disagree beyond bounds: closed {} vs analytic {}",
            analytic.class,
            closed.rho.value.to_string_radix(10, Some(20)),
            analytic.rho.value.to_string_radix(10, Some(20)),
        )));
    }
    closed.alternate_rho = Some(analytic.rho);
    Ok(closed)
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------
