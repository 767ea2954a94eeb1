//! Dirichlet L-functions at real points s ≥ 1.
//!
//! Everything reduces to two classical evaluation formulas over exact
//! rational arguments:
//!
//! ```text
//! L(s, χ) = n^{−s} Σ_{a=1}^{n} χ(a) ζ(s, a/n)          (s ≥ 2),
//! L(1, χ) = −(1/n) Σ_{a=1}^{n−1} χ(a) ψ(a/n)           (χ nonprincipal),
//! ```
//!
//! with ζ(s,·) the Hurwitz zeta and ψ the digamma. The digamma route at
//! s = 1 is uniform over all nonprincipal characters, complex ones included;
//! Gauss-sum closed forms (π/4, ln(1+√2)/√2, 2 ln(2+√5)/(3√5), …) serve as
//! test vectors instead of code paths.
//!
//! For acceleration the Euler-factor-stripped variant
//!
//! ```text
//! L^{(P)}(s, χ) = L(s, χ) · ∏_{p ≤ P} (1 − χ(p) p^{−s})
//! ```
//!
//! removes every factor of the defining product with p ≤ P; for sizable P
//! the value is 1 + O(P^{1−s}), which keeps principal-branch logarithms far
//! from the branch cut.

use crate::characters::{CharValue, DirichletCharacter, RootOfUnity};
use crate::error::{Error, Result};
use crate::numerics::{self, Approx, ApproxC};
use crate::primes::{self, PrimeTable};
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use std::collections::BTreeMap;

// ----------------------------------------------------------------------
// L-value record
// ----------------------------------------------------------------------

/// An evaluated L-value: which character, where, the value with its error
/// bound, and how many initial Euler factors were stripped (0 = full L).
#[derive(Clone, Debug)]
pub struct LValue {
    pub chi: DirichletCharacter,
    pub s: Float,
    pub value: ApproxC,
    pub stripped_below: u64,
}

// ----------------------------------------------------------------------
// Evaluation
// ----------------------------------------------------------------------

/// L(s, χ) for real s ≥ 2 via the Hurwitz-zeta formula.
///
/// s = 1 is deliberately rejected here: the principal L has a pole and the
/// nonprincipal values come from [`l_at_one`].
pub fn l_at(chi: &DirichletCharacter, s: &Float, prec: u32) -> Result<LValue> {
    if !s.is_finite() || *s < 2u32 {
        return Err(Error::domain(
            "l_at needs real s ≥ 2 (s = 1 is handled by l_at_one)",
        ));
    }
    let n = chi.modulus();
    let wp = numerics::working_prec(prec);
    let mut roots: BTreeMap<RootOfUnity, ApproxC> = BTreeMap::new();
    let mut sum = ApproxC::exact(Complex::with_val(wp, (0, 0)));
    for a in 1..=n {
        let w = match chi.value(a) {
            CharValue::Zero => continue,
            CharValue::Root(w) => w,
        };
        let hz = numerics::hurwitz_zeta(s, &Rational::from((a, n)), prec)?;
        let wc = roots
            .entry(w)
            .or_insert_with(|| w.to_complex(prec))
            .clone();
        sum = sum.add(&wc.mul(&ApproxC::from_real(&hz)));
    }
    let value = scale_by_power(&sum, n, s, prec);
    Ok(LValue {
        chi: chi.clone(),
        s: s.clone(),
        value,
        stripped_below: 0,
    })
}

/// L(1, χ) for nonprincipal χ via the digamma formula.
pub fn l_at_one(chi: &DirichletCharacter, prec: u32) -> Result<LValue> {
    if chi.is_principal() {
        return Err(Error::domain(
            "L(1, χ) has a pole for the principal character",
        ));
    }
    let n = chi.modulus();
    let wp = numerics::working_prec(prec);
    let mut roots: BTreeMap<RootOfUnity, ApproxC> = BTreeMap::new();
    let mut sum = ApproxC::exact(Complex::with_val(wp, (0, 0)));
    for a in 1..n {
        let w = match chi.value(a) {
            CharValue::Zero => continue,
            CharValue::Root(w) => w,
        };
        let dg = numerics::digamma_rational(&Rational::from((a, n)), prec)?;
        let wc = roots
            .entry(w)
            .or_insert_with(|| w.to_complex(prec))
            .clone();
        sum = sum.add(&wc.mul(&ApproxC::from_real(&dg)));
    }
    let value = sum.mul_rational(&Rational::from((-1i64, n as i64)));
    Ok(LValue {
        chi: chi.clone(),
        s: Float::with_val(wp, 1),
        value,
        stripped_below: 0,
    })
}

/// Residue at s = 1 of the principal L mod ℓ: ∏_{p | ℓ} (1 − 1/p), exactly.
pub fn principal_residue(ell: u64) -> Result<Rational> {
    if ell == 0 {
        return Err(Error::domain("principal_residue needs ℓ ≥ 1"));
    }
    let mut q = Rational::from(1);
    let mut m = ell;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            q *= Rational::from((p - 1, p));
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        q *= Rational::from((m - 1, m));
    }
    Ok(q)
}

/// L(s, χ) · ∏_{p ≤ P}(1 − χ(p) p^{−s}), sieving its own prime table.
///
/// s = 1 is allowed for nonprincipal χ (the stripped value of [`l_at_one`]).
pub fn l_stripped(chi: &DirichletCharacter, s: &Float, strip_below: u64, prec: u32) -> Result<LValue> {
    let table = if strip_below >= 2 {
        Some(primes::sieve(strip_below)?)
    } else {
        None
    };
    l_stripped_with_table(chi, s, strip_below, prec, table.as_ref())
}

/// [`l_stripped`] reusing a caller-held prime table (it must reach P).
pub fn l_stripped_with_table(
    chi: &DirichletCharacter,
    s: &Float,
    strip_below: u64,
    prec: u32,
    table: Option<&PrimeTable>,
) -> Result<LValue> {
    let base = if s.is_finite() && *s == 1u32 {
        l_at_one(chi, prec)?
    } else {
        l_at(chi, s, prec)?
    };
    if strip_below < 2 {
        return Ok(base);
    }
    let table = match table {
        Some(t) if t.limit() >= strip_below => t,
        _ => {
            return Err(Error::domain(
                "l_stripped_with_table needs a prime table reaching strip_below",
            ))
        }
    };
    let wp = numerics::working_prec(prec);
    let one = ApproxC::exact(Complex::with_val(wp, (1, 0)));
    let mut roots: BTreeMap<RootOfUnity, ApproxC> = BTreeMap::new();
    let mut product = one.clone();
    for &p in table.primes() {
        if p > strip_below {
            break;
        }
        let w = match chi.value(p) {
            CharValue::Zero => continue,
            CharValue::Root(w) => w,
        };
        let wc = roots
            .entry(w)
            .or_insert_with(|| w.to_complex(prec))
            .clone();
        let factor = one.sub(&scale_by_power_c(&wc, p, s, prec));
        product = product.mul(&factor);
    }
    Ok(LValue {
        chi: chi.clone(),
        s: s.clone(),
        value: base.value.mul(&product),
        stripped_below: strip_below,
    })
}

/// z · n^{−s}: exact rational scaling when s is a small integer, otherwise a
/// correctly-rounded float power folded into the bound.
fn scale_by_power(z: &ApproxC, n: u64, s: &Float, prec: u32) -> ApproxC {
    if let Some(si) = small_integer(s) {
        let q = Rational::from((Integer::from(1), Integer::from(n).pow(si)));
        z.mul_rational(&q)
    } else {
        let wp = numerics::working_prec(prec);
        let p = Float::with_val(wp, n).pow(&-s.clone());
        let factor = Approx::rounded(Float::with_val(wp, p));
        z.mul(&ApproxC::from_real(&factor))
    }
}

/// w · n^{−s} for a unit-modulus w (same scaling rule as above).
fn scale_by_power_c(w: &ApproxC, n: u64, s: &Float, prec: u32) -> ApproxC {
    scale_by_power(w, n, s, prec)
}

fn small_integer(s: &Float) -> Option<u32> {
    if s.is_integer() && *s >= 1u32 && *s <= 1u32 << 20 {
        s.to_u32_saturating()
    } else {
        None
    }
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------
