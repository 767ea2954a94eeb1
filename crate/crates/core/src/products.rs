//! The acceleration engine: class-restricted prime zeta functions and fast
//! Euler products over residue classes.
//!
//! A product over primes in a progression converges like N^{1−s} if expanded
//! directly; acceptable at s = 4, hopeless near s = 1. The cure is classical:
//! move to logarithms, expand over prime powers, and resum with Möbius
//! weights against the character group. With every Euler factor p ≤ P
//! stripped from the L-values,
//!
//! ```text
//! Σ_{p>P, p≡k (mod ℓ)} p^{−s}
//!     = (1/φ(ℓ)) Σ_{χ mod ℓ} χ̄(k) Σ_{j=1}^{J} (μ(j)/j) log L^{(P)}(js, χ^j)
//!       + O(4(P+1)^{1−(J+1)s}),
//! ```
//!
//! because the coefficient of p^{−us} collapses to [u = 1] for u ≤ J once
//! μ is summed over the divisors of u, and everything with u > J sits below
//! the geometric tail bound. The primes p ≤ P re-enter as an explicit finite
//! sum, so the depth J only has to beat (P+1)^{−Js} — at P = 10³ each extra
//! unit of J buys s·10 decimal digits.
//!
//! Products then follow by one more power expansion:
//!
//! ```text
//! log ∏_{p>P, p∈K} (1 − p^{−s})^{−e} = e Σ_{m=1}^{M} (1/m) Σ_{k∈K} PZ^{(>P)}_k(ms)
//!       + O(|e|·|K|·4(P+1)^{1−(M+1)s}).
//! ```
//!
//! Branch policy for the complex logs: the stripped L-values sit near 1 (and
//! never cross the negative real axis for the small P used before they do),
//! so principal-branch logs compose consistently with the Dirichlet series.
//! Imaginary parts must cancel in exact arithmetic; whatever residue survives
//! numerically is folded into the error bound and asserted tiny.
//!
//! Summation order is pinned — ascending primes, characters in canonical
//! index order, ascending j and m — so results are bit-identical run to run.

use crate::characters::{self, CharValue, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lseries;
use crate::numerics::{self, Approx, ApproxC};
use crate::primes::{self, PrimeTable};
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use std::collections::BTreeMap;
use std::sync::Mutex;

// ----------------------------------------------------------------------
// Parameters
// ----------------------------------------------------------------------

/// Acceleration parameters: strip point and the two expansion depths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AccelParams {
    /// Euler factors with p ≤ strip_below are handled explicitly.
    pub strip_below: u64,
    /// Depth J of the Möbius resummation inside each prime zeta value.
    pub moebius_depth: u32,
    /// Depth M of the power expansion of a product's logarithm.
    pub power_depth: u32,
}

impl AccelParams {
    /// Depths at which both geometric tails drop below 2^{−(prec+16)} for
    /// exponents ≥ s, with the default strip point P = 10³.
    pub fn auto(s_floor: f64, prec: u32) -> Self {
        Self::auto_at(1000, s_floor, prec)
    }

    /// Like [`AccelParams::auto`] with an explicit strip point.
    pub fn auto_at(strip_below: u64, s_floor: f64, prec: u32) -> Self {
        let depth = depth_for(strip_below, s_floor, prec);
        AccelParams {
            strip_below,
            moebius_depth: depth,
            power_depth: depth,
        }
    }
}

/// Smallest J with 4(P+1)^{1−(J+1)s} ≤ 2^{−(prec+16)}.
pub(crate) fn depth_for(strip_below: u64, s: f64, prec: u32) -> u32 {
    let lp = ((strip_below + 1) as f64).log2();
    let target = (prec + 16) as f64 + 2.0 + lp; // log2 of 4(P+1)
    (target / (s * lp)).ceil() as u32
}

/// 4(P+1)^{1−(D+1)s}, rounded up — the geometric tail both expansions share.
pub(crate) fn tail_bound(strip_below: u64, depth: u32, s: &Float) -> Float {
    let p1 = Float::with_val(64, strip_below + 1);
    let e = Float::with_val(64, 1u32) - Float::with_val(64, depth + 1) * s;
    let mut b = p1.pow(e);
    b *= 4u32;
    numerics::slack(numerics::err_up(b))
}

// ----------------------------------------------------------------------
// Shared evaluation context
// ----------------------------------------------------------------------

/// Cached character group, prime table, and stripped log-L values for one
/// modulus at one precision. Reused across prime zetas, products, and the
/// residue formulas, which hit the same (argument, character) pairs over and
/// over.
pub struct Accel {
    ell: u64,
    prec: u32,
    strip_below: u64,
    chars: Vec<DirichletCharacter>,
    char_index: BTreeMap<Vec<u64>, usize>,
    table: PrimeTable,
    /// log L^{(P)}(u, χ_i), keyed by (u as integer, i); only integer
    /// arguments are cached (every caller in this crate passes integer s).
    log_cache: Mutex<BTreeMap<(u64, usize), ApproxC>>,
}

impl Accel {
    pub fn new(ell: u64, strip_below: u64, prec: u32) -> Result<Accel> {
        let chars = characters::characters_mod(ell)?;
        let char_index = chars
            .iter()
            .enumerate()
            .map(|(i, c)| (c.exponents().to_vec(), i))
            .collect();
        let table = primes::sieve(strip_below.max(2))?;
        Ok(Accel {
            ell,
            prec,
            strip_below,
            chars,
            char_index,
            table,
            log_cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.ell
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn phi(&self) -> u64 {
        self.chars.len() as u64
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.chars
    }

    pub fn prime_table(&self) -> &PrimeTable {
        &self.table
    }

    pub fn strip_below(&self) -> u64 {
        self.strip_below
    }

    fn index_of(&self, chi: &DirichletCharacter) -> usize {
        self.char_index[chi.exponents()]
    }

    /// Principal-branch log of L^{(P)}(u, χ), cached for integer u.
    pub fn log_l_stripped(&self, chi: &DirichletCharacter, u: &Float) -> Result<ApproxC> {
        let key = u
            .to_integer()
            .filter(|_| u.is_integer())
            .and_then(|z| z.to_u64())
            .map(|z| (z, self.index_of(chi)));
        if let Some(k) = key {
            if let Some(hit) = self.log_cache.lock().unwrap().get(&k) {
                return Ok(hit.clone());
            }
        }
        let lv = lseries::l_stripped_with_table(
            chi,
            u,
            self.strip_below,
            self.prec,
            Some(&self.table),
        )?;
        let log = lv.value.ln();
        if let Some(k) = key {
            self.log_cache
                .lock()
                .unwrap()
                .insert(k, log.clone());
        }
        Ok(log)
    }

    /// Σ_{p>P, p≡k (mod ℓ)} p^{−s} via the Möbius/character resummation,
    /// depth J; the complex residue is folded into the error bound.
    pub fn prime_zeta_tail(&self, k: u64, s: &Float, depth_j: u32) -> Result<Approx> {
        Ok(self.tail_with_imag(k, s, depth_j)?.0)
    }

    /// The tail together with the pre-discard |imaginary part|.
    fn tail_with_imag(&self, k: u64, s: &Float, depth_j: u32) -> Result<(Approx, Float)> {
        if gcd(k, self.ell) != 1 {
            return Err(Error::domain(format!(
                "class {k} is not coprime to the modulus {}",
                self.ell
            )));
        }
        if !s.is_finite() || *s <= 1u32 {
            return Err(Error::domain("class prime zeta needs s > 1"));
        }
        let wp = numerics::working_prec(self.prec);
        let mut grand = ApproxC::exact(Complex::with_val(wp, (0, 0)));
        for chi in &self.chars {
            let mut inner = ApproxC::exact(Complex::with_val(wp, (0, 0)));
            for j in 1..=depth_j {
                let mu = moebius(j as u64);
                if mu == 0 {
                    continue;
                }
                // js, exactly: multiplying a wp-bit float by a small integer
                // at wp+24 bits is lossless.
                let js = Float::with_val(wp + 24, s * j);
                let log = self.log_l_stripped(&chi.power(j as u64), &js)?;
                inner = inner.add(&log.mul_rational(&Rational::from((mu, j))));
            }
            // χ̄(k): the conjugate root, exact.
            let wk = match chi.value(k % self.ell) {
                CharValue::Zero => unreachable!("k is coprime to the modulus"),
                CharValue::Root(w) => w.conj(),
            };
            grand = grand.add(&inner.mul(&wk.to_complex(self.prec)));
        }
        grand = grand.mul_rational(&Rational::from((1, self.phi())));
        let imag = grand.imag_abs();
        let mut tail = grand.into_real();
        tail.err += tail_bound(self.strip_below, depth_j, s);
        Ok((tail, imag))
    }
}

// ----------------------------------------------------------------------
// Class prime zeta
// ----------------------------------------------------------------------

/// Σ_{p ≡ k (mod ℓ)} p^{−s} with a rigorous bound: explicit sum over
/// p ≤ strip_below plus the resummed tail.
#[derive(Clone, Debug)]
pub struct ClassPrimeZeta {
    pub modulus: u64,
    pub class: u64,
    pub s: Float,
    pub value: Approx,
    /// |imaginary part| discarded after conjugate cancellation (also folded
    /// into the error bound).
    pub imag_residual: Float,
}

/// Standalone [`ClassPrimeZeta`] evaluation; builds a context and drops it.
/// Use [`Accel`] directly when evaluating families.
pub fn class_prime_zeta(
    ell: u64,
    k: u64,
    s: &Float,
    strip_below: u64,
    depth_j: u32,
    prec: u32,
) -> Result<ClassPrimeZeta> {
    let ctx = Accel::new(ell, strip_below, prec)?;
    class_prime_zeta_in(&ctx, k, s, depth_j)
}

/// [`class_prime_zeta`] reusing a shared context.
pub fn class_prime_zeta_in(
    ctx: &Accel,
    k: u64,
    s: &Float,
    depth_j: u32,
) -> Result<ClassPrimeZeta> {
    if gcd(k, ctx.ell) != 1 {
        return Err(Error::domain(format!(
            "class {k} is not coprime to the modulus {}",
            ctx.ell
        )));
    }
    if !s.is_finite() || *s <= 1u32 {
        return Err(Error::domain("class prime zeta needs s > 1"));
    }
    let wp = numerics::working_prec(ctx.prec);
    // Explicit part: ascending primes p ≤ P with p ≡ k.
    let mut finite = Approx::exact(Float::with_val(wp, 0));
    for &p in ctx.table.primes() {
        if p > ctx.strip_below {
            break;
        }
        if p % ctx.ell == k % ctx.ell {
            finite = finite.add(&power_term(p, s, wp));
        }
    }
    let (tail, imag_residual) = ctx.tail_with_imag(k, s, depth_j)?;
    let value = finite.add(&tail);
    if !(value.value > 0) {
        return Err(Error::CrossCheck(format!(
            "class prime zeta ({}, {k}) at s = {s} came out non-positive",
            ctx.ell
        )));
    }
    Ok(ClassPrimeZeta {
        modulus: ctx.ell,
        class: k % ctx.ell,
        s: s.clone(),
        value,
        imag_residual,
    })
}

/// p^{−s} as a tightly-bounded float: exact rational for integer s.
fn power_term(p: u64, s: &Float, wp: u32) -> Approx {
    if let Some(si) = small_int(s) {
        Approx::from_rational(
            &Rational::from((Integer::from(1), Integer::from(p).pow(si))),
            wp,
        )
    } else {
        let v = Float::with_val(wp, p).pow(&-s.clone());
        Approx::rounded(v)
    }
}

fn small_int(s: &Float) -> Option<u32> {
    if s.is_integer() && *s >= 1u32 && *s <= 1u32 << 16 {
        s.to_u32_saturating()
    } else {
        None
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn moebius(n: u64) -> i64 {
    let mut m = n;
    let mut mu = 1i64;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if m > 1 {
        mu = -mu;
    }
    mu
}

// ----------------------------------------------------------------------
// Class Euler products
// ----------------------------------------------------------------------

/// ∏_{p ≡ k (mod ℓ), k ∈ classes} (1 − p^{−s})^{−e}.
#[derive(Clone, Debug)]
pub struct ClassProductSpec {
    pub modulus: u64,
    /// Residue classes, each coprime to the modulus.
    pub classes: Vec<u64>,
    /// The exponent −e of the defining factor (1 − p^{−s})^{−e}.
    pub exponent: i64,
    pub s: Float,
}

/// Evaluate a [`ClassProductSpec`]: primes ≤ strip_below multiplied in
/// directly, the rest through the power expansion of the log.
pub fn class_euler_product(
    spec: &ClassProductSpec,
    strip_below: u64,
    depths: AccelParams,
    prec: u32,
) -> Result<Approx> {
    let ctx = Accel::new(spec.modulus, strip_below, prec)?;
    class_euler_product_in(&ctx, spec, depths)
}

/// [`class_euler_product`] reusing a shared context (its strip point wins).
pub fn class_euler_product_in(
    ctx: &Accel,
    spec: &ClassProductSpec,
    depths: AccelParams,
) -> Result<Approx> {
    let wp = numerics::working_prec(ctx.prec);
    if spec.modulus != ctx.modulus() {
        return Err(Error::domain("context modulus does not match the spec"));
    }
    if !s_ok(&spec.s) {
        return Err(Error::domain("class Euler product needs s > 1"));
    }
    if spec.exponent == 0 {
        return Err(Error::domain("class Euler product needs exponent e ≠ 0"));
    }
    let mut classes: Vec<u64> = spec.classes.iter().map(|&k| k % spec.modulus).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.is_empty() {
        return Ok(Approx::exact(Float::with_val(wp, 1)));
    }
    for &k in &classes {
        if gcd(k, spec.modulus) != 1 {
            return Err(Error::domain(format!(
                "class {k} shares a factor with the modulus {} — fold such primes in as explicit finite factors",
                spec.modulus
            )));
        }
    }

    // Finite part: ∏_{p ≤ P, p ∈ classes} (1 − p^{−s})^{−e}, one rounding
    // per prime (the rational power is exact for integer s).
    let mut finite = Approx::exact(Float::with_val(wp, 1));
    for &p in ctx.table.primes() {
        if p > ctx.strip_below() {
            break;
        }
        if classes.binary_search(&(p % spec.modulus)).is_err() {
            continue;
        }
        let factor = if let Some(si) = small_int(&spec.s) {
            let base = Rational::from((Integer::from(1), Integer::from(p).pow(si)));
            let base = Rational::from(1) - base;
            let neg_e32 = i32::try_from(-spec.exponent)
                .map_err(|_| Error::domain("exponent magnitude out of range"))?;
            Approx::from_rational(&base.pow(neg_e32), wp)
        } else {
            let base = Approx::rounded(
                Float::with_val(wp, 1) - Float::with_val(wp, p).pow(&-spec.s.clone()),
            );
            base.pow_rational(&Rational::from(-spec.exponent))
        };
        finite = finite.mul(&factor);
    }

    // Tail: e Σ_{m≤M} (1/m) Σ_{k} PZ^{(>P)}_k(ms), then exponentiate.
    let mut log_tail = Approx::exact(Float::with_val(wp, 0));
    for m in 1..=depths.power_depth {
        let ms = Float::with_val(wp + 24, &spec.s * m);
        let j_m = depths.moebius_depth.div_ceil(m);
        let mut class_sum = Approx::exact(Float::with_val(wp, 0));
        for &k in &classes {
            class_sum = class_sum.add(&ctx.prime_zeta_tail(k, &ms, j_m)?);
        }
        let mut term = class_sum;
        term.value /= m;
        term.err = numerics::slack(Float::with_val(64, &term.err / m) + numerics::ulp(&term.value));
        log_tail = log_tail.add(&term);
    }
    let e_f = Float::with_val(wp, spec.exponent);
    let mut log_tail = log_tail.mul_exact(&e_f);
    // depth-M truncation of the m-sum
    let m_tail = tail_bound(ctx.strip_below(), depths.power_depth, &spec.s)
        * Float::with_val(64, spec.exponent.unsigned_abs() * classes.len() as u64);
    log_tail.err += numerics::slack(numerics::err_up(m_tail));
    Ok(finite.mul(&log_tail.exp()))
}

fn s_ok(s: &Float) -> bool {
    s.is_finite() && *s > 1u32
}

// ----------------------------------------------------------------------
// Empirical Mertens partials
// ----------------------------------------------------------------------

/// ln(P)^{1/φ(ℓ)} ∏_{p ≤ P, p ≡ k (mod ℓ)} (1 − 1/p) — the finite stage of
/// the Mertens limit, for trend checks only (convergence is O(1/ln P)).
pub fn mertens_partial(ell: u64, k: u64, limit: u64, prec: u32) -> Result<Approx> {
    if ell == 0 || gcd(k, ell) != 1 {
        return Err(Error::domain(
            "mertens_partial needs a class coprime to the modulus",
        ));
    }
    if limit < 3 {
        return Err(Error::domain("mertens_partial needs P ≥ 3"));
    }
    let wp = numerics::working_prec(prec);
    let table = primes::sieve(limit)?;
    let mut prod = Approx::exact(Float::with_val(wp, 1));
    for &p in table.primes() {
        if p % ell == k % ell {
            prod = prod.mul(&Approx::from_rational(&Rational::from((p - 1, p)), wp));
        }
    }
    let phi: u64 = characters::unit_group(ell)?.phi();
    let ln_p = Approx::rounded(Float::with_val(wp, limit).ln());
    Ok(prod.mul(&ln_p.pow_rational(&Rational::from((1, phi)))))
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------
