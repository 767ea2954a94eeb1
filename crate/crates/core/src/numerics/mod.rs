//! Arbitrary-precision numeric kernel.
//!
//! Values are MPFR floats (via `rug`) wrapped in [`Approx`] / [`ApproxC`]:
//! a computed value together with a rigorous absolute error bound
//!
//! ```text
//! |value − true| ≤ err        (complex: |value − true| in modulus)
//! ```
//!
//! The error bound is not an interval: it is a one-sided certificate carried
//! alongside the value. Each operation propagates bounds with standard
//! first-order inequalities plus explicit slack for the local rounding, and
//! each special function folds its analytically derived truncation remainder
//! into the bound. The scheme is validated end-to-end by the
//! precision-escalation property: recomputing anything with 64 extra bits
//! must agree with the original within the original's bound.
//!
//! Precision policy: a routine asked for `prec` bits works at
//! `prec + GUARD_BITS` internally, so the final bound is dominated by the
//! analytic truncation term, not by accumulated rounding.
//!
//! Error bounds themselves are stored as 64-bit MPFR floats (full MPFR
//! exponent range — no underflow at extreme precisions) and every bound
//! operation multiplies in a relative headroom factor that dwarfs the
//! 64-bit rounding of the bound arithmetic itself.

pub mod bernoulli;
pub mod special;

pub use bernoulli::bernoulli;
pub use special::{digamma_rational, euler_gamma, hurwitz_zeta, principal_root, zeta};

use rug::float::Round;
use rug::ops::{AssignRound, MulAssignRound, Pow};
use rug::{Complex, Float, Integer, Rational};

/// Guard bits added above a requested precision for internal work.
pub const GUARD_BITS: u32 = 32;

/// Precision (bits) used for error-bound arithmetic.
pub const ERR_PREC: u32 = 64;

/// Internal working precision for a requested target precision.
pub fn working_prec(prec: u32) -> u32 {
    prec.max(16) + GUARD_BITS
}

/// Bits needed so that `digits` decimal digits survive rounding, plus guard.
///
/// `ceil(3.33·digits) + 64`, the CLI's precision auto-scale rule.
pub fn bits_for_digits(digits: u32) -> u32 {
    (333 * digits).div_ceil(100) + 64
}

/// A 64-bit float rounded up from the given assignable source.
pub fn err_up<T>(src: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = std::cmp::Ordering>,
{
    let mut f = Float::new(ERR_PREC);
    f.assign_round(src, Round::Up);
    f
}

/// Headroom factor applied once per bound operation; absorbs the rounding of
/// the 64-bit bound arithmetic itself many times over.
pub fn slack(mut e: Float) -> Float {
    e.mul_assign_round(1.000000001f64, Round::Up);
    e
}

/// One unit in the last place of `v` at its own precision (0 for zero `v`).
pub fn ulp(v: &Float) -> Float {
    match v.get_exp() {
        Some(e) => {
            let mut u = Float::with_val(ERR_PREC, 1u32);
            u <<= e - v.prec() as i64 as i32 + 1;
            u
        }
        None => Float::new(ERR_PREC), // zero or non-finite: no rounding step
    }
}

fn ulp_c(z: &Complex) -> Float {
    let ur = ulp(z.real());
    let ui = ulp(z.imag());
    slack(err_up(&ur + &ui))
}

/// A real value with a rigorous absolute error bound.
#[derive(Debug, Clone)]
pub struct Approx {
    pub value: Float,
    pub err: Float,
}

impl Approx {
    /// Wrap a value with a given bound.
    pub fn new(value: Float, err: Float) -> Self {
        Approx { value, err }
    }

    /// A value known exactly (e.g. converted from an integer).
    pub fn exact(value: Float) -> Self {
        Approx { value, err: Float::new(ERR_PREC) }
    }

    /// A freshly rounded value: error = one ulp.
    pub fn rounded(value: Float) -> Self {
        let err = ulp(&value);
        Approx { value, err }
    }

    /// Convert a rational exactly up to one rounding at precision `prec`.
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Self::rounded(Float::with_val(prec, q))
    }

    fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn add(&self, other: &Approx) -> Approx {
        let p = self.prec().max(other.prec());
        let value = Float::with_val(p, &self.value + &other.value);
        let err = slack(err_up(&self.err + &other.err)) + ulp(&value);
        Approx { value, err }
    }

    pub fn sub(&self, other: &Approx) -> Approx {
        let p = self.prec().max(other.prec());
        let value = Float::with_val(p, &self.value - &other.value);
        let err = slack(err_up(&self.err + &other.err)) + ulp(&value);
        Approx { value, err }
    }

    pub fn neg(&self) -> Approx {
        Approx { value: Float::with_val(self.prec(), -&self.value), err: self.err.clone() }
    }

    pub fn mul(&self, other: &Approx) -> Approx {
        let p = self.prec().max(other.prec());
        let value = Float::with_val(p, &self.value * &other.value);
        let a = err_up(self.value.clone().abs());
        let b = err_up(other.value.clone().abs());
        let cross = err_up(&self.err * &other.err);
        let err = slack(err_up(&a * &other.err + &b * &self.err) + &cross)
            + ulp(&value);
        Approx { value, err }
    }

    /// Multiply by an exactly known float.
    pub fn mul_exact(&self, c: &Float) -> Approx {
        let p = self.prec().max(c.prec());
        let value = Float::with_val(p, &self.value * c);
        let err = slack(err_up(&self.err * &err_up(c.clone().abs()))) + ulp(&value);
        Approx { value, err }
    }

    /// Divide; requires the divisor bound to leave its sign certain.
    pub fn div(&self, other: &Approx) -> Approx {
        let p = self.prec().max(other.prec());
        let value = Float::with_val(p, &self.value / &other.value);
        let ob = err_up(other.value.clone().abs());
        let denom = Float::with_val(ERR_PREC, &ob - &other.err);
        if !(denom > 0) {
            return Approx { value, err: Float::with_val(ERR_PREC, f64::INFINITY) };
        }
        let w = err_up(value.clone().abs());
        let err =
            slack(err_up(Float::with_val(ERR_PREC, &self.err + &w * &other.err) / denom))
                + ulp(&value);
        Approx { value, err }
    }

    /// exp with bound |e^x − e^x̂| ≤ e^x̂ (e^ε − 1) ≤ 2 ε e^x̂ for ε ≤ 1/2.
    pub fn exp(&self) -> Approx {
        let value = self.value.clone().exp();
        if self.err > 0.5f64 {
            return Approx { value, err: Float::with_val(ERR_PREC, f64::INFINITY) };
        }
        let m = err_up(value.clone().abs());
        let err = slack(err_up(Float::with_val(ERR_PREC, 2u32) * &self.err * &m))
            + ulp(&value);
        Approx { value, err }
    }

    /// Natural log of a certainly positive value: |ln x − ln x̂| ≤ ε/(x̂ − ε).
    pub fn ln(&self) -> Approx {
        let value = self.value.clone().ln();
        let lo = Float::with_val(ERR_PREC, &err_up(self.value.clone().abs()) - &self.err);
        if !(self.value > 0) || !(lo > 0) {
            return Approx { value, err: Float::with_val(ERR_PREC, f64::INFINITY) };
        }
        let err = slack(err_up(Float::with_val(ERR_PREC, &self.err) / lo)) + ulp(&value);
        Approx { value, err }
    }

    /// x^q for certainly positive x and exact rational q, via exp(q ln x).
    pub fn pow_rational(&self, q: &Rational) -> Approx {
        let p = self.prec();
        let qf = Approx::from_rational(q, p);
        self.ln().mul(&qf).exp()
    }

    /// Number of leading decimal digits of `value` certified correct-as-written
    /// by the bound, in the sense used by the renderer (see `render_decimal`).
    pub fn is_consistent_with(&self, other: &Approx) -> bool {
        let gap = err_up(Float::with_val(ERR_PREC, &self.value - &other.value).abs());
        let allow = Float::with_val(ERR_PREC, &self.err + &other.err);
        gap <= allow
    }
}

/// A complex value with a rigorous bound on the modulus of the error.
#[derive(Debug, Clone)]
pub struct ApproxC {
    pub value: Complex,
    pub err: Float,
}

impl ApproxC {
    pub fn new(value: Complex, err: Float) -> Self {
        ApproxC { value, err }
    }

    pub fn exact(value: Complex) -> Self {
        ApproxC { value, err: Float::new(ERR_PREC) }
    }

    pub fn rounded(value: Complex) -> Self {
        let err = ulp_c(&value);
        ApproxC { value, err }
    }

    pub fn from_real(a: &Approx) -> Self {
        let p = a.value.prec();
        ApproxC { value: Complex::with_val(p, (&a.value, 0)), err: a.err.clone() }
    }

    fn prec(&self) -> u32 {
        self.value.real().prec()
    }

    fn abs_up(&self) -> Float {
        err_up(Float::with_val(ERR_PREC, self.value.clone().abs().real()))
    }

    pub fn add(&self, other: &ApproxC) -> ApproxC {
        let p = self.prec().max(other.prec());
        let value = Complex::with_val(p, &self.value + &other.value);
        let err = slack(err_up(&self.err + &other.err)) + ulp_c(&value);
        ApproxC { value, err }
    }

    pub fn sub(&self, other: &ApproxC) -> ApproxC {
        let p = self.prec().max(other.prec());
        let value = Complex::with_val(p, &self.value - &other.value);
        let err = slack(err_up(&self.err + &other.err)) + ulp_c(&value);
        ApproxC { value, err }
    }

    pub fn mul(&self, other: &ApproxC) -> ApproxC {
        let p = self.prec().max(other.prec());
        let value = Complex::with_val(p, &self.value * &other.value);
        let a = self.abs_up();
        let b = other.abs_up();
        let cross = err_up(&self.err * &other.err);
        let err = slack(err_up(&a * &other.err + &b * &self.err) + &cross)
            + ulp_c(&value);
        ApproxC { value, err }
    }

    /// Multiply by an exactly known complex scalar.
    pub fn mul_exact(&self, c: &Complex) -> ApproxC {
        let p = self.prec().max(c.real().prec());
        let value = Complex::with_val(p, &self.value * c);
        let cm = err_up(Float::with_val(ERR_PREC, c.clone().abs().real()));
        let err = slack(err_up(&self.err * &cm)) + ulp_c(&value);
        ApproxC { value, err }
    }

    /// Multiply by an exact real rational scalar.
    pub fn mul_rational(&self, q: &Rational) -> ApproxC {
        let p = self.prec();
        let c = Complex::with_val(p, (Float::with_val(p, q), 0));
        // The scalar conversion itself rounds once; fold that in.
        let conv = ulp(c.real());
        let out = self.mul_exact(&c);
        let extra = slack(err_up(&conv * &self.abs_up()));
        ApproxC { value: out.value, err: out.err + extra }
    }

    pub fn div(&self, other: &ApproxC) -> ApproxC {
        let p = self.prec().max(other.prec());
        let value = Complex::with_val(p, &self.value / &other.value);
        let ob = other.abs_up();
        let lo = Float::with_val(ERR_PREC, &ob - &other.err);
        if !(lo > 0) {
            return ApproxC { value, err: Float::with_val(ERR_PREC, f64::INFINITY) };
        }
        let w = err_up(Float::with_val(ERR_PREC, value.clone().abs().real()));
        let err = slack(err_up(Float::with_val(ERR_PREC, &self.err + &w * &other.err) / lo))
            + ulp_c(&value);
        ApproxC { value, err }
    }

    /// Principal branch logarithm; requires 0 to lie certainly outside the
    /// error disc. |log z − log ẑ| ≤ 2ε/|ẑ| once ε ≤ |ẑ|/2 (combining the
    /// modulus and argument perturbations).
    pub fn ln(&self) -> ApproxC {
        let value = self.value.clone().ln();
        let m = self.abs_up();
        let half = Float::with_val(ERR_PREC, &m) / 2u32;
        if !(half > 0) || self.err > half {
            return ApproxC { value, err: Float::with_val(ERR_PREC, f64::INFINITY) };
        }
        let err =
            slack(err_up(Float::with_val(ERR_PREC, 2u32) * &self.err / &m)) + ulp_c(&value);
        ApproxC { value, err }
    }

    /// exp; |e^z − e^ẑ| ≤ |e^ẑ|(e^ε − 1) ≤ 2ε|e^ẑ| for ε ≤ 1/2.
    pub fn exp(&self) -> ApproxC {
        let value = self.value.clone().exp();
        if self.err > 0.5f64 {
            return ApproxC { value, err: Float::with_val(ERR_PREC, f64::INFINITY) };
        }
        let m = err_up(Float::with_val(ERR_PREC, value.clone().abs().real()));
        let err = slack(err_up(Float::with_val(ERR_PREC, 2u32) * &self.err * &m))
            + ulp_c(&value);
        ApproxC { value, err }
    }

    /// Integer power by binary exponentiation of the bound-carrying product.
    pub fn pow_i(&self, k: i64) -> ApproxC {
        let p = self.prec();
        if k == 0 {
            return ApproxC::exact(Complex::with_val(p, (1, 0)));
        }
        let mut base = if k < 0 {
            ApproxC::exact(Complex::with_val(p, (1, 0))).div(self)
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut acc: Option<ApproxC> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap()
    }

    pub fn conj(&self) -> ApproxC {
        ApproxC { value: self.value.clone().conj(), err: self.err.clone() }
    }

    /// Collapse to the real part, folding the imaginary residue into the
    /// error bound. Used where symmetry forces a real result and the
    /// leftover imaginary part is numerical noise.
    pub fn into_real(self) -> Approx {
        let (re, im) = self.value.into_real_imag();
        let err = slack(err_up(&self.err + &err_up(im.abs())));
        Approx { value: re, err }
    }

    /// The imaginary part's magnitude (for diagnostics on values that must
    /// be real).
    pub fn imag_abs(&self) -> Float {
        err_up(self.value.imag().clone().abs())
    }
}

/// Product of a sequence of bound-carrying complex factors in fixed order.
pub fn product_c<'a>(factors: impl Iterator<Item = &'a ApproxC>, prec: u32) -> ApproxC {
    let mut acc = ApproxC::exact(Complex::with_val(prec, (1, 0)));
    for f in factors {
        acc = acc.mul(f);
    }
    acc
}

/// Decimal rendering of an [`Approx`] by truncation, with digit honesty.
///
/// `render_decimal(a, d)` renders the first `d` decimal digits of `a.value`
/// **by truncation toward zero** — the convention "the first d digits of the
/// constant". For |v| ≥ 1 the count is total significant digits
/// (`1.2252…`); for |v| < 1 it is digits after the point (`0.5000000000`
/// carries ten claimed digits).
///
/// The rendering is *certified* in exact rational arithmetic: it is produced
/// only when the whole interval `[value − err, value + err]` truncates to the
/// same digit string. Otherwise the number of digits that do certify is
/// returned as the error, so the caller can escalate precision or lower the
/// claim.
pub struct Rendered {
    pub text: String,
    /// Count of claimed-correct digits actually rendered.
    pub digits: u32,
}

/// floor(x · 10^shift) exactly, for nonnegative rational x.
fn scaled_floor(x: &Rational, shift: i64) -> Integer {
    let mut scale = Rational::from(1);
    let ten = Integer::from(10);
    if shift >= 0 {
        scale *= Rational::from(ten.pow(shift as u32));
    } else {
        scale /= Rational::from(ten.pow((-shift) as u32));
    }
    let scaled = Rational::from(x * &scale);
    scaled.floor().numer().clone()
}

/// Decimal exponent: number of digits before the point (0 when |v| < 1).
fn dec_exponent(v_abs: &Rational) -> i64 {
    if *v_abs < 1u32 {
        0
    } else {
        v_abs.clone().floor().numer().to_string().len() as i64
    }
}

/// Digit-position scale for a g-digit claim: shift such that the claimed
/// digits are the decimal digits of floor(|v|·10^shift).
fn claim_shift(g: u32, e: i64) -> i64 {
    g as i64 - e.max(0)
}

/// Largest digit count `g ≤ want` such that every point of
/// `[v − err, v + err]` truncates to the same leading digit string, together
/// with that truncation. Exact rational arithmetic throughout.
fn certify(a: &Approx, want: u32) -> (u32, Option<(Integer, i64, bool)>) {
    let v = &a.value;
    if !v.is_finite() || !a.err.is_finite() {
        return (0, None);
    }
    let neg = *v < 0u32;
    let v_abs = v.to_rational().map(|r| r.abs()).unwrap_or_default();
    let err = a.err.to_rational().unwrap_or_default();
    let lo = Rational::from(&v_abs - &err);
    let hi = Rational::from(&v_abs + &err);
    if lo < 0u32 {
        return (0, None); // sign of the true value is not certain
    }
    // The decimal exponent itself must be certain.
    let e = dec_exponent(&v_abs);
    if dec_exponent(&lo) != e || dec_exponent(&hi) != e {
        return (0, None);
    }
    for g in (1..=want).rev() {
        let shift = claim_shift(g, e);
        let t_lo = scaled_floor(&lo, shift);
        let t_hi = scaled_floor(&hi, shift);
        if t_lo == t_hi {
            return (g, Some((t_lo, e, neg)));
        }
    }
    (0, None)
}

/// Number of leading decimal digits of `a.value` certified correct by the
/// bound, up to `want`.
pub fn certify_digits(a: &Approx, want: u32) -> u32 {
    certify(a, want).0
}

/// Render `digits` claimed decimal digits of `a`, or report how many are
/// certifiable if fewer.
pub fn render_decimal(a: &Approx, digits: u32) -> Result<Rendered, u32> {
    if digits == 0 {
        return Err(0);
    }
    let (got, payload) = certify(a, digits);
    if got < digits {
        return Err(got);
    }
    let (t, e, neg) = payload.expect("certified rendering carries its truncation");
    Ok(Rendered { text: assemble(&t.to_string(), e, digits, neg), digits })
}

fn assemble(ds: &str, e: i64, digits: u32, neg: bool) -> String {
    let sign = if neg { "-" } else { "" };
    let mut ds = ds.to_string();
    if e <= 0 {
        // |v| < 1: claimed digits sit right after the point; reinstate
        // leading zeros the integer form dropped.
        while ds.len() < digits as usize {
            ds.insert(0, '0');
        }
        return format!("{sign}0.{ds}");
    }
    let e = e as usize;
    if e >= digits as usize {
        // Integer part alone exhausts the claim; pad to the ones place.
        while ds.len() < e {
            ds.push('0');
        }
        format!("{sign}{ds}")
    } else {
        format!("{sign}{}.{}", &ds[..e], &ds[e..])
    }
}

/// Convenience: π at the given precision, exactly rounded.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// Float from u64 at precision.
pub fn f_u64(prec: u32, v: u64) -> Float {
    Float::with_val(prec, v)
}

/// 2^e as an error-precision float.
pub fn two_pow(e: i64) -> Float {
    let mut f = Float::with_val(ERR_PREC, 1u32);
    f <<= e as i32;
    f
}

impl Default for Approx {
    fn default() -> Self {
        Approx::exact(Float::new(64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ulp_scales_with_exponent() {
        let v = Float::with_val(64, 1.5f64);
        let u = ulp(&v);
        assert!(u > 0);
        assert!(u <= two_pow(-62));
        let w = Float::with_val(64, 1536.0f64);
        assert!(ulp(&w) > ulp(&v));
    }

    #[test]
    fn approx_mul_bound_holds() {
        let a = Approx::new(Float::with_val(128, 3), Float::with_val(64, 1e-20f64));
        let b = Approx::new(Float::with_val(128, 5), Float::with_val(64, 1e-20f64));
        let c = a.mul(&b);
        assert_eq!(c.value, 15);
        // bound at least |a|·εb + |b|·εa = 8e-20
        assert!(c.err >= Float::with_val(64, 8e-20f64));
        assert!(c.err < Float::with_val(64, 1e-18f64));
    }

    #[test]
    fn render_truncates_not_rounds() {
        // 0.199995 truncated to five places is 0.19999; rounding would say
        // 0.20000. The bound keeps the interval inside one truncation cell.
        let v = Float::with_val(256, Rational::from((199995, 1000000)));
        let a = Approx::new(v, two_pow(-200));
        let r = render_decimal(&a, 5).unwrap();
        assert_eq!(r.text, "0.19999");
    }

    #[test]
    fn render_exact_value_on_grid_point() {
        // An exact value sitting on a decimal boundary renders fine with a
        // zero bound — and must refuse once any uncertainty straddles it.
        let a = Approx::exact(Float::with_val(128, Rational::from((1, 2))));
        let r = render_decimal(&a, 10).unwrap();
        assert_eq!(r.text, "0.5000000000");

        let fuzzy =
            Approx::new(Float::with_val(128, Rational::from((1, 2))), two_pow(-100));
        assert!(render_decimal(&fuzzy, 10).is_err());
    }

    #[test]
    fn render_above_one_counts_total_digits() {
        let v = Float::with_val(256, Rational::from((122523843853908458u64, 100000000000000000u64)));
        let a = Approx::new(v, two_pow(-200));
        let r = render_decimal(&a, 12).unwrap();
        assert_eq!(r.text, "1.22523843853");
    }

    #[test]
    fn certify_fails_near_boundary() {
        // value extremely close above a truncation boundary with a bound that
        // straddles it: certification must refuse the last digit.
        let v = Float::with_val(256, 0.2f64); // binary 0.2 is slightly off 1/5
        let a = Approx::new(v, Float::with_val(64, 1e-3f64));
        assert!(certify_digits(&a, 4) < 4);
    }

    #[test]
    fn bits_for_digits_formula() {
        assert_eq!(bits_for_digits(30), 100 + 64);
        assert_eq!(bits_for_digits(50), 167 + 64);
    }
}
