//! Exact linear-factor products: the convergent correction factors of the
//! census constants, and the point-evaluation identity checker behind every
//! "these two rational functions are equal" claim.
//!
//! Every correction factor in the census constants is a rational function
//! of p that factors over ℤ into linear pieces of 1/p:
//!
//! ```text
//! c(p) = ∏_i (1 + a_i/p)^{e_i},     a_i, e_i ∈ ℤ,
//! ```
//!
//! e.g. 1 − 2/(p(p+1)) = (1 − 1/p)(1 + 2/p)(1 + 1/p)^{−1}. A product of
//! such factors over the primes of a residue class converges absolutely
//! iff the 1/p coefficient of log c cancels, i.e. Σᵢ eᵢaᵢ = 0 — enforced
//! at construction. Then
//!
//! ```text
//! log ∏_{p>P, p∈K} c(p) = Σ_{m≥2} c_m Σ_{k∈K} PZ^{(>P)}_k(m),
//! c_m = (−1)^{m+1} (Σ_i e_i a_i^m)/m      (exact rationals),
//! ```
//!
//! with PZ the class prime zeta tails of [`products`]. Truncating at M
//! leaves less than
//!
//! ```text
//! 2·W·|K| · (P+1)/(M+1) · r^{M+1}/(1−r),    r = A/(P+1),
//! ```
//!
//! where A = max|a_i| and W = Σ|e_i| — geometric once P > A, since
//! |c_m| ≤ W·A^m/m and PZ^{(>P)}(m) ≤ 2(P+1)^{1−m}. Primes p ≤ P are
//! multiplied in exactly.
//!
//! Identity checking: two rational functions of degree ≤ D that agree at
//! D + 1 points are identical, so every factored form used here is checked
//! against its quoted source form by exact evaluation at small integers —
//! no symbolic algebra, no rounding, no room for a wrong factorization to
//! survive.

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::numerics::{self, Approx};
use crate::products::{depth_for, Accel};

// ----------------------------------------------------------------------
// Linear-factor products
// ----------------------------------------------------------------------

/// ∏_i (1 + a_i/p)^{e_i} with Σ_i e_i a_i = 0, as a multiset of factors.
#[derive(Clone, Debug)]
pub struct LinearFactorProduct {
    factors: Vec<(i64, i32)>,
}

impl LinearFactorProduct {
    /// Build from (a, e) pairs. Zero factors are dropped; the convergence
    /// condition Σ e·a = 0 is enforced.
    pub fn new(factors: &[(i64, i32)]) -> Result<LinearFactorProduct> {
        let kept: Vec<(i64, i32)> = factors
            .iter()
            .copied()
            .filter(|&(a, e)| a != 0 && e != 0)
            .collect();
        let drift: i64 = kept.iter().map(|&(a, e)| a * e as i64).sum();
        if drift != 0 {
            return Err(Error::domain(format!(
                "linear-factor product diverges: Σ e·a = {drift} ≠ 0"
            )));
        }
        Ok(LinearFactorProduct { factors: kept })
    }

    pub fn factors(&self) -> &[(i64, i32)] {
        &self.factors
    }

    /// max |a_i| — the largest pole/zero location, and the geometric scale
    /// of the tail.
    pub fn max_abs_root(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(a, _)| a.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Σ |e_i|.
    pub fn total_weight(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e.unsigned_abs() as u64).sum()
    }

    /// Exact value at rational p; `None` on a pole (or p = 0).
    pub fn eval_at(&self, p: &Rational) -> Option<Rational> {
        if *p == 0u32 {
            return None;
        }
        let mut out = Rational::from(1u32);
        for &(a, e) in &self.factors {
            let base = Rational::from(1u32) + Rational::from(a) / p.clone();
            if base == 0u32 && e < 0 {
                return None;
            }
            if base == 0u32 {
                out = Rational::new();
                continue;
            }
            out *= base.pow(e);
        }
        Some(out)
    }

    /// Largest −a over factors with a < 0: the zero/pole location nearest
    /// +∞, which evaluation at a positive prime must clear.
    pub fn max_negative_root(&self) -> u64 {
        self.factors
            .iter()
            .filter(|&&(a, _)| a < 0)
            .map(|&(a, _)| a.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Exact value at a prime beyond every positive zero or pole (guarded:
    /// factors with a > 0 are positive at any positive p, factors with
    /// a < 0 only beyond |a|).
    pub fn eval_at_prime(&self, p: u64) -> Result<Rational> {
        if p <= self.max_negative_root() {
            return Err(Error::domain(format!(
                "prime {p} does not clear the largest root {}",
                self.max_negative_root()
            )));
        }
        Ok(self.eval_at(&Rational::from(p)).expect("no pole beyond roots"))
    }

    /// c_m in log ∏(1+a_i x)^{e_i} = Σ_{m≥1} c_m x^m; c_1 = 0 by the
    /// construction invariant.
    pub fn log_coefficient(&self, m: u32) -> Rational {
        let mut sum = rug::Integer::new();
        for &(a, e) in &self.factors {
            sum += rug::Integer::from(a).pow(m) * rug::Integer::from(e);
        }
        let sign = if m % 2 == 0 { -1i32 } else { 1 };
        Rational::from((sum * sign, rug::Integer::from(m)))
    }

    /// ∏ over primes p ≡ k (mod ℓ), k ranging over `classes`, of the factor
    /// value — exact below the strip point, resummed log above it, with the
    /// geometric truncation bound folded into the error.
    pub fn product_over_classes(&self, ctx: &Accel, classes: &[u64]) -> Result<Approx> {
        let prec = ctx.precision();
        let wp = numerics::working_prec(prec);
        let strip = ctx.strip_below();
        let a_max = self.max_abs_root();
        if strip <= 2 * a_max {
            return Err(Error::domain(format!(
                "strip point {strip} too small for roots up to {a_max}"
            )));
        }
        let ell = ctx.modulus();
        let mut sorted: Vec<u64> = classes.iter().map(|&k| k % ell).collect();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != classes.len() {
            return Err(Error::domain("duplicate residue classes"));
        }
        for &k in &sorted {
            if crate::products::gcd(k, ell) != 1 {
                return Err(Error::domain(format!(
                    "class {k} is not coprime to the modulus {ell}"
                )));
            }
        }
        if self.factors.is_empty() || sorted.is_empty() {
            return Ok(Approx::exact(Float::with_val(wp, 1u32)));
        }

        // Exact block over p ≤ P in the chosen classes, ascending.
        let mut finite = Approx::exact(Float::with_val(wp, 1u32));
        for &p in ctx.prime_table().primes() {
            if sorted.binary_search(&(p % ell)).is_ok() {
                let f = self.eval_at_prime(p)?;
                finite = finite.mul(&Approx::from_rational(&f, wp));
            }
        }

        // Resummed log of the rest: Σ_{m=2..M} c_m Σ_k PZ^{(>P)}_k(m).
        let depth_m = self.tail_depth(strip, prec);
        let mut log_tail = Approx::exact(Float::with_val(wp, 0u32));
        for m in 2..=depth_m {
            let c_m = self.log_coefficient(m);
            if c_m == 0u32 {
                continue;
            }
            let sm = Float::with_val(wp, m);
            let jm = depth_for(strip, m as f64, prec);
            let mut pz_sum = Approx::exact(Float::with_val(wp, 0u32));
            for &k in &sorted {
                pz_sum = pz_sum.add(&ctx.prime_zeta_tail(k, &sm, jm)?);
            }
            log_tail = log_tail.add(&pz_sum.mul(&Approx::from_rational(&c_m, wp)));
        }
        log_tail.err += self.truncation_bound(strip, depth_m, sorted.len() as u32);
        Ok(finite.mul(&log_tail.exp()))
    }

    /// Smallest M with the truncation bound below 2^{−(prec+16)}.
    fn tail_depth(&self, strip: u64, prec: u32) -> u32 {
        let ratio = ((strip + 1) as f64 / self.max_abs_root().max(1) as f64).log2();
        let lead = (2.0 * self.total_weight() as f64 * (strip + 1) as f64).log2() + 1.0;
        (((prec + 16) as f64 + lead) / ratio).ceil() as u32
    }

    /// 2W|K|(P+1)/(M+1) · r^{M+1}/(1−r), r = A/(P+1), rounded up with slack.
    fn truncation_bound(&self, strip: u64, depth_m: u32, n_classes: u32) -> Float {
        let p1 = Float::with_val(64, strip + 1);
        let r = Float::with_val(64, self.max_abs_root().max(1)) / &p1;
        let geo = Float::with_val(64, r.clone().pow(depth_m + 1))
            / (Float::with_val(64, 1u32) - &r);
        let lead = Float::with_val(64, 2 * self.total_weight() * n_classes as u64)
            * p1
            / Float::with_val(64, depth_m + 1);
        numerics::slack(numerics::err_up(lead * geo))
    }
}

// ----------------------------------------------------------------------
// Exact identity checking
// ----------------------------------------------------------------------

/// Do two rational-function expressions agree identically? Checked by exact
/// evaluation at `degree_bound + 1` integer points (skipping poles, where
/// either side returns `None`): a nonzero rational function of degree
/// ≤ degree_bound cannot vanish that often.
pub fn rational_functions_agree(
    lhs: &dyn Fn(&Rational) -> Option<Rational>,
    rhs: &dyn Fn(&Rational) -> Option<Rational>,
    degree_bound: u32,
) -> bool {
    let mut agreements = 0u32;
    let mut t = 2u64;
    while agreements <= degree_bound {
        let x = Rational::from(t);
        match (lhs(&x), rhs(&x)) {
            (Some(a), Some(b)) => {
                if a != b {
                    return false;
                }
                agreements += 1;
            }
            // A pole of one side only is also disagreement — but poles of
            // rational functions are finite in number, so keep walking and
            // demand the full quota of two-sided agreements.
            _ => {}
        }
        t += 1;
        if t > 10_000 {
            return false;
        }
    }
    true
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::class_prime_zeta_in;

    #[test]
    fn rejects_divergent_factor_lists() {
        assert!(LinearFactorProduct::new(&[(1, 1)]).is_err());
        assert!(LinearFactorProduct::new(&[(2, 1), (-1, 1)]).is_err());
        assert!(LinearFactorProduct::new(&[(2, 1), (-1, 2)]).is_ok());
        assert!(LinearFactorProduct::new(&[]).is_ok());
    }

    #[test]
    fn exact_values_and_log_coefficients() {
        // (1 − 1/p)(1 + 2/p)/(1 + 1/p), the cubic-census correction.
        let f = LinearFactorProduct::new(&[(-1, 1), (2, 1), (1, -1)]).unwrap();
        // At p = 2: (1/2)(2)/(3/2) = 2/3, matching 1 − 2/(2·3).
        assert_eq!(f.eval_at_prime(2).unwrap(), Rational::from((2, 3)));
        // log series: 0·x − 2x² + 2x³ − 9/2·x⁴ + …
        assert_eq!(f.log_coefficient(1), Rational::from(0));
        assert_eq!(f.log_coefficient(2), Rational::from(-2));
        assert_eq!(f.log_coefficient(3), Rational::from(2));
        assert_eq!(f.log_coefficient(4), Rational::from(-4));
        assert_eq!(f.max_abs_root(), 2);
        assert_eq!(f.total_weight(), 3);
        assert!(f.eval_at_prime(2).is_ok());
        assert_eq!(f.max_negative_root(), 1);
        // (1 − 3/p) vanishes at p = 3 and is negative below: guarded.
        let g = LinearFactorProduct::new(&[(-3, 1), (1, 3)]).unwrap();
        assert!(g.eval_at_prime(3).is_err());
        assert!(g.eval_at_prime(5).is_ok());
        // Pole at p = −1: eval_at returns None.
        assert!(f.eval_at(&Rational::from(-1)).is_none());
    }

    #[test]
    fn identity_checker_accepts_and_rejects() {
        // (1−x)(1+x) = 1 − x² — true.
        let lhs = |x: &Rational| {
            Some((Rational::from(1u32) - x.clone()) * (Rational::from(1u32) + x.clone()))
        };
        let rhs = |x: &Rational| Some(Rational::from(1u32) - Rational::from(x * x));
        assert!(rational_functions_agree(&lhs, &rhs, 4));
        // 1/(1−1/x) = x/(x−1) — true, with a pole at x = 1 skipped.
        let lhs2 = |x: &Rational| {
            let d = Rational::from(1u32) - Rational::from(1u32) / x.clone();
            if d == 0u32 {
                None
            } else {
                Some(Rational::from(1u32) / d)
            }
        };
        let rhs2 = |x: &Rational| {
            let d = x.clone() - 1u32;
            if d == 0u32 {
                None
            } else {
                Some(x.clone() / d)
            }
        };
        assert!(rational_functions_agree(&lhs2, &rhs2, 4));
        // x² ≠ x³ — rejected.
        let sq = |x: &Rational| Some(Rational::from(x * x));
        let cb = |x: &Rational| Some(Rational::from(x * x) * x);
        assert!(!rational_functions_agree(&sq, &cb, 6));
    }

    /// Accelerated class product vs a one-million-prime direct product.
    #[test]
    fn accelerated_product_matches_direct() {
        let prec = 160;
        let f = LinearFactorProduct::new(&[(-1, 1), (2, 1), (1, -1)]).unwrap();
        let ctx = Accel::new(3, 1000, prec).unwrap();
        let fast = f.product_over_classes(&ctx, &[1]).unwrap();

        let table = crate::primes::sieve(1_000_000).unwrap();
        let mut direct = Float::with_val(96, 1u32);
        for &p in table.primes() {
            if p % 3 == 1 {
                direct *= Float::with_val(96, f.eval_at_prime(p).unwrap());
            }
        }
        // Tail of the direct product is O(Σ_{p>10⁶} 2/p²) ≈ 1.5e−7·weighted.
        let gap = Float::with_val(64, &fast.value - &direct).abs();
        assert!(gap < 1e-6, "fast {} vs direct {}", fast.value, direct);
        assert!(fast.err < Float::with_val(64, 1e-40f64));
    }

    /// Same value from two different syntactic factorizations and two strip
    /// points.
    #[test]
    fn factorization_and_parameter_independence() {
        let prec = 160;
        // (1−x)²(1+4x)/(1+x)² split two ways.
        let merged = LinearFactorProduct::new(&[(-1, 2), (4, 1), (1, -2)]).unwrap();
        let split = LinearFactorProduct::new(&[(-1, 1), (-1, 1), (4, 1), (1, -1), (1, -1)])
            .unwrap();
        let ctx_a = Accel::new(5, 1000, prec).unwrap();
        let ctx_b = Accel::new(5, 301, prec).unwrap();
        let a = merged.product_over_classes(&ctx_a, &[1]).unwrap();
        let b = split.product_over_classes(&ctx_b, &[1]).unwrap();
        assert!(a.is_consistent_with(&b));
        let gap = Float::with_val(64, &a.value - &b.value).abs();
        assert!(gap < 1e-35, "{} vs {}", a.value, b.value);
    }

    /// Multi-class product = product of single-class products.
    #[test]
    fn classes_compose() {
        let prec = 128;
        let f = LinearFactorProduct::new(&[(2, 1), (-1, 2)]).unwrap();
        let ctx = Accel::new(9, 1000, prec).unwrap();
        let joint = f.product_over_classes(&ctx, &[4, 7]).unwrap();
        let four = f.product_over_classes(&ctx, &[4]).unwrap();
        let seven = f.product_over_classes(&ctx, &[7]).unwrap();
        assert!(joint.is_consistent_with(&four.mul(&seven)));
    }

    #[test]
    fn rejects_bad_classes() {
        let f = LinearFactorProduct::new(&[(-1, 1), (1, 1)]).unwrap();
        let ctx = Accel::new(6, 1000, 96).unwrap();
        assert!(f.product_over_classes(&ctx, &[2]).is_err());
        assert!(f.product_over_classes(&ctx, &[1, 1]).is_err());
        assert!(f.product_over_classes(&ctx, &[1, 5]).is_ok());
        // Strip point must clear the roots.
        let wide = LinearFactorProduct::new(&[(100, 1), (-1, 100)]).unwrap();
        let tight = Accel::new(6, 150, 96).unwrap();
        assert!(wide.product_over_classes(&tight, &[1]).is_err());
    }

    /// The empty product and empty factor list are exactly 1.
    #[test]
    fn trivial_products() {
        let ctx = Accel::new(4, 1000, 96).unwrap();
        let f = LinearFactorProduct::new(&[]).unwrap();
        let v = f.product_over_classes(&ctx, &[1]).unwrap();
        assert_eq!(v.value, 1u32);
        assert_eq!(v.err, 0u32);
    }

    /// Log-coefficient route agrees with a raw prime-zeta computation:
    /// log ∏_{p≡1(4)} (1−1/p)(1+1/p) = −Σ_j (1/j) PZ_1(2j) telescoped.
    #[test]
    fn log_route_matches_zeta_route() {
        let prec = 128;
        let wp = numerics::working_prec(prec);
        let f = LinearFactorProduct::new(&[(-1, 1), (1, 1)]).unwrap(); // 1 − 1/p²
        let ctx = Accel::new(4, 1000, prec).unwrap();
        let via_factors = f.product_over_classes(&ctx, &[1]).unwrap();

        // Directly: ∏_{p≡1(4)} (1−p⁻²) = exp(−Σ_{m≥1} PZ_1(2m)/m), cut at
        // m = 25.  The neglected tail Σ_{m>25} PZ_1(2m)/m ≤ 5^{−52}/25 is
        // charged to the error term below; past s ≈ 50 the prime zeta
        // values sink beneath working-precision noise anyway.
        let mut log_sum = Approx::exact(Float::with_val(wp, 0u32));
        for m in 1..=25u32 {
            let sm = Float::with_val(wp, 2 * m);
            let jm = crate::products::depth_for(1000, 2.0 * m as f64, prec);
            let z = class_prime_zeta_in(&ctx, 1, &sm, jm).unwrap();
            let w = Approx::from_rational(&Rational::from((-1i32, m)), wp);
            log_sum = log_sum.add(&z.value.mul(&w));
        }
        log_sum.err += Float::with_val(numerics::ERR_PREC, 1e-36);
        let direct = log_sum.exp();
        assert!(via_factors.is_consistent_with(&direct));
        let gap = Float::with_val(64, &via_factors.value - &direct.value).abs();
        assert!(gap < 1e-30);
    }
}
