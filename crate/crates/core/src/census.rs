//! Counting primitive Dirichlet characters of bounded order.
//!
//! Let b_ℓ(n) be the number of primitive characters χ (mod n) with χ^ℓ
//! principal — equivalently, with ord(χ) | ℓ. (The trivial character counts
//! as primitive mod 1, so b_ℓ(1) = 1 and the Dirichlet series starts 1 + ….)
//! Summed over n ≤ N these counts grow like
//!
//! ```text
//! S(N) = Σ_{n≤N} b_ℓ(n) ~ K_ℓ · N · ln(N)^{d(ℓ)−2},
//! ```
//!
//! d(ℓ) the number of divisors of ℓ; the constants K_ℓ live in [`crate::kappa`].
//!
//! Two independent algorithms are implemented and cross-checked:
//!
//! * **Brute force** — enumerate the full character group mod n and count
//!   the characters whose conductor is exactly n and whose order divides ℓ.
//!   Transparent, and independent of everything below.
//! * **Möbius route** — the number of *all* (not necessarily primitive)
//!   characters mod d with χ^ℓ principal is
//!
//!   ```text
//!   g_ℓ(d) = ∏_{cyclic components C of (ℤ/d)^×} gcd(ℓ, |C|),
//!   ```
//!
//!   since a cyclic group of order m has exactly gcd(ℓ, m) elements killed
//!   by ℓ. Every χ mod d is induced by a unique primitive character of
//!   conductor f | d with the same order, so g_ℓ = 1 ∗ b_ℓ (Dirichlet
//!   convolution) and b_ℓ(n) = Σ_{d|n} μ(n/d) g_ℓ(d). Both sides of the
//!   convolution are multiplicative, so the sum collapses prime by prime:
//!   b_ℓ(∏ pᵉ) = ∏ (g_ℓ(pᵉ) − g_ℓ(pᵉ⁻¹)) — the form the table builder
//!   uses, while [`b_moebius`] keeps the literal divisor sum.
//!
//! Local values used throughout the tests (all verified against brute
//! force): for odd p, g_ℓ(p^r) = gcd(ℓ, p^{r−1}(p−1)); for powers of two,
//! g_ℓ(2) = 1, g_ℓ(4) = gcd(ℓ,2), g_ℓ(2^r) = gcd(ℓ,2)·gcd(ℓ,2^{r−2}) for
//! r ≥ 3. In particular b_ℓ(p) = gcd(ℓ, p−1) − 1 and b_ℓ(p^r) = 0 for
//! r ≥ 2 once p ∤ ℓ.

use crate::characters;
use crate::error::{Error, Result};
use crate::products::gcd;

/// Largest modulus accepted by [`b_bruteforce`] (it walks all φ(n)
/// characters).
pub const BRUTEFORCE_LIMIT: u64 = 200_000;

/// Largest table size for [`census`] (smallest-prime-factor sieve plus the
/// count and partial-sum columns stay within a few hundred MB).
pub const CENSUS_LIMIT: u64 = 10_000_000;

// ----------------------------------------------------------------------
// Local counts
// ----------------------------------------------------------------------

/// g_ℓ(p^r): characters mod p^r killed by ℓ.
pub(crate) fn g_prime_power(ell: u64, p: u64, r: u32) -> u64 {
    if p == 2 {
        match r {
            0 => 1,
            1 => 1,
            2 => gcd(ell, 2),
            _ => gcd(ell, 2) * gcd(ell, 1u64 << (r - 2)),
        }
    } else if r == 0 {
        1
    } else {
        // |(ℤ/p^r)^×| = p^{r−1}(p−1), cyclic. gcd(ℓ, p^{r−1}(p−1)) without
        // overflow: peel the p-part and the (p−1)-part separately.
        let mut acc = gcd(ell, p - 1);
        let mut rest = ell / acc;
        for _ in 1..r {
            let d = gcd(rest, p);
            if d == 1 {
                break;
            }
            acc *= d;
            rest /= d;
        }
        acc
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut r = 0u32;
            while n % p == 0 {
                n /= p;
                r += 1;
            }
            out.push((p, r));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// b_ℓ(n) from a prepared factorization, via the multiplicative collapse
/// b_ℓ(p^r) = g_ℓ(p^r) − g_ℓ(p^{r−1}).
fn b_from_factorization(ell: u64, factors: &[(u64, u32)]) -> u64 {
    let mut b = 1u64;
    for &(p, r) in factors {
        let local = g_prime_power(ell, p, r) - g_prime_power(ell, p, r - 1);
        if local == 0 {
            return 0;
        }
        b *= local;
    }
    b
}

// ----------------------------------------------------------------------
// The two public counters
// ----------------------------------------------------------------------

/// Count primitive χ (mod n) with χ^ℓ principal by enumerating the whole
/// character group and testing conductor and order directly.
pub fn b_bruteforce(ell: u64, n: u64) -> Result<u64> {
    if ell < 2 || n == 0 {
        return Err(Error::domain("census needs ℓ ≥ 2 and n ≥ 1"));
    }
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::Resource(format!(
            "brute-force census of modulus {n} exceeds the limit {BRUTEFORCE_LIMIT}"
        )));
    }
    let chars = characters::characters_mod(n)?;
    Ok(chars
        .iter()
        .filter(|chi| chi.conductor() == n && ell % chi.order() == 0)
        .count() as u64)
}

/// Count primitive χ (mod n) with χ^ℓ principal by the literal Möbius sum
/// b_ℓ(n) = Σ_{d|n} μ(n/d) g_ℓ(d) over squarefree cofactors n/d.
pub fn b_moebius(ell: u64, n: u64) -> Result<u64> {
    if ell < 2 || n == 0 {
        return Err(Error::domain("census needs ℓ ≥ 2 and n ≥ 1"));
    }
    let factors = factorize(n);
    let omega = factors.len() as u32;
    let mut total = 0i64;
    for mask in 0u32..(1u32 << omega) {
        // d = n / ∏_{i∈mask} p_i, μ(n/d) = (−1)^{|mask|}; g is multiplicative
        // and g(p⁰) = 1 covers primes dropped from d entirely.
        let mut g = 1u64;
        for (i, &(p, r)) in factors.iter().enumerate() {
            let e = if (mask >> i) & 1 == 1 { r - 1 } else { r };
            g *= g_prime_power(ell, p, e);
        }
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        total += sign * g as i64;
    }
    debug_assert!(total >= 0);
    Ok(total as u64)
}

// ----------------------------------------------------------------------
// Tables
// ----------------------------------------------------------------------

/// b_ℓ(n) for 1 ≤ n ≤ limit with partial sums, plus spot-check bookkeeping.
#[derive(Clone, Debug)]
pub struct CensusTable {
    pub order: u64,
    pub limit: u64,
    /// counts[n] = b_ℓ(n); index 0 unused.
    pub counts: Vec<u64>,
    /// partial[n] = S(n) = Σ_{m≤n} b_ℓ(m); index 0 is 0.
    pub partial: Vec<u64>,
    /// Moduli where the table entry was re-derived by brute force.
    pub spot_checked: Vec<u64>,
}

impl CensusTable {
    pub fn count(&self, n: u64) -> u64 {
        self.counts[n as usize]
    }

    pub fn partial_sum(&self, n: u64) -> u64 {
        self.partial[n as usize]
    }

    /// `n,b,partial_sum` rows, one per modulus.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 * self.counts.len());
        out.push_str("n,b,partial_sum\n");
        for n in 1..self.counts.len() {
            out.push_str(&format!("{n},{},{}\n", self.counts[n], self.partial[n]));
        }
        out
    }
}

/// Build the census table for order ℓ up to `limit`, via the multiplicative
/// fast path over a smallest-prime-factor sieve, with deterministic spot
/// checks against [`b_bruteforce`] (a disagreement is a hard cross-check
/// failure).
pub fn census(ell: u64, limit: u64) -> Result<CensusTable> {
    if ell < 2 || limit == 0 {
        return Err(Error::domain("census needs ℓ ≥ 2 and N ≥ 1"));
    }
    if limit > CENSUS_LIMIT {
        return Err(Error::Resource(format!(
            "census to {limit} exceeds the limit {CENSUS_LIMIT}"
        )));
    }
    let n = limit as usize;

    // Smallest prime factor sieve for fast factorization.
    let mut spf: Vec<u32> = (0..=n as u32).collect();
    let mut i = 2usize;
    while i * i <= n {
        if spf[i] == i as u32 {
            let mut j = i * i;
            while j <= n {
                if spf[j] == j as u32 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        i += 1;
    }

    let mut counts = vec![0u64; n + 1];
    let mut partial = vec![0u64; n + 1];
    counts[1] = 1;
    partial[1] = 1;
    let mut factors: Vec<(u64, u32)> = Vec::with_capacity(16);
    for m in 2..=n {
        factors.clear();
        let mut rest = m;
        while rest > 1 {
            let p = spf[rest] as usize;
            let mut r = 0u32;
            while rest % p == 0 {
                rest /= p;
                r += 1;
            }
            factors.push((p as u64, r));
        }
        counts[m] = b_from_factorization(ell, &factors);
        partial[m] = partial[m - 1] + counts[m];
    }

    // Deterministic spot checks: every n ≤ 48, then a fixed LCG walk over
    // the brute-forceable range.
    let mut spots: Vec<u64> = (1..=limit.min(48)).collect();
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let hi = limit.min(2_000);
    for _ in 0..12 {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let pick = 2 + state % hi.max(2);
        if pick <= limit && !spots.contains(&pick) {
            spots.push(pick);
        }
    }
    spots.sort_unstable();
    for &m in &spots {
        let brute = b_bruteforce(ell, m)?;
        if brute != counts[m as usize] {
            return Err(Error::CrossCheck(format!(
                "census mismatch at n = {m}: sieve {} vs brute force {brute}",
                counts[m as usize]
            )));
        }
    }

    Ok(CensusTable {
        order: ell,
        limit,
        counts,
        partial,
        spot_checked: spots,
    })
}

/// Number of divisors of ℓ (the exponent in S(N) ~ K_ℓ N ln(N)^{d(ℓ)−2}).
pub fn divisor_count(ell: u64) -> u64 {
    factorize(ell)
        .iter()
        .map(|&(_, r)| (r + 1) as u64)
        .product()
}

/// S(N′)/(N′ · ln(N′)^{d(ℓ)−2}) at ~16 logarithmically spaced points
/// N′ ≤ limit (always including the endpoint) — the sequence that should
/// drift toward K_ℓ.
pub fn asymptotic_ratio(table: &CensusTable) -> Vec<(u64, f64)> {
    let d = divisor_count(table.order);
    let lo = 3f64.ln();
    let hi = (table.limit as f64).ln();
    let mut points: Vec<u64> = (0..16)
        .map(|i| (lo + (hi - lo) * i as f64 / 15.0).exp().round() as u64)
        .filter(|&x| (3..=table.limit).contains(&x))
        .collect();
    points.push(table.limit.max(3).min(table.limit));
    points.sort_unstable();
    points.dedup();
    points
        .into_iter()
        .map(|np| {
            let s = table.partial_sum(np) as f64;
            let ln_np = (np as f64).ln();
            let ratio = s / (np as f64 * ln_np.powi(d as i32 - 2));
            (np, ratio)
        })
        .collect()
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------
