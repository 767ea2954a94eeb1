//! Prime generation and classification by residue class.
//!
//! Primes in arithmetic progressions are the index set of every restricted
//! Euler product
//!
//! ```text
//! ∏_{p ≡ k (mod ℓ)} (1 − p^{−s})^{−1},
//! ```
//!
//! so everything downstream — stripped L-values, class prime zeta sums,
//! partial Mertens products — draws its primes from one immutable
//! [`PrimeTable`] built here.
//!
//! The sieve is a segmented, odd-only Eratosthenes: base primes up to
//! √limit mark a sliding window, so the working set stays at one segment
//! regardless of the limit. The output vector dominates memory, and a
//! configurable budget (default 1 GiB) rejects requests that would not fit
//! before any allocation happens.

use crate::error::{Error, Result};
use std::collections::BTreeSet;

// ----------------------------------------------------------------------
// Prime table
// ----------------------------------------------------------------------

/// All primes up to a fixed limit, ascending. Immutable after construction
/// and freely shareable across threads.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Upper bound of the table (inclusive).
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// The primes, strictly increasing.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes ≤ limit.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Membership test by binary search (the table is sorted).
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// Default memory budget for [`sieve`]: 1 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Numbers covered by one sieve segment (odd-only bitmap of half the size).
const SEGMENT_SPAN: u64 = 1 << 21;

/// Primes up to `limit` under the default memory budget.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    sieve_with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

/// Primes up to `limit`, refusing up front if the estimated footprint
/// (output vector + base primes + one segment) exceeds `budget_bytes`.
pub fn sieve_with_budget(limit: u64, budget_bytes: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::domain(format!(
            "sieve limit must be ≥ 2, got {limit}"
        )));
    }
    let estimate = estimated_bytes(limit);
    if estimate > budget_bytes {
        return Err(Error::Resource(format!(
            "sieve to {limit} needs ≈{estimate} bytes, over the budget of {budget_bytes}"
        )));
    }

    let mut primes = Vec::with_capacity((pi_upper(limit) + 1) as usize);
    primes.push(2);
    if limit >= 3 {
        let base = simple_odd_sieve(limit.isqrt());
        // seg[i] ⇔ the odd number lo + 2i is (still) unmarked.
        let mut seg = vec![true; (SEGMENT_SPAN / 2) as usize];
        let mut lo = 3u64;
        while lo <= limit {
            let hi = (lo + SEGMENT_SPAN - 2).min(limit);
            let n_odds = ((hi - lo) / 2 + 1) as usize;
            seg[..n_odds].fill(true);
            for &p in &base {
                if p * p > hi {
                    break;
                }
                // First odd multiple of p that is ≥ max(p², lo).
                let mut start = p * p;
                if start < lo {
                    let mut m = lo.div_ceil(p);
                    if m % 2 == 0 {
                        m += 1;
                    }
                    start = m * p;
                }
                // Stepping by 2p in value is stepping by p in odd-index space.
                let mut j = ((start - lo) / 2) as usize;
                while j < n_odds {
                    seg[j] = false;
                    j += p as usize;
                }
            }
            for (i, &keep) in seg[..n_odds].iter().enumerate() {
                if keep {
                    primes.push(lo + 2 * i as u64);
                }
            }
            lo = hi + 2;
        }
    }
    Ok(PrimeTable { limit, primes })
}

/// Crude upper bound on π(x), adequate for capacity planning.
fn pi_upper(x: u64) -> u64 {
    if x < 17 {
        return 8;
    }
    // π(x) < 1.26 x / ln x for all x ≥ 17.
    let xf = x as f64;
    (1.26 * xf / xf.ln()).ceil() as u64
}

fn estimated_bytes(limit: u64) -> u64 {
    let out = pi_upper(limit).saturating_mul(8);
    let base = pi_upper(limit.isqrt()).saturating_mul(8);
    out.saturating_add(base).saturating_add(SEGMENT_SPAN / 2)
}

/// Odd primes ≤ n by a plain in-memory sieve (used only up to √limit).
fn simple_odd_sieve(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let m = ((n - 3) / 2 + 1) as usize;
    let mut keep = vec![true; m];
    let mut i = 0usize;
    loop {
        let p = 3 + 2 * i as u64;
        if p * p > n {
            break;
        }
        if keep[i] {
            let mut j = ((p * p - 3) / 2) as usize;
            while j < m {
                keep[j] = false;
                j += p as usize;
            }
        }
        i += 1;
    }
    keep.iter()
        .enumerate()
        .filter(|&(_, &k)| k)
        .map(|(i, _)| 3 + 2 * i as u64)
        .collect()
}

// ----------------------------------------------------------------------
// Residue-class selection
// ----------------------------------------------------------------------

/// Primes p ≤ limit with p mod ℓ in `classes`, ascending.
///
/// Every residue must satisfy 0 ≤ r < ℓ. Non-coprime residues are legal —
/// they just catch at most the primes dividing ℓ (e.g. class 0 mod 5 holds
/// exactly {5}).
pub fn primes_in_class(table: &PrimeTable, modulus: u64, classes: &[u64]) -> Result<Vec<u64>> {
    if modulus == 0 {
        return Err(Error::domain("modulus must be ≥ 1"));
    }
    let mut wanted = BTreeSet::new();
    for &r in classes {
        if r >= modulus {
            return Err(Error::domain(format!(
                "residue {r} is out of range for modulus {modulus}"
            )));
        }
        wanted.insert(r);
    }
    Ok(table
        .primes
        .iter()
        .copied()
        .filter(|&p| wanted.contains(&(p % modulus)))
        .collect())
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn tiny_tables() {
        assert_eq!(sieve(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve(2).unwrap().primes(), &[2]);
        assert_eq!(sieve(3).unwrap().primes(), &[2, 3]);
    }

    #[test]
    fn million_matches_independent_sieve() {
        // Independent oracle: classic full boolean-array sieve, no segmenting,
        // no odd-only packing.
        let limit = 1_000_000usize;
        let mut keep = vec![true; limit + 1];
        keep[0] = false;
        keep[1] = false;
        for p in 2..=limit {
            if keep[p] && p * p <= limit {
                for q in (p * p..=limit).step_by(p) {
                    keep[q] = false;
                }
            }
        }
        let oracle: Vec<u64> = (0..=limit).filter(|&n| keep[n]).map(|n| n as u64).collect();
        let table = sieve(limit as u64).unwrap();
        assert_eq!(table.len(), 78_498);
        assert_eq!(table.primes(), oracle.as_slice());
    }

    #[test]
    fn membership_matches_trial_division_near_top() {
        let table = sieve(1_000_000).unwrap();
        for n in 999_000..=1_000_000 {
            assert_eq!(table.contains(n), is_prime_trial(n), "n = {n}");
        }
    }

    #[test]
    fn class_examples() {
        let t100 = sieve(100).unwrap();
        assert_eq!(
            primes_in_class(&t100, 5, &[1]).unwrap(),
            vec![11, 31, 41, 61, 71]
        );
        assert_eq!(primes_in_class(&t100, 5, &[0]).unwrap(), vec![5]);
        let t50 = sieve(50).unwrap();
        assert_eq!(
            primes_in_class(&t50, 4, &[1]).unwrap(),
            vec![5, 13, 17, 29, 37, 41]
        );
    }

    #[test]
    fn classes_partition_the_table() {
        let table = sieve(10_000).unwrap();
        for ell in [3u64, 4, 5, 6, 7, 9, 12] {
            let mut union: Vec<u64> = Vec::new();
            let mut total = 0usize;
            for r in 0..ell {
                let part = primes_in_class(&table, ell, &[r]).unwrap();
                total += part.len();
                union.extend(part);
            }
            union.sort_unstable();
            assert_eq!(total, table.len(), "disjointness for ℓ = {ell}");
            assert_eq!(union, table.primes(), "coverage for ℓ = {ell}");
        }
    }

    #[test]
    fn coprime_classes_balanced_at_a_million() {
        let table = sieve(1_000_000).unwrap();
        let counts: Vec<f64> = (1..5u64)
            .map(|k| primes_in_class(&table, 5, &[k]).unwrap().len() as f64)
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (counts[i] - counts[j]).abs() / counts[j] < 0.05,
                    "classes {} and {} off balance: {counts:?}",
                    i + 1,
                    j + 1
                );
            }
        }
    }

    #[test]
    fn domain_and_resource_errors() {
        assert!(matches!(sieve(1), Err(Error::Domain(_))));
        assert!(matches!(sieve(u64::MAX), Err(Error::Resource(_))));
        assert!(matches!(
            sieve_with_budget(1_000_000, 1024),
            Err(Error::Resource(_))
        ));
        let t = sieve(100).unwrap();
        assert!(matches!(
            primes_in_class(&t, 5, &[5]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(primes_in_class(&t, 0, &[]), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn membership_matches_trial_division(limit in 2u64..4000) {
            let table = sieve(limit).unwrap();
            for n in 0..=limit {
                prop_assert_eq!(table.contains(n), is_prime_trial(n));
            }
        }

        #[test]
        fn union_of_singleton_classes_is_everything(limit in 2u64..3000, ell in 1u64..30) {
            let table = sieve(limit).unwrap();
            let mut union: Vec<u64> = Vec::new();
            for r in 0..ell {
                union.extend(primes_in_class(&table, ell, &[r]).unwrap());
            }
            union.sort_unstable();
            prop_assert_eq!(union.as_slice(), table.primes());
        }
    }
}
