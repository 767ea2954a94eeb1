//! Exact Bernoulli numbers via tangent numbers.
//!
//! Convention: B_1 = −1/2 (the sign that makes the Euler–Maclaurin endpoint
//! term −f(N)/2 come out with the usual orientation). Even-index values are
//! produced from the integer tangent numbers T_k,
//!
//! ```text
//! tan x = Σ_{k≥1} T_k x^{2k−1}/(2k−1)!,
//! B_{2k} = (−1)^{k−1} · 2k · T_k / (4^k (4^k − 1)),
//! ```
//!
//! computed by the classical in-place triangle recurrence, which needs only
//! integer additions and small-factor multiplications — no rational
//! arithmetic until the final division. Values are cached process-wide; the
//! cache only ever grows, so results are deterministic.

use rug::{Integer, Rational};
use std::sync::Mutex;
use std::sync::OnceLock;

/// Exact Bernoulli number B_n.
pub fn bernoulli(n: u32) -> Rational {
    match n {
        0 => Rational::from(1),
        1 => Rational::from((-1, 2)),
        _ if n % 2 == 1 => Rational::new(),
        _ => {
            let k = n / 2;
            even_cache(k as usize)
        }
    }
}

/// B_{2k} from the cache, growing it (with headroom) if needed.
fn even_cache(k: usize) -> Rational {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let m = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = m.lock().unwrap();
    if guard.len() < k {
        // Recompute the whole prefix with headroom; the triangle is cheap at
        // these sizes and regrowth is rare.
        let k = k + k / 2 + 8;
        let t = tangent_numbers(k);
        let mut out = Vec::with_capacity(k);
        let mut four_k = Integer::from(1);
        for (i, tk) in t.iter().enumerate() {
            let kk = (i + 1) as u32;
            four_k <<= 2; // 4^kk
            let denom = Integer::from(&four_k * &four_k) - &four_k; // 4^k(4^k−1)
            let num = Integer::from(tk * (2 * kk));
            let mut b = Rational::from((num, denom));
            if kk % 2 == 0 {
                b = -b;
            }
            out.push(b);
        }
        *guard = out;
    }
    guard[k - 1].clone()
}

/// Tangent numbers T_1 … T_n by the in-place triangle recurrence.
fn tangent_numbers(n: usize) -> Vec<Integer> {
    if n == 0 {
        return Vec::new();
    }
    let mut t = vec![Integer::new(); n + 1];
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let a = Integer::from(&t[j - 1] * (j - k) as u32);
            let b = Integer::from(&t[j] * (j - k + 2) as u32);
            t[j] = a + b;
        }
    }
    t.remove(0);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: the defining recurrence
    /// Σ_{j=0}^{n} C(n+1, j) B_j = 0, i.e.
    /// B_n = −1/(n+1) Σ_{j<n} C(n+1, j) B_j.
    fn bernoulli_recurrence(nmax: u32) -> Vec<Rational> {
        let mut b: Vec<Rational> = vec![Rational::from(1)];
        for n in 1..=nmax {
            let mut s = Rational::new();
            for (j, bj) in b.iter().enumerate() {
                let c = Integer::from(n + 1).binomial(j as u32);
                s += Rational::from((c, Integer::from(1))) * bj;
            }
            s /= Rational::from((n + 1, 1));
            b.push(-s);
        }
        b
    }

    #[test]
    fn matches_defining_recurrence() {
        let oracle = bernoulli_recurrence(40);
        for n in 0..=40u32 {
            assert_eq!(bernoulli(n), oracle[n as usize], "B_{n}");
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(bernoulli(0), Rational::from(1));
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(13), Rational::new());
    }

    #[test]
    fn tangent_prefix() {
        assert_eq!(
            tangent_numbers(5),
            vec![
                Integer::from(1),
                Integer::from(2),
                Integer::from(16),
                Integer::from(272),
                Integer::from(7936)
            ]
        );
    }
}
