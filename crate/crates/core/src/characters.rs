//! Dirichlet character groups mod n.
//!
//! A character χ mod n is determined by its exponent tuple over a fixed
//! decomposition of the unit group into cyclic components,
//!
//! ```text
//! (Z/n)^* ≅ ∏_i ⟨g_i⟩,   |⟨g_i⟩| = m_i,   ∏ m_i = φ(n),
//! χ(g_i) = e^{2πi e_i/m_i},
//! ```
//!
//! with odd prime powers cyclic under their smallest primitive root and the
//! 2-power part carrying the classical two-generator structure (−1 of order
//! 2, then 5 of order 2^{r−2}, for 2^r with r ≥ 3). Generators are lifted to
//! residues mod n by the Chinese remainder theorem, so a character evaluates
//! through one discrete-log table for the whole modulus.
//!
//! Character values are **exact roots of unity** — reduced rational numbers
//! of turns, e^{2πi q/r} — not floats. Orthogonality sums, the census
//! primitivity counts, and the identity solver all rely on this exactness;
//! conversion to arbitrary-precision complex numbers happens only at the
//! evaluation boundary of an L-series.
//!
//! Enumeration order everywhere is the exponent-tuple lexicographic order,
//! components as listed in the [`UnitGroupStructure`]; the first character
//! (index 1) is always principal. Downstream consumers never assume any
//! further meaning in the index: named characters are recognized by their
//! values, not their positions.

use crate::error::{Error, Result};
use crate::numerics::{self, ApproxC};
use rug::{Complex, Float};
use std::sync::Arc;

// ----------------------------------------------------------------------
// Exact roots of unity
// ----------------------------------------------------------------------

/// e^{2πi q/r} with 0 ≤ q < r and gcd(q, r) = 1 — an exact number of turns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    q: u64,
    r: u64,
}

impl RootOfUnity {
    /// Reduce `q/r` turns to canonical form. `r` must be positive.
    pub fn new(q: i64, r: u64) -> Self {
        assert!(r > 0, "root of unity needs a positive order");
        let qm = q.rem_euclid(r as i64) as u64;
        let g = gcd(qm, r);
        if qm == 0 {
            Self { q: 0, r: 1 }
        } else {
            Self { q: qm / g, r: r / g }
        }
    }

    fn new_u128(q: u128, r: u128) -> Self {
        let qm = q % r;
        let g = gcd_u128(qm, r);
        if qm == 0 {
            Self { q: 0, r: 1 }
        } else {
            Self {
                q: (qm / g) as u64,
                r: (r / g) as u64,
            }
        }
    }

    pub fn one() -> Self {
        Self { q: 0, r: 1 }
    }

    pub fn minus_one() -> Self {
        Self { q: 1, r: 2 }
    }

    pub fn is_one(self) -> bool {
        self.q == 0
    }

    pub fn is_minus_one(self) -> bool {
        self == Self::minus_one()
    }

    /// Reduced numerator of the turn count.
    pub fn turns_numer(self) -> u64 {
        self.q
    }

    /// Reduced denominator of the turn count — the multiplicative order.
    pub fn order(self) -> u64 {
        self.r
    }

    pub fn mul(self, other: Self) -> Self {
        let r = self.r as u128 * other.r as u128;
        let q = self.q as u128 * other.r as u128 + other.q as u128 * self.r as u128;
        Self::new_u128(q, r)
    }

    pub fn pow(self, k: u64) -> Self {
        let km = (k % self.r) as u128;
        Self::new_u128(self.q as u128 * km, self.r as u128)
    }

    /// Complex conjugate = multiplicative inverse.
    pub fn conj(self) -> Self {
        if self.q == 0 {
            self
        } else {
            Self {
                q: self.r - self.q,
                r: self.r,
            }
        }
    }

    /// True when the value is real (±1).
    pub fn is_real(self) -> bool {
        self.r <= 2
    }

    /// Evaluate to an arbitrary-precision complex number with error bound.
    /// Values on the axes (±1, ±i) come out exact.
    pub fn to_complex(self, prec: u32) -> ApproxC {
        let wp = numerics::working_prec(prec);
        match (self.q, self.r) {
            (0, 1) => ApproxC::exact(Complex::with_val(wp, (1, 0))),
            (1, 2) => ApproxC::exact(Complex::with_val(wp, (-1, 0))),
            (1, 4) => ApproxC::exact(Complex::with_val(wp, (0, 1))),
            (3, 4) => ApproxC::exact(Complex::with_val(wp, (0, -1))),
            (q, r) => {
                let theta = numerics::pi(wp) * 2u32 * Float::with_val(wp, q) / Float::with_val(wp, r);
                let (sin, cos) = theta.sin_cos(Float::new(wp));
                // θ carries a few ulps of rounding; sin/cos have unit
                // Lipschitz constant, so a crude 2^{7−wp} covers both parts.
                ApproxC::new(Complex::with_val(wp, (cos, sin)), numerics::two_pow(7 - wp as i64))
            }
        }
    }
}

impl PartialOrd for RootOfUnity {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RootOfUnity {
    /// Order by angle in [0, 2π): exact cross-multiplied fraction compare.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.q as u128 * other.r as u128).cmp(&(other.q as u128 * self.r as u128))
    }
}

impl std::fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.q, self.r) {
            (0, 1) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            (q, r) => write!(f, "e(2πi·{q}/{r})"),
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

// ----------------------------------------------------------------------
// Unit group structure
// ----------------------------------------------------------------------

/// One cyclic factor of (Z/n)^*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicComponent {
    /// Prime this component belongs to.
    pub prime: u64,
    /// Its exponent in n.
    pub power: u32,
    /// Generator, lifted to a residue mod n (≡ 1 at the other primes).
    pub generator: u64,
    /// Order of the generator = size of this cyclic factor.
    pub order: u64,
}

/// Decomposition of (Z/n)^* into cyclic components plus a full discrete-log
/// table. Immutable after construction and shareable across threads.
#[derive(Debug)]
pub struct UnitGroupStructure {
    n: u64,
    phi: u64,
    components: Vec<CyclicComponent>,
    /// Lex rank of the exponent tuple of each coprime residue; `u32::MAX`
    /// marks residues sharing a factor with n.
    dlog: Vec<u32>,
    /// stride[i] = ∏_{j>i} order_j, for mixed-radix decoding of a rank.
    strides: Vec<u64>,
}

/// Cap on the modulus: the dlog table is 4n bytes and its construction walks
/// all φ(n) units.
const MAX_UNIT_GROUP_MODULUS: u64 = 10_000_000;

impl UnitGroupStructure {
    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn components(&self) -> &[CyclicComponent] {
        &self.components
    }

    /// Exponent tuple of a residue, or `None` when gcd(a, n) > 1.
    pub fn exponents(&self, a: u64) -> Option<Vec<u64>> {
        let rank = self.dlog[(a % self.n) as usize];
        if rank == u32::MAX {
            return None;
        }
        Some(self.decode(rank as u64))
    }

    fn decode(&self, rank: u64) -> Vec<u64> {
        self.components
            .iter()
            .zip(&self.strides)
            .map(|(c, &s)| rank / s % c.order)
            .collect()
    }
}

/// Canonical decomposition of (Z/n)^*: odd prime powers under their smallest
/// primitive root, the 2-power part under (−1, 5), components ordered by
/// ascending prime (so the 2-part leads, −1 before 5).
pub fn unit_group(n: u64) -> Result<UnitGroupStructure> {
    if n == 0 {
        return Err(Error::domain("unit group needs modulus ≥ 1"));
    }
    if n > MAX_UNIT_GROUP_MODULUS {
        return Err(Error::Resource(format!(
            "unit group mod {n}: dlog table above the 10^7 modulus cap"
        )));
    }
    let mut components = Vec::new();
    for (p, r) in factorize(n) {
        let q = p.pow(r);
        if p == 2 {
            match r {
                1 => {}
                2 => components.push((p, r, q - 1, 2)), // −1 mod 4
                _ => {
                    components.push((p, r, q - 1, 2)); // −1 mod 2^r
                    components.push((p, r, 5, q / 4)); // 5 generates the rest
                }
            }
        } else {
            let phi_q = q / p * (p - 1);
            components.push((p, r, smallest_primitive_root(q, phi_q), phi_q));
        }
    }
    // Lift each local generator g mod p^r to ≡ g (mod p^r), ≡ 1 (mod n/p^r).
    let components: Vec<CyclicComponent> = components
        .into_iter()
        .map(|(prime, power, g, order)| CyclicComponent {
            prime,
            power,
            generator: crt_lift(g, prime.pow(power), n),
            order,
        })
        .collect();
    let phi: u64 = components.iter().map(|c| c.order).product();

    let mut strides = vec![1u64; components.len()];
    for i in (0..components.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * components[i + 1].order;
    }

    // Walk all exponent tuples in lex order, assigning ranks.
    let mut dlog = vec![u32::MAX; n as usize];
    let mut rank: u32 = 0;
    fill(&components, 0, 1 % n, n, &mut dlog, &mut rank);
    debug_assert_eq!(rank as u64, phi);

    Ok(UnitGroupStructure {
        n,
        phi,
        components,
        dlog,
        strides,
    })
}

fn fill(comps: &[CyclicComponent], i: usize, acc: u64, n: u64, dlog: &mut [u32], rank: &mut u32) {
    if i == comps.len() {
        dlog[acc as usize] = *rank;
        *rank += 1;
        return;
    }
    let mut cur = acc;
    for _ in 0..comps[i].order {
        fill(comps, i + 1, cur, n, dlog, rank);
        cur = mul_mod(cur, comps[i].generator, n);
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut r = 0;
            while n % p == 0 {
                n /= p;
                r += 1;
            }
            out.push((p, r));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, n);
        }
        b = mul_mod(b, b, n);
        e >>= 1;
    }
    acc
}

/// Smallest g generating the cyclic group (Z/q)^*, q an odd prime power.
fn smallest_primitive_root(q: u64, phi_q: u64) -> u64 {
    let factors: Vec<u64> = factorize(phi_q).into_iter().map(|(p, _)| p).collect();
    for g in 2..q {
        if gcd(g, q) != 1 {
            continue;
        }
        if factors.iter().all(|&f| pow_mod(g, phi_q / f, q) != 1) {
            return g;
        }
    }
    unreachable!("every odd prime power has a primitive root")
}

/// x ≡ g (mod q), x ≡ 1 (mod n/q), returned mod n.
fn crt_lift(g: u64, q: u64, n: u64) -> u64 {
    let m = n / q;
    if m == 1 {
        return g % n;
    }
    // x = g·m·(m⁻¹ mod q) + q·(q⁻¹ mod m)  (mod n)
    let a = mul_mod(mul_mod(g % n, m % n, n), inv_mod(m % q, q), n);
    let b = mul_mod(q % n, inv_mod(q % m, m), n);
    (a + b) % n
}

fn inv_mod(a: u64, n: u64) -> u64 {
    // Extended Euclid; gcd(a, n) = 1 by construction.
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (n as i128, (a % n) as i128);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    debug_assert_eq!(r, 1, "inv_mod of a non-unit");
    t.rem_euclid(n as i128) as u64
}

// ----------------------------------------------------------------------
// Characters
// ----------------------------------------------------------------------

/// A character value: zero off the units, an exact root of unity on them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    Root(RootOfUnity),
}

impl CharValue {
    pub fn is_zero(self) -> bool {
        matches!(self, CharValue::Zero)
    }

    pub fn root(self) -> Option<RootOfUnity> {
        match self {
            CharValue::Zero => None,
            CharValue::Root(w) => Some(w),
        }
    }

    pub fn to_complex(self, prec: u32) -> ApproxC {
        match self {
            CharValue::Zero => {
                ApproxC::exact(Complex::with_val(numerics::working_prec(prec), (0, 0)))
            }
            CharValue::Root(w) => w.to_complex(prec),
        }
    }
}

/// A Dirichlet character mod n, stored as its exponent tuple over the unit
/// group's components, with order and conductor precomputed.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    group: Arc<UnitGroupStructure>,
    exps: Vec<u64>,
    order: u64,
    conductor: u64,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.n == other.group.n && self.exps == other.exps
    }
}
impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    fn build(group: Arc<UnitGroupStructure>, exps: Vec<u64>) -> Self {
        let order = group
            .components
            .iter()
            .zip(&exps)
            .map(|(c, &e)| c.order / gcd(c.order, e))
            .fold(1, lcm);
        let conductor = conductor_of(&group, &exps);
        Self {
            group,
            exps,
            order,
            conductor,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.group.n
    }

    pub fn group(&self) -> &UnitGroupStructure {
        &self.group
    }

    /// Exponent tuple over the group's components.
    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    /// Least t ≥ 1 with χ^t principal.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    /// Least f | n such that χ is induced by a character mod f.
    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.group.n
    }

    /// True when every value is real (χ² principal).
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// χ(a): zero off the units, else e^{2πi Σ e_i t_i/m_i} exactly, where
    /// (t_i) is the exponent tuple of a.
    pub fn value(&self, a: u64) -> CharValue {
        let rank = self.group.dlog[(a % self.group.n) as usize];
        if rank == u32::MAX {
            return CharValue::Zero;
        }
        let mut q: u128 = 0;
        let mut r: u128 = 1;
        let mut rank = rank as u64;
        // The last component is the least significant mixed-radix digit of
        // the rank, so peel digits walking the components in reverse.
        for (c, &e) in self.group.components.iter().zip(&self.exps).rev() {
            let t = rank % c.order;
            rank /= c.order;
            let num = (e as u128 * t as u128) % c.order as u128;
            let m = c.order as u128;
            let l = r / gcd_u128(r, m) * m;
            q = (q * (l / r) + num * (l / m)) % l;
            r = l;
        }
        CharValue::Root(RootOfUnity::new_u128(q, r))
    }

    /// χ^k, componentwise on exponents.
    pub fn power(&self, k: u64) -> DirichletCharacter {
        let exps = self
            .group
            .components
            .iter()
            .zip(&self.exps)
            .map(|(c, &e)| (e as u128 * (k % c.order) as u128 % c.order as u128) as u64)
            .collect();
        Self::build(Arc::clone(&self.group), exps)
    }

    /// χ̄ — the inverse character.
    pub fn conjugate(&self) -> DirichletCharacter {
        let exps = self
            .group
            .components
            .iter()
            .zip(&self.exps)
            .map(|(c, &e)| if e == 0 { 0 } else { c.order - e })
            .collect();
        Self::build(Arc::clone(&self.group), exps)
    }
}

/// All φ(n) characters mod n in exponent-tuple lexicographic order; the
/// first is principal.
pub fn characters_mod(n: u64) -> Result<Vec<DirichletCharacter>> {
    let group = Arc::new(unit_group(n)?);
    let phi = group.phi;
    let mut out = Vec::with_capacity(phi as usize);
    let mut exps = vec![0u64; group.components.len()];
    loop {
        out.push(DirichletCharacter::build(Arc::clone(&group), exps.clone()));
        // lex odometer: bump the last position, carrying leftward
        let mut i = exps.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < group.components[i].order {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// Local-conductor formula. For an odd prime p with component order m and
/// exponent e: the restricted character has order d = m/gcd(m, e), and the
/// local conductor is p^{v_p(d)+1} (or 1 when d = 1). At p = 2 the (−1, 5)
/// pair gives 1, 4, or 2^{v_2(d_5)+2} according to which exponents are live.
fn conductor_of(group: &UnitGroupStructure, exps: &[u64]) -> u64 {
    let mut f = 1u64;
    // The 2-part components arrive in construction order: −1 first, then
    // (for 2^r, r ≥ 3) the order-2^{r−2} generator 5.
    let mut two_minus_one = 0u64; // exponent on the −1 component
    let mut two_five: Option<(u64, u64)> = None; // (order, exponent) on the 5 component
    let mut two_power = 0u32;
    for (c, &e) in group.components.iter().zip(exps) {
        if c.prime == 2 {
            if two_power == 0 {
                two_minus_one = e;
            } else {
                two_five = Some((c.order, e));
            }
            two_power = c.power;
        } else {
            let d = c.order / gcd(c.order, e);
            if d > 1 {
                let mut vp = 0;
                let mut dd = d;
                while dd % c.prime == 0 {
                    dd /= c.prime;
                    vp += 1;
                }
                f *= c.prime.pow(vp + 1);
            }
        }
    }
    if two_power >= 2 {
        let f2 = match two_five {
            Some((m, e)) if e > 0 => {
                let d5 = m / gcd(m, e);
                4 * d5
            }
            _ if two_minus_one > 0 => 4,
            _ => 1,
        };
        f *= f2;
    }
    f
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_oracle(n: u64) -> u64 {
        factorize(n)
            .into_iter()
            .map(|(p, r)| p.pow(r) / p * (p - 1))
            .product()
    }

    #[test]
    fn root_of_unity_arithmetic_is_exact() {
        let a = RootOfUnity::new(1, 3);
        let b = RootOfUnity::new(1, 6);
        assert_eq!(a.mul(b), RootOfUnity::new(1, 2)); // 1/3 + 1/6 = 1/2
        assert_eq!(a.pow(3), RootOfUnity::one());
        assert_eq!(a.conj().mul(a), RootOfUnity::one());
        assert_eq!(RootOfUnity::new(5, 10), RootOfUnity::new(1, 2));
        assert_eq!(RootOfUnity::new(-1, 4), RootOfUnity::new(3, 4));
        assert!(RootOfUnity::new(1, 4) < RootOfUnity::new(1, 2)); // angle order
    }

    #[test]
    fn root_of_unity_to_complex_axes_are_exact() {
        for (w, re, im) in [
            (RootOfUnity::one(), 1, 0),
            (RootOfUnity::minus_one(), -1, 0),
            (RootOfUnity::new(1, 4), 0, 1),
            (RootOfUnity::new(3, 4), 0, -1),
        ] {
            let z = w.to_complex(64);
            assert_eq!(z.value, Complex::with_val(96, (re, im)));
            assert_eq!(z.err, 0);
        }
        // a genuine rotation lands within its bound of the true point
        let z = RootOfUnity::new(1, 3).to_complex(128);
        let true_re = -0.5f64;
        let diff = Float::with_val(64, z.value.real() - Float::with_val(160, true_re));
        assert!(diff.abs() <= z.err);
    }

    #[test]
    fn unit_group_examples() {
        let g9 = unit_group(9).unwrap();
        assert_eq!(g9.components().len(), 1);
        assert_eq!(g9.components()[0].order, 6);
        assert_eq!(g9.components()[0].generator, 2);

        let g8 = unit_group(8).unwrap();
        let orders: Vec<u64> = g8.components().iter().map(|c| c.order).collect();
        assert_eq!(orders, vec![2, 2]);
        assert_eq!(g8.components()[0].generator, 7); // −1 mod 8 leads

        let g15 = unit_group(15).unwrap();
        let po: Vec<(u64, u64)> = g15
            .components()
            .iter()
            .map(|c| (c.prime, c.order))
            .collect();
        assert_eq!(po, vec![(3, 2), (5, 4)]);
    }

    #[test]
    fn generators_generate_and_tuples_are_unique() {
        for n in 1..=200u64 {
            let g = unit_group(n).unwrap();
            assert_eq!(
                g.phi(),
                phi_oracle(n),
                "component orders must multiply to φ({n})"
            );
            let mut seen = 0u64;
            for a in 0..n.max(1) {
                match g.exponents(a) {
                    Some(tuple) => {
                        seen += 1;
                        // reconstruct a from its tuple
                        let mut acc = 1 % n.max(1);
                        for (c, &e) in g.components().iter().zip(&tuple) {
                            acc = mul_mod(acc, pow_mod(c.generator, e, n), n);
                        }
                        assert_eq!(acc, a % n, "tuple round-trip mod {n}");
                    }
                    None => assert!(gcd(a, n) > 1, "a = {a} wrongly excluded mod {n}"),
                }
            }
            assert_eq!(seen, phi_oracle(n));
        }
    }

    #[test]
    fn character_count_and_principal_first() {
        for n in [1u64, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 16, 24, 40] {
            let chars = characters_mod(n).unwrap();
            assert_eq!(chars.len() as u64, phi_oracle(n));
            assert!(chars[0].is_principal());
            assert_eq!(chars.iter().filter(|c| c.is_principal()).count(), 1);
        }
    }

    #[test]
    fn mod4_and_mod5_structure() {
        let c4 = characters_mod(4).unwrap();
        assert_eq!(c4.len(), 2);
        assert_eq!(c4[1].value(3), CharValue::Root(RootOfUnity::minus_one()));

        let c5 = characters_mod(5).unwrap();
        let mut orders: Vec<u64> = c5.iter().map(|c| c.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![1, 2, 4, 4]);
    }

    #[test]
    fn mod1_is_identically_one() {
        let c1 = characters_mod(1).unwrap();
        assert_eq!(c1.len(), 1);
        for a in 0..5 {
            assert_eq!(c1[0].value(a), CharValue::Root(RootOfUnity::one()));
        }
    }

    #[test]
    fn value_examples() {
        let c6 = characters_mod(6).unwrap();
        assert_eq!(c6[0].value(5), CharValue::Root(RootOfUnity::one()));
        for chi in &c6 {
            assert_eq!(chi.value(3), CharValue::Zero);
        }
        let c5 = characters_mod(5).unwrap();
        let quad = c5.iter().find(|c| c.order() == 2).unwrap();
        assert_eq!(quad.value(2), CharValue::Root(RootOfUnity::minus_one()));
        // 2 is a non-residue mod 5; 4 = 2² is a residue
        assert_eq!(quad.value(4), CharValue::Root(RootOfUnity::one()));
    }

    #[test]
    fn conductor_examples() {
        let c12 = characters_mod(12).unwrap();
        assert_eq!(c12[0].conductor(), 1);

        let c9 = characters_mod(9).unwrap();
        for chi in &c9 {
            match chi.order() {
                1 => assert_eq!(chi.conductor(), 1),
                2 => assert_eq!(chi.conductor(), 3),
                3 | 6 => assert_eq!(chi.conductor(), 9, "order {} mod 9", chi.order()),
                o => panic!("unexpected order {o} mod 9"),
            }
        }
    }

    #[test]
    fn conductor_matches_bruteforce_induction() {
        // Oracle: f is the least divisor of n with χ(a) = 1 whenever
        // a ≡ 1 (mod f) and gcd(a, n) = 1.
        for n in 1..=60u64 {
            for chi in characters_mod(n).unwrap() {
                let mut oracle = n;
                'divisors: for f in 1..=n {
                    if n % f != 0 {
                        continue;
                    }
                    for a in 0..n.max(2) {
                        if gcd(a, n) == 1 && a % f == 1 % f {
                            if chi.value(a) != CharValue::Root(RootOfUnity::one()) {
                                continue 'divisors;
                            }
                        }
                    }
                    oracle = f;
                    break;
                }
                assert_eq!(chi.conductor(), oracle, "conductor mod {n}");
            }
        }
    }

    #[test]
    fn induced_character_agrees_on_units() {
        for n in 2..=60u64 {
            for chi in characters_mod(n).unwrap() {
                let f = chi.conductor();
                let inducers: Vec<_> = characters_mod(f)
                    .unwrap()
                    .into_iter()
                    .filter(|psi| {
                        (0..n).all(|a| gcd(a, n) != 1 || psi.value(a) == chi.value(a))
                    })
                    .collect();
                assert_eq!(inducers.len(), 1, "unique inducing character mod {f}");
            }
        }
    }

    #[test]
    fn primitive_counts_sum_to_phi() {
        let prim_count = |d: u64| -> u64 {
            characters_mod(d)
                .unwrap()
                .iter()
                .filter(|c| c.is_primitive())
                .count() as u64
        };
        for n in 1..=200u64 {
            let total: u64 = (1..=n).filter(|d| n % d == 0).map(prim_count).sum();
            assert_eq!(total, phi_oracle(n), "Σ_{{d|{n}}} primitive(d) = φ({n})");
        }
    }

    #[test]
    fn power_and_conjugate() {
        let c5 = characters_mod(5).unwrap();
        let quartic = c5.iter().find(|c| c.order() == 4).unwrap();
        let quad = c5.iter().find(|c| c.order() == 2).unwrap();
        assert_eq!(&quartic.power(2), quad);
        assert_eq!(&c5[0].power(7), &c5[0]);
        for chi in characters_mod(12).unwrap() {
            assert_eq!(chi.conjugate().conjugate(), chi);
            // conjugate = power(order − 1) on the unit part
            assert_eq!(chi.conjugate(), chi.power(chi.order() - 1));
        }
    }

    #[test]
    fn multiplicativity_exhaustive_small() {
        for n in 1..=50u64 {
            for chi in characters_mod(n).unwrap() {
                for a in 0..n.max(2) {
                    for b in 0..n.max(2) {
                        let lhs = chi.value(a % n.max(1) * b % n.max(1));
                        let rhs = match (chi.value(a), chi.value(b)) {
                            (CharValue::Root(x), CharValue::Root(y)) => CharValue::Root(x.mul(y)),
                            _ => CharValue::Zero,
                        };
                        assert_eq!(lhs, rhs, "χ({a}·{b}) mod {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_in_exact_arithmetic() {
        // Σ_χ χ(a): as χ runs over the dual group, χ(a) takes each d-th root
        // of unity exactly φ(n)/d times, d = order of a. The sum is then
        // φ(n)·[a ≡ 1] exactly, because a full set of d-th roots sums to 0.
        use std::collections::BTreeMap;
        for n in 1..=50u64 {
            let chars = characters_mod(n).unwrap();
            let phi = chars.len() as u64;
            for a in 0..n.max(2) {
                if gcd(a, n) != 1 {
                    continue;
                }
                let mut counts: BTreeMap<RootOfUnity, u64> = BTreeMap::new();
                for chi in &chars {
                    *counts.entry(chi.value(a).root().unwrap()).or_insert(0) += 1;
                }
                let d = counts.keys().map(|w| w.order()).max().unwrap();
                if a % n.max(1) == 1 % n.max(1) {
                    assert_eq!(d, 1, "a ≡ 1 must see only the value 1 (n = {n})");
                    assert_eq!(counts[&RootOfUnity::one()], phi);
                } else {
                    assert!(d > 1, "a = {a} not ≡ 1 yet all values 1 (n = {n})");
                    // exactly the d-th roots, uniformly
                    assert_eq!(counts.len() as u64, d);
                    for (w, &c) in &counts {
                        assert_eq!(c, phi / d, "uniform multiplicity at {w} (n = {n}, a = {a})");
                    }
                    let expected: Vec<RootOfUnity> =
                        (0..d).map(|j| RootOfUnity::new(j as i64, d)).collect();
                    let got: Vec<RootOfUnity> = counts.keys().copied().collect();
                    let mut expected = expected;
                    expected.sort();
                    assert_eq!(got, expected, "values are the full set of {d}-th roots");
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(unit_group(0), Err(Error::Domain(_))));
        assert!(matches!(
            unit_group(MAX_UNIT_GROUP_MODULUS + 1),
            Err(Error::Resource(_))
        ));
    }
}
