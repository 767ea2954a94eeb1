//! The release acceptance suite: every headline claim of this library as
//! an executable check.
//!
//! Ten criteria cover the full surface: Mertens constants against their
//! published 50-digit values, closed versus analytic residues, the
//! two-class product identity at ℓ = 5, L-value closed forms, the census
//! tables with brute-force cross-checks and multiplicativity, the K_ℓ
//! routes (closed, assembled, gcd product) against one another, the
//! identity solver's reproductions with numeric verification, and the
//! empirical Mertens trend.  An eleventh criterion — byte-identical
//! machine-readable output across runs and thread counts — concerns the
//! command-line binary and lives with it, not here.
//!
//! Every tolerance is pinned in this file, next to the check that uses
//! it.  Checks that fail report *why* in their detail string; evaluation
//! errors (domain violations, cross-check trips) are converted into
//! failing checks rather than aborted runs, so one broken computation
//! never hides the rest of the table.
//!
//! Determinism: all details are derived from exactly-rounded arithmetic
//! and fixed parameters — no timestamps, no randomness.  The `Fast` tier
//! shrinks sweep bounds and prime limits (marked in each detail string);
//! the `Full` tier runs the bounds the criteria pin.  Independent
//! sub-checks run in parallel through rayon with order-preserving
//! collection, so the report is identical at any thread count.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::census;
use crate::characters::characters_mod;
use crate::error::{Error, Result};
use crate::kappa;
use crate::lseries;
use crate::numerics;
use crate::primes;
use crate::products::{self, AccelParams, ClassProductSpec};
use crate::residues;
use crate::solver;

// ----------------------------------------------------------------------
// Report types
// ----------------------------------------------------------------------

/// Sweep size: `Full` runs the pinned acceptance bounds, `Fast` shrinks
/// the expensive sweeps for quick iteration and determinism tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Fast,
    Full,
}

impl Tier {
    pub fn label(self) -> &'static str {
        match self {
            Tier::Fast => "fast",
            Tier::Full => "full",
        }
    }
}

/// One named check inside a criterion.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    fn from_checks(id: u32, title: &'static str, checks: Vec<Check>) -> CriterionResult {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        CriterionResult {
            id,
            title,
            passed,
            checks,
        }
    }
}

/// Criteria implemented in the library (the binary adds an 11th,
/// output determinism, at its own level).
pub const CRITERIA: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

pub fn criterion_title(id: u32) -> Option<&'static str> {
    Some(match id {
        1 => "mu(1,5) matches the published 50-digit value to 30 digits",
        2 => "mu at moduli 7 and 9 matches published values to 30 digits",
        3 => "closed and analytic residues agree to 30 digits",
        4 => "two-class mod-5 product identity and both rho(1,5) forms",
        5 => "L-value closed forms hold to 30 digits",
        6 => "census tables, brute-force agreement, multiplicativity",
        7 => "kappa closed forms, assembly cross-check, compact identities",
        8 => "kappa at orders 7 and 9: assembly matches the gcd product",
        9 => "identity solver reproductions verify numerically",
        10 => "partial Mertens products trend to their constants",
        _ => return None,
    })
}

/// Run one criterion. `Err` only for an unknown id; computational
/// failures come back as failing checks.
pub fn run_criterion(id: u32, tier: Tier) -> Result<CriterionResult> {
    let title = criterion_title(id)
        .ok_or_else(|| Error::domain(format!("no acceptance criterion numbered {id}")))?;
    let checks = match id {
        1 => c1_reference_mu_mod5(),
        2 => c2_reference_mu_mod7_mod9(),
        3 => c3_closed_vs_analytic(),
        4 => c4_two_class_identity(),
        5 => c5_l_value_closed_forms(),
        6 => c6_census(tier),
        7 => c7_kappa_closed_and_assembled(),
        8 => c8_kappa_open_orders(tier),
        9 => c9_solver_reproductions(),
        10 => c10_mertens_trend(tier),
        _ => unreachable!("id validated above"),
    };
    Ok(CriterionResult::from_checks(id, title, checks))
}

/// Run the whole table in order.
pub fn run_suite(tier: Tier) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|&id| run_criterion(id, tier).expect("fixed table ids are valid"))
        .collect()
}

// ----------------------------------------------------------------------
// Shared helpers
// ----------------------------------------------------------------------

fn parse_ref(s: &str, prec: u32) -> Float {
    Float::with_val(prec, Float::parse(s).expect("pinned decimal literal"))
}

/// |a − b| < 10^{−digits} (absolute; every reference here is Θ(1)).
fn within_digits(a: &Float, b: &Float, digits: u32) -> (bool, Float) {
    let gap = Float::with_val(64, a - b).abs();
    let ok = gap < Float::with_val(64, 10u32).pow(-(digits as i32));
    (ok, gap)
}

fn gap_detail(gap: &Float, extra: &str) -> String {
    let g = gap.to_f64();
    if extra.is_empty() {
        format!("gap {g:.2e}")
    } else {
        format!("gap {g:.2e} ({extra})")
    }
}

fn digit_check(name: impl Into<String>, got: &Float, want: &Float, digits: u32) -> Check {
    let (ok, gap) = within_digits(got, want, digits);
    Check::new(name, ok, gap_detail(&gap, &format!("bar 1e-{digits}")))
}

fn error_check(name: impl Into<String>, err: &Error) -> Check {
    Check::new(name, false, format!("evaluation failed: {err}"))
}

// ----------------------------------------------------------------------
// 1 & 2: published Mertens constants
// ----------------------------------------------------------------------

/// Published 50-digit values; the acceptance bar is 30 digits at 256 bits
/// (prime strip point 10³ is the library default the residues use).
const MU_REFERENCES: [(u64, u64, &str); 5] = [
    (5, 1, "1.22523843853908458005760977474922052754059550939164"),
    (7, 1, "1.20435271605501440413126997959392601183676589049086"),
    (9, 1, "1.17384958686544919027013946839197396049956269282192"),
    (9, 4, "1.13360386133436932499173359590759623742339637224206"),
    (9, 7, "1.05470661565485874510828199884014910243407287242835"),
];

const MU_PREC: u32 = 256;
const MU_DIGITS: u32 = 30;

fn mu_reference_check(ell: u64, k: u64, text: &str) -> Check {
    let name = format!("mu({k},{ell}) vs published value");
    match residues::mu(ell, k, MU_PREC) {
        Ok(r) => {
            let want = parse_ref(text, 256);
            let (ok, gap) = within_digits(&r.mu.value, &want, MU_DIGITS);
            let bounded = r.mu.err < Float::with_val(64, 1e-31f64);
            Check::new(
                name,
                ok && bounded,
                gap_detail(
                    &gap,
                    &format!("bar 1e-{MU_DIGITS}, err {:.1e}, {}", r.mu.err.to_f64(), r.method.label()),
                ),
            )
        }
        Err(e) => error_check(name, &e),
    }
}

fn c1_reference_mu_mod5() -> Vec<Check> {
    let (ell, k, text) = MU_REFERENCES[0];
    vec![mu_reference_check(ell, k, text)]
}

fn c2_reference_mu_mod7_mod9() -> Vec<Check> {
    MU_REFERENCES[1..]
        .par_iter()
        .map(|&(ell, k, text)| mu_reference_check(ell, k, text))
        .collect()
}

// ----------------------------------------------------------------------
// 3: closed vs analytic residues
// ----------------------------------------------------------------------

fn c3_closed_vs_analytic() -> Vec<Check> {
    // Class 1 for every modulus with a closed form beyond the trivial
    // ℓ = 2; [`residues::mu`] computes both routes and reports the
    // analytic value via `alternate_rho`.
    let moduli = [3u64, 4, 5, 6, 8, 10, 12];
    moduli
        .par_iter()
        .map(|&ell| {
            let name = format!("rho(1,{ell}) closed vs analytic");
            match residues::mu(ell, 1, 256) {
                Ok(r) => match &r.alternate_rho {
                    Some(alt) => {
                        let (ok, gap) = within_digits(&r.rho.value, &alt.value, 30);
                        Check::new(name, ok, gap_detail(&gap, "bar 1e-30"))
                    }
                    None => Check::new(name, false, "analytic alternate missing".to_string()),
                },
                Err(e) => error_check(name, &e),
            }
        })
        .collect()
}

// ----------------------------------------------------------------------
// 4: the two-class identity and the alternative rho(1,5)
// ----------------------------------------------------------------------

fn c4_two_class_identity() -> Vec<Check> {
    let prec = 192u32;
    let wp = numerics::working_prec(prec);
    let mut checks = Vec::new();

    // ∏_{p ≡ 1,4 (mod 5)} (p²+1)/(p²−1) = 6√5/13, via
    // (p²+1)/(p²−1) = (1 − p^{−4}) (1 − p^{−2})^{−2}.
    let name = "product of (p^2+1)/(p^2-1) over p = ±1 mod 5 equals 6*sqrt(5)/13";
    let lhs = products::class_euler_product(
        &ClassProductSpec {
            modulus: 5,
            classes: vec![1, 4],
            exponent: 2,
            s: Float::with_val(wp, 2u32),
        },
        1000,
        AccelParams::auto(2.0, prec),
        prec,
    )
    .and_then(|near| {
        let far = products::class_euler_product(
            &ClassProductSpec {
                modulus: 5,
                classes: vec![1, 4],
                exponent: -1,
                s: Float::with_val(wp, 4u32),
            },
            1000,
            AccelParams::auto(4.0, prec),
            prec,
        )?;
        Ok(near.mul(&far))
    });
    match lhs {
        Ok(product) => {
            let want = Float::with_val(wp, 5u32).sqrt() * 6u32 / 13u32;
            checks.push(digit_check(name, &product.value, &want, 30));
        }
        Err(e) => checks.push(error_check(name, &e)),
    }

    // The direct closed form of ρ(1,5) against the alternative two-class
    // product form.
    let name = "rho(1,5): direct form vs alternative product form";
    match (
        residues::rho_closed(5, prec),
        residues::rho_mod_five_alternative(prec),
    ) {
        (Ok(direct), Ok(alt)) => {
            let (ok, gap) = within_digits(&direct.rho.value, &alt.value, 30);
            let consistent = direct.rho.is_consistent_with(&alt);
            checks.push(Check::new(
                name,
                ok && consistent,
                gap_detail(&gap, "bar 1e-30, bounds overlap required"),
            ));
        }
        (Err(e), _) | (_, Err(e)) => checks.push(error_check(name, &e)),
    }
    checks
}

// ----------------------------------------------------------------------
// 5: L-value closed forms
// ----------------------------------------------------------------------

fn c5_l_value_closed_forms() -> Vec<Check> {
    let prec = 192u32;
    let wp = numerics::working_prec(prec) + 16;
    let digits = 30u32;
    let noise = Float::with_val(64, 1e-30f64);

    let pi = numerics::pi(wp);
    let sqrt2 = Float::with_val(wp, 2u32).sqrt();
    let sqrt3 = Float::with_val(wp, 3u32).sqrt();
    let sqrt5 = Float::with_val(wp, 5u32).sqrt();
    let ln_silver = Float::with_val(wp, &sqrt2 + 1u32).ln(); // ln(1+√2)
    let ln_bronze = Float::with_val(wp, &sqrt3 + 2u32).ln(); // ln(2+√3)
    let ln_golden2 = Float::with_val(wp, &sqrt5 + 2u32).ln(); // ln(2+√5)

    // L(1, χ) targets: (modulus, display, value).  Each must match the
    // L(1) of some nonprincipal character mod that modulus.
    let l1_targets: Vec<(u64, &str, Float)> = vec![
        (4, "pi/4", Float::with_val(wp, &pi / 4u32)),
        (3, "pi*sqrt(3)/9", Float::with_val(wp, &pi * &sqrt3) / 9u32),
        (6, "pi*sqrt(3)/6", Float::with_val(wp, &pi * &sqrt3) / 6u32),
        (8, "pi*sqrt(2)/4", Float::with_val(wp, &pi * &sqrt2) / 4u32),
        (8, "ln(1+sqrt(2))/sqrt(2)", Float::with_val(wp, &ln_silver / &sqrt2)),
        (12, "pi/3", Float::with_val(wp, &pi / 3u32)),
        (12, "ln(2+sqrt(3))/sqrt(3)", Float::with_val(wp, &ln_bronze / &sqrt3)),
        (
            5,
            "2*ln(2+sqrt(5))/(3*sqrt(5))",
            Float::with_val(wp, &ln_golden2 * 2u32) / Float::with_val(wp, &sqrt5 * 3u32),
        ),
        (
            10,
            "ln(2+sqrt(5))/sqrt(5)",
            Float::with_val(wp, &ln_golden2 / &sqrt5),
        ),
    ];

    let mut checks: Vec<Check> = l1_targets
        .par_iter()
        .map(|(modulus, display, want)| {
            let name = format!("some L(1, chi mod {modulus}) equals {display}");
            let chars = match characters_mod(*modulus) {
                Ok(c) => c,
                Err(e) => return error_check(name, &e),
            };
            let mut best_gap: Option<Float> = None;
            for chi in chars.iter().filter(|c| !c.is_principal()) {
                match lseries::l_at_one(chi, prec) {
                    Ok(lv) => {
                        if lv.value.imag_abs() > noise {
                            continue; // complex value cannot equal a real constant
                        }
                        let re = lv.value.clone().into_real();
                        let (ok, gap) = within_digits(&re.value, want, digits);
                        if ok {
                            return Check::new(name, true, gap_detail(&gap, "bar 1e-30"));
                        }
                        if best_gap.as_ref().is_none_or(|b| gap < *b) {
                            best_gap = Some(gap);
                        }
                    }
                    Err(e) => return error_check(name, &e),
                }
            }
            let best = best_gap
                .map(|g| format!("closest real candidate off by {:.2e}", g.to_f64()))
                .unwrap_or_else(|| "no real-valued candidate".to_string());
            Check::new(name, false, best)
        })
        .collect();

    // L(2) of the quadratic characters mod 5 and mod 10.
    let quadratic = |modulus: u64| {
        characters_mod(modulus).map(|chars| {
            chars
                .into_iter()
                .find(|c| c.order() == 2)
                .expect("these groups have even order")
        })
    };
    let pi2 = Float::with_val(wp, pi.square_ref());
    let l2_targets: [(u64, &str, Float); 2] = [
        (
            5,
            "4*pi^2*sqrt(5)/125",
            Float::with_val(wp, &pi2 * &sqrt5) * 4u32 / 125u32,
        ),
        (
            10,
            "pi^2*sqrt(5)/25",
            Float::with_val(wp, &pi2 * &sqrt5) / 25u32,
        ),
    ];
    for (modulus, display, want) in &l2_targets {
        let name = format!("L(2, quadratic chi mod {modulus}) equals {display}");
        let outcome = quadratic(*modulus).and_then(|chi| {
            lseries::l_at(&chi, &Float::with_val(wp, 2u32), prec)
        });
        match outcome {
            Ok(lv) => {
                let re = lv.value.into_real();
                checks.push(digit_check(name, &re.value, want, digits));
            }
            Err(e) => checks.push(error_check(name, &e)),
        }
    }

    // The quartic pair against the quadratic: L(1,χ)·L(1,χ̄)/L(2,χ²) = √5/2
    // for the modulus-5 group.
    let name = "quartic L(1) pair over quadratic L(2) mod 5 equals sqrt(5)/2";
    let ratio = characters_mod(5).and_then(|chars| {
        let quartics: Vec<_> = chars.iter().filter(|c| c.order() == 4).collect();
        if quartics.len() != 2 {
            return Err(Error::domain("the modulus-5 group has two quartic characters"));
        }
        let a = lseries::l_at_one(quartics[0], prec)?;
        let b = lseries::l_at_one(quartics[1], prec)?;
        let quad = chars
            .iter()
            .find(|c| c.order() == 2)
            .expect("quadratic character exists");
        let denominator = lseries::l_at(quad, &Float::with_val(wp, 2u32), prec)?;
        let numerator = a.value.mul(&b.value);
        Ok(numerator.div(&denominator.value).into_real())
    });
    match ratio {
        Ok(r) => {
            let want = Float::with_val(wp, &sqrt5 / 2u32);
            checks.push(digit_check(name, &r.value, &want, digits));
        }
        Err(e) => checks.push(error_check(name, &e)),
    }
    checks
}

// ----------------------------------------------------------------------
// 6: census
// ----------------------------------------------------------------------

/// The quoted local counts at prime powers: for p coprime to the order,
/// b(p) = gcd(ℓ, p−1) − 1 and b(p^r) = 0 for r ≥ 2; at the primes
/// dividing the order, the quoted columns pinned below.
fn quoted_local_count(ell: u64, p: u64, r: u32) -> Option<u64> {
    fn table(column: &[(u32, u64)], r: u32) -> u64 {
        column
            .iter()
            .find(|&&(rr, _)| rr == r)
            .map(|&(_, v)| v)
            .unwrap_or(0)
    }
    if ell % p == 0 {
        let v = match (ell, p) {
            (5, 5) => table(&[(2, 4)], r),
            (6, 2) => table(&[(2, 1), (3, 2)], r),
            (6, 3) => table(&[(1, 1), (2, 4)], r),
            (7, 7) => table(&[(2, 6)], r),
            (9, 3) => table(&[(2, 2), (3, 6)], r),
            _ => return None,
        };
        Some(v)
    } else if r == 1 {
        Some(gcd(ell, p - 1) - 1)
    } else {
        Some(0)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Primitive-character counts for ℓ = 2..=9 at one modulus, by direct
/// enumeration of the character group (independent of the Möbius route).
fn counts_by_enumeration(n: u64) -> Result<[u64; 8]> {
    let chars = characters_mod(n)?;
    let mut counts = [0u64; 8];
    for chi in &chars {
        if !chi.is_primitive() {
            continue;
        }
        let d = chi.order();
        for (slot, ell) in (2u64..=9).enumerate() {
            if ell % d == 0 {
                counts[slot] += 1;
            }
        }
    }
    Ok(counts)
}

fn c6_census(tier: Tier) -> Vec<Check> {
    let (pp_limit, agree_limit, mult_limit) = match tier {
        Tier::Full => (10_000u64, 3000u64, 500u64),
        Tier::Fast => (2500, 800, 150),
    };
    let mut checks = Vec::new();

    // (a) Every prime power up to the bound against the quoted local
    // counts, for the four quoted orders, on both counting routes.
    let table = match primes::sieve(pp_limit) {
        Ok(t) => t,
        Err(e) => return vec![error_check("prime sieve", &e)],
    };
    let pp_mismatches: Vec<String> = table
        .primes()
        .par_iter()
        .map(|&p| {
            let mut bad = Vec::new();
            let mut n = p;
            let mut r = 1u32;
            while n <= pp_limit {
                for ell in [5u64, 6, 7, 9] {
                    let Some(want) = quoted_local_count(ell, p, r) else {
                        continue;
                    };
                    match census::b_moebius(ell, n) {
                        Ok(got) if got == want => {}
                        Ok(got) => bad.push(format!("b_{ell}({p}^{r}) = {got}, quoted {want}")),
                        Err(e) => bad.push(format!("b_{ell}({p}^{r}): {e}")),
                    }
                    match census::b_bruteforce(ell, n) {
                        Ok(got) if got == want => {}
                        Ok(got) => {
                            bad.push(format!("brute b_{ell}({p}^{r}) = {got}, quoted {want}"))
                        }
                        Err(e) => bad.push(format!("brute b_{ell}({p}^{r}): {e}")),
                    }
                }
                n = match n.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
                r += 1;
            }
            bad
        })
        .flatten()
        .collect();
    checks.push(Check::new(
        format!("prime powers up to {pp_limit}: quoted local counts (orders 5, 6, 7, 9)"),
        pp_mismatches.is_empty(),
        if pp_mismatches.is_empty() {
            "both routes match every quoted entry".to_string()
        } else {
            format!("{} mismatches; first: {}", pp_mismatches.len(), pp_mismatches[0])
        },
    ));

    // (b) Möbius route ≡ direct enumeration for every modulus up to the
    // bound and every order 2..=9.
    let agree_mismatches: Vec<String> = (1..=agree_limit)
        .into_par_iter()
        .map(|n| {
            let mut bad = Vec::new();
            match counts_by_enumeration(n) {
                Ok(counts) => {
                    for (slot, ell) in (2u64..=9).enumerate() {
                        match census::b_moebius(ell, n) {
                            Ok(got) if got == counts[slot] => {}
                            Ok(got) => bad.push(format!(
                                "b_{ell}({n}) = {got}, enumeration {}",
                                counts[slot]
                            )),
                            Err(e) => bad.push(format!("b_{ell}({n}): {e}")),
                        }
                    }
                }
                Err(e) => bad.push(format!("characters mod {n}: {e}")),
            }
            bad
        })
        .flatten()
        .collect();
    checks.push(Check::new(
        format!("moduli up to {agree_limit}: Moebius route vs direct enumeration (orders 2..9)"),
        agree_mismatches.is_empty(),
        if agree_mismatches.is_empty() {
            "identical counts".to_string()
        } else {
            format!(
                "{} mismatches; first: {}",
                agree_mismatches.len(),
                agree_mismatches[0]
            )
        },
    ));

    // (c) Multiplicativity b(nm) = b(n)·b(m) for coprime pairs.
    let mult_mismatches: Vec<String> = (1..=mult_limit)
        .into_par_iter()
        .map(|n| {
            let mut bad = Vec::new();
            for m in n..=mult_limit {
                if gcd(n, m) != 1 {
                    continue;
                }
                for ell in [5u64, 6, 7, 9] {
                    let lhs = census::b_moebius(ell, n * m);
                    let rhs = census::b_moebius(ell, n)
                        .and_then(|a| census::b_moebius(ell, m).map(|b| a * b));
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) if a == b => {}
                        (Ok(a), Ok(b)) => {
                            bad.push(format!("b_{ell}({n}·{m}) = {a} but {n},{m} give {b}"))
                        }
                        (Err(e), _) | (_, Err(e)) => {
                            bad.push(format!("b_{ell}({n}·{m}): {e}"))
                        }
                    }
                }
            }
            bad
        })
        .flatten()
        .collect();
    checks.push(Check::new(
        format!("multiplicativity over coprime pairs up to {mult_limit} (orders 5, 6, 7, 9)"),
        mult_mismatches.is_empty(),
        if mult_mismatches.is_empty() {
            "b(nm) = b(n)b(m) throughout".to_string()
        } else {
            format!(
                "{} mismatches; first: {}",
                mult_mismatches.len(),
                mult_mismatches[0]
            )
        },
    ));
    checks
}

// ----------------------------------------------------------------------
// 7 & 8: the census constants K_ℓ
// ----------------------------------------------------------------------

fn c7_kappa_closed_and_assembled() -> Vec<Check> {
    let prec = 160u32;
    let mut checks = Vec::new();

    // K_2 = 6/π² to 30 digits.
    let name = "K_2 equals 6/pi^2";
    match kappa::kappa_closed(2, prec) {
        Ok(r) => {
            let wp = numerics::working_prec(prec);
            let want = Float::with_val(wp, 6u32) / numerics::pi(wp).square();
            checks.push(digit_check(name, &r.value.value, &want, 30));
        }
        Err(e) => checks.push(error_check(name, &e)),
    }

    // The closed K_5 evaluates with its two quoted product forms agreeing;
    // the evaluation itself enforces ≥ 30 shared digits and fails loudly
    // otherwise, so a clean return is the check.
    let name = "K_5 closed form: both quoted product shapes agree to 30 digits";
    match kappa::kappa_closed(5, prec) {
        Ok(r) => checks.push(Check::new(
            name,
            true,
            format!(
                "value {:.6}…, internal long/compact agreement enforced at 30 digits",
                r.value.value.to_f64()
            ),
        )),
        Err(e) => checks.push(error_check(name, &e)),
    }

    // Closed vs assembled at ℓ = 5 and 6, 25 digits.
    let pair_checks: Vec<Check> = [5u64, 6]
        .par_iter()
        .map(|&ell| {
            let name = format!("K_{ell}: closed form vs assembled route");
            match (kappa::kappa_closed(ell, prec), kappa::kappa_assembled(ell, prec)) {
                (Ok(a), Ok(b)) => {
                    let (ok, gap) = within_digits(&a.value.value, &b.value.value, 25);
                    Check::new(name, ok, gap_detail(&gap, "bar 1e-25"))
                }
                (Err(e), _) | (_, Err(e)) => error_check(name, &e),
            }
        })
        .collect();
    checks.extend(pair_checks);

    // The three compact correction identities hold exactly.
    let reports = kappa::verify_compact_identities();
    let all = reports.len() == 3 && reports.iter().all(|r| r.holds);
    let detail = reports
        .iter()
        .map(|r| format!("{}: {}", r.name, if r.holds { "exact" } else { "BROKEN" }))
        .collect::<Vec<_>>()
        .join("; ");
    checks.push(Check::new(
        "the three compact correction identities hold exactly",
        all,
        detail,
    ));
    checks
}

fn c8_kappa_open_orders(tier: Tier) -> Vec<Check> {
    // No published digits exist for K_7 and K_9; the bar is agreement of
    // two independent routes within 10⁻² at the pinned prime limit.
    let prime_limit = match tier {
        Tier::Full => 10_000_000u64,
        Tier::Fast => 1_000_000,
    };
    [7u64, 9]
        .par_iter()
        .map(|&ell| {
            let name = format!("K_{ell}: assembled route vs gcd product at P = {prime_limit}");
            match (
                kappa::kappa_assembled(ell, 160),
                kappa::kappa_gcd_slow(ell, prime_limit, 96),
            ) {
                (Ok(a), Ok(b)) => {
                    let gap = Float::with_val(64, &a.value.value - &b.value.value).abs();
                    let ok = gap < Float::with_val(64, 1e-2f64);
                    Check::new(name, ok, gap_detail(&gap, "bar 1e-2"))
                }
                (Err(e), _) | (_, Err(e)) => error_check(name, &e),
            }
        })
        .collect()
}

// ----------------------------------------------------------------------
// 9: identity solver
// ----------------------------------------------------------------------

/// The quoted combination for each modulus with one: target exponent and
/// (character index, dilation, exponent) triples, quadratic index filled
/// per modulus.
fn known_combination(ell: u64) -> Result<(i64, Vec<(usize, u32, i64)>)> {
    let combo = match ell {
        3 | 4 | 6 => (1, vec![(0, 1, 1), (1, 1, 1), (0, 2, -1)]),
        8 | 12 => (
            2,
            vec![(0, 1, 1), (1, 1, 1), (2, 1, 1), (3, 1, 1), (0, 2, -2)],
        ),
        5 | 10 => {
            let chars = characters_mod(ell)?;
            let q = chars
                .iter()
                .position(|c| c.order() == 2)
                .expect("one quadratic character in a cyclic group of order 4");
            (
                2,
                vec![
                    (0, 1, 1),
                    (1, 1, 1),
                    (2, 1, 1),
                    (3, 1, 1),
                    (0, 2, -1),
                    (q, 2, -1),
                ],
            )
        }
        _ => return Err(Error::domain(format!("no quoted combination for modulus {ell}"))),
    };
    Ok(combo)
}

fn c9_solver_reproductions() -> Vec<Check> {
    let verify_prec = 128u32;
    let digits = 25u32;
    let mut checks: Vec<Check> = [3u64, 4, 5, 6, 8, 10, 12]
        .par_iter()
        .map(|&ell| {
            let name = format!("modulus {ell}: quoted combination found and verified");
            let outcome = (|| -> Result<Check> {
                let (t, terms) = known_combination(ell)?;
                let mut expect = terms.clone();
                expect.sort_unstable();
                let report = solver::solve(ell, t, 2)?;
                if !report.solvable {
                    return Ok(Check::new(
                        &name,
                        false,
                        format!(
                            "system unsolvable: {}",
                            report.obstruction.as_deref().unwrap_or("no obstruction given")
                        ),
                    ));
                }
                let found = report.candidates.iter().any(|c| {
                    let got: Vec<(usize, u32, i64)> = c
                        .terms
                        .iter()
                        .map(|t| (t.char_index, t.dilation, t.exponent))
                        .collect();
                    got == expect
                });
                if !found {
                    return Ok(Check::new(
                        &name,
                        false,
                        format!("quoted combination absent from {} candidates", report.candidates.len()),
                    ));
                }
                let candidate = solver::IdentityCandidate::from_terms(ell, t, &terms)?;
                let mut worst = Float::with_val(64, 0u32);
                for s in [2u32, 3] {
                    let v = solver::verify_numeric(&candidate, s, verify_prec)?;
                    if !v.holds {
                        return Ok(Check::new(
                            &name,
                            false,
                            format!("fails at s = {s}: gap {:.2e}", v.discrepancy.to_f64()),
                        ));
                    }
                    if v.discrepancy > worst {
                        worst = v.discrepancy;
                    }
                }
                let ok = worst < Float::with_val(64, 10u32).pow(-(digits as i32));
                Ok(Check::new(
                    &name,
                    ok,
                    gap_detail(&worst, &format!("bar 1e-{digits}, s = 2 and 3")),
                ))
            })();
            outcome.unwrap_or_else(|e| error_check(name, &e))
        })
        .collect();

    // Negative control: one exponent off by one must fail verification.
    let name = "corrupted combination is rejected";
    let control = solver::IdentityCandidate::from_terms(4, 1, &[(0, 1, 1), (1, 1, 1), (0, 2, -2)])
        .and_then(|bad| solver::verify_numeric(&bad, 2, verify_prec));
    match control {
        Ok(v) => checks.push(Check::new(
            name,
            !v.holds,
            format!("verification says {} (gap {:.2e})", v.holds, v.discrepancy.to_f64()),
        )),
        Err(e) => checks.push(error_check(name, &e)),
    }
    checks
}

// ----------------------------------------------------------------------
// 10: Mertens trend
// ----------------------------------------------------------------------

fn c10_mertens_trend(tier: Tier) -> Vec<Check> {
    let limit = match tier {
        Tier::Full => 10_000_000u64,
        Tier::Fast => 1_000_000,
    };
    let prec = 96u32;
    let bar = Float::with_val(64, 1e-2f64);

    let mut checks = Vec::new();

    // All primes: ln(P)·∏_{p ≤ P}(1 − 1/p) → e^{−γ}.
    let name = format!("partial product over all primes at P = {limit} is near exp(-gamma)");
    match products::mertens_partial(1, 1, limit, prec) {
        Ok(partial) => {
            let gamma = numerics::euler_gamma(prec);
            let target = gamma.neg().exp();
            let gap = Float::with_val(64, &partial.value - &target.value).abs();
            checks.push(Check::new(name, gap < bar, gap_detail(&gap, "bar 1e-2")));
        }
        Err(e) => checks.push(error_check(name, &e)),
    }

    // Class 1 mod 5: ln(P)^{1/4}·∏ → μ(1,5).
    let name = format!("partial product over p = 1 mod 5 at P = {limit} is near mu(1,5)");
    match (
        products::mertens_partial(5, 1, limit, prec),
        residues::mu(5, 1, 128),
    ) {
        (Ok(partial), Ok(r)) => {
            let gap = Float::with_val(64, &partial.value - &r.mu.value).abs();
            checks.push(Check::new(name, gap < bar, gap_detail(&gap, "bar 1e-2")));
        }
        (Err(e), _) | (_, Err(e)) => checks.push(error_check(name, &e)),
    }
    checks
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------
