//! Independent closed-form oracles for L(1, χ) at complex cubic
//! characters — the hardest values the digamma route produces, grounded
//! here by disjoint arithmetic (plain trigonometry on explicit angles,
//! no character machinery).
//!
//! With ω = e^{iπ/3}:
//!
//!   modulus 9, χ(2) = e^{2πi/3}:
//!     L(1,χ) = −(2/3)·ω^{2/3}·(−ω·ln sin(2π/9) + ω²·ln cos(π/18)
//!                                + ln sin(π/9));
//!
//!   modulus 7, χ(2) = e^{2πi/3} (equivalently χ(3) = e^{4πi/3}):
//!     L(1,χ) = 7^{−2/3}·(−2 − 3ω²)^{1/3}·(−ω·ln y₁ + ω²·ln y₂ + ln y₃),
//!     y₁ < y₂ < y₃ the real zeros of y³ − 7y² + 14y − 7.
//!
//! The cubic's zeros are taken in the trigonometric form y_k = 4sin²(kπ/7)
//! and re-verified against the polynomial before use, so the oracle never
//! leans on a root finder.  Conjugate characters are checked against the
//! conjugated oracles for free.

use apconst::characters::{characters_mod, DirichletCharacter, RootOfUnity};
use apconst::lseries::l_at_one;
use apconst::numerics;
use rug::ops::Pow;
use rug::{Complex, Float};

const PREC: u32 = 192;

fn wp() -> u32 {
    numerics::working_prec(PREC)
}

/// e^{iθ} at working precision.
fn unit(theta: &Float) -> Complex {
    Complex::with_val(wp(), (theta.clone().cos(), theta.clone().sin()))
}

/// The character mod `n` with χ(a) equal to e^{2πi·q/r}; `a` must
/// generate the unit group so the value pins the character uniquely.
fn character_by_value(n: u64, a: u64, q: i64, r: u64) -> DirichletCharacter {
    let want = RootOfUnity::new(q, r);
    let matches: Vec<DirichletCharacter> = characters_mod(n)
        .unwrap()
        .into_iter()
        .filter(|chi| chi.value(a).root() == Some(want))
        .collect();
    assert_eq!(matches.len(), 1, "value at a generator pins the character");
    matches.into_iter().next().unwrap()
}

/// |a − b| as a 64-bit float.
fn gap(a: &Complex, b: &Complex) -> Float {
    let d = Complex::with_val(64, a - b);
    Float::with_val(64, d.abs_ref())
}

fn assert_matches_oracle(chi: &DirichletCharacter, oracle: &Complex, what: &str) {
    let lv = l_at_one(chi, PREC).unwrap();
    let g = gap(&lv.value.value, oracle);
    assert!(
        g < Float::with_val(64, 1e-40f64),
        "{what}: gap {:.3e} against the closed form",
        g.to_f64()
    );
    // The library's own bound must cover the disagreement too (the oracle
    // is exact up to working-precision rounding).
    let slack = Float::with_val(64, &lv.value.err + 1e-50f64);
    assert!(g < slack, "{what}: gap {:.3e} exceeds the claimed bound", g.to_f64());
}

// ----------------------------------------------------------------------
// Modulus 9
// ----------------------------------------------------------------------

fn oracle_mod_nine() -> Complex {
    let wp = wp();
    let pi = numerics::pi(wp);
    let omega = unit(&Float::with_val(wp, &pi / 3u32));
    let omega2 = Complex::with_val(wp, omega.square_ref());

    let ln_sin = |num: u32, den: u32| -> Float {
        (Float::with_val(wp, &pi * num) / den).sin().ln()
    };
    let ln_cos = |num: u32, den: u32| -> Float {
        (Float::with_val(wp, &pi * num) / den).cos().ln()
    };

    // −ω·ln sin(2π/9) + ω²·ln cos(π/18) + ln sin(π/9)
    let mut term = Complex::with_val(wp, (ln_sin(1, 9), 0));
    term -= Complex::with_val(wp, &omega * &ln_sin(2, 9));
    term += Complex::with_val(wp, &omega2 * &ln_cos(1, 18));

    // −(2/3)·ω^{2/3}·term, with ω^{2/3} = e^{2πi/9} on the principal branch.
    let front = unit(&(Float::with_val(wp, &pi * 2u32) / 9u32));
    let mut oracle = Complex::with_val(wp, &front * &term);
    oracle *= -2;
    oracle /= 3;
    oracle
}

#[test]
fn cubic_character_mod_nine_matches_its_closed_form() {
    let chi = character_by_value(9, 2, 1, 3);
    assert_eq!(chi.order(), 3);
    assert_eq!(chi.conductor(), 9);
    let oracle = oracle_mod_nine();
    assert_matches_oracle(&chi, &oracle, "L(1, χ mod 9)");

    // The conjugate character takes the conjugated value.
    let conj = character_by_value(9, 2, 2, 3);
    let conj_oracle = Complex::with_val(wp(), oracle.conj_ref());
    assert_matches_oracle(&conj, &conj_oracle, "L(1, χ̄ mod 9)");
}

// ----------------------------------------------------------------------
// Modulus 7
// ----------------------------------------------------------------------

fn oracle_mod_seven() -> Complex {
    let wp = wp();
    let pi = numerics::pi(wp);
    let omega = unit(&Float::with_val(wp, &pi / 3u32));

    // y_k = 4·sin²(kπ/7) are the zeros of y³ − 7y² + 14y − 7, smallest
    // first; verify before trusting.
    let y: Vec<Float> = (1..=3)
        .map(|k| {
            let s = (Float::with_val(wp, &pi * k as u32) / 7u32).sin();
            Float::with_val(wp, s.square_ref()) * 4u32
        })
        .collect();
    for yk in &y {
        let cube = yk.clone().pow(3);
        let square7 = Float::with_val(wp, yk.square_ref()) * 7u32;
        let linear = Float::with_val(wp, yk * 14u32);
        let residual = Float::with_val(wp, cube - square7 + linear - 7u32).abs();
        let tol = Float::with_val(64, 2f64).pow(-(wp as i32) + 24);
        assert!(residual < tol, "trigonometric zero fails the cubic");
    }
    assert!(y[0] < y[1] && y[1] < y[2]);

    // −ω·ln y₁ + ω²·ln y₂ + ln y₃
    let mut term = Complex::with_val(wp, (y[2].clone().ln(), 0));
    term -= Complex::with_val(wp, &omega * &y[0].clone().ln());
    term += Complex::with_val(
        wp,
        Complex::with_val(wp, omega.square_ref()) * y[1].clone().ln(),
    );

    // 7^{−2/3}·(−2 − 3ω²)^{1/3}: the base is −1/2 − i·3√3/2 (modulus √7);
    // principal branch throughout.
    let sqrt3 = Float::with_val(wp, 3u32).sqrt();
    let base = Complex::with_val(
        wp,
        (
            Float::with_val(wp, -0.5f64),
            Float::with_val(wp, &sqrt3 * 3u32) / -2i32,
        ),
    );
    let ln_base = Complex::with_val(wp, base.ln_ref());
    let cbrt = Complex::with_val(wp, &ln_base / Float::with_val(wp, 3u32)).exp();
    let seven = Float::with_val(wp, 7u32).pow(Float::with_val(wp, -2f64) / 3u32);

    let mut oracle = Complex::with_val(wp, &cbrt * &term);
    oracle *= &seven;
    oracle
}

#[test]
fn cubic_character_mod_seven_matches_its_closed_form() {
    let chi = character_by_value(7, 3, 2, 3);
    assert_eq!(chi.order(), 3);
    assert_eq!(chi.value(2).root(), Some(RootOfUnity::new(1, 3)));
    let oracle = oracle_mod_seven();
    assert_matches_oracle(&chi, &oracle, "L(1, χ mod 7)");

    let conj = character_by_value(7, 3, 1, 3);
    let conj_oracle = Complex::with_val(wp(), oracle.conj_ref());
    assert_matches_oracle(&conj, &conj_oracle, "L(1, χ̄ mod 7)");
}
