//! # apconst
//!
//! Arbitrary-precision computation of constants attached to Euler products over
//! primes in arithmetic progressions:
//!
//! * the residues ρ(k,ℓ) = lim_{s→1} (s−1) ∏_{p≡k (mod ℓ)} (1 − p^{−s})^{−φ(ℓ)},
//! * the Mertens constants μ(k,ℓ) with ρ(k,ℓ) = e^{−γ} μ(k,ℓ)^{−φ(ℓ)},
//! * counts b_ℓ(n) of primitive Dirichlet characters mod n whose ℓ-th power is
//!   principal, and the leading constants K_ℓ in Σ_{n≤N} b_ℓ(n) ~ K_ℓ N ln(N)^{d(ℓ)−2},
//! * closed-form and accelerated evaluations of the Dirichlet L-values tying
//!   these together.
//!
//! The numerical engine rests on three legs:
//!
//! 1. **Exactness where possible** — characters take values in exact roots of
//!    unity ([`characters::RootOfUnity`]), Euler-factor identities are checked in
//!    exact rational-function arithmetic ([`series`]), and the placeholder
//!    calculus of [`solver`] runs entirely over arbitrary-size integers.
//! 2. **Explicit error bounds** — every floating result travels as a value plus
//!    a rigorous absolute error bound ([`numerics::Approx`]); truncation bounds
//!    are derived per routine and rounding slack is folded in conservatively.
//! 3. **Determinism** — for fixed inputs and precision the output is
//!    bit-identical, independent of thread count; all parallel reductions use
//!    fixed chunking followed by sequential combination.
//!
//! Slowly convergent class products are accelerated through class-restricted
//! prime zeta functions P_{k,ℓ}(s) = Σ_{p≡k (mod ℓ)} p^{−s}, expanded by Möbius
//! inversion over Dirichlet characters into logarithms of Euler-factor-stripped
//! L-values ([`products`]), which converge geometrically.

pub mod census;
pub mod characters;
pub mod error;
pub mod kappa;
pub mod lseries;
pub mod numerics;
pub mod primes;
pub mod products;
pub mod residues;
pub mod series;
mod snf;
pub mod solver;
pub mod suite;

pub use error::{Error, Result};
