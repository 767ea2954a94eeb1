//! Exact solver for multiplicative identities between dilated L-functions
//! and class-restricted Euler products.
//!
//! Write X_k^u for the partial Euler product ∏_{p ≡ k (mod ℓ)} (1 − u·p^{−s})^{−1},
//! one symbol per residue class k coprime to ℓ and root of unity u (the
//! superscript names the root, it is not a power).  Every dilated Dirichlet
//! L-function splits into these symbols: since
//!
//! ```text
//!     1 − u·x^m = ∏_{w : w^m = u} (1 − w·x),
//! ```
//!
//! the Euler factor of L_j(ms) at a prime p ≡ k contributes one factor
//! (1 − w·p^{−s})^{−1} for each m-th root w of χ_j(k), so
//!
//! ```text
//!     L_j(ms) = ∏_k ∏_{w^m = χ_j(k)} X_k^w .
//! ```
//!
//! On the log scale each L_j(ms) is therefore an integer vector over the
//! symbol basis (k, w) — a [`PlaceholderVector`] — and hunting for an
//! identity
//!
//! ```text
//!     ∏_{j,m} L_j(ms)^{e_{j,m}} = ∏_{p ≡ 1 (mod ℓ)} ((1 + p^{−s})/(1 − p^{−s}))^t
//! ```
//!
//! is an integer linear system: the right side is the vector with +t at
//! (1, +1) and −t at (1, −1), zero elsewhere.  [`solve`] assembles the
//! system for all characters mod ℓ and dilations m ≤ M and solves it
//! exactly — Smith normal form gives a particular solution and a kernel
//! basis, and enumeration around the reduced particular solution yields a
//! deterministic, L¹-sorted list of [`IdentityCandidate`]s.  No floating
//! point enters the solve; numerics appear only in [`verify_numeric`],
//! which checks a candidate at a real point s ≥ 2 by evaluating the left
//! side through L-values and the right side through class Euler products
//! via (1 + x)/(1 − x) = (1 − x²)/(1 − x)².
//!
//! For ℓ ∈ {3, 4, 6} the solver recovers L₁(s)L₂(s)/L₁(2s), for
//! ℓ ∈ {8, 12} the combination L₁L₂L₃L₄/L₁(2s)², and for ℓ ∈ {5, 10}
//! L₁L₂L₃L₄/(L₁(2s)L₃(2s)) with L₃ the quadratic character — each with
//! target exponent t = φ(ℓ)/2.  For ℓ ∈ {7, 9} no such combination is
//! known; the solver reports its rank analysis and any verified finds as
//! evidence, and makes no claim that a solution exists.

use std::collections::{BTreeMap, BTreeSet};

use rug::{Float, Integer};

use crate::characters::{characters_mod, CharValue, DirichletCharacter, RootOfUnity};
use crate::error::{Error, Result};
use crate::lseries;
use crate::numerics::{self, Approx, ApproxC};
use crate::products::{class_euler_product, AccelParams, ClassProductSpec};
use crate::snf;

/// Hard cap on the number of enumerated candidates per solve: kernels are
/// infinite families, the report is meant to be readable.
pub const CANDIDATE_CAP: usize = 100;

// ----------------------------------------------------------------------
// Placeholder vectors
// ----------------------------------------------------------------------

/// An integer vector over the symbol basis (residue class k, root of
/// unity u), representing Σ e_{k,u} · log ∏_{p ≡ k (mod ℓ)} (1 − u·p^{−s})^{−1}.
/// Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceholderVector {
    modulus: u64,
    entries: BTreeMap<(u64, RootOfUnity), i64>,
}

impl PlaceholderVector {
    pub fn zero(modulus: u64) -> Self {
        PlaceholderVector {
            modulus,
            entries: BTreeMap::new(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The stored exponent at (class, root); zero when absent.
    pub fn entry(&self, class: u64, root: RootOfUnity) -> i64 {
        self.entries.get(&(class, root)).copied().unwrap_or(0)
    }

    /// All nonzero entries, ordered by class and then by the root's angle.
    pub fn entries(&self) -> &BTreeMap<(u64, RootOfUnity), i64> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn bump(&mut self, class: u64, root: RootOfUnity, delta: i64) {
        if delta == 0 {
            return;
        }
        let slot = self.entries.entry((class, root)).or_insert(0);
        *slot += delta;
        if *slot == 0 {
            self.entries.remove(&(class, root));
        }
    }

    fn add_scaled(&mut self, other: &PlaceholderVector, c: i64) {
        debug_assert_eq!(self.modulus, other.modulus);
        for (&(k, w), &e) in &other.entries {
            self.bump(k, w, c * e);
        }
    }
}

impl std::fmt::Display for PlaceholderVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(k, w), &e) in &self.entries {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{e:+}·X_{k}^({w})")?;
        }
        Ok(())
    }
}

/// Expand L_j(ms) over the symbol basis: +1 at (k, w) for every m-th root
/// w of χ_j(k), for each class k coprime to the modulus.
pub fn l_vector(chi: &DirichletCharacter, m: u32) -> Result<PlaceholderVector> {
    if m == 0 {
        return Err(Error::domain("dilation must be at least 1"));
    }
    let n = chi.modulus();
    let mut v = PlaceholderVector::zero(n);
    for k in 1..=n {
        let u = match chi.value(k) {
            CharValue::Zero => continue,
            CharValue::Root(u) => u,
        };
        // u = e(2πi·q/r): its m-th roots are e(2πi·(q + i·r)/(m·r)).
        let (q, r) = (u.turns_numer(), u.order());
        for i in 0..u64::from(m) {
            let w = RootOfUnity::new((q + i * r) as i64, u64::from(m) * r);
            v.bump(k, w, 1);
        }
    }
    Ok(v)
}

/// The class-1 target (A/A^{−1})^t: +t at (1, +1), −t at (1, −1); as an
/// Euler product, ∏_{p ≡ 1 (mod ℓ)} ((1 + p^{−s})/(1 − p^{−s}))^t.
pub fn target_vector(modulus: u64, target_exponent: i64) -> Result<PlaceholderVector> {
    if modulus < 3 {
        return Err(Error::domain("the class-1 target needs a modulus ≥ 3"));
    }
    if target_exponent < 1 {
        return Err(Error::domain("the target exponent must be at least 1"));
    }
    let mut v = PlaceholderVector::zero(modulus);
    v.bump(1, RootOfUnity::one(), target_exponent);
    v.bump(1, RootOfUnity::minus_one(), -target_exponent);
    Ok(v)
}

// ----------------------------------------------------------------------
// Candidates
// ----------------------------------------------------------------------

/// One factor L_{j+1}((m)s)^e of a candidate combination; `char_index`
/// indexes [`characters_mod`] (0 is principal).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidateTerm {
    pub char_index: usize,
    pub dilation: u32,
    pub exponent: i64,
}

/// An integer combination ∏ L_j(ms)^{e_{j,m}} proposed for the class-1
/// target.  The residual is Σ e_{j,m}·l_vector(χ_j, m) − target; it is
/// zero exactly when the combination is an identity.
#[derive(Clone, Debug)]
pub struct IdentityCandidate {
    pub modulus: u64,
    pub target_exponent: i64,
    /// Nonzero coefficients, sorted by (char_index, dilation).
    pub terms: Vec<CandidateTerm>,
    pub residual: PlaceholderVector,
    /// Order of the pole of the combination at s = 1: the coefficient on
    /// the principal character at dilation 1 (no other factor has a pole
    /// there).
    pub zeta_pole_order: i64,
}

impl IdentityCandidate {
    /// Build a candidate from (char_index, dilation, exponent) triples,
    /// merging duplicates and recomputing the residual from scratch.
    pub fn from_terms(
        modulus: u64,
        target_exponent: i64,
        terms: &[(usize, u32, i64)],
    ) -> Result<IdentityCandidate> {
        let chars = characters_mod(modulus)?;
        let target = target_vector(modulus, target_exponent)?;
        let mut merged: BTreeMap<(usize, u32), i64> = BTreeMap::new();
        for &(j, m, e) in terms {
            if j >= chars.len() {
                return Err(Error::domain(format!(
                    "character index {j} out of range (φ({modulus}) = {})",
                    chars.len()
                )));
            }
            if m == 0 {
                return Err(Error::domain("dilation must be at least 1"));
            }
            *merged.entry((j, m)).or_insert(0) += e;
        }
        merged.retain(|_, e| *e != 0);

        let mut residual = PlaceholderVector::zero(modulus);
        for (&(j, m), &e) in &merged {
            let lv = l_vector(&chars[j], m)?;
            residual.add_scaled(&lv, e);
        }
        residual.add_scaled(&target, -1);

        let principal = chars
            .iter()
            .position(DirichletCharacter::is_principal)
            .expect("a character group always contains the principal character");
        let zeta_pole_order = merged.get(&(principal, 1)).copied().unwrap_or(0);

        let terms = merged
            .into_iter()
            .map(|((char_index, dilation), exponent)| CandidateTerm {
                char_index,
                dilation,
                exponent,
            })
            .collect();
        Ok(IdentityCandidate {
            modulus,
            target_exponent,
            terms,
            residual,
            zeta_pole_order,
        })
    }

    /// True when the combination equals the target exactly as formal Euler
    /// products (residual zero).
    pub fn is_exact(&self) -> bool {
        self.residual.is_zero()
    }

    /// Σ |e_{j,m}| — the sorting key for readable output.
    pub fn l1_norm(&self) -> u64 {
        self.terms.iter().map(|t| t.exponent.unsigned_abs()).sum()
    }

    /// Human-readable form, e.g. `L_1(s)·L_2(s)/L_1(2s)`.
    pub fn label(&self) -> String {
        let render = |t: &CandidateTerm| {
            let arg = if t.dilation == 1 {
                "s".to_string()
            } else {
                format!("{}s", t.dilation)
            };
            let power = match t.exponent.unsigned_abs() {
                1 => String::new(),
                a => format!("^{a}"),
            };
            format!("L_{}({arg}){power}", t.char_index + 1)
        };
        let num: Vec<String> = self
            .terms
            .iter()
            .filter(|t| t.exponent > 0)
            .map(render)
            .collect();
        let den: Vec<String> = self
            .terms
            .iter()
            .filter(|t| t.exponent < 0)
            .map(render)
            .collect();
        let num = if num.is_empty() {
            "1".to_string()
        } else {
            num.join("·")
        };
        match den.len() {
            0 => num,
            1 => format!("{num}/{}", den[0]),
            _ => format!("{num}/({})", den.join("·")),
        }
    }
}

// ----------------------------------------------------------------------
// The solver
// ----------------------------------------------------------------------

/// Outcome of one solve: the dimensions and rank of the linear system, a
/// solvability verdict with the exact obstruction when unsolvable, and an
/// L¹-sorted, capped list of exact candidates when solvable.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub modulus: u64,
    pub target_exponent: i64,
    pub max_dilation: u32,
    /// Distinct symbols (k, w) that occur across the system.
    pub rows: usize,
    /// Unknowns e_{j,m}: φ(ℓ) characters × dilations 1..=M.
    pub cols: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    /// Nonzero invariant factors d₁ | d₂ | … of the system matrix.
    pub invariant_factors: Vec<Integer>,
    pub solvable: bool,
    /// Exact reason when no integer solution exists.
    pub obstruction: Option<String>,
    /// At most [`CANDIDATE_CAP`] exact solutions, sorted by L¹ norm and
    /// then lexicographically; empty when unsolvable.
    pub candidates: Vec<IdentityCandidate>,
}

/// Solve Σ_{j,m} e_{j,m}·l_vector(χ_j, m) = target over the integers for
/// all characters mod ℓ and dilations m ≤ M.  No integer solution is a
/// value (`solvable: false` plus the obstruction), not an error.
pub fn solve(modulus: u64, target_exponent: i64, max_dilation: u32) -> Result<SolveReport> {
    if modulus < 3 {
        return Err(Error::domain("solve needs a modulus ≥ 3"));
    }
    if target_exponent < 1 {
        return Err(Error::domain("solve needs a target exponent ≥ 1"));
    }
    if max_dilation < 2 {
        return Err(Error::domain(
            "solve needs dilations up to at least 2 (m = 1 alone cannot cancel the odd roots)",
        ));
    }
    let chars = characters_mod(modulus)?;
    let phi = chars.len();
    let target = target_vector(modulus, target_exponent)?;

    // Columns (j, m) in (char index, dilation) order, with their vectors.
    let mut columns: Vec<(usize, u32)> = Vec::with_capacity(phi * max_dilation as usize);
    let mut vectors: Vec<PlaceholderVector> = Vec::with_capacity(columns.capacity());
    for (j, chi) in chars.iter().enumerate() {
        for m in 1..=max_dilation {
            columns.push((j, m));
            vectors.push(l_vector(chi, m)?);
        }
    }

    // Rows: every symbol (k, w) seen anywhere, in (class, angle) order.
    let mut keys: BTreeSet<(u64, RootOfUnity)> = BTreeSet::new();
    for v in &vectors {
        keys.extend(v.entries().keys().copied());
    }
    keys.extend(target.entries().keys().copied());
    let keys: Vec<(u64, RootOfUnity)> = keys.into_iter().collect();

    let a: snf::Mat = keys
        .iter()
        .map(|&(k, w)| {
            vectors
                .iter()
                .map(|v| Integer::from(v.entry(k, w)))
                .collect()
        })
        .collect();
    let t_vec: Vec<Integer> = keys
        .iter()
        .map(|&(k, w)| Integer::from(target.entry(k, w)))
        .collect();

    let decomposition = snf::smith_normal_form(&a);
    let rank = decomposition.rank;
    let invariant_factors = decomposition.diag[..rank].to_vec();
    let (rows, cols) = (keys.len(), columns.len());
    let kernel_dim = cols - rank;

    let base = SolveReport {
        modulus,
        target_exponent,
        max_dilation,
        rows,
        cols,
        rank,
        kernel_dim,
        invariant_factors,
        solvable: false,
        obstruction: None,
        candidates: Vec::new(),
    };

    let lattice = match decomposition.solve(&t_vec) {
        Ok(sol) => sol,
        Err(err) => {
            // Keep the bare obstruction: the report is a value, and the
            // error-class prefix belongs to failures, not findings.
            let reason = match err {
                Error::Domain(msg) => msg,
                other => other.to_string(),
            };
            return Ok(SolveReport {
                obstruction: Some(reason),
                ..base
            });
        }
    };

    let exponent_sets = enumerate_lattice(&lattice.particular, &lattice.kernel);
    let mut candidates = Vec::with_capacity(exponent_sets.len());
    for e in &exponent_sets {
        let terms: Vec<(usize, u32, i64)> = columns
            .iter()
            .zip(e)
            .filter(|(_, x)| **x != 0)
            .map(|(&(j, m), x)| {
                let e_i64 = x.to_i64().expect("enumerated exponents stay small");
                (j, m, e_i64)
            })
            .collect();
        let candidate = IdentityCandidate::from_terms(modulus, target_exponent, &terms)?;
        debug_assert!(candidate.is_exact(), "lattice points must solve the system");
        candidates.push(candidate);
    }
    candidates.truncate(CANDIDATE_CAP);

    Ok(SolveReport {
        solvable: true,
        candidates,
        ..base
    })
}

/// Deterministic sample of the solution lattice e₀ + ⟨kernel⟩: greedily
/// L¹-reduce the particular solution along the kernel, then walk a box of
/// kernel coefficients around it.  Returns distinct exponent vectors
/// sorted by (L¹ norm, lexicographic order), at most [`CANDIDATE_CAP`].
fn enumerate_lattice(particular: &[Integer], kernel: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let l1 = |v: &[Integer]| -> Integer {
        v.iter().fold(Integer::new(), |acc, x| acc + x.clone().abs())
    };
    let shift = |v: &mut [Integer], k: &[Integer], c: i64| {
        for (x, kx) in v.iter_mut().zip(k) {
            *x += Integer::from(kx * c);
        }
    };

    // Greedy descent: L¹ is convex along each kernel line, so unit steps
    // that improve it walk to that line's minimum.
    let mut e0 = particular.to_vec();
    loop {
        let mut improved = false;
        for k in kernel {
            for c in [1i64, -1] {
                loop {
                    let mut trial = e0.clone();
                    shift(&mut trial, k, c);
                    if l1(&trial) < l1(&e0) {
                        e0 = trial;
                        improved = true;
                    } else {
                        break;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }

    // Box walk around the reduced point, sized to keep the walk small.
    let dims = kernel.len().min(8);
    let radius: i64 = match kernel.len() {
        0..=4 => 3,
        5..=6 => 2,
        _ => 1,
    };
    let mut seen: BTreeSet<Vec<Integer>> = BTreeSet::new();
    seen.insert(e0.clone());
    let mut counter = vec![-radius; dims];
    'walk: loop {
        let mut e = e0.clone();
        for (c, k) in counter.iter().zip(kernel) {
            shift(&mut e, k, *c);
        }
        seen.insert(e);
        // odometer
        let mut i = 0;
        loop {
            if i == dims {
                break 'walk;
            }
            counter[i] += 1;
            if counter[i] <= radius {
                break;
            }
            counter[i] = -radius;
            i += 1;
        }
    }
    let mut out: Vec<Vec<Integer>> = seen.into_iter().collect();
    out.sort_by(|a, b| l1(a).cmp(&l1(b)).then_with(|| a.cmp(b)));
    out.truncate(CANDIDATE_CAP);
    out
}

// ----------------------------------------------------------------------
// Numeric confirmation
// ----------------------------------------------------------------------

/// Two-sided numeric evaluation of a candidate at a real point.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    /// True iff the two sides agree within their combined error bounds
    /// (and the left side's imaginary residue is noise-level).
    pub holds: bool,
    /// |LHS − RHS| at the evaluation point.
    pub discrepancy: Float,
    pub lhs: Approx,
    pub rhs: Approx,
    pub s: u32,
    pub precision: u32,
}

/// Evaluate ∏ L_j(ms)^{e_{j,m}} against
/// ∏_{p ≡ 1} ((1 + p^{−s})/(1 − p^{−s}))^t at integer s ≥ 2, computing the
/// right side as two class Euler products via
/// (1 + x)/(1 − x) = (1 − x²)/(1 − x)².
pub fn verify_numeric(
    candidate: &IdentityCandidate,
    s: u32,
    prec: u32,
) -> Result<VerificationReport> {
    if s < 2 {
        return Err(Error::domain(
            "numeric verification needs integer s ≥ 2 (the L-value route requires it)",
        ));
    }
    let chars = characters_mod(candidate.modulus)?;
    let wp = numerics::working_prec(prec);

    // Left side: the L-value product.
    let mut factors: Vec<ApproxC> = Vec::with_capacity(candidate.terms.len());
    for term in &candidate.terms {
        let chi = chars.get(term.char_index).ok_or_else(|| {
            Error::domain(format!(
                "character index {} out of range (φ({}) = {})",
                term.char_index,
                candidate.modulus,
                chars.len()
            ))
        })?;
        let ms = Float::with_val(wp, u64::from(term.dilation) * u64::from(s));
        let lv = lseries::l_at(chi, &ms, prec)?;
        factors.push(lv.value.pow_i(term.exponent));
    }
    let lhs = numerics::product_c(factors.iter(), prec).into_real();

    // Right side: (1 − p^{−s})^{−2t} · (1 − p^{−2s})^{t} over p ≡ 1 (mod ℓ).
    let t = candidate.target_exponent;
    let rhs_near = class_euler_product(
        &ClassProductSpec {
            modulus: candidate.modulus,
            classes: vec![1],
            exponent: 2 * t,
            s: Float::with_val(wp, s),
        },
        1000,
        AccelParams::auto(f64::from(s), prec),
        prec,
    )?;
    let rhs_far = class_euler_product(
        &ClassProductSpec {
            modulus: candidate.modulus,
            classes: vec![1],
            exponent: -t,
            s: Float::with_val(wp, 2 * s),
        },
        1000,
        AccelParams::auto(f64::from(2 * s), prec),
        prec,
    )?;
    let rhs = rhs_near.mul(&rhs_far);

    let discrepancy = numerics::err_up(
        Float::with_val(numerics::ERR_PREC, &lhs.value - &rhs.value).abs(),
    );
    Ok(VerificationReport {
        holds: lhs.is_consistent_with(&rhs),
        discrepancy,
        lhs,
        rhs,
        s,
        precision: prec,
    })
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------
