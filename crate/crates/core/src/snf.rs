//! Smith normal form over ℤ, with transform matrices.
//!
//! For an integer matrix A (r × c) this computes unimodular U (r × r) and
//! V (c × c) with
//!
//! ```text
//!     U·A·V = D = diag(d₁, d₂, …),    dᵢ ≥ 0,    dᵢ | dᵢ₊₁,
//! ```
//!
//! by the classical pivoting algorithm: repeatedly move a minimal-magnitude
//! entry to the pivot position, reduce its row and column by Euclidean
//! division (every swap strictly shrinks the pivot, so this terminates),
//! then repair the divisibility chain pairwise.  All arithmetic is exact
//! ([`rug::Integer`]); the matrices here are tiny (tens of rows), so no
//! attention is paid to the entry growth that plagues large-scale SNF.
//!
//! The decomposition turns the linear system A·e = t into D·y = U·t with
//! e = V·y: the system is solvable over ℤ iff dᵢ | (U·t)ᵢ on the diagonal
//! and (U·t)ᵢ = 0 beyond the rank, and the kernel of A is spanned by the
//! columns of V past the rank.

use rug::Integer;

use crate::error::{Error, Result};

pub(crate) type Mat = Vec<Vec<Integer>>;

// ----------------------------------------------------------------------
// Small dense helpers
// ----------------------------------------------------------------------

pub(crate) fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Integer::from(u32::from(i == j)))
                .collect()
        })
        .collect()
}

pub(crate) fn mat_vec(a: &Mat, x: &[Integer]) -> Vec<Integer> {
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), x.len());
            let mut acc = Integer::new();
            for (aij, xj) in row.iter().zip(x) {
                acc += Integer::from(aij * xj);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Integer::new();
                    for (aik, brow) in row.iter().zip(b) {
                        acc += Integer::from(aik * &brow[j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

// ----------------------------------------------------------------------
// The decomposition
// ----------------------------------------------------------------------

/// U·A·V = diag(d₁, …) with U, V unimodular, dᵢ ≥ 0 and dᵢ | dᵢ₊₁.
pub(crate) struct SmithDecomposition {
    pub(crate) u: Mat,
    pub(crate) v: Mat,
    /// The min(r, c) diagonal entries; nonzero ones come first.
    pub(crate) diag: Vec<Integer>,
    /// Number of nonzero diagonal entries.
    pub(crate) rank: usize,
    rows: usize,
    cols: usize,
}

struct Work {
    m: Mat,
    u: Mat,
    v: Mat,
    rows: usize,
    cols: usize,
}

impl Work {
    // Row/column operations, mirrored into U/V so that m = u·A·v stays true.

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap(a, b);
        self.u.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.m {
            row.swap(a, b);
        }
        for row in &mut self.v {
            row.swap(a, b);
        }
    }

    /// row a ← row a − q · row b
    fn row_sub(&mut self, a: usize, b: usize, q: &Integer) {
        for j in 0..self.cols {
            let delta = Integer::from(q * &self.m[b][j]);
            self.m[a][j] -= delta;
        }
        for j in 0..self.rows {
            let delta = Integer::from(q * &self.u[b][j]);
            self.u[a][j] -= delta;
        }
    }

    /// col a ← col a − q · col b
    fn col_sub(&mut self, a: usize, b: usize, q: &Integer) {
        for row in &mut self.m {
            let delta = Integer::from(q * &row[b]);
            row[a] -= delta;
        }
        for row in &mut self.v {
            let delta = Integer::from(q * &row[b]);
            row[a] -= delta;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for x in &mut self.m[a] {
            *x = -x.clone();
        }
        for x in &mut self.u[a] {
            *x = -x.clone();
        }
    }

    /// Zero out row t and column t except for the pivot at (t, t), which
    /// must be nonzero on entry.  Every swap replaces the pivot by a
    /// strictly smaller remainder, so the loop terminates.
    fn eliminate_at(&mut self, t: usize) {
        debug_assert!(self.m[t][t] != 0);
        loop {
            let mut clean = true;
            for i in (t + 1)..self.rows {
                if self.m[i][t] == 0 {
                    continue;
                }
                let q = Integer::from(&self.m[i][t] / &self.m[t][t]);
                if q != 0 {
                    self.row_sub(i, t, &q);
                }
                if self.m[i][t] != 0 {
                    self.swap_rows(i, t);
                    clean = false;
                }
            }
            for j in (t + 1)..self.cols {
                if self.m[t][j] == 0 {
                    continue;
                }
                let q = Integer::from(&self.m[t][j] / &self.m[t][t]);
                if q != 0 {
                    self.col_sub(j, t, &q);
                }
                if self.m[t][j] != 0 {
                    self.swap_cols(j, t);
                    clean = false;
                }
            }
            if clean {
                // A column swap can re-dirty the column; re-scan both.
                let col_ok = ((t + 1)..self.rows).all(|i| self.m[i][t] == 0);
                let row_ok = ((t + 1)..self.cols).all(|j| self.m[t][j] == 0);
                if col_ok && row_ok {
                    return;
                }
            }
        }
    }
}

pub(crate) fn smith_normal_form(a: &Mat) -> SmithDecomposition {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut w = Work {
        m: a.clone(),
        u: identity(rows),
        v: identity(cols),
        rows,
        cols,
    };
    let k = rows.min(cols);

    // Diagonalize: bring a minimal-magnitude entry of the trailing
    // submatrix to (t, t), then clear its row and column.
    for t in 0..k {
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if w.m[i][j] == 0 {
                    continue;
                }
                let better = match pivot {
                    None => true,
                    Some((pi, pj)) => {
                        w.m[i][j].clone().abs() < w.m[pi][pj].clone().abs()
                    }
                };
                if better {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            w.swap_rows(pi, t);
        }
        if pj != t {
            w.swap_cols(pj, t);
        }
        w.eliminate_at(t);
    }

    // Normalize signs.
    for t in 0..k {
        if w.m[t][t] < 0 {
            w.negate_row(t);
        }
    }

    // Repair the divisibility chain d₁ | d₂ | …: when dᵢ ∤ dᵢ₊₁, fold
    // column i+1 into column i and re-eliminate — the pivot becomes
    // gcd(dᵢ, dᵢ₊₁), its partner the corresponding lcm (the 2×2 minor is
    // preserved up to sign).  Each repair strictly divides dᵢ down, so
    // this settles.
    loop {
        let mut settled = true;
        for i in 0..k.saturating_sub(1) {
            if w.m[i][i] == 0 || w.m[i + 1][i + 1] == 0 {
                continue;
            }
            if Integer::from(&w.m[i + 1][i + 1] % &w.m[i][i]) == 0 {
                continue;
            }
            let one = Integer::from(-1);
            w.col_sub(i, i + 1, &one); // col i += col i+1
            w.eliminate_at(i);
            if w.m[i][i] < 0 {
                w.negate_row(i);
            }
            if w.m[i + 1][i + 1] < 0 {
                w.negate_row(i + 1);
            }
            settled = false;
        }
        if settled {
            break;
        }
    }

    let diag: Vec<Integer> = (0..k).map(|t| w.m[t][t].clone()).collect();
    let rank = diag.iter().filter(|d| **d != 0).count();
    SmithDecomposition {
        u: w.u,
        v: w.v,
        diag,
        rank,
        rows,
        cols,
    }
}

// ----------------------------------------------------------------------
// Linear systems A·e = t over ℤ
// ----------------------------------------------------------------------

#[derive(Debug)]
pub(crate) struct LatticeSolution {
    /// One integer solution of A·e = t.
    pub(crate) particular: Vec<Integer>,
    /// Basis of the kernel of A (columns of V past the rank).
    pub(crate) kernel: Vec<Vec<Integer>>,
}

impl SmithDecomposition {
    /// Solve A·e = t over ℤ for the matrix this decomposition came from.
    /// `Err` carries the precise obstruction (non-divisibility or a target
    /// component outside the column space); a genuinely empty solution set
    /// is an obstruction, not a panic.
    pub(crate) fn solve(&self, target: &[Integer]) -> Result<LatticeSolution> {
        if target.len() != self.rows {
            return Err(Error::domain("target length does not match the matrix"));
        }
        let ut = mat_vec(&self.u, target);
        let mut y = vec![Integer::new(); self.cols];
        for i in 0..self.rows {
            let rhs = &ut[i];
            if i < self.rank {
                let d = &self.diag[i];
                let (q, rem) = rhs.clone().div_rem(d.clone());
                if rem != 0 {
                    return Err(Error::domain(format!(
                        "no integer solution: invariant factor d_{} = {} does not divide the transformed target component {}",
                        i + 1,
                        d,
                        rhs
                    )));
                }
                y[i] = q;
            } else if *rhs != 0 {
                return Err(Error::domain(format!(
                    "no solution: transformed target component {} is {} ≠ 0 outside the column space (rank {})",
                    i + 1,
                    rhs,
                    self.rank
                )));
            }
        }
        let particular = mat_vec(&self.v, &y);
        let kernel = (self.rank..self.cols)
            .map(|j| self.v.iter().map(|row| row[j].clone()).collect())
            .collect();
        Ok(LatticeSolution { particular, kernel })
    }
}

// ----------------------------------------------------------------------
// Tests
// ----------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Mat {
        rows.iter()
            .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
            .collect()
    }

    /// Fraction-free (Bareiss) determinant — independent of the SNF code.
    fn det(m: &Mat) -> Integer {
        let n = m.len();
        if n == 0 {
            return Integer::from(1);
        }
        let mut a = m.clone();
        let mut sign = 1i32;
        let mut prev = Integer::from(1);
        for t in 0..n - 1 {
            if a[t][t] == 0 {
                let Some(swap) = (t + 1..n).find(|&i| a[i][t] != 0) else {
                    return Integer::new();
                };
                a.swap(t, swap);
                sign = -sign;
            }
            for i in t + 1..n {
                for j in t + 1..n {
                    let num = Integer::from(&a[i][j] * &a[t][t])
                        - Integer::from(&a[i][t] * &a[t][j]);
                    let (q, r) = num.div_rem(prev.clone());
                    assert_eq!(r, 0, "Bareiss division must be exact");
                    a[i][j] = q;
                }
            }
            for j in 0..=t {
                a[t + 1..].iter_mut().for_each(|row| row[j] = Integer::new());
            }
            prev = a[t][t].clone();
        }
        a[n - 1][n - 1].clone() * sign
    }

    fn check_decomposition(a: &Mat) -> SmithDecomposition {
        let snf = smith_normal_form(a);
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };

        // U·A·V equals the diagonal matrix.
        if rows > 0 && cols > 0 {
            let uav = mat_mul(&mat_mul(&snf.u, a), &snf.v);
            for (i, row) in uav.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let expect = if i == j && i < snf.diag.len() {
                        snf.diag[i].clone()
                    } else {
                        Integer::new()
                    };
                    assert_eq!(*x, expect, "U·A·V mismatch at ({i}, {j})");
                }
            }
        }

        // Unimodular transforms.
        assert_eq!(det(&snf.u).abs(), 1u32, "U must be unimodular");
        assert_eq!(det(&snf.v).abs(), 1u32, "V must be unimodular");

        // Nonnegative diagonal, nonzero entries first, divisibility chain.
        for d in &snf.diag {
            assert!(*d >= 0);
        }
        for i in 0..snf.diag.len() {
            assert_eq!(snf.diag[i] != 0, i < snf.rank, "zeros must trail");
        }
        for i in 0..snf.rank.saturating_sub(1) {
            let rem = Integer::from(&snf.diag[i + 1] % &snf.diag[i]);
            assert_eq!(rem, 0, "d_{} must divide d_{}", i + 1, i + 2);
        }
        snf
    }

    #[test]
    fn known_small_forms() {
        // diag(2, 3) has invariant factors (1, 6): det preserved, gcd 1.
        let snf = check_decomposition(&mat(&[&[2, 0], &[0, 3]]));
        assert_eq!(snf.diag, vec![Integer::from(1), Integer::from(6)]);
        assert_eq!(snf.rank, 2);

        // diag(2, 4) is already in normal form.
        let snf = check_decomposition(&mat(&[&[2, 0], &[0, 4]]));
        assert_eq!(snf.diag, vec![Integer::from(2), Integer::from(4)]);

        // Rank-1 outer product: invariant factor gcd = 1·(everything).
        let snf = check_decomposition(&mat(&[&[1, 2, 3], &[2, 4, 6]]));
        assert_eq!(snf.rank, 1);
        assert_eq!(snf.diag[0], 1u32);
        assert_eq!(snf.diag[1], 0u32);

        // Zero matrix: rank 0.
        let snf = check_decomposition(&mat(&[&[0, 0], &[0, 0], &[0, 0]]));
        assert_eq!(snf.rank, 0);
    }

    #[test]
    fn random_matrices_decompose() {
        // Deterministic LCG so failures reproduce.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 19) as i64 - 9
        };
        for trial in 0..25 {
            let rows = 2 + (trial % 4);
            let cols = 2 + (trial % 5);
            let a: Mat = (0..rows)
                .map(|_| (0..cols).map(|_| Integer::from(next())).collect())
                .collect();
            check_decomposition(&a);
        }
    }

    #[test]
    fn solve_round_trips() {
        let a = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let snf = check_decomposition(&a);

        // A·x for a chosen x must be recoverable.
        let x = vec![Integer::from(3), Integer::from(-2), Integer::from(5)];
        let t = mat_vec(&a, &x);
        let sol = snf.solve(&t).expect("constructed target must be solvable");
        assert_eq!(mat_vec(&a, &sol.particular), t);
        for k in &sol.kernel {
            let zero = mat_vec(&a, k);
            assert!(zero.iter().all(|z| *z == 0), "kernel vector must map to 0");
        }
    }

    #[test]
    fn divisibility_obstruction_is_reported() {
        // 2·e = 1 has no integer solution.
        let a = mat(&[&[2]]);
        let snf = check_decomposition(&a);
        let err = snf.solve(&[Integer::from(1)]).unwrap_err();
        assert!(err.to_string().contains("does not divide"));
    }

    #[test]
    fn column_space_obstruction_is_reported() {
        // Target outside the span of the single column (1, 2)ᵀ.
        let a = mat(&[&[1], &[2]]);
        let snf = check_decomposition(&a);
        assert!(snf.solve(&[Integer::from(1), Integer::from(1)]).is_err());
        let ok = snf.solve(&[Integer::from(3), Integer::from(6)]).unwrap();
        assert_eq!(ok.particular, vec![Integer::from(3)]);
        assert!(ok.kernel.is_empty());
    }

    #[test]
    fn kernel_spans_square_singular_system() {
        // Rows sum to zero: kernel contains (1, 1, 1)ᵀ direction.
        let a = mat(&[&[1, -1, 0], &[0, 1, -1], &[-1, 0, 1]]);
        let snf = check_decomposition(&a);
        assert_eq!(snf.rank, 2);
        let sol = snf.solve(&[Integer::new(), Integer::new(), Integer::new()]).unwrap();
        assert!(sol.particular.iter().all(|x| *x == 0));
        assert_eq!(sol.kernel.len(), 1);
        let k = &sol.kernel[0];
        assert!(k[0] == k[1] && k[1] == k[2] && k[0].clone().abs() == 1u32);
    }
}
