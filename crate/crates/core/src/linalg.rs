//! Exact linear algebra for the degree span test: fraction-free (Bareiss)
//! Gaussian elimination over the integers, plus an exact least-squares
//! residual used as the witness when a system is inconsistent.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Outcome of solving `A x = b` exactly.
pub enum SolveOutcome {
    /// A solution vector (one entry per column of `A`).
    Solution(Vec<BigRational>),
    /// No solution exists.
    Inconsistent,
}

/// Solve `A x = b` over the rationals with integer input data, by one-step
/// fraction-free row elimination on `[A | b]`.
pub fn solve_exact(a: &[Vec<BigInt>], b: &[BigInt]) -> SolveOutcome {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    debug_assert_eq!(b.len(), rows);

    let width = cols + 1;
    let mut m: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let mut row = Vec::with_capacity(width);
            row.extend(a[i].iter().cloned());
            row.push(b[i].clone());
            row
        })
        .collect();

    let mut prev_pivot = BigInt::one();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let pivot = m[rank][col].clone();
        for i in rank + 1..rows {
            let factor = m[i][col].clone();
            if factor.is_zero() {
                // Keep the Bareiss minor invariant exact on untouched rows.
                for j in 0..width {
                    m[i][j] = &m[i][j] * &pivot / &prev_pivot;
                }
            } else {
                for j in 0..width {
                    m[i][j] = (&m[i][j] * &pivot - &factor * &m[rank][j]) / &prev_pivot;
                }
            }
        }
        prev_pivot = pivot;
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }

    if m[rank..].iter().any(|row| !row[cols].is_zero()) {
        return SolveOutcome::Inconsistent;
    }

    // Back-substitution over the rationals on the echelon system.
    let mut x = vec![BigRational::zero(); cols];
    for row in (0..rank).rev() {
        let col = pivot_cols[row];
        let mut acc = BigRational::from_integer(m[row][cols].clone());
        for j in col + 1..cols {
            if !m[row][j].is_zero() {
                acc -= BigRational::from_integer(m[row][j].clone()) * &x[j];
            }
        }
        x[col] = acc / BigRational::from_integer(m[row][col].clone());
    }
    SolveOutcome::Solution(x)
}

/// Exact least-squares residual `y = b − A z` where `Gram z = Aᵀ b`.
///
/// `y` is orthogonal to every column of `A`; it is nonzero exactly when `b`
/// lies outside the column span, which makes it the witness functional for
/// an inconsistent system.
pub fn least_squares_residual(a: &[Vec<BigInt>], b: &[BigInt]) -> Vec<BigRational> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut gram = vec![vec![BigInt::zero(); cols]; cols];
    let mut rhs = vec![BigInt::zero(); cols];
    for (row, bv) in a.iter().zip(b) {
        for i in 0..cols {
            if row[i].is_zero() {
                continue;
            }
            for j in i..cols {
                if !row[j].is_zero() {
                    let p = &row[i] * &row[j];
                    gram[i][j] += &p;
                    if i != j {
                        gram[j][i] += p;
                    }
                }
            }
            rhs[i] += &row[i] * bv;
        }
    }
    // Aᵀb always lies in the range of AᵀA, so this system is consistent.
    let z = match solve_exact(&gram, &rhs) {
        SolveOutcome::Solution(z) => z,
        SolveOutcome::Inconsistent => unreachable!("normal equations are always consistent"),
    };
    a.iter()
        .zip(b)
        .map(|(row, bv)| {
            let mut acc = BigRational::from_integer(bv.clone());
            for (aij, zj) in row.iter().zip(&z) {
                if !aij.is_zero() {
                    acc -= BigRational::from_integer(aij.clone()) * zj;
                }
            }
            acc
        })
        .collect()
}

/// `|yᵀ b|` for a witness functional; nonzero certifies separation.
pub fn dot_rational(y: &[BigRational], b: &[BigInt]) -> BigRational {
    y.iter()
        .zip(b)
        .map(|(yi, bi)| yi * BigRational::from_integer(bi.clone()))
        .fold(BigRational::zero(), |acc, v| acc + v)
        .abs()
}
