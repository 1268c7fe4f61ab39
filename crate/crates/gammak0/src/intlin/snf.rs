use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Smith normal form `U * M * V = S` of an integer matrix.
///
/// `U` and `V` are unimodular, `S` is diagonal with nonnegative entries,
/// each nonzero diagonal entry divides the next, and zeros trail.
/// `diagonal` lists the nonzero entries (the invariant factors of `M`).
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub diagonal: Vec<BigInt>,
}

impl SnfDecomposition {
    /// Rank of the source matrix.
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

/// Computes the Smith normal form by classical row/column reduction.
///
/// Pivots are chosen with smallest nonzero absolute value; after each pivot
/// settles, the remaining submatrix is made divisible by it, which yields the
/// divisibility chain directly. Total on any shape, including empty matrices.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let limit = rows.min(cols);
    let mut k = 0;
    while k < limit {
        let Some((pi, pj)) = find_pivot(&s, k) else {
            break; // remaining submatrix is zero
        };
        s.swap_rows(k, pi);
        u.swap_rows(k, pi);
        s.swap_cols(k, pj);
        v.swap_cols(k, pj);

        'reduce: loop {
            // clear column k below the pivot
            for i in k + 1..rows {
                if s[(i, k)].is_zero() {
                    continue;
                }
                let q = &s[(i, k)] / &s[(k, k)];
                if !q.is_zero() {
                    row_sub_scaled(&mut s, i, k, &q, k);
                    row_sub_scaled(&mut u, i, k, &q, 0);
                }
                if !s[(i, k)].is_zero() {
                    // remainder became the smaller pivot
                    s.swap_rows(k, i);
                    u.swap_rows(k, i);
                    continue 'reduce;
                }
            }
            // clear row k right of the pivot
            for j in k + 1..cols {
                if s[(k, j)].is_zero() {
                    continue;
                }
                let q = &s[(k, j)] / &s[(k, k)];
                if !q.is_zero() {
                    col_sub_scaled(&mut s, j, k, &q, k);
                    col_sub_scaled(&mut v, j, k, &q, 0);
                }
                if !s[(k, j)].is_zero() {
                    s.swap_cols(k, j);
                    v.swap_cols(k, j);
                    continue 'reduce;
                }
            }
            // pivot must divide everything that remains
            if !s[(k, k)].abs().is_one() {
                if let Some(i) = find_nondivisible_row(&s, k) {
                    row_add(&mut s, k, i, k);
                    row_add(&mut u, k, i, 0);
                    continue 'reduce;
                }
            }
            break;
        }

        if s[(k, k)].is_negative() {
            negate_row(&mut s, k, k);
            negate_row(&mut u, k, 0);
        }
        k += 1;
    }

    let diagonal: Vec<BigInt> = (0..k).map(|i| s[(i, i)].clone()).collect();
    debug_assert!(diagonal.iter().all(|d| d.is_positive()));
    SnfDecomposition { u, s, v, diagonal }
}

/// Smallest-absolute-value nonzero entry of `s[k.., k..]`, if any.
/// Stops at the first entry of absolute value one.
fn find_pivot(s: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in k..s.rows() {
        for j in k..s.cols() {
            let e = &s[(i, j)];
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            if a.is_one() {
                return Some((i, j));
            }
            match &best {
                Some((_, _, b)) if *b <= a => {}
                _ => best = Some((i, j, a)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Row of some entry in `s[k+1.., k+1..]` not divisible by the pivot `s[k][k]`.
fn find_nondivisible_row(s: &IntMatrix, k: usize) -> Option<usize> {
    let pivot = s[(k, k)].clone();
    for i in k + 1..s.rows() {
        for j in k + 1..s.cols() {
            if !(&s[(i, j)] % &pivot).is_zero() {
                return Some(i);
            }
        }
    }
    None
}

// The elementary operations below skip leading columns/rows known to be zero
// in both operands (`from` is the first index that can be nonzero).

fn row_sub_scaled(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt, from: usize) {
    for j in from..m.cols() {
        let s = m[(source, j)].clone();
        if !s.is_zero() {
            m[(target, j)] -= q * s;
        }
    }
}

fn col_sub_scaled(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt, from: usize) {
    for i in from..m.rows() {
        let s = m[(i, source)].clone();
        if !s.is_zero() {
            m[(i, target)] -= q * s;
        }
    }
}

fn row_add(m: &mut IntMatrix, target: usize, source: usize, from: usize) {
    for j in from..m.cols() {
        let s = m[(source, j)].clone();
        if !s.is_zero() {
            m[(target, j)] += s;
        }
    }
}

fn negate_row(m: &mut IntMatrix, row: usize, from: usize) {
    for j in from..m.cols() {
        if !m[(row, j)].is_zero() {
            let e = m[(row, j)].clone();
            m[(row, j)] = -e;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_decomposition(m: &IntMatrix) -> SnfDecomposition {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.s, "U*M*V != S");
        assert!(snf.u.is_unimodular(), "U not unimodular");
        assert!(snf.v.is_unimodular(), "V not unimodular");
        // diagonal shape: nonneg, chain, zeros trail
        for i in 0..snf.s.rows() {
            for j in 0..snf.s.cols() {
                if i != j {
                    assert!(snf.s[(i, j)].is_zero(), "off-diagonal entry");
                }
            }
        }
        for w in snf.diagonal.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
        }
        for i in snf.diagonal.len()..snf.s.rows().min(snf.s.cols()) {
            assert!(snf.s[(i, i)].is_zero(), "zeros must trail");
        }
        snf
    }

    #[test]
    fn identity_is_fixed() {
        let m = IntMatrix::identity(2);
        let snf = check_decomposition(&m);
        assert_eq!(snf.s, m);
        assert_eq!(snf.diagonal, vec![BigInt::one(), BigInt::one()]);
    }

    #[test]
    fn two_by_two_invariant_factors() {
        // oracle: d1 = gcd of entries = 2, d1*d2 = |det| = 8, so (2, 4)
        let m = IntMatrix::from_i64_rows(&[vec![2, 4], vec![6, 8]]);
        let snf = check_decomposition(&m);
        assert_eq!(snf.diagonal, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn zero_matrix() {
        let m = IntMatrix::zeros(2, 3);
        let snf = check_decomposition(&m);
        assert!(snf.diagonal.is_empty());
        assert!(snf.s.is_zero());
    }

    #[test]
    fn empty_shapes() {
        for (r, c) in [(0, 0), (0, 3), (3, 0)] {
            let snf = check_decomposition(&IntMatrix::zeros(r, c));
            assert!(snf.diagonal.is_empty());
        }
    }

    #[test]
    fn negative_entries_normalize() {
        let m = IntMatrix::from_i64_rows(&[vec![-3]]);
        let snf = check_decomposition(&m);
        assert_eq!(snf.diagonal, vec![BigInt::from(3)]);
    }

    #[test]
    fn divisibility_fixup() {
        // diag(6, 4) has invariant factors (2, 12)
        let m = IntMatrix::from_i64_rows(&[vec![6, 0], vec![0, 4]]);
        let snf = check_decomposition(&m);
        assert_eq!(snf.diagonal, vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn wide_and_tall() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 0, 0], vec![0, 3, 0]]);
        let snf = check_decomposition(&m);
        assert_eq!(snf.diagonal, vec![BigInt::one(), BigInt::from(6)]);
        let snf = check_decomposition(&m.transpose());
        assert_eq!(snf.diagonal, vec![BigInt::one(), BigInt::from(6)]);
    }
}
