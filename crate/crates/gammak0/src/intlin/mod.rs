//! Exact integer linear algebra: Smith normal form, cokernel and kernel
//! presentations, and linear solving over the integers.

mod matrix;
mod snf;

pub use matrix::{IntMatrix, MatrixParseError};
pub use snf::{smith_normal_form, SnfDecomposition};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::abelian::FgAbelianGroup;

/// Cokernel of an integer matrix `M: Z^n -> Z^m`, i.e. `Z^m / im(M)`,
/// in canonical invariant-factor form.
///
/// `projection` maps `Z^m` onto canonical coordinates: applied to a vector,
/// its first rows are the torsion coordinates (to be read mod the invariant
/// factors) and the remaining rows the free coordinates. `projection * M`
/// vanishes in the group. `section` is a right inverse of `projection`
/// (`projection * section` is the identity), so canonical generators can be
/// pulled back to `Z^m`.
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub group: FgAbelianGroup,
    pub projection: IntMatrix,
    pub section: IntMatrix,
}

/// Presents `Z^m / im(M)` in canonical form. Total on any shape; the
/// cokernel of an `m x 0` matrix is `Z^m`.
pub fn cokernel(m: &IntMatrix) -> Cokernel {
    let snf = smith_normal_form(m);
    cokernel_of_snf(m, &snf)
}

fn cokernel_of_snf(m: &IntMatrix, snf: &SnfDecomposition) -> Cokernel {
    let rows = m.rows();
    let rank = snf.rank();
    let group = FgAbelianGroup::from_invariant_factors(&snf.diagonal, rows - rank);

    // canonical coordinates = rows of U at non-unit diagonal entries,
    // then the rows past the rank (free part)
    let mut kept_rows: Vec<usize> = Vec::new();
    for (i, d) in snf.diagonal.iter().enumerate() {
        if !d.is_one() {
            kept_rows.push(i);
        }
    }
    kept_rows.extend(rank..rows);

    let projection = IntMatrix::from_fn(kept_rows.len(), rows, |i, j| {
        snf.u[(kept_rows[i], j)].clone()
    });
    let section = right_inverse(&projection)
        .expect("rows of a unimodular matrix always admit an integral right inverse");
    Cokernel {
        group,
        projection,
        section,
    }
}

/// Rank of the kernel of `M: Z^n -> Z^m`, i.e. `n - rank(M)`.
pub fn kernel_rank(m: &IntMatrix) -> usize {
    m.cols() - smith_normal_form(m).rank()
}

/// Finds an integer solution of `M x = b`, if one exists.
/// Panics if `b.len()` differs from the number of rows of `M`.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows(), "right-hand side has wrong length");
    let snf = smith_normal_form(m);
    solve_with(&snf, b)
}

/// Solves `M x = b` given a precomputed decomposition of `M`.
pub fn solve_with(snf: &SnfDecomposition, b: &[BigInt]) -> Option<Vec<BigInt>> {
    // U M V = S, so M x = b iff S y = U b with x = V y.
    let c = snf.u.mul_vec(b);
    let rank = snf.rank();
    let n = snf.v.rows();
    let mut y = vec![BigInt::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        if i < rank {
            let d = &snf.s[(i, i)];
            if !(ci % d).is_zero() {
                return None;
            }
            y[i] = ci / d;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Integral right inverse `X` with `M X = I`, if one exists.
pub fn right_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let snf = smith_normal_form(m);
    let rows = m.rows();
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut e = vec![BigInt::zero(); rows];
        e[i] = 1.into();
        cols.push(solve_with(&snf, &e)?);
    }
    Some(IntMatrix::from_fn(m.cols(), rows, |i, j| {
        cols[j][i].clone()
    }))
}
