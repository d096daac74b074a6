use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Nonzero diagonal entries of `D`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n)
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_entry(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in (t + 1)..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in (t + 1)..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                // a remainder smaller than the pivot survived: re-pivot on it
                let (pi, pj) = min_abs_entry_cross(&d, t);
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let pivot = d[(t, t)].clone();
            let offender = ((t + 1)..m).find(|&i| {
                ((t + 1)..n).any(|j| !d[(i, j)].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    SnfDecomposition { u, d, v }
}

fn min_abs_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t` (from the diagonal on).
fn min_abs_entry_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for i in t..d.rows() {
        if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
            best = (i, t);
        }
    }
    for j in t..d.cols() {
        if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
            best = (t, j);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::determinant;
    use num_traits::One;
    use proptest::prelude::*;

    fn check(a: &IntMatrix) -> SnfDecomposition {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.d, "U·A·V != D for {a:?}");
        assert!(snf.d.is_diagonal());
        assert!(determinant(&snf.u).abs().is_one());
        assert!(determinant(&snf.v).abs().is_one());
        let n = snf.d.rows().min(snf.d.cols());
        for i in 0..n {
            assert!(!snf.d[(i, i)].is_negative());
            if i + 1 < n && !snf.d[(i + 1, i + 1)].is_zero() {
                assert!(snf.d[(i + 1, i + 1)].is_multiple_of(&snf.d[(i, i)]));
            }
            if snf.d[(i, i)].is_zero() {
                assert!((i..n).all(|j| snf.d[(j, j)].is_zero()));
            }
        }
        snf
    }

    #[test]
    fn identity_is_fixed() {
        let a = IntMatrix::identity(4);
        let snf = check(&a);
        assert_eq!(snf.u, a);
        assert_eq!(snf.v, a);
        assert_eq!(snf.d, a);
    }

    #[test]
    fn sign_is_normalized() {
        let snf = check(&IntMatrix::from_rows_i64(&[&[-3]]));
        assert_eq!(snf.d, IntMatrix::from_rows_i64(&[&[3]]));
        assert_eq!(&snf.u[(0, 0)] * &snf.v[(0, 0)], BigInt::from(-1));
    }

    #[test]
    fn two_by_two_example() {
        let snf = check(&IntMatrix::from_rows_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(snf.d, IntMatrix::from_rows_i64(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn zero_and_empty_matrices() {
        let snf = check(&IntMatrix::zeros(3, 2));
        assert_eq!(snf.rank(), 0);
        let snf = check(&IntMatrix::zeros(0, 3));
        assert_eq!(snf.rank(), 0);
    }

    #[test]
    fn divisibility_needs_row_mixing() {
        // diag(2, 3) is diagonal but not in Smith form
        let snf = check(&IntMatrix::from_rows_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(snf.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    proptest! {
        #[test]
        fn decomposition_invariants(
            (m, n, entries) in (1usize..=8, 1usize..=12)
                .prop_flat_map(|(m, n)| (Just(m), Just(n), prop::collection::vec(-9i64..=9, m * n)))
        ) {
            let rows: Vec<Vec<BigInt>> =
                entries.chunks(n).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            check(&IntMatrix::from_rows(rows));
            let _ = m;
        }
    }
}
