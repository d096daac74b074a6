use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{smith_normal_form, IntMatrix, LatticeError};

/// Why `A·x = b` has no integer solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// No rational solution either: `b` is outside the column space.
    RationalInconsistent,
    /// Rationally solvable, but some invariant factor does not divide the
    /// transformed right-hand side.
    Congruence { modulus: BigInt, residue: BigInt },
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::RationalInconsistent => f.write_str("system is inconsistent over the rationals"),
            Obstruction::Congruence { modulus, residue } => {
                write!(f, "congruence obstruction: {residue} is not divisible by {modulus}")
            }
        }
    }
}

/// All integer solutions of `A·x = b`: `particular + Σ tᵢ·kernel_basis[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSolution {
    pub particular: Vec<BigInt>,
    pub kernel_basis: Vec<Vec<BigInt>>,
}

impl IntegerSolution {
    /// `particular + Σ tᵢ·kernel_basis[i]`.
    pub fn point(&self, t: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(t.len(), self.kernel_basis.len());
        let mut x = self.particular.clone();
        for (ti, k) in t.iter().zip(&self.kernel_basis) {
            for (xj, kj) in x.iter_mut().zip(k) {
                *xj += ti * kj;
            }
        }
        x
    }
}

pub fn solve_integer_system(a: &IntMatrix, b: &[BigInt]) -> Result<IntegerSolution, LatticeError> {
    if b.len() != a.rows() {
        return Err(LatticeError::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        });
    }
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let c = snf.u.mul_vec(b);

    if c[r..].iter().any(|x| !x.is_zero()) {
        return Err(LatticeError::Infeasible(Obstruction::RationalInconsistent));
    }
    let mut y = vec![BigInt::zero(); a.cols()];
    for i in 0..r {
        let d = &snf.d[(i, i)];
        let (q, rem) = c[i].div_rem(d);
        if !rem.is_zero() {
            return Err(LatticeError::Infeasible(Obstruction::Congruence {
                modulus: d.clone(),
                residue: c[i].clone(),
            }));
        }
        y[i] = q;
    }
    let particular = snf.v.mul_vec(&y);
    let kernel_basis = (r..a.cols()).map(|j| snf.v.column(j)).collect();
    Ok(IntegerSolution {
        particular,
        kernel_basis,
    })
}

pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Determinant by fraction-free (Bareiss) elimination. Panics on non-square input.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[(k, k)].is_zero() {
            match ((k + 1)..n).find(|&i| !m[(i, k)].is_zero()) {
                Some(i) => {
                    m.swap_rows(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = num / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &m[(n - 1, n - 1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_system() {
        let sol = solve_integer_system(&IntMatrix::identity(3), &ints(&[4, -1, 7])).unwrap();
        assert_eq!(sol.particular, ints(&[4, -1, 7]));
        assert!(sol.kernel_basis.is_empty());
    }

    #[test]
    fn parity_obstruction() {
        let err = solve_integer_system(&IntMatrix::from_rows_i64(&[&[2]]), &ints(&[1])).unwrap_err();
        assert!(matches!(
            err,
            LatticeError::Infeasible(Obstruction::Congruence { ref modulus, .. }) if *modulus == BigInt::from(2)
        ));
    }

    #[test]
    fn inconsistent_rows() {
        let a = IntMatrix::from_rows_i64(&[&[1, 1], &[1, 1]]);
        let err = solve_integer_system(&a, &ints(&[1, 2])).unwrap_err();
        assert_eq!(err, LatticeError::Infeasible(Obstruction::RationalInconsistent));
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&IntMatrix::from_rows_i64(&[&[2, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(&IntMatrix::from_rows_i64(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(
            determinant(&IntMatrix::from_rows_i64(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])),
            BigInt::from(-3)
        );
        assert_eq!(determinant(&IntMatrix::from_rows_i64(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    fn system() -> impl Strategy<Value = (usize, usize, Vec<i64>, Vec<i64>)> {
        (1usize..=4, 1usize..=5).prop_flat_map(|(m, n)| {
            (
                Just(m),
                Just(n),
                prop::collection::vec(-4i64..=4, m * n),
                prop::collection::vec(-3i64..=3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn round_trip((m, n, entries, x0) in system(), t in prop::collection::vec(-5i64..=5, 5)) {
            let a = IntMatrix::from_rows(entries.chunks(n).map(ints).collect());
            let b = a.mul_vec(&ints(&x0));
            let sol = solve_integer_system(&a, &b).unwrap();
            prop_assert_eq!(sol.kernel_basis.len(), n - rank(&a));
            let t = ints(&t[..sol.kernel_basis.len()]);
            prop_assert_eq!(a.mul_vec(&sol.point(&t)), b);
            let _ = m;
        }

        #[test]
        fn infeasibility_is_sound(
            (m, n, entries, _x) in system(),
            rhs in prop::collection::vec(-4i64..=4, 4),
        ) {
            let a = IntMatrix::from_rows(entries.chunks(n).map(ints).collect());
            let b = ints(&rhs[..m]);
            if solve_integer_system(&a, &b).is_err() {
                // brute force over a small box
                let mut x = vec![-4i64; n];
                loop {
                    prop_assert_ne!(a.mul_vec(&ints(&x)), b.clone());
                    let mut i = 0;
                    while i < n && x[i] == 4 {
                        x[i] = -4;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                    x[i] += 1;
                }
            }
        }
    }
}
