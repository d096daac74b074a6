//! Exact integer linear algebra over a lattice with a symmetric bilinear form.
//!
//! Everything here works over arbitrary-precision integers ([`BigInt`]) and
//! rationals ([`Rational`]). There is no floating point anywhere in the crate.

mod matrix;
mod snf;
mod solve;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfDecomposition};
pub use solve::{determinant, rank, solve_integer_system, IntegerSolution, Obstruction};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: BasisId, right: BasisId },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("intersection form is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("no integer solution: {0}")]
    Infeasible(Obstruction),
}

/// Content-derived identifier of a lattice basis.
///
/// Two models built by the same sequence of operations get the same id, so
/// classes stay comparable across independent constructions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisId(String);

impl BasisId {
    pub fn derive(labels: &[String], form: &IntMatrix) -> Self {
        let mut hasher = Sha256::new();
        for label in labels {
            hasher.update(label.as_bytes());
            hasher.update([0u8]);
        }
        for entry in form.entries() {
            hasher.update(entry.to_signed_bytes_le());
            hasher.update([0xffu8]);
        }
        let digest = hasher.finalize();
        let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        BasisId(hex)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An integer vector in a specific lattice basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    coefficients: Vec<BigInt>,
    basis: BasisId,
}

impl DivisorClass {
    pub fn new(coefficients: Vec<BigInt>, basis: BasisId) -> Self {
        DivisorClass { coefficients, basis }
    }

    pub fn from_i64(coefficients: &[i64], basis: BasisId) -> Self {
        DivisorClass::new(coefficients.iter().map(|&c| BigInt::from(c)).collect(), basis)
    }

    pub fn zero(rank: usize, basis: BasisId) -> Self {
        DivisorClass::new(vec![BigInt::zero(); rank], basis)
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn basis(&self) -> &BasisId {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    fn check_compatible(&self, other: &DivisorClass) -> Result<(), LatticeError> {
        if self.basis != other.basis {
            return Err(LatticeError::BasisMismatch {
                left: self.basis.clone(),
                right: other.basis.clone(),
            });
        }
        if self.rank() != other.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                got: other.rank(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &DivisorClass) -> Result<DivisorClass, LatticeError> {
        self.check_compatible(other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a + b)
            .collect();
        Ok(DivisorClass::new(coefficients, self.basis.clone()))
    }

    pub fn checked_sub(&self, other: &DivisorClass) -> Result<DivisorClass, LatticeError> {
        self.checked_add(&other.scaled(&BigInt::from(-1)))
    }

    pub fn scaled(&self, factor: &BigInt) -> DivisorClass {
        DivisorClass::new(
            self.coefficients.iter().map(|c| c * factor).collect(),
            self.basis.clone(),
        )
    }
}

/// Symmetric integer bilinear form on a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    matrix: IntMatrix,
    basis: BasisId,
}

impl IntersectionForm {
    pub fn new(matrix: IntMatrix, basis: BasisId) -> Result<Self, LatticeError> {
        if matrix.rows() != matrix.cols() {
            return Err(LatticeError::DimensionMismatch {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        for i in 0..matrix.rows() {
            for j in (i + 1)..matrix.cols() {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(LatticeError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(IntersectionForm { matrix, basis })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &BasisId {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn determinant(&self) -> BigInt {
        determinant(&self.matrix)
    }

    /// Row vector `vᵀQ`; pairing any class `u` with `v` is then a dot product.
    pub fn dual(&self, v: &DivisorClass) -> Result<Vec<BigInt>, LatticeError> {
        self.check(v)?;
        Ok((0..self.rank())
            .map(|j| {
                v.coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * &self.matrix[(i, j)])
                    .sum()
            })
            .collect())
    }

    fn check(&self, v: &DivisorClass) -> Result<(), LatticeError> {
        if v.basis != self.basis {
            return Err(LatticeError::BasisMismatch {
                left: self.basis.clone(),
                right: v.basis.clone(),
            });
        }
        if v.rank() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                got: v.rank(),
            });
        }
        Ok(())
    }
}

/// `uᵀ·Q·v`.
pub fn pairing(
    form: &IntersectionForm,
    u: &DivisorClass,
    v: &DivisorClass,
) -> Result<BigInt, LatticeError> {
    u.check_compatible(v)?;
    let dual = form.dual(u)?;
    Ok(dual.iter().zip(&v.coefficients).map(|(a, b)| a * b).sum())
}
