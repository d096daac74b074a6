//! Quantized alpha-invariants `α_k(L) = inf_{D ∼ kL} k·lct(D)` over
//! effective divisors supported on a declared family of invariant curves.
//!
//! For a divisor `D = Σ aᵢCᵢ` with normal-crossing support,
//! `k·lct(D) = k / max aᵢ`, so `α_k` is `k / m*` where `m*` is the largest
//! coefficient any integer solution of `Σ aᵢ[Cᵢ] = k[L]`, `aᵢ ≥ 0` can
//! reach. That maximum is split into one integer program per curve.
//!
//! The value computed is the infimum over the declared family only. It is
//! the true `α_k` when the family is the complete list of invariant curves
//! of a complexity-one torus action whose general orbits can be traded for
//! listed curves, which is an assertion about the surface and not checked.

mod branch;
mod oracle;
mod simplex;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::builder::{BuildError, SurfaceModel};
use crate::lattice::{rank, DivisorClass, IntMatrix, LatticeError, Rational};
use crate::lct::{lct_snc, EffectiveDivisor, LctError, LctValue};

use branch::BoxedSystem;
pub use oracle::{oracle_alpha_k, ORACLE_MAX_K};
pub use simplex::LpSolution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Lct(#[from] LctError),
    #[error("curve classes span a sublattice of rank {rank}, lattice rank is {expected}")]
    NonSpanning { rank: usize, expected: usize },
    #[error("curve `{0}` appears twice in the curve list")]
    DuplicateCurve(String),
    #[error("no effective divisor on the listed curves is equivalent to {k}L")]
    Infeasible { k: u64 },
    #[error("coefficient of `{0}` is unbounded on the feasible set")]
    Unbounded(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("the only effective representative of {k}L is zero")]
    ZeroDivisor { k: u64 },
    #[error("oracle supports k <= {max}, got {k}")]
    OracleRange { k: u64, max: u64 },
}

/// `A·a = k·ℓ`, `a ≥ 0` integer, maximize `a[objective_index]`.
///
/// Columns of `A` are the curve classes, in curve-list order; every problem
/// built for the same `k` shares the matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpProblem {
    pub labels: Arc<[String]>,
    pub matrix: Arc<IntMatrix>,
    pub rhs: Vec<BigInt>,
    pub k: u64,
    pub objective_index: usize,
    pub box_upper: Option<Vec<BigInt>>,
}

impl IlpProblem {
    pub fn variables(&self) -> usize {
        self.matrix.cols()
    }

    pub fn objective(&self) -> Vec<BigInt> {
        unit(self.variables(), self.objective_index)
    }

    pub fn objective_label(&self) -> &str {
        &self.labels[self.objective_index]
    }

    pub fn with_objective(&self, index: usize) -> IlpProblem {
        IlpProblem {
            objective_index: index,
            ..self.clone()
        }
    }

    pub fn with_box(&self, upper: Vec<BigInt>) -> IlpProblem {
        IlpProblem {
            box_upper: Some(upper),
            ..self.clone()
        }
    }

    /// True when `a` is a feasible point.
    pub fn is_feasible(&self, a: &[BigInt]) -> bool {
        a.len() == self.variables()
            && a.iter().all(|x| !x.is_negative())
            && self
                .box_upper
                .as_ref()
                .is_none_or(|u| a.iter().zip(u).all(|(x, u)| x <= u))
            && self.matrix.mul_vec(a) == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpSolution {
    pub optimum: BigInt,
    pub witness: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub k: u64,
    pub alpha_k: Rational,
    pub m_star: BigInt,
    pub witness: EffectiveDivisor,
    pub achieved_by: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateCheck {
    pub equivalent: bool,
    pub lct: LctValue,
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); n];
    e[i] = BigInt::one();
    e
}

/// One problem per curve, all sharing `A` (curve classes as columns) and
/// `rhs = k·ℓ`.
///
/// The curve classes must span the lattice over ℚ.
pub fn build_constraints(
    model: &SurfaceModel,
    curve_labels: &[String],
    l: &DivisorClass,
    k: u64,
) -> Result<Vec<IlpProblem>, AlphaError> {
    if l.basis() != model.basis_id() {
        return Err(LatticeError::BasisMismatch {
            left: model.basis_id().clone(),
            right: l.basis().clone(),
        }
        .into());
    }
    for (i, label) in curve_labels.iter().enumerate() {
        if curve_labels[..i].contains(label) {
            return Err(AlphaError::DuplicateCurve(label.clone()));
        }
    }
    let columns = curve_labels
        .iter()
        .map(|label| model.curve(label).map(DivisorClass::coefficients))
        .collect::<Result<Vec<_>, _>>()?;
    let matrix = IntMatrix::from_columns(model.rank(), &columns);
    let r = rank(&matrix);
    if r != model.rank() {
        return Err(AlphaError::NonSpanning {
            rank: r,
            expected: model.rank(),
        });
    }
    let rhs = l.scaled(&BigInt::from(k)).coefficients().to_vec();
    let labels: Arc<[String]> = curve_labels.to_vec().into();
    let matrix = Arc::new(matrix);
    Ok((0..curve_labels.len())
        .map(|objective_index| IlpProblem {
            labels: labels.clone(),
            matrix: matrix.clone(),
            rhs: rhs.clone(),
            k,
            objective_index,
            box_upper: None,
        })
        .collect())
}

/// Exact optimum of the LP relaxation (real `a ≥ 0`).
pub fn lp_max(problem: &IlpProblem) -> LpSolution {
    let n = problem.variables();
    let lower = vec![BigInt::zero(); n];
    let upper = match &problem.box_upper {
        Some(u) => u.iter().cloned().map(Some).collect(),
        None => vec![None; n],
    };
    simplex::maximize(&simplex::BoundedLp {
        matrix: &problem.matrix,
        rhs: &problem.rhs,
        objective: &problem.objective(),
        lower: &lower,
        upper: &upper,
    })
}

/// Per-variable upper bounds `⌊max aᵢ⌋` over the LP relaxation.
pub fn lp_box(problem: &IlpProblem) -> Result<Vec<BigInt>, AlphaError> {
    (0..problem.variables())
        .into_par_iter()
        .map(|i| match lp_max(&problem.with_objective(i)) {
            LpSolution::Optimal { optimum, .. } => Ok(optimum.floor().to_integer()),
            LpSolution::Unbounded => Err(AlphaError::Unbounded(problem.labels[i].clone())),
            LpSolution::Infeasible => Err(AlphaError::Infeasible { k: problem.k }),
        })
        .collect()
}

fn boxed_system(problem: &IlpProblem) -> Result<BoxedSystem<'_>, AlphaError> {
    let upper = match &problem.box_upper {
        Some(u) => u.clone(),
        None => lp_box(problem)?,
    };
    Ok(BoxedSystem {
        matrix: &problem.matrix,
        rhs: &problem.rhs,
        lower: vec![BigInt::zero(); problem.variables()],
        upper,
    })
}

/// Exact integer optimum; the witness is the lexicographically smallest
/// optimal point.
pub fn ilp_max(problem: &IlpProblem) -> Result<IlpSolution, AlphaError> {
    let sys = boxed_system(problem)?;
    let infeasible = || AlphaError::Infeasible { k: problem.k };
    let (optimum, _) = sys.maximize(&problem.objective()).ok_or_else(infeasible)?;
    let witness = sys
        .lexicographic_min_with(problem.objective_index, &optimum)
        .ok_or_else(infeasible)?;
    Ok(IlpSolution { optimum, witness })
}

pub(crate) fn witness_divisor(labels: &[String], a: &[BigInt]) -> EffectiveDivisor {
    EffectiveDivisor::from_pairs(
        labels
            .iter()
            .zip(a)
            .filter(|(_, x)| !x.is_zero())
            .map(|(l, x)| (l.clone(), Rational::from_integer(x.clone()))),
    )
    .expect("witness coefficients are nonnegative")
}

pub(crate) fn alpha_result(k: u64, labels: &[String], index: usize, point: &[BigInt]) -> Result<AlphaResult, AlphaError> {
    let m_star = point[index].clone();
    if m_star.is_zero() {
        return Err(AlphaError::ZeroDivisor { k });
    }
    Ok(AlphaResult {
        k,
        alpha_k: Rational::new(BigInt::from(k), m_star.clone()),
        m_star,
        witness: witness_divisor(labels, point),
        achieved_by: labels[index].clone(),
    })
}

/// `α_k` restricted to divisors supported on `curve_labels`.
pub fn alpha_k(
    model: &SurfaceModel,
    curve_labels: &[String],
    l: &DivisorClass,
    k: u64,
) -> Result<AlphaResult, AlphaError> {
    if k == 0 {
        return Err(AlphaError::ZeroK);
    }
    let problems = build_constraints(model, curve_labels, l, k)?;
    let base = &problems[0];
    let sys = boxed_system(base)?;
    let n = base.variables();
    let optima: Vec<Option<BigInt>> = (0..n)
        .into_par_iter()
        .map(|i| sys.maximize(&unit(n, i)).map(|(v, _)| v))
        .collect();
    let optima: Vec<BigInt> = optima
        .into_iter()
        .collect::<Option<_>>()
        .ok_or(AlphaError::Infeasible { k })?;
    let m_star = optima.iter().max().cloned().unwrap_or_default();
    let index = optima
        .iter()
        .position(|v| *v == m_star)
        .ok_or(AlphaError::Infeasible { k })?;
    let point = sys
        .lexicographic_min_with(index, &m_star)
        .ok_or(AlphaError::Infeasible { k })?;
    alpha_result(k, curve_labels, index, &point)
}

/// `1/8` for even `k`, `k/(8k−1)` for odd `k`: the values on the
/// counterexample surface.
pub fn closed_form(k: u64) -> Rational {
    if k.is_multiple_of(2) {
        Rational::new(BigInt::one(), BigInt::from(8))
    } else {
        Rational::new(BigInt::from(k), BigInt::from(8 * k - 1))
    }
}

/// Checks `Σ aᵢ[Cᵢ] = k[L]` exactly and reports `lct` of the divisor.
pub fn verify_certificate(
    model: &SurfaceModel,
    divisor: &EffectiveDivisor,
    k: u64,
    l: &DivisorClass,
) -> Result<CertificateCheck, AlphaError> {
    if l.basis() != model.basis_id() {
        return Err(LatticeError::BasisMismatch {
            left: model.basis_id().clone(),
            right: l.basis().clone(),
        }
        .into());
    }
    let mut sum = vec![Rational::zero(); model.rank()];
    for (label, a) in divisor.coefficients() {
        for (s, c) in sum.iter_mut().zip(model.curve(label)?.coefficients()) {
            *s += a * Rational::from_integer(c.clone());
        }
    }
    let target = l.scaled(&BigInt::from(k));
    let equivalent = sum
        .iter()
        .zip(target.coefficients())
        .all(|(s, t)| *s == Rational::from_integer(t.clone()));
    Ok(CertificateCheck {
        equivalent,
        lct: lct_snc(divisor),
    })
}
