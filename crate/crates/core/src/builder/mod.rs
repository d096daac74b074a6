//! Blow-up calculus on Picard lattices of rational surfaces.
//!
//! A [`SurfaceModel`] is stored in the total-transform basis: the pullbacks of
//! the two Hirzebruch generators followed by one exceptional class per
//! blow-up. Named curves are proper transforms written in that basis. Points
//! are never given by coordinates, only by the named curves passing through
//! them, so an infinitely-near point is "the point on exceptional curve E
//! where C meets it".

mod paper;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{
    determinant, pairing, solve_integer_system, BasisId, DivisorClass, IntMatrix,
    IntersectionForm, LatticeError, Rational,
};

pub use paper::{
    paper_ample_curves, paper_divisor, paper_surface, paper_torus_curves, PAPER_REPORT_BASIS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("unknown curve label `{0}`")]
    UnknownLabel(String),
    #[error("curve label `{0}` is already in use")]
    DuplicateLabel(String),
    #[error("curve `{0}` listed twice in one blow-up")]
    RepeatedThrough(String),
    #[error("multiplicity of `{0}` must be at least 1")]
    ZeroMultiplicity(String),
    #[error(
        "`{first}` and `{second}` cannot share the point: pairing {pairing} is below {required}"
    )]
    IncompatibleThrough {
        first: String,
        second: String,
        pairing: BigInt,
        required: BigInt,
    },
    #[error("report basis must be unimodular, determinant is {0}")]
    NotUnimodular(BigInt),
    #[error("report basis has {got} curves, lattice rank is {rank}")]
    ReportBasisSize { got: usize, rank: usize },
    #[error("divisor `{0}` does not have an integral class")]
    NonIntegralClass(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Point to blow up, described by the curves through it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUpSpec {
    pub through: Vec<(String, u32)>,
    pub new_label: String,
}

impl BlowUpSpec {
    pub fn new(new_label: impl Into<String>, through: &[(&str, u32)]) -> Self {
        BlowUpSpec {
            through: through.iter().map(|(l, m)| (l.to_string(), *m)).collect(),
            new_label: new_label.into(),
        }
    }
}

/// Labelled integer or rational combination of named curves.
pub type Combination = IndexMap<String, Rational>;

/// One recorded construction step. Replaying the steps in order rebuilds the
/// model exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Base {
        n: u32,
        section: String,
        fiber: String,
        negative_section: String,
    },
    Curve {
        label: String,
        terms: Vec<(String, BigInt)>,
    },
    BlowUp(BlowUpSpec),
    ReportBasis(Vec<String>),
    Assert(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    basis_labels: Vec<String>,
    form: IntersectionForm,
    curves: IndexMap<String, DivisorClass>,
    assertions: Vec<String>,
    report_basis: Option<Vec<String>>,
    steps: Vec<Step>,
}

/// `𝔽ₙ` with curves `Z{n}` (positive section), `F` (fiber) and `Zneg`.
pub fn hirzebruch(n: u32) -> SurfaceModel {
    hirzebruch_with_labels(n, &format!("Z{n}"), "F", "Zneg")
        .expect("default Hirzebruch labels are distinct")
}

pub fn hirzebruch_with_labels(
    n: u32,
    section: &str,
    fiber: &str,
    negative_section: &str,
) -> Result<SurfaceModel, BuildError> {
    for (i, a) in [section, fiber, negative_section].iter().enumerate() {
        if [section, fiber, negative_section][..i].contains(a) {
            return Err(BuildError::DuplicateLabel(a.to_string()));
        }
    }
    let basis_labels = vec![format!("pullback({section})"), format!("pullback({fiber})")];
    let n_int = BigInt::from(n);
    let matrix = IntMatrix::from_rows(vec![
        vec![n_int.clone(), BigInt::one()],
        vec![BigInt::one(), BigInt::zero()],
    ]);
    let id = BasisId::derive(&basis_labels, &matrix);
    let form = IntersectionForm::new(matrix, id.clone())?;
    let mut curves = IndexMap::new();
    curves.insert(section.to_string(), DivisorClass::from_i64(&[1, 0], id.clone()));
    curves.insert(fiber.to_string(), DivisorClass::from_i64(&[0, 1], id.clone()));
    curves.insert(
        negative_section.to_string(),
        DivisorClass::new(vec![BigInt::one(), -n_int], id),
    );
    Ok(SurfaceModel {
        basis_labels,
        form,
        curves,
        assertions: Vec::new(),
        report_basis: None,
        steps: vec![Step::Base {
            n,
            section: section.to_string(),
            fiber: fiber.to_string(),
            negative_section: negative_section.to_string(),
        }],
    })
}

/// Blows up the point shared by the curves in `spec.through`.
///
/// The pairing of any two listed curves must be at least the product of
/// their multiplicities, since they really do meet there.
pub fn blow_up(model: &SurfaceModel, spec: &BlowUpSpec) -> Result<SurfaceModel, BuildError> {
    if model.curves.contains_key(&spec.new_label) {
        return Err(BuildError::DuplicateLabel(spec.new_label.clone()));
    }
    for (i, (label, mult)) in spec.through.iter().enumerate() {
        if !model.curves.contains_key(label) {
            return Err(BuildError::UnknownLabel(label.clone()));
        }
        if *mult == 0 {
            return Err(BuildError::ZeroMultiplicity(label.clone()));
        }
        if spec.through[..i].iter().any(|(l, _)| l == label) {
            return Err(BuildError::RepeatedThrough(label.clone()));
        }
    }
    for (i, (a, ma)) in spec.through.iter().enumerate() {
        for (b, mb) in &spec.through[i + 1..] {
            let p = model.pairing_of(a, b)?;
            let required = BigInt::from(*ma) * BigInt::from(*mb);
            if p < required {
                return Err(BuildError::IncompatibleThrough {
                    first: a.clone(),
                    second: b.clone(),
                    pairing: p,
                    required,
                });
            }
        }
    }

    let old_rank = model.rank();
    let rank = old_rank + 1;
    let mut basis_labels = model.basis_labels.clone();
    basis_labels.push(format!("exceptional({})", spec.new_label));
    let mut matrix = IntMatrix::zeros(rank, rank);
    for i in 0..old_rank {
        for j in 0..old_rank {
            matrix[(i, j)] = model.form.matrix()[(i, j)].clone();
        }
    }
    matrix[(old_rank, old_rank)] = BigInt::from(-1);
    let id = BasisId::derive(&basis_labels, &matrix);
    let form = IntersectionForm::new(matrix, id.clone())?;

    let through: IndexMap<&str, u32> = spec.through.iter().map(|(l, m)| (l.as_str(), *m)).collect();
    let mut curves: IndexMap<String, DivisorClass> = model
        .curves
        .iter()
        .map(|(label, class)| {
            let mut coeffs = class.coefficients().to_vec();
            coeffs.push(match through.get(label.as_str()) {
                Some(&m) => -BigInt::from(m),
                None => BigInt::zero(),
            });
            (label.clone(), DivisorClass::new(coeffs, id.clone()))
        })
        .collect();
    let mut e = vec![BigInt::zero(); rank];
    e[old_rank] = BigInt::one();
    curves.insert(spec.new_label.clone(), DivisorClass::new(e, id));

    let mut steps = model.steps.clone();
    steps.push(Step::BlowUp(spec.clone()));
    Ok(SurfaceModel {
        basis_labels,
        form,
        curves,
        assertions: model.assertions.clone(),
        report_basis: model.report_basis.clone(),
        steps,
    })
}

/// `pairing(C, C)` for every named curve, in declaration order.
pub fn self_intersections(model: &SurfaceModel) -> IndexMap<String, BigInt> {
    model
        .curves
        .iter()
        .map(|(label, c)| {
            let value = pairing(&model.form, c, c).expect("curves share the model basis");
            (label.clone(), value)
        })
        .collect()
}

impl SurfaceModel {
    pub fn rank(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn basis_id(&self) -> &BasisId {
        self.form.basis()
    }

    pub fn form(&self) -> &IntersectionForm {
        &self.form
    }

    pub fn curves(&self) -> &IndexMap<String, DivisorClass> {
        &self.curves
    }

    pub fn assertions(&self) -> &[String] {
        &self.assertions
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn curve(&self, label: &str) -> Result<&DivisorClass, BuildError> {
        self.curves
            .get(label)
            .ok_or_else(|| BuildError::UnknownLabel(label.to_string()))
    }

    pub fn pairing_of(&self, a: &str, b: &str) -> Result<BigInt, BuildError> {
        Ok(pairing(&self.form, self.curve(a)?, self.curve(b)?)?)
    }

    pub fn pair(&self, u: &DivisorClass, v: &DivisorClass) -> Result<BigInt, BuildError> {
        Ok(pairing(&self.form, u, v)?)
    }

    /// Declares a new named curve with class `Σ cᵢ·[Cᵢ]` of existing curves.
    pub fn with_curve(&self, label: &str, terms: &[(String, BigInt)]) -> Result<SurfaceModel, BuildError> {
        if self.curves.contains_key(label) {
            return Err(BuildError::DuplicateLabel(label.to_string()));
        }
        let mut class = DivisorClass::zero(self.rank(), self.basis_id().clone());
        for (l, c) in terms {
            class = class.checked_add(&self.curve(l)?.scaled(c))?;
        }
        let mut next = self.clone();
        next.curves.insert(label.to_string(), class);
        next.steps.push(Step::Curve {
            label: label.to_string(),
            terms: terms.to_vec(),
        });
        Ok(next)
    }

    pub fn with_assertion(&self, text: &str) -> SurfaceModel {
        let mut next = self.clone();
        next.assertions.push(text.to_string());
        next.steps.push(Step::Assert(text.to_string()));
        next
    }

    /// Sets the basis used for reporting; the curves must form a ℤ-basis.
    pub fn with_report_basis(&self, labels: &[&str]) -> Result<SurfaceModel, BuildError> {
        if labels.len() != self.rank() {
            return Err(BuildError::ReportBasisSize {
                got: labels.len(),
                rank: self.rank(),
            });
        }
        let mut next = self.clone();
        next.report_basis = Some(labels.iter().map(|s| s.to_string()).collect());
        let det = determinant(&next.report_basis_matrix()?);
        if !det.abs().is_one() {
            return Err(BuildError::NotUnimodular(det));
        }
        next.steps
            .push(Step::ReportBasis(next.report_basis.clone().unwrap_or_default()));
        Ok(next)
    }

    /// Labels of the reporting basis; the internal basis labels if none was set.
    pub fn report_labels(&self) -> Vec<String> {
        self.report_basis
            .clone()
            .unwrap_or_else(|| self.basis_labels.clone())
    }

    /// Columns are the report-basis classes in internal coordinates.
    fn report_basis_matrix(&self) -> Result<IntMatrix, BuildError> {
        match &self.report_basis {
            None => Ok(IntMatrix::identity(self.rank())),
            Some(labels) => {
                let cols = labels
                    .iter()
                    .map(|l| self.curve(l).map(|c| c.coefficients()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(IntMatrix::from_columns(self.rank(), &cols))
            }
        }
    }

    /// Gram matrix of the intersection form on the reporting basis.
    pub fn report_gram_matrix(&self) -> IntMatrix {
        let b = self.report_basis_matrix().expect("report basis validated on construction");
        b.transpose().mul(self.form.matrix()).mul(&b)
    }

    /// Coordinates of `class` in the reporting basis.
    pub fn report_coordinates(&self, class: &DivisorClass) -> Result<Vec<BigInt>, BuildError> {
        if class.basis() != self.basis_id() {
            return Err(LatticeError::BasisMismatch {
                left: self.basis_id().clone(),
                right: class.basis().clone(),
            }
            .into());
        }
        let b = self.report_basis_matrix()?;
        Ok(solve_integer_system(&b, class.coefficients())?.particular)
    }

    /// Inverse of [`report_coordinates`](Self::report_coordinates).
    pub fn class_from_report_coordinates(&self, coords: &[BigInt]) -> Result<DivisorClass, BuildError> {
        if coords.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank(),
                got: coords.len(),
            }
            .into());
        }
        let b = self.report_basis_matrix()?;
        Ok(DivisorClass::new(b.mul_vec(coords), self.basis_id().clone()))
    }

    /// Class of `Σ cᵢ·[Cᵢ]`; the result must be an integer vector.
    pub fn class_of(&self, name: &str, combination: &Combination) -> Result<DivisorClass, BuildError> {
        let mut acc = vec![Rational::zero(); self.rank()];
        for (label, c) in combination {
            for (a, x) in acc.iter_mut().zip(self.curve(label)?.coefficients()) {
                *a += c * Rational::from_integer(x.clone());
            }
        }
        if acc.iter().any(|x| !x.is_integer()) {
            return Err(BuildError::NonIntegralClass(name.to_string()));
        }
        let coeffs = acc.into_iter().map(|x| x.to_integer()).collect();
        Ok(DivisorClass::new(coeffs, self.basis_id().clone()))
    }
}
