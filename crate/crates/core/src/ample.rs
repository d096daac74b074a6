//! Nakai-Moishezon positivity check against a declared list of curves.
//!
//! A passing report only certifies ampleness if the curve list is complete,
//! i.e. every irreducible curve not on the list is known to have positive
//! degree. That fact is geometric and is carried as a model assertion.

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::Signed;

use crate::builder::{BuildError, SurfaceModel};
use crate::lattice::DivisorClass;

pub const SELF_INTERSECTION_MARKER: &str = "self-intersection";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplenessReport {
    pub self_intersection: BigInt,
    pub per_curve: IndexMap<String, BigInt>,
    pub verdict: Verdict,
    pub failures: Vec<String>,
    pub assertion_note: String,
}

pub fn nakai_moishezon_check(
    model: &SurfaceModel,
    l: &DivisorClass,
    curve_labels: &[String],
) -> Result<AmplenessReport, BuildError> {
    let self_intersection = model.pair(l, l)?;
    let mut failures = Vec::new();
    if !self_intersection.is_positive() {
        failures.push(SELF_INTERSECTION_MARKER.to_string());
    }
    let mut per_curve = IndexMap::new();
    for label in curve_labels {
        let degree = model.pair(l, model.curve(label)?)?;
        if !degree.is_positive() {
            failures.push(label.clone());
        }
        per_curve.insert(label.clone(), degree);
    }
    let verdict = if failures.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(AmplenessReport {
        self_intersection,
        per_curve,
        verdict,
        failures,
        assertion_note: assertion_note(model),
    })
}

fn assertion_note(model: &SurfaceModel) -> String {
    if model.assertions().is_empty() {
        "no completeness assertion recorded: positivity is verified on the listed curves only".to_string()
    } else {
        format!(
            "ampleness holds only under the recorded assertions: {}",
            model.assertions().join("; ")
        )
    }
}
