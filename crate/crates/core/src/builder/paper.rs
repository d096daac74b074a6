//! The counterexample surface: `𝔽₂` blown up at four points of the
//! positive section, then at the two points where the first two exceptional
//! curves meet the proper transforms of their fibers.

use num_bigint::BigInt;

use super::{blow_up, hirzebruch_with_labels, BlowUpSpec, Combination, SurfaceModel};
use crate::lattice::{DivisorClass, Rational};

/// `[Z̃₂, F̃, Ẽ₁, Ẽ₂, Ẽ₃, Ẽ₄, E₁, E₂]`
pub const PAPER_REPORT_BASIS: [&str; 8] = ["Zt2", "Ft", "Et1", "Et2", "Et3", "Et4", "E1", "E2"];

const TORUS_CURVES: [&str; 12] = [
    "Zt2", "Ztm2", "Et1", "Et2", "Et3", "Et4", "Ft1", "Ft2", "Ft3", "Ft4", "E1", "E2",
];

const AMPLE_CURVES: [&str; 13] = [
    "Zt2", "Ztm2", "Ft", "Et1", "Ft1", "E1", "Et2", "Ft2", "E2", "Et3", "Ft3", "Et4", "Ft4",
];

pub(crate) const SNC_ASSERTION: &str =
    "the torus-invariant curves form a simple normal crossing configuration";
pub(crate) const COMPLETENESS_ASSERTION: &str = "every irreducible curve outside the support of \
     2Zt2+2Ztm2+3Ft+Et1+Ft1+E1+Et2+Ft2+E2 meets that support, so the listed curves suffice for Nakai-Moishezon";
pub(crate) const TORUS_ASSERTION: &str = "the torus-invariant curves are the twelve listed ones plus \
     general fibers, and general fibers can be traded for Et4+Ft4";

/// Torus-invariant curves, in the order used for the alpha computation.
pub fn paper_torus_curves() -> Vec<String> {
    TORUS_CURVES.iter().map(|s| s.to_string()).collect()
}

/// Curves checked by Nakai-Moishezon: the support of the defining divisor
/// of `L` plus the remaining invariant curves.
pub fn paper_ample_curves() -> Vec<String> {
    AMPLE_CURVES.iter().map(|s| s.to_string()).collect()
}

/// Defining divisor `2Z̃₂ + 2Z̃₋₂ + 3F̃ + Ẽ₁ + F̃₁ + E₁ + Ẽ₂ + F̃₂ + E₂` of `L`.
pub fn paper_divisor() -> Combination {
    [
        ("Zt2", 2),
        ("Ztm2", 2),
        ("Ft", 3),
        ("Et1", 1),
        ("Ft1", 1),
        ("E1", 1),
        ("Et2", 1),
        ("Ft2", 1),
        ("E2", 1),
    ]
    .into_iter()
    .map(|(l, c)| (l.to_string(), Rational::from_integer(BigInt::from(c))))
    .collect()
}

/// The surface and the class of its polarization `L`.
pub fn paper_surface() -> (SurfaceModel, DivisorClass) {
    let mut s = hirzebruch_with_labels(2, "Zt2", "Ft", "Ztm2").expect("distinct labels");
    for i in 1..=4 {
        s = s
            .with_curve(&format!("Ft{i}"), &[("Ft".to_string(), BigInt::from(1))])
            .expect("fresh fiber label");
    }
    for i in 1..=4 {
        let fiber = format!("Ft{i}");
        s = blow_up(&s, &BlowUpSpec::new(format!("Et{i}"), &[("Zt2", 1), (fiber.as_str(), 1)]))
            .expect("section meets each fiber once");
    }
    for i in 1..=2 {
        let (e, f) = (format!("Et{i}"), format!("Ft{i}"));
        s = blow_up(&s, &BlowUpSpec::new(format!("E{i}"), &[(e.as_str(), 1), (f.as_str(), 1)]))
            .expect("exceptional curve meets the fiber transform");
    }
    let s = s
        .with_report_basis(&PAPER_REPORT_BASIS)
        .expect("paper basis is unimodular")
        .with_assertion(SNC_ASSERTION)
        .with_assertion(COMPLETENESS_ASSERTION)
        .with_assertion(TORUS_ASSERTION);
    let l = s.class_of("L", &paper_divisor()).expect("integral divisor");
    (s, l)
}
