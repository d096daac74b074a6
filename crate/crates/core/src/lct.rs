//! Log canonical thresholds of normal-crossing ℚ-divisors.
//!
//! For `D = Σ aᵢDᵢ` with simple normal crossing support the threshold is
//! `1 / max aᵢ`. The crossing condition itself is not checked here; callers
//! rely on the assertion recorded with the surface model.

use std::fmt;

use indexmap::IndexMap;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lattice::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LctError {
    #[error("coefficient of `{label}` is negative ({value})")]
    NegativeCoefficient { label: String, value: Rational },
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(Rational),
}

/// Nonnegative rational combination of labelled curves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EffectiveDivisor {
    coefficients: IndexMap<String, Rational>,
}

impl EffectiveDivisor {
    pub fn new(coefficients: IndexMap<String, Rational>) -> Result<Self, LctError> {
        if let Some((label, value)) = coefficients.iter().find(|(_, v)| v.is_negative()) {
            return Err(LctError::NegativeCoefficient {
                label: label.clone(),
                value: value.clone(),
            });
        }
        Ok(EffectiveDivisor { coefficients })
    }

    pub fn from_pairs<L: Into<String>>(
        pairs: impl IntoIterator<Item = (L, Rational)>,
    ) -> Result<Self, LctError> {
        EffectiveDivisor::new(pairs.into_iter().map(|(l, c)| (l.into(), c)).collect())
    }

    pub fn coefficients(&self) -> &IndexMap<String, Rational> {
        &self.coefficients
    }

    pub fn get(&self, label: &str) -> Option<&Rational> {
        self.coefficients.get(label)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(Zero::is_zero)
    }

    /// Largest coefficient and the first label attaining it.
    pub fn max_coefficient(&self) -> Option<(&str, &Rational)> {
        let mut best: Option<(&str, &Rational)> = None;
        for (label, c) in &self.coefficients {
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((label, c));
            }
        }
        best
    }
}

/// Threshold value; the zero divisor has threshold `+∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LctValue {
    Finite(Rational),
    Infinity,
}

impl LctValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            LctValue::Finite(v) => Some(v),
            LctValue::Infinity => None,
        }
    }
}

impl fmt::Display for LctValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LctValue::Finite(v) => write!(f, "{v}"),
            LctValue::Infinity => f.write_str("inf"),
        }
    }
}

pub fn lct_snc(divisor: &EffectiveDivisor) -> LctValue {
    match divisor.max_coefficient() {
        Some((_, m)) if m.is_positive() => LctValue::Finite(m.recip()),
        _ => LctValue::Infinity,
    }
}

pub fn scale(divisor: &EffectiveDivisor, c: &Rational) -> Result<EffectiveDivisor, LctError> {
    if !c.is_positive() {
        return Err(LctError::NonPositiveScale(c.clone()));
    }
    Ok(EffectiveDivisor {
        coefficients: divisor
            .coefficients
            .iter()
            .map(|(l, a)| (l.clone(), a * c))
            .collect(),
    })
}
