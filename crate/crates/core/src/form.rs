//! The intersection form of a plumbing forest and its canonical class.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::forest::PlumbingForest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    NegativeDefinite,
    NegativeSemidefinite,
    Indefinite,
}

/// Exact intersection matrix with its determinant and definiteness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionForm {
    forest: PlumbingForest,
    matrix: Vec<Vec<i64>>,
    determinant: BigInt,
    definiteness: Definiteness,
}

impl IntersectionForm {
    pub fn new(forest: &PlumbingForest) -> Self {
        let matrix = forest.matrix();
        let determinant = exact::determinant(&matrix);
        let definiteness = if exact::is_negative_definite(&matrix) {
            Definiteness::NegativeDefinite
        } else if exact::is_negative_semidefinite(&matrix) {
            Definiteness::NegativeSemidefinite
        } else {
            Definiteness::Indefinite
        };
        IntersectionForm {
            forest: forest.clone(),
            matrix,
            determinant,
            definiteness,
        }
    }

    pub fn forest(&self) -> &PlumbingForest {
        &self.forest
    }

    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn determinant(&self) -> &BigInt {
        &self.determinant
    }

    /// `|det A|`, the order of `H_1` of the boundary.
    pub fn abs_det(&self) -> Result<u64> {
        self.determinant.abs().to_u64().ok_or(Error::Overflow)
    }

    pub fn definiteness(&self) -> Definiteness {
        self.definiteness
    }

    pub fn is_negative_definite(&self) -> bool {
        self.definiteness == Definiteness::NegativeDefinite
    }

    pub fn require_negative_definite(&self) -> Result<()> {
        if self.is_negative_definite() {
            Ok(())
        } else {
            Err(Error::NotNegativeDefinite)
        }
    }

    pub fn leading_minors(&self) -> Vec<BigInt> {
        exact::leading_principal_minors(&self.matrix)
    }

    /// `A x`, the evaluations of the Poincare dual `x*` on the basis.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `(x, y)`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> i64 {
        self.apply(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }
}

/// The canonical class, `<K, v> = -m(v) - 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalClass {
    pub evaluations: Vec<i64>,
}

impl CanonicalClass {
    pub fn of(forest: &PlumbingForest) -> Self {
        CanonicalClass {
            evaluations: forest.framings().iter().map(|&m| -m - 2).collect(),
        }
    }
}

impl PlumbingForest {
    pub fn intersection_form(&self) -> IntersectionForm {
        IntersectionForm::new(self)
    }

    pub fn canonical_class(&self) -> CanonicalClass {
        CanonicalClass::of(self)
    }
}
