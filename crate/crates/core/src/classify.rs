//! Rationality, almost-rationality and the combined report.
//!
//! A negative-definite forest is rational when `chi(x) >= 1` for every
//! `x > 0`. The set `{chi <= 0}` is an ellipsoid, so the test enumerates its
//! non-negative lattice points. The pairing in `chi` uses `+1` edges: with
//! `-1` edges every cross term is non-negative on `x > 0` and the condition
//! holds for every negative-definite forest.

use std::ops::ControlFlow;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::ellipsoid::Ellipsoid;
use crate::error::{Error, Result};
use crate::forest::{EdgeSign, PlumbingForest, SemidefiniteClass};
use crate::form::Definiteness;
use crate::homology::{compute_homology, DerivedDimensions};
use crate::lattice::{chi, LatticeVector};
use crate::moves::convert_convention;
use crate::par;
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalityVerdict {
    pub rational: bool,
    /// Some `x > 0` with `chi(x) <= 0` when not rational.
    pub witness: Option<LatticeVector>,
    pub witness_chi: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AlmostRational {
    /// Lowering the framing of `vertex` by `decrement` gives a rational
    /// forest. `decrement = 0` means the forest is already rational.
    Yes {
        vertex: Option<String>,
        decrement: u32,
    },
    No,
    /// No single-vertex decrement up to `cutoff` worked.
    Unknown { cutoff: u32 },
}

impl AlmostRational {
    pub fn is_yes(&self) -> bool {
        matches!(self, AlmostRational::Yes { .. })
    }
}

pub fn is_rational(forest: &PlumbingForest, limits: &Limits) -> Result<RationalityVerdict> {
    let plus = convert_convention(forest, EdgeSign::PlusOne).forest().clone();
    let form = plus.intersection_form();
    form.require_negative_definite()?;
    let canonical = plus.canonical_class();
    let e = Ellipsoid::new(&form, &canonical.evaluations, 0)?;
    let mut witness = None;
    e.enumerate(true, limits.point_cap, |x| {
        if x.iter().all(|&c| c == 0) {
            return ControlFlow::Continue(());
        }
        witness = Some(LatticeVector::new(x.to_vec()));
        ControlFlow::Break(())
    })?;
    let witness_chi = witness.as_ref().map(|x| chi(x, &canonical, &form));
    debug_assert!(witness_chi.is_none_or(|c| c <= 0));
    Ok(RationalityVerdict {
        rational: witness.is_none(),
        witness,
        witness_chi,
    })
}

fn rational_after_decrement(forest: &PlumbingForest, v: usize, n: u32, limits: &Limits) -> Result<bool> {
    let g = forest.with_framing(v, forest.framing(v) - n as i64);
    Ok(is_rational(&g, limits)?.rational)
}

/// Searches single-vertex framing decrements `1..=limits.nmax`. Rationality
/// is monotone in the decrement, so each vertex is tested at the cutoff
/// first and then bisected to its least working decrement.
pub fn is_almost_rational(forest: &PlumbingForest, limits: &Limits) -> Result<AlmostRational> {
    if is_rational(forest, limits)?.rational {
        return Ok(AlmostRational::Yes {
            vertex: forest.ids().first().cloned(),
            decrement: 0,
        });
    }
    let nmax = limits.nmax;
    let per_vertex = par::try_map(
        limits.parallelism,
        &(0..forest.len()).collect::<Vec<_>>(),
        |&v| -> Result<Option<u32>> {
            if nmax == 0 || !rational_after_decrement(forest, v, nmax, limits)? {
                return Ok(None);
            }
            let (mut lo, mut hi) = (0u32, nmax);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if rational_after_decrement(forest, v, mid, limits)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(Some(hi))
        },
    )?;
    Ok(per_vertex
        .iter()
        .enumerate()
        .find_map(|(v, n)| {
            n.map(|decrement| AlmostRational::Yes {
                vertex: Some(forest.id(v).to_string()),
                decrement,
            })
        })
        .unwrap_or(AlmostRational::Unknown { cutoff: nmax }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub vertices: usize,
    pub edges: usize,
    pub convention: EdgeSign,
    pub determinant: i64,
    pub abs_det: u64,
    pub definiteness: Definiteness,
    pub negdef: bool,
    pub bad_vertex_count: usize,
    pub bad_vertices: Vec<String>,
    /// Only for forests without bad vertices.
    pub semidefinite_class: Option<SemidefiniteClass>,
    pub rational: Option<bool>,
    pub rationality_witness: Option<LatticeVector>,
    pub almost_rational: Option<AlmostRational>,
    pub dim_h: Option<u64>,
    pub dims: Option<DerivedDimensions>,
    /// The Floer dimensions are certified (the forest is almost-rational).
    pub certified: bool,
}

pub fn full_report(forest: &PlumbingForest, limits: &Limits) -> Result<ClassificationReport> {
    let form = forest.intersection_form();
    let determinant = form.determinant().to_i64().ok_or(Error::Overflow)?;
    let bad = forest.bad_vertex_ids();
    let semidefinite_class = forest.semidefinite_classify().ok();
    let mut report = ClassificationReport {
        vertices: forest.len(),
        edges: forest.edges().len(),
        convention: forest.edge_sign(),
        determinant,
        abs_det: determinant.unsigned_abs(),
        definiteness: form.definiteness(),
        negdef: form.is_negative_definite(),
        bad_vertex_count: bad.len(),
        bad_vertices: bad,
        semidefinite_class,
        rational: None,
        rationality_witness: None,
        almost_rational: None,
        dim_h: None,
        dims: None,
        certified: false,
    };
    if !report.negdef {
        return Ok(report);
    }
    let verdict = is_rational(forest, limits)?;
    let ar = is_almost_rational(forest, limits)?;
    let h = compute_homology(forest, limits)?;
    let certified = ar.is_yes();
    if verdict.rational && h.total_dim() != h.det() {
        return Err(Error::InvariantViolation(format!(
            "rational forest has dim H = {} but |det| = {}",
            h.total_dim(),
            h.det()
        )));
    }
    report.rational = Some(verdict.rational);
    report.rationality_witness = verdict.witness;
    report.almost_rational = Some(ar);
    report.dim_h = Some(h.total_dim());
    report.dims = Some(h.derived_dimensions(certified)?);
    report.certified = certified;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::RawForest;

    fn single(m: i64) -> PlumbingForest {
        RawForest::new().vertex("v", m).validate().unwrap()
    }

    fn e8() -> PlumbingForest {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
        PlumbingForest::from_parts(&[-2; 8], &edges, EdgeSign::MinusOne).unwrap()
    }

    fn twin_star(a: i64) -> PlumbingForest {
        PlumbingForest::from_parts(
            &[a, -2, -2, -2, -2, -3],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)],
            EdgeSign::MinusOne,
        )
        .unwrap()
    }

    #[test]
    fn lens_and_e8_are_rational() {
        for p in 1..=8 {
            assert!(is_rational(&single(-p), &Limits::default()).unwrap().rational);
        }
        assert!(is_rational(&e8(), &Limits::default()).unwrap().rational);
    }

    #[test]
    fn twin_star_is_not_rational() {
        let v = is_rational(&twin_star(-2), &Limits::default()).unwrap();
        assert!(!v.rational);
        assert!(v.witness.as_ref().unwrap().is_positive());
        assert!(v.witness_chi.unwrap() <= 0);
    }

    #[test]
    fn twin_star_almost_rational() {
        let ar = is_almost_rational(&twin_star(-2), &Limits::default()).unwrap();
        assert_eq!(
            ar,
            AlmostRational::Yes {
                vertex: Some("v0".into()),
                decrement: 1
            }
        );
        assert!(is_rational(&twin_star(-3), &Limits::default()).unwrap().rational);
    }

    #[test]
    fn e8_almost_rational_trivially() {
        let ar = is_almost_rational(&e8(), &Limits::default()).unwrap();
        assert!(matches!(ar, AlmostRational::Yes { decrement: 0, .. }));
    }

    #[test]
    fn unknown_when_cutoff_is_zero() {
        let limits = Limits {
            nmax: 0,
            ..Limits::default()
        };
        let ar = is_almost_rational(&twin_star(-2), &limits).unwrap();
        assert_eq!(ar, AlmostRational::Unknown { cutoff: 0 });
    }

    #[test]
    fn reports() {
        let r = full_report(&single(-7), &Limits::default()).unwrap();
        assert_eq!(r.dim_h, Some(7));
        assert!(r.dims.unwrap().is_instanton_lspace);
        assert_eq!(r.dims.unwrap().dim_isharp, 7);
        let r = full_report(&e8(), &Limits::default()).unwrap();
        assert_eq!((r.bad_vertex_count, r.rational, r.dim_h), (1, Some(true), Some(1)));
        let r = full_report(&twin_star(-2), &Limits::default()).unwrap();
        assert_eq!(r.bad_vertex_count, 2);
        assert_eq!(r.rational, Some(false));
        assert!(!r.dims.unwrap().is_instanton_lspace);
        assert!(r.certified);
        let r = full_report(&single(1), &Limits::default()).unwrap();
        assert!(!r.negdef && r.dim_h.is_none());
    }
}
