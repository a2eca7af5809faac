//! Lattice homology of negative-definite plumbing forests.
//!
//! The crate is organised bottom-up:
//!
//! - [`forest`] and [`form`]: plumbing forests, their intersection forms,
//!   canonical class and bad-vertex data.
//! - [`lattice`]: characteristic vectors, the finite box of potential
//!   generators, spin^c orbits, the weight function and the lattice/orbit
//!   correspondence.
//! - [`homology`]: the lattice homology group as a signed union-find quotient
//!   of the box, per orbit, with the derived Floer dimensions.
//! - [`hplus`]: graded lattice cohomology from cubical sublevel sets, used as
//!   an independent check on [`homology`].
//! - [`moves`]: surgery-triple maps, blow-down maps and edge-sign convention
//!   changes, with executable exactness and invariance checks.
//! - [`classify`]: rationality, almost-rationality and the full report.
//! - [`seifert`]: Seifert invariants to star-shaped plumbings.
//! - [`format`]: the text and JSON plumbing file formats.
//!
//! All arithmetic is exact. Data-parallel loops run on rayon when the
//! `parallel` feature is enabled and [`Parallelism::Parallel`] is requested;
//! otherwise they fall back to plain iterators with identical results.

pub mod classify;
pub mod ellipsoid;
pub mod error;
pub mod exact;
pub mod forest;
pub mod form;
pub mod format;
pub mod homology;
pub mod hplus;
pub mod lattice;
pub mod moves;
pub mod par;
pub mod random;
pub mod seifert;
pub mod signed_dsu;

pub use classify::{
    full_report, is_almost_rational, is_rational, AlmostRational, ClassificationReport,
    RationalityVerdict,
};
pub use error::{Error, ForestError, Result};
pub use forest::{EdgeSign, PlumbingForest, RawForest, SemidefiniteClass};
pub use form::{CanonicalClass, Definiteness, IntersectionForm};
pub use homology::{compute_homology, ClassRef, DerivedDimensions, HomologyResult, SignRule};
pub use hplus::{compute_hplus, kernel_u_cross_check, rational_via_hplus, GradedHPlus};
pub use lattice::{CharVector, LatticeVector, SpinCOrbit};
pub use par::Parallelism;
pub use seifert::{seifert_to_plumbing, SeifertData};

/// Resource limits shared by the enumeration-heavy operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of box vectors (characteristic vectors with
    /// `m(v) <= <k,v> <= -m(v)`) an operation may enumerate.
    pub box_cap: u64,
    /// Maximum number of lattice points visited by sublevel-set and
    /// rationality enumerations.
    pub point_cap: u64,
    /// Largest framing decrement tried by the almost-rationality search.
    pub nmax: u32,
    pub parallelism: Parallelism,
}

impl Limits {
    pub const DEFAULT_BOX_CAP: u64 = 100_000_000;
    pub const DEFAULT_POINT_CAP: u64 = 10_000_000;
    pub const DEFAULT_NMAX: u32 = 64;

    pub fn sequential() -> Self {
        Limits {
            parallelism: Parallelism::Sequential,
            ..Limits::default()
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            box_cap: Self::DEFAULT_BOX_CAP,
            point_cap: Self::DEFAULT_POINT_CAP,
            nmax: Self::DEFAULT_NMAX,
            parallelism: Parallelism::default(),
        }
    }
}
