//! Lattice homology `H(Gamma)`: the box modulo the elementary relations.
//!
//! Type I sends any vector outside the box to zero. Type II identifies `k`
//! with `(-1)^{v^2} (k -+ 2v*)` when `<k, v> = +-v^2`. Every relation has the
//! form `k ~ +-k'` or `k ~ 0`, so the quotient is computed by a signed
//! union-find per orbit and its dimension is the number of surviving classes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{EdgeSign, PlumbingForest};
use crate::form::IntersectionForm;
use crate::lattice::{orbit_decompose, BoxShape, CharVector, OrbitPartition, SpinCOrbit};
use crate::par;
use crate::signed_dsu::SignedDsu;
use crate::Limits;

/// Sign attached to a Type II identification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignRule {
    /// `(-1)^{v^2}`.
    #[default]
    Twisted,
    /// Always `+1`. Used after the change of generators `k -> sigma(k) k`.
    Untwisted,
}

/// Where a box vector lands in the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ClassRef {
    Zero,
    Class {
        orbit: usize,
        /// Index within the orbit.
        class: usize,
        /// `+1` or `-1`, relative to the class representative.
        sign: i8,
    },
}

impl ClassRef {
    pub fn is_zero(&self) -> bool {
        matches!(self, ClassRef::Zero)
    }

    pub fn sign(&self) -> i8 {
        match self {
            ClassRef::Zero => 0,
            ClassRef::Class { sign, .. } => *sign,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitHomology {
    pub orbit: SpinCOrbit,
    pub dim: u64,
    /// Box index of the least member of each class.
    pub representatives: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct HomologyResult {
    forest: PlumbingForest,
    rule: SignRule,
    det: u64,
    partition: OrbitPartition,
    /// Per box index: `+-(c + 1)` for class `c` of its orbit, `0` for zero.
    labels: Vec<i32>,
    per_orbit: Vec<OrbitHomology>,
    offsets: Vec<usize>,
    total_dim: u64,
}

/// The `I#` and `HF-hat` dimensions predicted from `H(Gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DerivedDimensions {
    pub dim_isharp_even: u64,
    pub dim_isharp_odd: u64,
    pub dim_isharp: u64,
    pub dim_hfhat: u64,
    pub is_instanton_lspace: bool,
    /// Set unless the graph was certified almost-rational.
    pub conjectural: bool,
}

pub fn compute_homology(forest: &PlumbingForest, limits: &Limits) -> Result<HomologyResult> {
    compute_homology_with(forest, SignRule::Twisted, limits)
}

pub fn compute_homology_with(
    forest: &PlumbingForest,
    rule: SignRule,
    limits: &Limits,
) -> Result<HomologyResult> {
    let form = forest.intersection_form();
    form.require_negative_definite()?;
    let det = form.abs_det()?;
    let partition = orbit_decompose(&form, limits.box_cap, limits.parallelism)?;
    let shape = &partition.shape;

    let mut position = vec![0u32; partition.orbit_of.len()];
    for members in &partition.members {
        for (p, &idx) in members.iter().enumerate() {
            position[idx as usize] = p as u32;
        }
    }

    let solved = par::try_map(limits.parallelism, &partition.members, |members| {
        orbit_quotient(&form, shape, &partition.orbit_of, &position, members, rule)
    })?;

    let mut labels = vec![0i32; partition.orbit_of.len()];
    let mut per_orbit = Vec::with_capacity(solved.len());
    let mut offsets = Vec::with_capacity(solved.len());
    let mut total_dim = 0u64;
    for (o, (local, reps)) in solved.into_iter().enumerate() {
        for (&idx, &l) in partition.members[o].iter().zip(&local) {
            labels[idx as usize] = l;
        }
        offsets.push(total_dim as usize);
        let dim = reps.len() as u64;
        if dim == 0 {
            return Err(Error::InvariantViolation(format!(
                "orbit {o} has trivial lattice homology"
            )));
        }
        total_dim += dim;
        per_orbit.push(OrbitHomology {
            orbit: partition.orbit(o),
            dim,
            representatives: reps,
        });
    }
    if total_dim < det {
        return Err(Error::NegativeOddDimension { total: total_dim, det });
    }
    Ok(HomologyResult {
        forest: forest.clone(),
        rule,
        det,
        partition,
        labels,
        per_orbit,
        offsets,
        total_dim,
    })
}

/// The Type II target of box vector `k` at vertex `v`, if the relation
/// applies there.
pub fn type2_target(k: &[i64], v: usize, form: &IntersectionForm) -> Option<Vec<i64>> {
    let m = form.forest().framing(v);
    let dir = if k[v] == m {
        -2
    } else if k[v] == -m {
        2
    } else {
        return None;
    };
    Some(
        k.iter()
            .zip(&form.matrix()[v])
            .map(|(e, a)| e + dir * a)
            .collect(),
    )
}

fn orbit_quotient(
    form: &IntersectionForm,
    shape: &BoxShape,
    orbit_of: &[u32],
    position: &[u32],
    members: &[u64],
    rule: SignRule,
) -> Result<(Vec<i32>, Vec<u64>)> {
    let n = form.len();
    let mut dsu = SignedDsu::new(members.len());
    for (p, &idx) in members.iter().enumerate() {
        let k = shape.vector_at(idx);
        for v in 0..n {
            let Some(target) = type2_target(&k.evals, v, form) else {
                continue;
            };
            let negate = rule == SignRule::Twisted && form.forest().framing(v) % 2 != 0;
            match shape.index_of(&target) {
                None => dsu.set_zero(p),
                Some(t) => {
                    if orbit_of[t as usize] != orbit_of[idx as usize] {
                        return Err(Error::InvariantViolation(
                            "Type II relation crossed an orbit".into(),
                        ));
                    }
                    dsu.union(p, position[t as usize] as usize, negate);
                }
            }
        }
    }
    let mut local = dsu.resolve();
    // Normalize so that each class's least member carries sign +1.
    let mut reps = Vec::new();
    let mut flip = Vec::new();
    for (p, &l) in local.iter().enumerate() {
        if l != 0 && l.unsigned_abs() as usize > reps.len() {
            reps.push(members[p]);
            flip.push(l < 0);
        }
    }
    for l in local.iter_mut() {
        if *l != 0 && flip[l.unsigned_abs() as usize - 1] {
            *l = -*l;
        }
    }
    Ok((local, reps))
}

impl HomologyResult {
    pub fn forest(&self) -> &PlumbingForest {
        &self.forest
    }

    pub fn convention(&self) -> EdgeSign {
        self.forest.edge_sign()
    }

    pub fn sign_rule(&self) -> SignRule {
        self.rule
    }

    pub fn total_dim(&self) -> u64 {
        self.total_dim
    }

    /// `|det A|`, also the number of orbits.
    pub fn det(&self) -> u64 {
        self.det
    }

    pub fn per_orbit(&self) -> &[OrbitHomology] {
        &self.per_orbit
    }

    pub fn partition(&self) -> &OrbitPartition {
        &self.partition
    }

    pub fn shape(&self) -> &BoxShape {
        &self.partition.shape
    }

    /// Orbit id of a box vector, or `None` outside the box.
    pub fn orbit_of(&self, k: &CharVector) -> Option<usize> {
        self.shape()
            .index_of(&k.evals)
            .map(|i| self.partition.orbit_of[i as usize] as usize)
    }

    pub fn class_of(&self, k: &CharVector) -> ClassRef {
        match self.shape().index_of(&k.evals) {
            None => ClassRef::Zero,
            Some(i) => self.class_at(i),
        }
    }

    pub fn class_at(&self, index: u64) -> ClassRef {
        let l = self.labels[index as usize];
        if l == 0 {
            return ClassRef::Zero;
        }
        ClassRef::Class {
            orbit: self.partition.orbit_of[index as usize] as usize,
            class: l.unsigned_abs() as usize - 1,
            sign: if l > 0 { 1 } else { -1 },
        }
    }

    /// Position of a class in a basis running over all orbits in order.
    pub fn global_index(&self, c: &ClassRef) -> Option<usize> {
        match *c {
            ClassRef::Zero => None,
            ClassRef::Class { orbit, class, .. } => Some(self.offsets[orbit] + class),
        }
    }

    /// Least member of the class with the given global index.
    pub fn representative(&self, global: usize) -> CharVector {
        // Every orbit has dimension at least one, so offsets are strictly increasing.
        let o = match self.offsets.binary_search(&global) {
            Ok(o) => o,
            Err(o) => o - 1,
        };
        let c = global - self.offsets[o];
        self.shape().vector_at(self.per_orbit[o].representatives[c])
    }

    /// Coordinates of a box vector in the class basis: `+-e_c` or nothing.
    pub fn coordinates(&self, k: &CharVector) -> Option<(usize, i8)> {
        let c = self.class_of(k);
        self.global_index(&c).map(|g| (g, c.sign()))
    }

    pub fn derived_dimensions(&self, certified: bool) -> Result<DerivedDimensions> {
        derived_dimensions(self, certified)
    }
}

pub fn derived_dimensions(h: &HomologyResult, certified: bool) -> Result<DerivedDimensions> {
    let total = h.total_dim;
    let det = h.det;
    if total < det {
        return Err(Error::NegativeOddDimension { total, det });
    }
    Ok(DerivedDimensions {
        dim_isharp_even: total,
        dim_isharp_odd: total - det,
        dim_isharp: 2 * total - det,
        dim_hfhat: 2 * total - det,
        is_instanton_lspace: total == det,
        conjectural: !certified,
    })
}
