//! Graded lattice cohomology `H+(Gamma, [k0])` at the `H^0` level.
//!
//! The weight `w(x) = -((x, x) + <k0, x>) / 2` is taken in the `+1` edge
//! convention. `S_n = {x : w(x) <= n}` with the cubical structure; only
//! vertices and edges matter for counting components. `U` is restriction
//! `H^0(S_n) -> H^0(S_{n-1})`, so `ker U` has one generator per component
//! of `S_n` that misses `S_{n-1}` (a birth).
//!
//! Every component of `S_n` contains a local minimum of `w`, and local
//! minima are exactly the points `x` with `k0 + 2x*` in the box. A component
//! born at level `n` consists only of weight-`n` local minima, none of which
//! has a lower neighbour. So the births are read off the finite set of local
//! minima first. The sweep then floods outward from the minima level by
//! level, must reproduce those births, and stops at the first level past the
//! last birth with one component: after that, components can only merge.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::forest::{EdgeSign, PlumbingForest};
use crate::form::IntersectionForm;
use crate::homology::compute_homology;
use crate::lattice::{weight, BoxShape, CharVector, LatticeVector, SpinCOrbit};
use crate::moves::convert_convention;
use crate::par;
use crate::Limits;

/// Number of levels swept past stabilization to confirm it.
const CONFIRM_LEVELS: i64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    pub n: i64,
    /// `rank H^0(S_n)`.
    pub components: u64,
    /// Components of `S_n` disjoint from `S_{n-1}`.
    pub births: u64,
    /// `|S_n|`.
    pub points: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradedHPlus {
    pub orbit: SpinCOrbit,
    /// The orbit representative after conversion to the `+1` convention.
    pub k0: CharVector,
    pub levels: Vec<Level>,
    pub ker_u_rank: u64,
    pub stabilized_at: i64,
    pub local_minima: Vec<LatticeVector>,
}

impl GradedHPlus {
    /// One component at every level and a single generator of `ker U`.
    pub fn is_standard_tower(&self) -> bool {
        self.ker_u_rank == 1 && self.levels.iter().all(|l| l.components == 1)
    }
}

struct Dsu {
    parent: Vec<usize>,
    min_level: Vec<i64>,
}

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// Returns true when two distinct components merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
        self.min_level[hi] = self.min_level[hi].min(self.min_level[lo]);
        true
    }
}

/// `x = adj (k - k0) / (2 det)` when it is integral.
fn solve_minimum(adj: &[Vec<BigInt>], det: &BigInt, k: &CharVector, k0: &CharVector) -> Result<Option<LatticeVector>> {
    let half: Vec<BigInt> = k.evals.iter().zip(&k0.evals).map(|(a, b)| BigInt::from((a - b) / 2)).collect();
    let mut x = Vec::with_capacity(half.len());
    for row in adj {
        let s = row.iter().zip(&half).fold(BigInt::zero(), |acc, (a, h)| acc + a * h);
        let (q, r) = s.div_rem(det);
        if !r.is_zero() {
            return Ok(None);
        }
        x.push(q.to_i64().ok_or(Error::Overflow)?);
    }
    Ok(Some(LatticeVector::new(x)))
}

/// Local minima of `w` for base point `k0`: the lattice vectors `x` with
/// `k0 + 2x*` in the box, found by an exact solve for each box vector.
fn local_minima(form: &IntersectionForm, k0: &CharVector, box_cap: u64) -> Result<Vec<LatticeVector>> {
    let shape = BoxShape::checked(form, box_cap)?;
    let (det, adj) = exact::adjugate(form.matrix()).ok_or(Error::NotNegativeDefinite)?;
    let mut out = Vec::new();
    for idx in 0..shape.size() as u64 {
        if let Some(x) = solve_minimum(&adj, &det, &shape.vector_at(idx), k0)? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Box vectors grouped by `adj k mod 2 det`, which is constant exactly on
/// the sets `k0 + 2 L*`. Lets many orbits share one pass over the box.
struct MinimaIndex {
    adj: Vec<Vec<BigInt>>,
    det: BigInt,
    groups: HashMap<Vec<i64>, Vec<CharVector>>,
}

impl MinimaIndex {
    fn key(adj: &[Vec<BigInt>], modulus: &BigInt, k: &CharVector) -> Result<Vec<i64>> {
        adj.iter()
            .map(|row| {
                let s = row.iter().zip(&k.evals).fold(BigInt::zero(), |acc, (a, &e)| acc + a * e);
                s.mod_floor(modulus).to_i64().ok_or(Error::Overflow)
            })
            .collect()
    }

    fn new(form: &IntersectionForm, box_cap: u64) -> Result<Self> {
        let shape = BoxShape::checked(form, box_cap)?;
        let (det, adj) = exact::adjugate(form.matrix()).ok_or(Error::NotNegativeDefinite)?;
        let modulus = &det * 2;
        let mut groups: HashMap<Vec<i64>, Vec<CharVector>> = HashMap::new();
        for idx in 0..shape.size() as u64 {
            let k = shape.vector_at(idx);
            groups.entry(Self::key(&adj, &modulus, &k)?).or_default().push(k);
        }
        Ok(MinimaIndex { adj, det, groups })
    }

    fn minima(&self, k0: &CharVector) -> Result<Vec<LatticeVector>> {
        let key = Self::key(&self.adj, &(&self.det * 2), k0)?;
        let mut out = Vec::new();
        for k in self.groups.get(&key).map(Vec::as_slice).unwrap_or_default() {
            match solve_minimum(&self.adj, &self.det, k, k0)? {
                Some(x) => out.push(x),
                None => return Err(Error::InvariantViolation("minimum key admits a non-integral solve".into())),
            }
        }
        Ok(out)
    }
}

/// Births per level computed from the local minima alone: groups of
/// adjacent equal-weight minima none of whose members has a neighbour that
/// is lower, or equal but not a local minimum.
fn plateau_births<W>(minima: &[LatticeVector], weights: &[i64], w: &W) -> Result<BTreeMap<i64, u64>>
where
    W: Fn(&[i64]) -> Result<i64>,
{
    let index: HashMap<&[i64], usize> = minima
        .iter()
        .enumerate()
        .map(|(i, x)| (x.coords.as_slice(), i))
        .collect();
    let mut dsu = Dsu {
        parent: (0..minima.len()).collect(),
        min_level: weights.to_vec(),
    };
    let mut touches_lower = vec![false; minima.len()];
    for (i, x) in minima.iter().enumerate() {
        let mut y = x.coords.clone();
        for c in 0..y.len() {
            for step in [-1, 1] {
                y[c] += step;
                let wy = w(&y)?;
                if wy < weights[i] {
                    touches_lower[i] = true;
                } else if wy == weights[i] {
                    match index.get(y.as_slice()) {
                        Some(&j) => {
                            dsu.union(i, j);
                        }
                        None => touches_lower[i] = true,
                    }
                }
                y[c] -= step;
            }
        }
    }
    let mut root_lower: HashMap<usize, bool> = HashMap::new();
    for i in 0..minima.len() {
        let r = dsu.find(i);
        *root_lower.entry(r).or_insert(false) |= touches_lower[i];
    }
    let mut out = BTreeMap::new();
    for (r, lower) in root_lower {
        if !lower {
            *out.entry(weights[r]).or_insert(0) += 1;
        }
    }
    Ok(out)
}

pub fn compute_hplus(
    forest: &PlumbingForest,
    orbit: &SpinCOrbit,
    limits: &Limits,
) -> Result<GradedHPlus> {
    hplus_with(forest, orbit, None, limits)
}

fn hplus_with(
    forest: &PlumbingForest,
    orbit: &SpinCOrbit,
    index: Option<&MinimaIndex>,
    limits: &Limits,
) -> Result<GradedHPlus> {
    let change = convert_convention(forest, EdgeSign::PlusOne);
    let plus = change.forest().intersection_form();
    plus.require_negative_definite()?;
    let k0 = change.map(&orbit.representative);
    k0.check_characteristic(&plus)?;
    let n = plus.len();

    let minima = match index {
        Some(ix) => ix.minima(&k0)?,
        None => local_minima(&plus, &k0, limits.box_cap)?,
    };
    if minima.is_empty() {
        return Err(Error::InvariantViolation("orbit has no local minimum".into()));
    }
    let w = |x: &[i64]| weight(&LatticeVector::new(x.to_vec()), &k0, &plus);
    let mut min_weights = Vec::with_capacity(minima.len());
    for x in &minima {
        let wx = w(&x.coords)?;
        let mut y = x.coords.clone();
        for i in 0..n {
            for step in [-1, 1] {
                y[i] += step;
                if w(&y)? < wx {
                    return Err(Error::InvariantViolation(format!(
                        "box-derived point {:?} is not a local minimum",
                        x.coords
                    )));
                }
                y[i] -= step;
            }
        }
        min_weights.push(wx);
    }
    let lowest = *min_weights.iter().min().expect("non-empty");
    let expected_births = plateau_births(&minima, &min_weights, &w)?;
    let last_birth = *expected_births.keys().next_back().expect("some minimum is a birth");

    let mut ids: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: BinaryHeap<Reverse<(i64, Vec<i64>)>> = BinaryHeap::new();
    for (x, &wx) in minima.iter().zip(&min_weights) {
        seen.insert(x.coords.clone());
        queue.push(Reverse((wx, x.coords.clone())));
    }
    let mut dsu = Dsu {
        parent: Vec::new(),
        min_level: Vec::new(),
    };
    let mut components = 0u64;
    let mut levels = Vec::new();
    let mut ker_u_rank = 0u64;
    let mut stabilized_at = None;
    let mut level = lowest;
    loop {
        let mut added_now = Vec::new();
        while let Some(Reverse((wx, _))) = queue.peek() {
            if *wx > level {
                break;
            }
            let Reverse((_, x)) = queue.pop().expect("peeked");
            let id = dsu.parent.len();
            if id as u64 >= limits.point_cap {
                return Err(Error::EnumerationBudgetExceeded {
                    cap: limits.point_cap,
                });
            }
            dsu.parent.push(id);
            dsu.min_level.push(level);
            components += 1;
            added_now.push(id);
            let mut y = x.clone();
            for i in 0..n {
                for step in [-1, 1] {
                    y[i] += step;
                    if let Some(&j) = ids.get(&y) {
                        if dsu.union(id, j) {
                            components -= 1;
                        }
                    } else if !seen.contains(&y) {
                        seen.insert(y.clone());
                        queue.push(Reverse((w(&y)?, y.clone())));
                    }
                    y[i] -= step;
                }
            }
            ids.insert(x, id);
        }
        let mut roots: Vec<usize> = added_now.iter().map(|&i| dsu.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        let births = roots.iter().filter(|&&r| dsu.min_level[r] == level).count() as u64;

        if births != expected_births.get(&level).copied().unwrap_or(0) {
            return Err(Error::InvariantViolation(format!(
                "sweep found {births} births at level {level}, minima predict {}",
                expected_births.get(&level).copied().unwrap_or(0)
            )));
        }
        match stabilized_at {
            None => {
                ker_u_rank += births;
                levels.push(Level {
                    n: level,
                    components,
                    births,
                    points: dsu.parent.len() as u64,
                });
                if level >= last_birth && components == 1 {
                    stabilized_at = Some(level);
                }
            }
            Some(s) => {
                if components != 1 || births != 0 {
                    return Err(Error::InvariantViolation(format!(
                        "sublevel sets changed after stabilizing at level {s}"
                    )));
                }
                levels.push(Level {
                    n: level,
                    components,
                    births,
                    points: dsu.parent.len() as u64,
                });
                if level >= s + CONFIRM_LEVELS {
                    break;
                }
            }
        }
        level += 1;
    }

    Ok(GradedHPlus {
        orbit: orbit.clone(),
        k0,
        levels,
        ker_u_rank,
        stabilized_at: stabilized_at.expect("loop exits after stabilizing"),
        local_minima: minima,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitComparison {
    pub orbit: SpinCOrbit,
    pub homology_dim: u64,
    pub ker_u_rank: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub agrees: bool,
    pub orbits: Vec<OrbitComparison>,
}

/// Compares the per-orbit dimension of `H(Gamma)` with the rank of `ker U`.
pub fn kernel_u_cross_check(forest: &PlumbingForest, limits: &Limits) -> Result<CrossCheck> {
    let h = compute_homology(forest, limits)?;
    let hplus = all_orbits(forest, &h.per_orbit().iter().map(|o| o.orbit.clone()).collect::<Vec<_>>(), limits)?;
    let orbits: Vec<OrbitComparison> = h
        .per_orbit()
        .iter()
        .zip(&hplus)
        .map(|(o, g)| OrbitComparison {
            orbit: o.orbit.clone(),
            homology_dim: o.dim,
            ker_u_rank: g.ker_u_rank,
        })
        .collect();
    Ok(CrossCheck {
        agrees: orbits.iter().all(|o| o.homology_dim == o.ker_u_rank),
        orbits,
    })
}

/// `H+` for every given orbit, concurrently, sharing one pass over the box
/// to find local minima.
pub fn all_orbits(
    forest: &PlumbingForest,
    orbits: &[SpinCOrbit],
    limits: &Limits,
) -> Result<Vec<GradedHPlus>> {
    let plus = convert_convention(forest, EdgeSign::PlusOne).forest().intersection_form();
    plus.require_negative_definite()?;
    let index = MinimaIndex::new(&plus, limits.box_cap)?;
    par::try_map(limits.parallelism, orbits, |o| hplus_with(forest, o, Some(&index), limits))
}

/// Whether every orbit has the cohomology of a single tower with `ker U`
/// of rank one.
pub fn rational_via_hplus(forest: &PlumbingForest, limits: &Limits) -> Result<bool> {
    let h = compute_homology(forest, limits)?;
    let orbits: Vec<SpinCOrbit> = h.per_orbit().iter().map(|o| o.orbit.clone()).collect();
    Ok(all_orbits(forest, &orbits, limits)?
        .iter()
        .all(GradedHPlus::is_standard_tower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipsoid::Ellipsoid;
    use crate::forest::RawForest;
    use std::ops::ControlFlow;

    fn single(m: i64) -> PlumbingForest {
        RawForest::new().vertex("v", m).validate().unwrap()
    }

    fn orbit(evals: Vec<i64>) -> SpinCOrbit {
        SpinCOrbit {
            representative: CharVector::new(evals),
            index: 0,
        }
    }

    fn e8() -> PlumbingForest {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
        PlumbingForest::from_parts(&[-2; 8], &edges, EdgeSign::MinusOne).unwrap()
    }

    #[test]
    fn minus_two_base_zero() {
        let g = compute_hplus(&single(-2), &orbit(vec![0]), &Limits::default()).unwrap();
        assert_eq!(g.ker_u_rank, 1);
        assert_eq!(g.levels[0], Level { n: 0, components: 1, births: 1, points: 1 });
        assert_eq!(g.levels.len(), 1 + CONFIRM_LEVELS as usize);
        assert!(g.is_standard_tower());
    }

    #[test]
    fn minus_two_base_two() {
        let g = compute_hplus(&single(-2), &orbit(vec![2]), &Limits::default()).unwrap();
        assert_eq!(g.ker_u_rank, 1);
        assert_eq!(g.levels[0].n, 0);
        assert_eq!(g.levels[0].components, 1);
        assert_eq!(g.levels[0].points, 2);
    }

    #[test]
    fn e8_single_generator() {
        let g = compute_hplus(&e8(), &orbit(vec![0; 8]), &Limits::default()).unwrap();
        assert_eq!(g.ker_u_rank, 1);
    }

    #[test]
    fn lens_cross_check() {
        let c = kernel_u_cross_check(&single(-5), &Limits::default()).unwrap();
        assert!(c.agrees);
        assert_eq!(c.orbits.len(), 5);
        assert!(c.orbits.iter().all(|o| o.ker_u_rank == 1));
    }

    #[test]
    fn twin_star_cross_check_and_rationality() {
        let f = RawForest::new()
            .vertex("a", -2)
            .vertex("b", -2)
            .vertex("c", -2)
            .vertex("d", -2)
            .vertex("e", -2)
            .vertex("f", -3)
            .edge("a", "b")
            .edge("a", "c")
            .edge("a", "d")
            .edge("b", "e")
            .edge("b", "f")
            .validate()
            .unwrap();
        let c = kernel_u_cross_check(&f, &Limits::default()).unwrap();
        assert!(c.agrees);
        assert_eq!(c.orbits.iter().map(|o| o.ker_u_rank).sum::<u64>(), 5);
        assert!(!rational_via_hplus(&f, &Limits::default()).unwrap());
        assert!(rational_via_hplus(&e8(), &Limits::default()).unwrap());
    }

    #[test]
    fn sublevel_sets_match_ellipsoid_count() {
        let f = PlumbingForest::from_parts(&[-2, -3, -2], &[(0, 1), (1, 2)], EdgeSign::MinusOne)
            .unwrap();
        let h = compute_homology(&f, &Limits::default()).unwrap();
        let plus = convert_convention(&f, EdgeSign::PlusOne).forest().intersection_form();
        for o in h.per_orbit() {
            let g = compute_hplus(&f, &o.orbit, &Limits::default()).unwrap();
            for l in &g.levels {
                let e = Ellipsoid::new(&plus, &g.k0.evals, 2 * l.n).unwrap();
                let mut count = 0u64;
                e.enumerate(false, 1 << 24, |_| {
                    count += 1;
                    ControlFlow::Continue(())
                })
                .unwrap();
                assert_eq!(count, l.points, "level {}", l.n);
            }
        }
    }

    #[test]
    fn point_budget() {
        let f = single(-7);
        let limits = Limits {
            point_cap: 0,
            ..Limits::default()
        };
        let r = compute_hplus(&f, &orbit(vec![1]), &limits);
        assert!(matches!(r, Err(Error::EnumerationBudgetExceeded { .. })));
    }

    #[test]
    fn shared_index_matches_direct_search() {
        let f = PlumbingForest::from_parts(
            &[-2, -2, -3, -2, -2, -3],
            &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)],
            EdgeSign::MinusOne,
        )
        .unwrap();
        let h = compute_homology(&f, &Limits::default()).unwrap();
        let orbits: Vec<SpinCOrbit> = h.per_orbit().iter().map(|o| o.orbit.clone()).collect();
        let shared = all_orbits(&f, &orbits, &Limits::default()).unwrap();
        for (o, s) in orbits.iter().zip(&shared) {
            let d = compute_hplus(&f, o, &Limits::default()).unwrap();
            assert_eq!(d.local_minima, s.local_minima);
            assert_eq!(d.levels, s.levels);
        }
    }
}
