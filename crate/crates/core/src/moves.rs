//! Graph moves and the maps they induce on lattice homology: the surgery
//! triple maps `A`, `B`, `S`, the blow-down isomorphisms `F`, `G`, and the
//! change of edge-sign convention.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::forest::{EdgeSign, PlumbingForest};
use crate::homology::{compute_homology, ClassRef, HomologyResult};
use crate::lattice::CharVector;
use crate::Limits;

/// A finite rational combination of characteristic vectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<CharVector, BigRational>,
}

impl FormalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(coeff: BigRational, k: CharVector) -> Self {
        let mut s = Self::new();
        s.add(coeff, k);
        s
    }

    pub fn add(&mut self, coeff: BigRational, k: CharVector) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn extend(&mut self, other: &FormalSum) {
        for (k, c) in &other.terms {
            self.add(c.clone(), k.clone());
        }
    }

    pub fn scaled(&self, f: &BigRational) -> FormalSum {
        let mut out = FormalSum::new();
        for (k, c) in &self.terms {
            out.add(c * f, k.clone());
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CharVector, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Image in the class basis of `h`; out-of-box terms vanish.
    pub fn project(&self, h: &HomologyResult) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); h.total_dim() as usize];
        for (k, c) in &self.terms {
            if let Some((g, s)) = h.coordinates(k) {
                if s > 0 {
                    out[g] += c;
                } else {
                    out[g] -= c;
                }
            }
        }
        out
    }
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// The graphs `Gamma - v`, `Gamma` and `Gamma_{+1}` (framing of `v` raised
/// by one), all negative-definite.
#[derive(Debug, Clone)]
pub struct SurgeryTriple {
    vertex: usize,
    minus: PlumbingForest,
    base: PlumbingForest,
    plus: PlumbingForest,
}

impl SurgeryTriple {
    pub fn new(base: &PlumbingForest, vertex: usize) -> Result<Self> {
        if vertex >= base.len() {
            return Err(Error::InvalidTriple(format!("no vertex with index {vertex}")));
        }
        let plus = base.with_framing(vertex, base.framing(vertex) + 1);
        let minus = base.without_vertex(vertex);
        for (name, g) in [("Gamma", base), ("Gamma_{+1}", &plus)] {
            if !g.intersection_form().is_negative_definite() {
                return Err(Error::InvalidTriple(format!("{name} is not negative-definite")));
            }
        }
        Ok(SurgeryTriple {
            vertex,
            minus,
            base: base.clone(),
            plus,
        })
    }

    pub fn by_id(base: &PlumbingForest, id: &str) -> Result<Self> {
        Self::new(base, base.index_of(id)?)
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn vertex_id(&self) -> &str {
        self.base.id(self.vertex)
    }

    pub fn minus(&self) -> &PlumbingForest {
        &self.minus
    }

    pub fn base(&self) -> &PlumbingForest {
        &self.base
    }

    pub fn plus(&self) -> &PlumbingForest {
        &self.plus
    }

    /// `p = -v^2` in `Gamma`.
    pub fn p(&self) -> i64 {
        -self.base.framing(self.vertex)
    }

    /// The vector on `Gamma` agreeing with `k` off `v` and taking `i` at `v`.
    fn extend(&self, k: &[i64], i: i64) -> CharVector {
        let mut e = Vec::with_capacity(k.len() + 1);
        e.extend_from_slice(&k[..self.vertex]);
        e.push(i);
        e.extend_from_slice(&k[self.vertex..]);
        CharVector::new(e)
    }

    fn shifted(&self, k: &[i64], delta: i64) -> CharVector {
        let mut e = k.to_vec();
        e[self.vertex] += delta;
        CharVector::new(e)
    }

    /// `A(k) = sum_{|i| <= p, i = p mod 2} k'_i` for `k` on `Gamma - v`.
    pub fn map_a(&self, k: &CharVector) -> FormalSum {
        let p = self.p();
        let mut s = FormalSum::new();
        for i in (-p..=p).step_by(2) {
            s.add(BigRational::one(), self.extend(&k.evals, i));
        }
        s
    }

    /// `B(k) = -k^+ / 2 + k^- / 2` for `k` on `Gamma`.
    pub fn map_b(&self, k: &CharVector) -> FormalSum {
        let mut s = FormalSum::new();
        s.add(-half(), self.shifted(&k.evals, 1));
        s.add(half(), self.shifted(&k.evals, -1));
        s
    }

    /// `S(k) = 2 sum_{i = <k,v>+1, step 2}^{p} k'_i` for `k` on `Gamma_{+1}`.
    pub fn map_s(&self, k: &CharVector) -> FormalSum {
        let p = self.p();
        let a = k.evals[self.vertex];
        let mut s = FormalSum::new();
        let mut i = a + 1;
        while i <= p {
            s.add(int(2), self.shifted(&k.evals, i - a));
            i += 2;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub vertex: String,
    pub dim_minus: u64,
    pub dim_base: u64,
    pub dim_plus: u64,
    pub rank_a: usize,
    pub rank_b: usize,
    pub a_well_defined: bool,
    pub b_well_defined: bool,
    pub b_surjective: bool,
    pub ba_zero: bool,
    pub ker_b_equals_im_a: bool,
    pub bs_identity: bool,
    pub sb_identity_mod_im_a: bool,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.a_well_defined
            && self.b_well_defined
            && self.b_surjective
            && self.ba_zero
            && self.ker_b_equals_im_a
            && self.bs_identity
            && self.sb_identity_mod_im_a
    }
}

/// Columns of a map in class bases, checked against every box vector: each
/// member of a class must map to the class image times its sign, and
/// members of the zero class must map to zero.
pub fn induced_matrix<F>(src: &HomologyResult, dst: &HomologyResult, f: F) -> (Vec<Vec<BigRational>>, bool)
where
    F: Fn(&CharVector) -> FormalSum,
{
    let dim = src.total_dim() as usize;
    let mut cols: Vec<Option<Vec<BigRational>>> = vec![None; dim];
    let mut ok = true;
    let shape = src.shape();
    for idx in 0..shape.size() as u64 {
        let k = shape.vector_at(idx);
        let image = f(&k).project(dst);
        let c = src.class_at(idx);
        match src.global_index(&c) {
            None => ok &= image.iter().all(Zero::is_zero),
            Some(g) => {
                let signed: Vec<BigRational> = if c.sign() > 0 {
                    image
                } else {
                    image.into_iter().map(|x| -x).collect()
                };
                match &cols[g] {
                    None => cols[g] = Some(signed),
                    Some(col) => ok &= *col == signed,
                }
            }
        }
    }
    let cols = cols
        .into_iter()
        .map(|c| c.expect("every class has a box member"))
        .collect();
    (cols, ok)
}

/// Columns of a map evaluated on class representatives only.
fn on_representatives<F>(src: &HomologyResult, dst: &HomologyResult, f: F) -> Vec<Vec<BigRational>>
where
    F: Fn(&CharVector) -> FormalSum,
{
    (0..src.total_dim() as usize)
        .map(|g| f(&src.representative(g)).project(dst))
        .collect()
}

/// `(X Y)` for column-major matrices: `X` has columns in the target of `Y`.
fn compose(x: &[Vec<BigRational>], y: &[Vec<BigRational>], rows: usize) -> Vec<Vec<BigRational>> {
    y.iter()
        .map(|ycol| {
            let mut out = vec![BigRational::zero(); rows];
            for (j, c) in ycol.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (o, a) in out.iter_mut().zip(&x[j]) {
                    *o += c * a;
                }
            }
            out
        })
        .collect()
}

fn rank_of(cols: &[Vec<BigRational>]) -> usize {
    // Rank of a matrix equals that of its transpose.
    exact::rank(cols)
}

pub fn check_exactness(triple: &SurgeryTriple, limits: &Limits) -> Result<ExactnessReport> {
    let h_minus = compute_homology(triple.minus(), limits)?;
    let h_base = compute_homology(triple.base(), limits)?;
    let h_plus = compute_homology(triple.plus(), limits)?;
    let (a, a_ok) = induced_matrix(&h_minus, &h_base, |k| triple.map_a(k));
    let (b, b_ok) = induced_matrix(&h_base, &h_plus, |k| triple.map_b(k));
    let s = on_representatives(&h_plus, &h_base, |k| triple.map_s(k));

    let (d_minus, d_base, d_plus) = (
        h_minus.total_dim(),
        h_base.total_dim(),
        h_plus.total_dim(),
    );
    let rank_a = rank_of(&a);
    let rank_b = rank_of(&b);
    let ba = compose(&b, &a, d_plus as usize);
    let bs = compose(&b, &s, d_plus as usize);
    let bs_identity = bs.iter().enumerate().all(|(j, col)| {
        col.iter()
            .enumerate()
            .all(|(i, x)| *x == if i == j { BigRational::one() } else { BigRational::zero() })
    });
    let mut sb = compose(&s, &b, d_base as usize);
    for (j, col) in sb.iter_mut().enumerate() {
        col[j] -= BigRational::one();
    }
    let mut stacked = a.clone();
    stacked.extend(sb);
    Ok(ExactnessReport {
        vertex: triple.vertex_id().to_string(),
        dim_minus: d_minus,
        dim_base: d_base,
        dim_plus: d_plus,
        rank_a,
        rank_b,
        a_well_defined: a_ok,
        b_well_defined: b_ok,
        b_surjective: rank_b as u64 == d_plus,
        ba_zero: ba.iter().flatten().all(Zero::is_zero),
        ker_b_equals_im_a: d_base - rank_b as u64 == rank_a as u64,
        bs_identity,
        sb_identity_mod_im_a: rank_of(&stacked) == rank_a,
    })
}

/// Outcome of blowing down a `-1` leaf or isolated `-1` vertex.
#[derive(Debug, Clone, Serialize)]
pub struct BlowDown {
    #[serde(skip)]
    pub result: PlumbingForest,
    pub removed: String,
    pub neighbor: Option<String>,
    pub dim_before: u64,
    pub dim_after: u64,
    /// Image `(class, sign)` of each source class under `G F`.
    pub class_map: Vec<(usize, i8)>,
    /// Target orbit of each source orbit.
    pub orbit_map: Vec<usize>,
    pub well_defined: bool,
    pub is_signed_permutation: bool,
    pub orbits_bijective: bool,
    pub per_orbit_dims_match: bool,
}

impl BlowDown {
    pub fn is_isomorphism(&self) -> bool {
        self.well_defined
            && self.is_signed_permutation
            && self.orbits_bijective
            && self.per_orbit_dims_match
            && self.dim_before == self.dim_after
    }
}

/// `Gamma'` with `x` removed and its neighbour's framing raised by one.
pub fn blow_down_graph(forest: &PlumbingForest, x: usize) -> Result<(PlumbingForest, Option<usize>)> {
    let id = forest.id(x).to_string();
    if forest.framing(x) != -1 {
        return Err(Error::NotBlowdownable {
            id,
            reason: format!("framing is {}, not -1", forest.framing(x)),
        });
    }
    match forest.neighbors(x) {
        [] => Ok((forest.without_vertex(x), None)),
        [v] => {
            let v = *v;
            let after = if v > x { v - 1 } else { v };
            let g = forest.without_vertex(x);
            let m = g.framing(after);
            Ok((g.with_framing(after, m + 1), Some(v)))
        }
        ns => Err(Error::NotBlowdownable {
            id,
            reason: format!("degree {} is more than 1", ns.len()),
        }),
    }
}

/// `F`: evaluations after the basis change `v -> v + s x` (`s` the edge
/// value), leaving `x` in place. Returns `(k restricted, <k, x>)`.
pub fn map_f(forest: &PlumbingForest, x: usize, k: &CharVector) -> (CharVector, i64) {
    let s = forest.edge_sign().value();
    let kx = k.evals[x];
    let mut out = k.evals.clone();
    if let [v] = forest.neighbors(x) {
        out[*v] += s * kx;
    }
    out.remove(x);
    (CharVector::new(out), kx)
}

/// Inverse of [`map_f`].
pub fn map_f_inverse(forest: &PlumbingForest, x: usize, k: &CharVector, kx: i64) -> CharVector {
    let s = forest.edge_sign().value();
    let mut out = k.evals.clone();
    out.insert(x, kx);
    if let [v] = forest.neighbors(x) {
        out[*v] -= s * kx;
    }
    CharVector::new(out)
}

/// `G F (k)`: the restriction, with sign `<k, x>` when that is `+-1`.
pub fn map_gf(forest: &PlumbingForest, x: usize, k: &CharVector) -> FormalSum {
    let (restricted, kx) = map_f(forest, x, k);
    match kx {
        1 => FormalSum::single(BigRational::one(), restricted),
        -1 => FormalSum::single(-BigRational::one(), restricted),
        _ => FormalSum::new(),
    }
}

pub fn blow_down(forest: &PlumbingForest, x: usize, limits: &Limits) -> Result<BlowDown> {
    let (result, neighbor) = blow_down_graph(forest, x)?;
    let before = compute_homology(forest, limits)?;
    let after = compute_homology(&result, limits)?;
    let (cols, well_defined) = induced_matrix(&before, &after, |k| map_gf(forest, x, k));
    let class_map = signed_entries(&cols);
    let is_signed_permutation = is_signed_permutation(&class_map, after.total_dim() as usize);

    let orbit_of_class = |h: &HomologyResult, g: usize| {
        h.orbit_of(&h.representative(g)).expect("representative lies in the box")
    };
    let mut orbit_map = vec![usize::MAX; before.per_orbit().len()];
    let mut consistent = true;
    for (g, &(t, _)) in class_map.iter().enumerate() {
        if t == usize::MAX {
            consistent = false;
            continue;
        }
        let (so, to) = (orbit_of_class(&before, g), orbit_of_class(&after, t));
        if orbit_map[so] == usize::MAX {
            orbit_map[so] = to;
        } else {
            consistent &= orbit_map[so] == to;
        }
    }
    let mut targets = orbit_map.clone();
    targets.sort_unstable();
    targets.dedup();
    let orbits_bijective = consistent
        && !orbit_map.contains(&usize::MAX)
        && targets.len() == orbit_map.len()
        && orbit_map.len() == after.per_orbit().len();
    let per_orbit_dims_match = orbits_bijective
        && orbit_map
            .iter()
            .enumerate()
            .all(|(s, &t)| before.per_orbit()[s].dim == after.per_orbit()[t].dim);

    Ok(BlowDown {
        removed: forest.id(x).to_string(),
        neighbor: neighbor.map(|v| forest.id(v).to_string()),
        dim_before: before.total_dim(),
        dim_after: after.total_dim(),
        result,
        class_map,
        orbit_map,
        well_defined,
        is_signed_permutation,
        orbits_bijective,
        per_orbit_dims_match,
    })
}

/// For each column, its single `+-1` entry, or `usize::MAX` otherwise.
fn signed_entries(cols: &[Vec<BigRational>]) -> Vec<(usize, i8)> {
    cols.iter()
        .map(|col| {
            let nz: Vec<usize> = (0..col.len()).filter(|&i| !col[i].is_zero()).collect();
            match nz.as_slice() {
                [i] if col[*i].abs().is_one() => (*i, if col[*i].is_positive() { 1 } else { -1 }),
                _ => (usize::MAX, 0),
            }
        })
        .collect()
}

fn is_signed_permutation(entries: &[(usize, i8)], target_dim: usize) -> bool {
    if entries.len() != target_dim {
        return false;
    }
    let mut hit = vec![false; target_dim];
    for &(t, _) in entries {
        if t == usize::MAX || hit[t] {
            return false;
        }
        hit[t] = true;
    }
    true
}

/// Transport between edge-sign conventions: the bar map negates evaluations
/// on one side of a bipartition.
#[derive(Debug, Clone)]
pub struct ConventionChange {
    forest: PlumbingForest,
    negated: Vec<bool>,
}

impl ConventionChange {
    pub fn forest(&self) -> &PlumbingForest {
        &self.forest
    }

    pub fn negated(&self) -> &[bool] {
        &self.negated
    }

    pub fn map(&self, k: &CharVector) -> CharVector {
        CharVector::new(
            k.evals
                .iter()
                .zip(&self.negated)
                .map(|(&e, &n)| if n { -e } else { e })
                .collect(),
        )
    }
}

pub fn convert_convention(forest: &PlumbingForest, target: EdgeSign) -> ConventionChange {
    if forest.edge_sign() == target {
        return ConventionChange {
            forest: forest.clone(),
            negated: vec![false; forest.len()],
        };
    }
    ConventionChange {
        forest: forest.with_edge_sign(target),
        negated: forest.bipartition(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConventionReport {
    pub dim_before: u64,
    pub dim_after: u64,
    pub per_orbit_dims_match: bool,
    /// The bar map is a signed bijection on classes.
    pub classes_match: bool,
}

impl ConventionReport {
    pub fn is_invariant(&self) -> bool {
        self.dim_before == self.dim_after && self.per_orbit_dims_match && self.classes_match
    }
}

pub fn check_convention_invariance(forest: &PlumbingForest, limits: &Limits) -> Result<ConventionReport> {
    let change = convert_convention(forest, forest.edge_sign().flipped());
    let before = compute_homology(forest, limits)?;
    let after = compute_homology(change.forest(), limits)?;
    let (cols, ok) = induced_matrix(&before, &after, |k| FormalSum::single(BigRational::one(), change.map(k)));
    let entries = signed_entries(&cols);
    let classes_match = ok && is_signed_permutation(&entries, after.total_dim() as usize);
    let per_orbit_dims_match = before.per_orbit().len() == after.per_orbit().len()
        && before.per_orbit().iter().all(|o| {
            after
                .orbit_of(&change.map(&o.orbit.representative))
                .is_some_and(|t| after.per_orbit()[t].dim == o.dim)
        });
    Ok(ConventionReport {
        dim_before: before.total_dim(),
        dim_after: after.total_dim(),
        per_orbit_dims_match,
        classes_match,
    })
}

/// Whether `class_of` agrees with a [`ClassRef`] up to the given sign.
pub fn same_class(a: &ClassRef, b: &ClassRef, sign: i8) -> bool {
    match (a, b) {
        (ClassRef::Zero, ClassRef::Zero) => true,
        (
            ClassRef::Class { orbit: o1, class: c1, sign: s1 },
            ClassRef::Class { orbit: o2, class: c2, sign: s2 },
        ) => o1 == o2 && c1 == c2 && *s1 == s2 * sign,
        _ => false,
    }
}
