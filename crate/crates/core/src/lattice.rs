//! Characteristic vectors, the box of potential generators, spin^c orbits
//! and the weight function.
//!
//! A characteristic vector `k` is stored by its evaluations `<k, v_i>` on the
//! vertex basis; a lattice vector `x` by its coordinates in that basis. The
//! box is the finite set of characteristic `k` with
//! `m(v_i) <= <k, v_i> <= -m(v_i)` for every vertex.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::form::{CanonicalClass, IntersectionForm};
use crate::par::{self, Parallelism};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CharVector {
    pub evals: Vec<i64>,
}

impl CharVector {
    pub fn new(evals: Vec<i64>) -> Self {
        CharVector { evals }
    }

    pub fn len(&self) -> usize {
        self.evals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evals.is_empty()
    }

    /// `<k, v_i> = m(v_i) mod 2` for every vertex.
    pub fn check_characteristic(&self, form: &IntersectionForm) -> Result<()> {
        let m = form.forest().framings();
        if self.evals.len() != m.len() {
            return Err(Error::DimensionMismatch {
                expected: m.len(),
                got: self.evals.len(),
            });
        }
        match (0..m.len()).find(|&i| (self.evals[i] - m[i]).rem_euclid(2) != 0) {
            Some(vertex) => Err(Error::NotCharacteristic { vertex }),
            None => Ok(()),
        }
    }

    /// `<k, x>`.
    pub fn eval(&self, x: &LatticeVector) -> i64 {
        self.evals.iter().zip(&x.coords).map(|(a, b)| a * b).sum()
    }
}

impl From<Vec<i64>> for CharVector {
    fn from(evals: Vec<i64>) -> Self {
        CharVector { evals }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct LatticeVector {
    pub coords: Vec<i64>,
}

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector { coords }
    }

    pub fn zero(n: usize) -> Self {
        LatticeVector { coords: vec![0; n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = vec![0; n];
        coords[i] = 1;
        LatticeVector { coords }
    }

    /// `x > 0`: non-zero with non-negative coordinates.
    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0) && self.coords.iter().any(|&c| c > 0)
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(coords: Vec<i64>) -> Self {
        LatticeVector { coords }
    }
}

/// A spin^c orbit `[k]`, named by its lexicographically least box member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SpinCOrbit {
    pub representative: CharVector,
    pub index: usize,
}

/// Evaluations of the Poincare dual `x*`, i.e. `A x`.
pub fn pd_dual(x: &LatticeVector, form: &IntersectionForm) -> CharVector {
    CharVector::new(form.apply(&x.coords))
}

/// `chi(x) = -(<K, x> + (x, x)) / 2`.
pub fn chi(x: &LatticeVector, canonical: &CanonicalClass, form: &IntersectionForm) -> i64 {
    let kx: i64 = canonical
        .evaluations
        .iter()
        .zip(&x.coords)
        .map(|(a, b)| a * b)
        .sum();
    let total = kx + form.pair(&x.coords, &x.coords);
    debug_assert!(total % 2 == 0, "K is characteristic");
    -total / 2
}

/// `w(x) = -((x, x) + <k0, x>) / 2`, with `(.,.)` taken from `form`.
///
/// The graded cohomology computations pass the `+1` edge-convention form
/// here; nothing in this function depends on the convention.
pub fn weight(x: &LatticeVector, k0: &CharVector, form: &IntersectionForm) -> Result<i64> {
    let total = form.pair(&x.coords, &x.coords) + k0.eval(x);
    if total % 2 != 0 {
        return Err(Error::ParityViolation);
    }
    Ok(-total / 2)
}

/// `k0 + 2 x*`.
pub fn lattice_to_char(x: &LatticeVector, k0: &CharVector, form: &IntersectionForm) -> CharVector {
    let ax = form.apply(&x.coords);
    CharVector::new(k0.evals.iter().zip(ax).map(|(k, a)| k + 2 * a).collect())
}

/// Inverse of [`lattice_to_char`]: the `x` with `k = k0 + 2 x*`, by exact
/// rational solve. Fails with [`Error::DifferentOrbits`] when no integral
/// solution exists.
pub fn char_to_lattice(
    k: &CharVector,
    k0: &CharVector,
    form: &IntersectionForm,
) -> Result<LatticeVector> {
    let inv = exact::inverse(form.matrix()).ok_or(Error::NotNegativeDefinite)?;
    let mut coords = Vec::with_capacity(k.len());
    for row in &inv {
        let mut s = num_rational::BigRational::zero();
        for (a, (ki, k0i)) in row.iter().zip(k.evals.iter().zip(&k0.evals)) {
            let d = ki - k0i;
            if d % 2 != 0 {
                return Err(Error::DifferentOrbits);
            }
            s += a * num_rational::BigRational::from_integer((d / 2).into());
        }
        if !s.is_integer() {
            return Err(Error::DifferentOrbits);
        }
        coords.push(s.to_integer().to_i64().ok_or(Error::Overflow)?);
    }
    Ok(LatticeVector::new(coords))
}

/// `k, k'` lie in one orbit iff `A^-1 (k' - k) / 2` is integral.
pub fn same_orbit(k: &CharVector, other: &CharVector, form: &IntersectionForm) -> bool {
    char_to_lattice(other, k, form).is_ok()
}

/// Whether `x` is a local minimum of `w` for base point `k0`. Equivalent to
/// `k0 + 2x*` lying in the box.
pub fn is_local_minimum(x: &LatticeVector, k0: &CharVector, form: &IntersectionForm) -> bool {
    let k = lattice_to_char(x, k0, form);
    BoxShape::from_framings(form.forest().framings()).contains(&k.evals)
}

/// Mixed-radix indexing of the box. The first vertex is the most significant
/// digit, so index order is lexicographic order of evaluation tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxShape {
    framings: Vec<i64>,
    /// Number of values per coordinate, `|m| + 1`.
    radix: Vec<u64>,
    strides: Vec<u64>,
    size: u128,
}

impl BoxShape {
    pub fn from_framings(framings: &[i64]) -> Self {
        let radix: Vec<u64> = framings.iter().map(|&m| m.unsigned_abs() + 1).collect();
        let n = radix.len();
        let mut strides = vec![1u64; n];
        let mut size: u128 = 1;
        for i in (0..n).rev() {
            strides[i] = size.min(u64::MAX as u128) as u64;
            size = size.saturating_mul(radix[i] as u128);
        }
        BoxShape {
            framings: framings.to_vec(),
            radix,
            strides,
            size,
        }
    }

    /// Box of a negative-definite form, refusing more than `cap` vectors.
    pub fn checked(form: &IntersectionForm, cap: u64) -> Result<Self> {
        form.require_negative_definite()?;
        let shape = Self::from_framings(form.forest().framings());
        if shape.size > cap as u128 {
            return Err(Error::BoxTooLarge {
                size: shape.size,
                cap,
            });
        }
        Ok(shape)
    }

    /// `prod (|m(v)| + 1)`.
    pub fn size(&self) -> u128 {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.framings.len()
    }

    pub fn framings(&self) -> &[i64] {
        &self.framings
    }

    pub fn radix(&self) -> &[u64] {
        &self.radix
    }

    pub fn strides(&self) -> &[u64] {
        &self.strides
    }

    pub fn contains(&self, evals: &[i64]) -> bool {
        evals.len() == self.framings.len()
            && evals
                .iter()
                .zip(&self.framings)
                .all(|(&k, &m)| m <= k && k <= -m && (k - m) % 2 == 0)
    }

    pub fn index_of(&self, evals: &[i64]) -> Option<u64> {
        if !self.contains(evals) {
            return None;
        }
        Some(
            evals
                .iter()
                .zip(&self.framings)
                .zip(&self.strides)
                .map(|((&k, &m), &s)| ((k - m) / 2) as u64 * s)
                .sum(),
        )
    }

    /// Digit `j_i = (<k, v_i> - m(v_i)) / 2` of each coordinate.
    pub fn digits(&self, mut index: u64) -> Vec<u64> {
        let mut out = vec![0; self.dim()];
        for i in 0..self.dim() {
            out[i] = index / self.strides[i];
            index %= self.strides[i];
        }
        out
    }

    pub fn vector_at(&self, index: u64) -> CharVector {
        CharVector::new(
            self.digits(index)
                .iter()
                .zip(&self.framings)
                .map(|(&j, &m)| m + 2 * j as i64)
                .collect(),
        )
    }
}

/// `prod_i {m_i, m_i + 2, ..., -m_i}` in lexicographic order.
pub fn enumerate_box(form: &IntersectionForm, cap: u64) -> Result<Vec<CharVector>> {
    let shape = BoxShape::checked(form, cap)?;
    Ok((0..shape.size() as u64).map(|i| shape.vector_at(i)).collect())
}

/// Canonical orbit labels: `adj(A) (k - m) / 2 mod |det A|`. Two
/// characteristic vectors share a label iff they share an orbit.
#[derive(Debug, Clone)]
pub struct OrbitKeyer {
    modulus: u64,
    /// Columns of `adj(A)` reduced mod `|det A|`.
    columns: Vec<Vec<u64>>,
}

impl OrbitKeyer {
    pub fn new(form: &IntersectionForm) -> Result<Self> {
        form.require_negative_definite()?;
        let modulus = form.abs_det()?;
        let n = form.len();
        let (_, adj) = exact::adjugate(form.matrix()).ok_or(Error::NotNegativeDefinite)?;
        let m = num_bigint::BigInt::from(modulus);
        let columns = (0..n)
            .map(|c| {
                (0..n)
                    .map(|r| adj[r][c].mod_floor(&m).to_u64().expect("reduced below modulus"))
                    .collect()
            })
            .collect();
        Ok(OrbitKeyer { modulus, columns })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Label from box digits `j`.
    pub fn key_of_digits(&self, digits: &[u64]) -> Vec<u64> {
        let n = self.columns.len();
        let mut key = vec![0u64; n];
        for (c, &j) in digits.iter().enumerate() {
            self.add_column(&mut key, c, j % self.modulus.max(1));
        }
        key
    }

    /// Label of any characteristic vector (not necessarily in the box).
    pub fn key_of(&self, k: &CharVector, framings: &[i64]) -> Vec<u64> {
        let md = self.modulus.max(1) as i64;
        let digits: Vec<u64> = k
            .evals
            .iter()
            .zip(framings)
            .map(|(&e, &m)| (((e - m) / 2).rem_euclid(md)) as u64)
            .collect();
        self.key_of_digits(&digits)
    }

    fn add_column(&self, key: &mut [u64], c: usize, times: u64) {
        if self.modulus <= 1 || times == 0 {
            return;
        }
        let md = self.modulus as u128;
        for (slot, &a) in key.iter_mut().zip(&self.columns[c]) {
            *slot = ((*slot as u128 + a as u128 * times as u128) % md) as u64;
        }
    }

    fn sub_column(&self, key: &mut [u64], c: usize, times: u64) {
        if self.modulus <= 1 || times == 0 {
            return;
        }
        let t = times % self.modulus;
        self.add_column(key, c, self.modulus - t);
    }
}

/// Orbit decomposition of the whole box.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    pub shape: BoxShape,
    /// Orbit id of every box index.
    pub orbit_of: Vec<u32>,
    /// Box indices of each orbit, ascending. The first member is the
    /// orbit representative.
    pub members: Vec<Vec<u64>>,
    pub keys: Vec<Vec<u64>>,
}

impl OrbitPartition {
    pub fn orbit(&self, id: usize) -> SpinCOrbit {
        SpinCOrbit {
            representative: self.shape.vector_at(self.members[id][0]),
            index: id,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

const ORBIT_CHUNK: u64 = 1 << 15;

/// Partitions the box of a negative-definite form into spin^c orbits.
/// Orbit ids follow the lexicographic order of their least members.
pub fn orbit_decompose(
    form: &IntersectionForm,
    cap: u64,
    parallelism: Parallelism,
) -> Result<OrbitPartition> {
    let shape = BoxShape::checked(form, cap)?;
    let keyer = OrbitKeyer::new(form)?;
    let total = shape.size() as u64;
    let ranges = par::chunks(total, ORBIT_CHUNK);

    // Each chunk labels its indices with chunk-local ids in first-seen order.
    let partials = par::map(parallelism, &ranges, |&(start, end)| {
        let mut local: HashMap<Vec<u64>, u32> = HashMap::new();
        let mut order: Vec<Vec<u64>> = Vec::new();
        let mut ids = Vec::with_capacity((end - start) as usize);
        let mut digits = shape.digits(start);
        let mut key = keyer.key_of_digits(&digits);
        for idx in start..end {
            let id = *local.entry(key.clone()).or_insert_with(|| {
                order.push(key.clone());
                (order.len() - 1) as u32
            });
            ids.push(id);
            if idx + 1 < end {
                advance(&shape, &keyer, &mut digits, &mut key);
            }
        }
        (ids, order)
    });

    let mut global: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut keys: Vec<Vec<u64>> = Vec::new();
    let mut orbit_of = Vec::with_capacity(total as usize);
    for (ids, order) in partials {
        let remap: Vec<u32> = order
            .into_iter()
            .map(|k| {
                *global.entry(k.clone()).or_insert_with(|| {
                    keys.push(k);
                    (keys.len() - 1) as u32
                })
            })
            .collect();
        orbit_of.extend(ids.into_iter().map(|i| remap[i as usize]));
    }
    let mut members = vec![Vec::new(); keys.len()];
    for (idx, &o) in orbit_of.iter().enumerate() {
        members[o as usize].push(idx as u64);
    }
    let det = keyer.modulus();
    if members.len() as u64 != det {
        return Err(Error::InvariantViolation(format!(
            "box meets {} orbits but |det| = {det}",
            members.len()
        )));
    }
    Ok(OrbitPartition {
        shape,
        orbit_of,
        members,
        keys,
    })
}

/// Steps `digits` to the next box index, updating the orbit label.
fn advance(shape: &BoxShape, keyer: &OrbitKeyer, digits: &mut [u64], key: &mut [u64]) {
    for i in (0..digits.len()).rev() {
        if digits[i] + 1 < shape.radix[i] {
            digits[i] += 1;
            keyer.add_column(key, i, 1);
            return;
        }
        keyer.sub_column(key, i, digits[i]);
        digits[i] = 0;
    }
}

/// Coercivity constants for `w(x) >= c |x|^2 - C` on a negative-definite
/// form: `c = 1 / (2 tr((-A)^-1))` and `C = |k0|^2 tr((-A)^-1) / 8`, both
/// exact rationals. These follow from `lambda_min >= 1 / tr(M^-1)` for
/// positive-definite `M = -A` and completing the square.
pub fn coercivity_constants(
    k0: &CharVector,
    form: &IntersectionForm,
) -> Result<(num_rational::BigRational, num_rational::BigRational)> {
    use num_rational::BigRational;
    form.require_negative_definite()?;
    let neg: Vec<Vec<i64>> = form
        .matrix()
        .iter()
        .map(|r| r.iter().map(|x| -x).collect())
        .collect();
    let inv = exact::inverse(&neg).ok_or(Error::NotNegativeDefinite)?;
    let trace = (0..inv.len()).fold(BigRational::zero(), |acc, i| acc + &inv[i][i]);
    if trace.is_zero() {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    debug_assert!(trace.is_positive());
    let knorm: i64 = k0.evals.iter().map(|x| x * x).sum();
    let c = BigRational::new(1.into(), 2.into()) / &trace;
    let big_c = BigRational::from_integer(knorm.into()) * &trace / BigRational::from_integer(8.into());
    Ok((c, big_c))
}
