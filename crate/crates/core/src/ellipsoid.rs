//! Exact enumeration of lattice points in the ellipsoids
//! `q(x) = -(x, x) - <b, x> <= rhs` of a negative-definite form.
//!
//! Both the weight sublevel sets (`2 w(x) = q(x)` with `b = k0`) and the
//! rationality test (`2 chi(x) = q(x)` with `b = K`) have this shape.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::form::IntersectionForm;

/// `{x : x^T M x - b.x <= rhs}` with `M = -A` positive definite.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    m: Vec<Vec<i64>>,
    b: Vec<i64>,
    rhs: i64,
    /// Center `M^-1 b / 2`.
    center: Vec<BigRational>,
    /// `(x - c)^T M (x - c) <= radius`.
    radius: BigRational,
    ldl: exact::Ldl,
    inv_diag: Vec<BigRational>,
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

impl Ellipsoid {
    pub fn new(form: &IntersectionForm, b: &[i64], rhs: i64) -> Result<Self> {
        form.require_negative_definite()?;
        if b.len() != form.len() {
            return Err(Error::DimensionMismatch {
                expected: form.len(),
                got: b.len(),
            });
        }
        let m: Vec<Vec<i64>> = form
            .matrix()
            .iter()
            .map(|r| r.iter().map(|x| -x).collect())
            .collect();
        let inv = exact::inverse(&m).ok_or(Error::NotNegativeDefinite)?;
        let ldl = exact::ldl(&m).ok_or(Error::NotNegativeDefinite)?;
        let half = BigRational::new(1.into(), 2.into());
        let center: Vec<BigRational> = inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(b)
                    .fold(BigRational::zero(), |acc, (a, &bi)| acc + a * rat(bi))
                    * &half
            })
            .collect();
        // c^T M c = b^T M^-1 b / 4 = b.c / 2.
        let cmc = b
            .iter()
            .zip(&center)
            .fold(BigRational::zero(), |acc, (&bi, ci)| acc + rat(bi) * ci)
            * &half;
        let radius = rat(rhs) + cmc;
        let inv_diag = (0..m.len()).map(|i| inv[i][i].clone()).collect();
        Ok(Ellipsoid {
            m,
            b: b.to_vec(),
            rhs,
            center,
            radius,
            ldl,
            inv_diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// `x^T M x - b.x`.
    pub fn value(&self, x: &[i64]) -> i64 {
        let quad: i64 = (0..x.len())
            .map(|i| x[i] * (0..x.len()).map(|j| self.m[i][j] * x[j]).sum::<i64>())
            .sum();
        quad - self.b.iter().zip(x).map(|(a, b)| a * b).sum::<i64>()
    }

    /// Whether the ellipsoid has any real points.
    pub fn is_empty(&self) -> bool {
        self.radius < BigRational::zero()
    }

    /// Per-coordinate integer ranges containing every lattice point, from
    /// `|x_i - c_i| <= sqrt(radius * (M^-1)_ii)`.
    pub fn bounding_box(&self) -> Option<Vec<(i64, i64)>> {
        if self.is_empty() {
            return None;
        }
        let mut out = Vec::with_capacity(self.dim());
        for (c, d) in self.center.iter().zip(&self.inv_diag) {
            let (lo, hi) = integer_window(c, &(&self.radius * d))?;
            out.push((lo, hi));
        }
        Some(out)
    }

    /// Visits every lattice point of the ellipsoid (restricted to `x >= 0`
    /// when `nonneg`) in a fixed order. The visitor may stop early. At most
    /// `cap` search nodes are expanded before
    /// [`Error::EnumerationBudgetExceeded`].
    pub fn enumerate<F>(&self, nonneg: bool, cap: u64, mut visit: F) -> Result<u64>
    where
        F: FnMut(&[i64]) -> ControlFlow<()>,
    {
        if self.is_empty() {
            return Ok(0);
        }
        let n = self.dim();
        let mut x = vec![0i64; n];
        let mut y = vec![BigRational::zero(); n];
        let mut state = Search {
            e: self,
            nonneg,
            cap,
            nodes: 0,
            found: 0,
        };
        if n == 0 {
            if self.rhs >= 0 {
                let _ = visit(&x);
                return Ok(1);
            }
            return Ok(0);
        }
        let radius = self.radius.clone();
        let _ = state.descend(n - 1, &radius, &mut x, &mut y, &mut visit)?;
        Ok(state.found)
    }
}

struct Search<'a> {
    e: &'a Ellipsoid,
    nonneg: bool,
    cap: u64,
    nodes: u64,
    found: u64,
}

impl Search<'_> {
    fn descend<F>(
        &mut self,
        i: usize,
        rem: &BigRational,
        x: &mut [i64],
        y: &mut [BigRational],
        visit: &mut F,
    ) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[i64]) -> ControlFlow<()>,
    {
        let e = self.e;
        let n = e.dim();
        let s = (i + 1..n).fold(BigRational::zero(), |acc, j| acc + &e.ldl.lower[j][i] * &y[j]);
        let mid = &e.center[i] - &s;
        let d = &e.ldl.diag[i];
        let Some((mut lo, hi)) = integer_window(&mid, &(rem / d)) else {
            return Ok(ControlFlow::Continue(()));
        };
        if self.nonneg {
            lo = lo.max(0);
        }
        for v in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(Error::EnumerationBudgetExceeded { cap: self.cap });
            }
            x[i] = v;
            y[i] = rat(v) - &e.center[i];
            let t = &y[i] + &s;
            let next = rem - d * &t * &t;
            if i == 0 {
                debug_assert!(e.value(x) <= e.rhs);
                self.found += 1;
                if visit(x).is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            } else if self.descend(i - 1, &next, x, y, visit)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Integers `z` with `(z - mid)^2 <= r2`, as an inclusive range.
fn integer_window(mid: &BigRational, r2: &BigRational) -> Option<(i64, i64)> {
    if *r2 < BigRational::zero() {
        return None;
    }
    let inside = |z: &BigInt| {
        let t = BigRational::from_integer(z.clone()) - mid;
        &t * &t <= *r2
    };
    let r = exact::ceil_sqrt(r2);
    let mut lo = exact::floor_rat(mid) - &r;
    while !inside(&lo) {
        lo += 1;
        if lo > exact::ceil_rat(mid) + &r {
            return None;
        }
    }
    let mut hi = exact::ceil_rat(mid) + &r;
    while !inside(&hi) {
        hi -= 1;
    }
    Some((lo.to_i64()?, hi.to_i64()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{EdgeSign, PlumbingForest};

    fn form(m: &[i64], edges: &[(usize, usize)], s: EdgeSign) -> IntersectionForm {
        PlumbingForest::from_parts(m, edges, s).unwrap().intersection_form()
    }

    fn collect(e: &Ellipsoid, nonneg: bool) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        e.enumerate(nonneg, 1 << 24, |x| {
            out.push(x.to_vec());
            ControlFlow::Continue(())
        })
        .unwrap();
        out.sort();
        out
    }

    fn brute(e: &Ellipsoid, w: i64, nonneg: bool) -> Vec<Vec<i64>> {
        let n = e.dim();
        let lo = if nonneg { 0 } else { -w };
        let mut out = Vec::new();
        let mut x = vec![lo; n];
        loop {
            if e.value(&x) <= e.rhs {
                out.push(x.clone());
            }
            let mut i = n;
            loop {
                if i == 0 {
                    out.sort();
                    return out;
                }
                i -= 1;
                if x[i] < w {
                    x[i] += 1;
                    break;
                }
                x[i] = lo;
            }
        }
    }

    #[test]
    fn one_dimensional_window() {
        let q = form(&[-2], &[], EdgeSign::PlusOne);
        // 2t^2 <= 8 gives |t| <= 2.
        let e = Ellipsoid::new(&q, &[0], 8).unwrap();
        assert_eq!(collect(&e, false), vec![vec![-2], vec![-1], vec![0], vec![1], vec![2]]);
        assert_eq!(e.bounding_box().unwrap(), vec![(-2, 2)]);
    }

    #[test]
    fn matches_brute_force() {
        let q = form(&[-2, -3, -2], &[(0, 1), (1, 2)], EdgeSign::PlusOne);
        for (b, rhs) in [([0, 1, 0], 6), ([2, -1, 0], 10), ([0, 1, 2], 0), ([4, 3, 2], 3)] {
            let e = Ellipsoid::new(&q, &b, rhs).unwrap();
            assert_eq!(collect(&e, false), brute(&e, 8, false), "{b:?} {rhs}");
            assert_eq!(collect(&e, true), brute(&e, 8, true));
            let bb = e.bounding_box().unwrap();
            for x in collect(&e, false) {
                for (v, (lo, hi)) in x.iter().zip(&bb) {
                    assert!(lo <= v && v <= hi);
                }
            }
        }
    }

    #[test]
    fn respects_budget() {
        let q = form(&[-2, -2], &[], EdgeSign::PlusOne);
        let e = Ellipsoid::new(&q, &[0, 0], 10_000).unwrap();
        assert_eq!(
            e.enumerate(false, 100, |_| ControlFlow::Continue(())),
            Err(Error::EnumerationBudgetExceeded { cap: 100 })
        );
    }

    #[test]
    fn empty_ellipsoid() {
        let q = form(&[-2], &[], EdgeSign::PlusOne);
        let e = Ellipsoid::new(&q, &[0], -1).unwrap();
        assert!(e.is_empty());
        assert_eq!(collect(&e, false), Vec::<Vec<i64>>::new());
    }
}
