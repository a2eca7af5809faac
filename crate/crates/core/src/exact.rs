//! Exact integer and rational linear algebra on small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
/// The empty matrix has determinant 1.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    bareiss(to_big(m))
}

fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                // exact by Sylvester's identity
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Leading principal minors `D_1, ..., D_n`.
pub fn leading_principal_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<i64>> = m[..k].iter().map(|row| row[..k].to_vec()).collect();
            determinant(&sub)
        })
        .collect()
}

/// Sylvester's criterion for `-m`: `(-1)^k D_k > 0` for every `k`.
pub fn is_negative_definite(m: &[Vec<i64>]) -> bool {
    leading_principal_minors(m)
        .iter()
        .enumerate()
        .all(|(i, d)| if i % 2 == 0 { d.is_negative() } else { d.is_positive() })
}

/// Whether `-m` is positive semidefinite, by symmetric elimination over the
/// rationals. A zero pivot of a PSD matrix forces its whole row to vanish.
pub fn is_negative_semidefinite(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer((-x).into())).collect())
        .collect();
    for i in 0..n {
        let d = a[i][i].clone();
        if d.is_negative() {
            return false;
        }
        if d.is_zero() {
            if (i + 1..n).any(|j| !a[i][j].is_zero()) {
                return false;
            }
            continue;
        }
        for r in i + 1..n {
            let f = &a[r][i] / &d;
            for c in i + 1..n {
                let sub = &f * &a[i][c];
                a[r][c] -= sub;
            }
        }
    }
    true
}

/// Exact inverse over the rationals; `None` when singular.
pub fn inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row
                .iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let sub = &f * &a[col][c];
                    a[r][c] -= sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// The adjugate `adj(m) = det(m) * m^-1`, an integer matrix, together with
/// `det(m)`. `None` when `m` is singular.
pub fn adjugate(m: &[Vec<i64>]) -> Option<(BigInt, Vec<Vec<BigInt>>)> {
    let det = determinant(m);
    let inv = inverse(m)?;
    let d = BigRational::from_integer(det.clone());
    let adj = inv
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    let v = x * &d;
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    Some((det, adj))
}

/// Rank over the rationals, by fraction-free elimination after clearing
/// denominators row by row.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        let p = a[rank][col].clone();
        for r in rank + 1..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..ncols {
                a[r][c] = &a[r][c] * &p - &f * &a[rank][c];
            }
            let g = a[r][col..]
                .iter()
                .fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if g > BigInt::one() {
                for x in a[r][col..].iter_mut() {
                    *x /= &g;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `m = L D L^T` with `L` unit lower triangular, for symmetric positive
/// definite `m`.
#[derive(Debug, Clone)]
pub struct Ldl {
    pub lower: Vec<Vec<BigRational>>,
    pub diag: Vec<BigRational>,
}

pub fn ldl(m: &[Vec<i64>]) -> Option<Ldl> {
    let n = m.len();
    let mut lower = vec![vec![BigRational::zero(); n]; n];
    let mut diag = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut d = BigRational::from_integer(m[j][j].into());
        for k in 0..j {
            d -= &lower[j][k] * &lower[j][k] * &diag[k];
        }
        if !d.is_positive() {
            return None;
        }
        lower[j][j] = BigRational::one();
        for i in j + 1..n {
            let mut s = BigRational::from_integer(m[i][j].into());
            for k in 0..j {
                s -= &lower[i][k] * &lower[j][k] * &diag[k];
            }
            lower[i][j] = s / &d;
        }
        diag[j] = d;
    }
    Some(Ldl { lower, diag })
}

/// `floor(sqrt(r))` for a non-negative rational.
pub fn floor_sqrt(r: &BigRational) -> BigInt {
    assert!(!r.is_negative(), "square root of a negative rational");
    let (p, q) = (r.numer(), r.denom());
    (p * q).sqrt().div_floor(q)
}

/// `ceil(sqrt(r))` for a non-negative rational.
pub fn ceil_sqrt(r: &BigRational) -> BigInt {
    let f = floor_sqrt(r);
    if BigRational::from_integer(&f * &f) == *r {
        f
    } else {
        f + 1
    }
}

pub fn floor_rat(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil_rat(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}
