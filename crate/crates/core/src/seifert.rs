//! Seifert fibered spaces over `S^2` as star-shaped plumbings.
//!
//! Input is either `"e0; a1/b1 a2/b2 ..."` or the Regina-style
//! `"SFS [S2: (a1,b1) (a2,b2) ...]"` (read with `e0 = 0`). Each pair is
//! `(alpha, beta)` with orbifold Euler number `e = e0 + sum beta/alpha`.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{PlumbingForest, RawForest};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeifertData {
    pub e0: i64,
    /// `(alpha, beta)` pairs.
    pub legs: Vec<(i64, i64)>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Seifert(msg.into())
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("`{}` is not an integer", s.trim())))
}

impl SeifertData {
    pub fn new(e0: i64, legs: Vec<(i64, i64)>) -> Result<Self> {
        for &(a, b) in &legs {
            if a < 1 {
                return Err(bad(format!("alpha must be positive in {a}/{b}")));
            }
            if a.gcd(&b) != 1 {
                return Err(bad(format!("{a}/{b} is not a coprime pair")));
            }
        }
        Ok(SeifertData { e0, legs })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix("SFS") {
            return Self::parse_regina(rest);
        }
        let (e0, rest) = t
            .split_once(';')
            .ok_or_else(|| bad("expected `e0; a1/b1 a2/b2 ...`"))?;
        let e0 = parse_int(e0)?;
        let legs = rest
            .split_whitespace()
            .map(|f| {
                let (a, b) = f
                    .split_once('/')
                    .ok_or_else(|| bad(format!("`{f}` is not of the form alpha/beta")))?;
                Ok((parse_int(a)?, parse_int(b)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(e0, legs)
    }

    fn parse_regina(rest: &str) -> Result<Self> {
        let inner = rest
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| bad("expected `SFS [S2: (a,b) ...]`"))?;
        let (base, fibres) = inner
            .split_once(':')
            .ok_or_else(|| bad("missing `:` after the base orbifold"))?;
        match base.trim() {
            "S2" => {}
            "RP2" | "RP2/n2" | "N1" => {
                return Err(bad(
                    "base RP2 has no star-shaped plumbing here; such manifolds are instanton L-spaces",
                ))
            }
            other => return Err(bad(format!("unsupported base orbifold `{other}`"))),
        }
        let mut legs = Vec::new();
        let mut s = fibres.trim();
        while !s.is_empty() {
            let body = s
                .strip_prefix('(')
                .ok_or_else(|| bad(format!("expected `(` at `{s}`")))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed `(`"))?;
            let (a, b) = body[..close]
                .split_once(',')
                .ok_or_else(|| bad("expected `(alpha,beta)`"))?;
            legs.push((parse_int(a)?, parse_int(b)?));
            s = body[close + 1..].trim_start();
        }
        Self::new(0, legs)
    }

    /// `e0 + sum beta / alpha`.
    pub fn orbifold_euler(&self) -> BigRational {
        self.legs.iter().fold(BigRational::from_integer(self.e0.into()), |acc, &(a, b)| {
            acc + BigRational::new(b.into(), a.into())
        })
    }

    /// `|H_1| = |alpha_1 ... alpha_n e|`, infinite (`None`) when `e = 0`.
    pub fn h1_order(&self) -> Option<BigRational> {
        let e = self.orbifold_euler();
        if e.is_zero() {
            return None;
        }
        let prod = self
            .legs
            .iter()
            .fold(BigRational::from_integer(1.into()), |acc, &(a, _)| {
                acc * BigRational::from_integer(a.into())
            });
        Some((prod * e).abs())
    }

    /// Same manifold with every `0 < beta < alpha`; `alpha = 1` legs are
    /// folded into `e0`.
    pub fn normalized(&self) -> SeifertData {
        let mut e0 = self.e0;
        let mut legs = Vec::new();
        for &(a, b) in &self.legs {
            let (q, r) = b.div_mod_floor(&a);
            e0 += q;
            if r != 0 {
                legs.push((a, r));
            }
        }
        SeifertData { e0, legs }
    }

    /// The orientation reversal.
    pub fn reversed(&self) -> SeifertData {
        SeifertData {
            e0: -self.e0,
            legs: self.legs.iter().map(|&(a, b)| (a, -b)).collect(),
        }
    }
}

/// `alpha / beta = a1 - 1/(a2 - 1/(...))` with every `a_j >= 2`.
pub fn cont_frac_expand(alpha: i64, beta: i64) -> Result<Vec<i64>> {
    if !(0 < beta && beta < alpha) || alpha.gcd(&beta) != 1 {
        return Err(Error::InvalidFraction { alpha, beta });
    }
    let (mut a, mut b) = (alpha, beta);
    let mut out = Vec::new();
    while b != 0 {
        let q = (a + b - 1) / b;
        out.push(q);
        (a, b) = (b, q * b - a);
    }
    debug_assert_eq!(
        cont_frac_value(&out),
        BigRational::new(alpha.into(), beta.into())
    );
    Ok(out)
}

/// Evaluates `a1 - 1/(a2 - 1/(...))`.
pub fn cont_frac_value(terms: &[i64]) -> BigRational {
    let mut it = terms.iter().rev();
    let Some(&last) = it.next() else {
        return BigRational::zero();
    };
    let mut v = BigRational::from_integer(last.into());
    for &t in it {
        v = BigRational::from_integer(t.into()) - v.recip();
    }
    v
}

#[derive(Debug, Clone)]
pub struct SeifertPlumbing {
    pub forest: PlumbingForest,
    /// The data actually plumbed, after normalization.
    pub data: SeifertData,
    /// Whether the orientation had to be reversed for negative-definiteness.
    pub reversed: bool,
}

/// Star with center `c` of framing `e0` and one chain `l{i}_{j}` per leg.
fn star(n: &SeifertData) -> Result<PlumbingForest> {
    let mut raw = RawForest::new().vertex("c", n.e0);
    for (i, &(a, b)) in n.legs.iter().enumerate() {
        let mut prev = "c".to_string();
        for (j, t) in cont_frac_expand(a, b)?.into_iter().enumerate() {
            let id = format!("l{}_{}", i + 1, j + 1);
            raw = raw.vertex(id.clone(), -t).edge(prev, id.clone());
            prev = id;
        }
    }
    Ok(raw.validate()?)
}

pub fn seifert_to_plumbing(s: &SeifertData) -> Result<SeifertPlumbing> {
    for reversed in [false, true] {
        let data = if reversed { s.reversed() } else { s.clone() }.normalized();
        let forest = star(&data)?;
        if forest.intersection_form().is_negative_definite() {
            return Ok(SeifertPlumbing {
                forest,
                data,
                reversed,
            });
        }
    }
    Err(Error::NotNegativeDefiniteEitherOrientation)
}
