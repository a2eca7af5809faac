//! Random negative-definite forests for property tests and suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::forest::{EdgeSign, PlumbingForest};

#[derive(Debug, Clone, Copy)]
pub struct ForestSpec {
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Inclusive framing range, both ends negative.
    pub framings: (i64, i64),
    /// Chance that a new vertex starts a new component.
    pub isolated: f64,
    pub edge_sign: EdgeSign,
}

impl Default for ForestSpec {
    fn default() -> Self {
        ForestSpec {
            min_vertices: 1,
            max_vertices: 6,
            framings: (-5, -1),
            isolated: 0.15,
            edge_sign: EdgeSign::MinusOne,
        }
    }
}

/// Any forest (not necessarily definite) drawn from `spec`.
pub fn any_forest<R: Rng + ?Sized>(rng: &mut R, spec: &ForestSpec) -> PlumbingForest {
    let n = rng.gen_range(spec.min_vertices..=spec.max_vertices);
    let framings: Vec<i64> = (0..n)
        .map(|_| rng.gen_range(spec.framings.0..=spec.framings.1))
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        if !rng.gen_bool(spec.isolated) {
            edges.push((rng.gen_range(0..i), i));
        }
    }
    // Shuffle labels so vertex order carries no structure.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    PlumbingForest::from_parts(&framings, &edges, spec.edge_sign)
        .expect("attaching to earlier vertices gives a forest")
        .permuted(&perm)
}

/// Rejection-samples a negative-definite forest.
pub fn negdef_forest<R: Rng + ?Sized>(rng: &mut R, spec: &ForestSpec) -> PlumbingForest {
    loop {
        let f = any_forest(rng, spec);
        if f.intersection_form().is_negative_definite() {
            return f;
        }
    }
}

/// A negative-definite forest with a `-1` vertex of degree at most one,
/// returned with that vertex's index.
pub fn blowdownable_forest<R: Rng + ?Sized>(rng: &mut R, spec: &ForestSpec) -> (PlumbingForest, usize) {
    let smaller = ForestSpec {
        max_vertices: spec.max_vertices.saturating_sub(1).max(spec.min_vertices),
        ..*spec
    };
    loop {
        let base = any_forest(rng, &smaller);
        let attach = if rng.gen_bool(0.8) {
            Some(rng.gen_range(0..base.len()))
        } else {
            None
        };
        let id = (0..)
            .map(|i| format!("x{i}"))
            .find(|c| base.index_of(c).is_err())
            .expect("some id is free");
        let Ok(f) = base.with_new_vertex(id, -1, attach) else {
            continue;
        };
        if f.intersection_form().is_negative_definite() {
            let x = f.len() - 1;
            return (f, x);
        }
    }
}

/// A negative-definite forest and a vertex whose framing can be raised by
/// one without losing definiteness.
pub fn surgery_triple_data<R: Rng + ?Sized>(rng: &mut R, spec: &ForestSpec) -> (PlumbingForest, usize) {
    loop {
        let f = negdef_forest(rng, spec);
        let v = rng.gen_range(0..f.len());
        let plus = f.with_framing(v, f.framing(v) + 1);
        if plus.intersection_form().is_negative_definite() {
            return (f, v);
        }
    }
}
