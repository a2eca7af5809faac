//! Plumbing forests: framed vertices, forest edges and the edge-sign
//! convention.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, ForestError, Result};
use crate::exact;

/// Pairing of adjacent vertices in the intersection form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSign {
    /// Adjacent vertices pair to `-1`. The default.
    #[default]
    MinusOne,
    /// Adjacent vertices pair to `+1`, the standard convention.
    PlusOne,
}

impl EdgeSign {
    pub fn value(self) -> i64 {
        match self {
            EdgeSign::MinusOne => -1,
            EdgeSign::PlusOne => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            EdgeSign::MinusOne => EdgeSign::PlusOne,
            EdgeSign::PlusOne => EdgeSign::MinusOne,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeSign::MinusOne => "minus_one",
            EdgeSign::PlusOne => "plus_one",
        }
    }
}

/// Unvalidated vertex and edge lists, with optional source line numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawForest {
    pub vertices: Vec<(String, i64, Option<usize>)>,
    pub edges: Vec<(String, String, Option<usize>)>,
    pub edge_sign: EdgeSign,
}

impl RawForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: impl Into<String>, framing: i64) -> Self {
        self.vertices.push((id.into(), framing, None));
        self
    }

    pub fn edge(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.edges.push((a.into(), b.into(), None));
        self
    }

    pub fn edge_sign(mut self, sign: EdgeSign) -> Self {
        self.edge_sign = sign;
        self
    }

    pub fn validate(&self) -> Result<PlumbingForest, ForestError> {
        validate_forest(self)
    }
}

/// A validated plumbing forest. Vertices keep their input order, which is
/// the basis order of every vector in this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingForest {
    ids: Vec<String>,
    framings: Vec<i64>,
    /// Sorted pairs `(i, j)` with `i < j`.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    edge_sign: EdgeSign,
}

/// Checks the forest conditions and builds a [`PlumbingForest`].
///
/// Duplicate edges are rejected rather than merged.
pub fn validate_forest(raw: &RawForest) -> Result<PlumbingForest, ForestError> {
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(raw.vertices.len());
    for (i, (id, _, line)) in raw.vertices.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            return Err(ForestError::DuplicateVertexId {
                id: id.clone(),
                line: *line,
            });
        }
    }
    let n = raw.vertices.len();
    let mut seen = HashSet::new();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (a, b, line) in &raw.edges {
        let lookup = |id: &String| {
            index.get(id.as_str()).copied().ok_or_else(|| ForestError::DanglingEdge {
                a: a.clone(),
                b: b.clone(),
                missing: id.clone(),
                line: *line,
            })
        };
        let (i, j) = (lookup(a)?, lookup(b)?);
        if i == j {
            return Err(ForestError::SelfLoop {
                id: a.clone(),
                line: *line,
            });
        }
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            return Err(ForestError::DuplicateEdge {
                a: a.clone(),
                b: b.clone(),
                line: *line,
            });
        }
        let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
        if ri == rj {
            return Err(ForestError::CycleDetected {
                a: a.clone(),
                b: b.clone(),
                line: *line,
            });
        }
        parent[ri] = rj;
        edges.push(key);
    }
    Ok(PlumbingForest::assemble(
        raw.vertices.iter().map(|(id, _, _)| id.clone()).collect(),
        raw.vertices.iter().map(|&(_, m, _)| m).collect(),
        edges,
        raw.edge_sign,
    ))
}

/// Outcome of the semidefiniteness classification of a forest without bad
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "component", rename_all = "snake_case")]
pub enum SemidefiniteClass {
    NegDefinite,
    /// A component on which `-m(v) = d(v)` everywhere; it presents
    /// `S^1 x S^2`.
    HasS1xS2Component(Vec<String>),
    Indefinite,
}

impl PlumbingForest {
    fn assemble(
        ids: Vec<String>,
        framings: Vec<i64>,
        mut edges: Vec<(usize, usize)>,
        edge_sign: EdgeSign,
    ) -> Self {
        edges.sort_unstable();
        let mut adjacency = vec![Vec::new(); ids.len()];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        PlumbingForest {
            ids,
            framings,
            edges,
            adjacency,
            edge_sign,
        }
    }

    /// Builds a forest from framings and index pairs, naming vertices
    /// `v0, v1, ...`.
    pub fn from_parts(
        framings: &[i64],
        edges: &[(usize, usize)],
        edge_sign: EdgeSign,
    ) -> Result<Self, ForestError> {
        let ids: Vec<String> = (0..framings.len()).map(|i| format!("v{i}")).collect();
        let raw = RawForest {
            vertices: ids
                .iter()
                .zip(framings)
                .map(|(id, &m)| (id.clone(), m, None))
                .collect(),
            edges: edges
                .iter()
                .map(|&(a, b)| {
                    let name = |i: usize| ids.get(i).cloned().unwrap_or_else(|| format!("v{i}"));
                    (name(a), name(b), None)
                })
                .collect(),
            edge_sign,
        };
        validate_forest(&raw)
    }

    pub fn empty() -> Self {
        Self::assemble(Vec::new(), Vec::new(), Vec::new(), EdgeSign::MinusOne)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn framings(&self) -> &[i64] {
        &self.framings
    }

    pub fn framing(&self, i: usize) -> i64 {
        self.framings[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn edge_sign(&self) -> EdgeSign {
        self.edge_sign
    }

    pub fn to_raw(&self) -> RawForest {
        RawForest {
            vertices: self
                .ids
                .iter()
                .zip(&self.framings)
                .map(|(id, &m)| (id.clone(), m, None))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(i, j)| (self.ids[i].clone(), self.ids[j].clone(), None))
                .collect(),
            edge_sign: self.edge_sign,
        }
    }

    /// Intersection matrix `A`: framings on the diagonal, the edge sign on
    /// adjacent pairs.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut a = vec![vec![0; n]; n];
        for (i, &m) in self.framings.iter().enumerate() {
            a[i][i] = m;
        }
        let s = self.edge_sign.value();
        for &(i, j) in &self.edges {
            a[i][j] = s;
            a[j][i] = s;
        }
        a
    }

    /// Indices of vertices with `-m(v) < d(v)`.
    pub fn bad_vertices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| -self.framings[i] < self.degree(i) as i64)
            .collect()
    }

    pub fn bad_vertex_ids(&self) -> Vec<String> {
        self.bad_vertices()
            .into_iter()
            .map(|i| self.ids[i].clone())
            .collect()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Two-colouring of the forest: `true` marks the vertices whose
    /// evaluations flip under an edge-sign change. The smallest vertex of
    /// each component is uncoloured.
    pub fn bipartition(&self) -> Vec<bool> {
        let n = self.len();
        let mut colour = vec![None; n];
        for comp in self.components() {
            let s = comp[0];
            colour[s] = Some(false);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                let c = colour[u].expect("coloured before push");
                for &w in &self.adjacency[u] {
                    if colour[w].is_none() {
                        colour[w] = Some(!c);
                        stack.push(w);
                    }
                }
            }
        }
        colour.into_iter().map(|c| c.unwrap_or(false)).collect()
    }

    /// Classification of a forest without bad vertices as negative-definite
    /// or containing an `S^1 x S^2` component.
    pub fn semidefinite_classify(&self) -> Result<SemidefiniteClass> {
        if !self.bad_vertices().is_empty() {
            return Err(Error::NotApplicable);
        }
        for comp in self.components() {
            if comp
                .iter()
                .all(|&v| -self.framings[v] == self.degree(v) as i64)
            {
                return Ok(SemidefiniteClass::HasS1xS2Component(
                    comp.iter().map(|&v| self.ids[v].clone()).collect(),
                ));
            }
        }
        // Without such a component the form is definite; confirm exactly.
        if exact::is_negative_definite(&self.matrix()) {
            Ok(SemidefiniteClass::NegDefinite)
        } else {
            Ok(SemidefiniteClass::Indefinite)
        }
    }

    pub fn with_framing(&self, i: usize, framing: i64) -> Self {
        let mut f = self.clone();
        f.framings[i] = framing;
        f
    }

    pub fn with_edge_sign(&self, sign: EdgeSign) -> Self {
        let mut f = self.clone();
        f.edge_sign = sign;
        f
    }

    /// The forest with vertex `i` and its edges deleted.
    pub fn without_vertex(&self, i: usize) -> Self {
        let remap = |j: usize| if j > i { j - 1 } else { j };
        let mut ids = self.ids.clone();
        ids.remove(i);
        let mut framings = self.framings.clone();
        framings.remove(i);
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != i && b != i)
            .map(|&(a, b)| (remap(a), remap(b)))
            .collect();
        Self::assemble(ids, framings, edges, self.edge_sign)
    }

    /// The forest with edge `{i, j}` deleted (a no-op if absent).
    pub fn without_edge(&self, i: usize, j: usize) -> Self {
        let key = (i.min(j), i.max(j));
        let edges = self.edges.iter().copied().filter(|&e| e != key).collect();
        Self::assemble(self.ids.clone(), self.framings.clone(), edges, self.edge_sign)
    }

    /// Appends a new vertex, optionally joined to `attach`.
    pub fn with_new_vertex(
        &self,
        id: impl Into<String>,
        framing: i64,
        attach: Option<usize>,
    ) -> Result<Self, ForestError> {
        let mut raw = self.to_raw();
        let id = id.into();
        raw.vertices.push((id.clone(), framing, None));
        if let Some(a) = attach {
            raw.edges.push((self.ids[a].clone(), id, None));
        }
        validate_forest(&raw)
    }

    /// Disjoint union; the second forest is relabelled when ids collide.
    pub fn disjoint_union(&self, other: &PlumbingForest) -> Self {
        let taken: HashSet<&str> = self.ids.iter().map(String::as_str).collect();
        let mut ids = self.ids.clone();
        for id in &other.ids {
            let mut name = id.clone();
            while taken.contains(name.as_str()) || ids.contains(&name) {
                name.push('\'');
            }
            ids.push(name);
        }
        let off = self.len();
        let mut framings = self.framings.clone();
        framings.extend_from_slice(&other.framings);
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (a + off, b + off)));
        Self::assemble(ids, framings, edges, self.edge_sign)
    }

    /// Relabels vertex order: new vertex `i` is old vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let ids = perm.iter().map(|&o| self.ids[o].clone()).collect();
        let framings = perm.iter().map(|&o| self.framings[o]).collect();
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (inv[a], inv[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        Self::assemble(ids, framings, edges, self.edge_sign)
    }
}
