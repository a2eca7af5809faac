//! Plumbing file formats.
//!
//! The text format has one statement per line:
//!
//! ```text
//! # a comment
//! convention minus_one
//! vertex a -2
//! vertex b -3
//! edge a b
//! ```
//!
//! The JSON format is
//! `{"vertices": [{"id": "a", "framing": -2}], "edges": [["a", "b"]], "convention": "minus_one"}`
//! with `convention` optional.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{EdgeSign, PlumbingForest, RawForest};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: String,
    pub framing: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlumbingDoc {
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub convention: EdgeSign,
}

impl PlumbingDoc {
    pub fn from_forest(f: &PlumbingForest) -> Self {
        PlumbingDoc {
            vertices: f
                .ids()
                .iter()
                .zip(f.framings())
                .map(|(id, &framing)| VertexDoc {
                    id: id.clone(),
                    framing,
                })
                .collect(),
            edges: f
                .edges()
                .iter()
                .map(|&(a, b)| (f.id(a).to_string(), f.id(b).to_string()))
                .collect(),
            convention: f.edge_sign(),
        }
    }

    pub fn to_forest(&self) -> Result<PlumbingForest> {
        let raw = RawForest {
            vertices: self
                .vertices
                .iter()
                .map(|v| (v.id.clone(), v.framing, None))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(a, b)| (a.clone(), b.clone(), None))
                .collect(),
            edge_sign: self.convention,
        };
        Ok(raw.validate()?)
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && !s.contains('#')
}

pub fn parse_dsl(text: &str) -> Result<PlumbingForest> {
    let mut raw = RawForest::new();
    let mut convention_line = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let body = line.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["vertex", id, m] => {
                let m: i64 = m
                    .parse()
                    .map_err(|_| syntax(n, format!("framing `{m}` is not an integer")))?;
                if !valid_id(id) {
                    return Err(syntax(n, format!("invalid vertex id `{id}`")));
                }
                raw.vertices.push((id.to_string(), m, Some(n)));
            }
            ["edge", a, b] => raw.edges.push((a.to_string(), b.to_string(), Some(n))),
            ["convention", c] => {
                if let Some(prev) = convention_line {
                    return Err(syntax(n, format!("convention already set on line {prev}")));
                }
                raw.edge_sign = match *c {
                    "minus_one" => EdgeSign::MinusOne,
                    "plus_one" => EdgeSign::PlusOne,
                    other => {
                        return Err(syntax(
                            n,
                            format!("unknown convention `{other}`; expected minus_one or plus_one"),
                        ))
                    }
                };
                convention_line = Some(n);
            }
            ["vertex", ..] => return Err(syntax(n, "expected `vertex <id> <framing>`")),
            ["edge", ..] => return Err(syntax(n, "expected `edge <id> <id>`")),
            ["convention", ..] => return Err(syntax(n, "expected `convention minus_one|plus_one`")),
            [kw, ..] => return Err(syntax(n, format!("unknown statement `{kw}`"))),
        }
    }
    Ok(raw.validate()?)
}

pub fn parse_json(text: &str) -> Result<PlumbingForest> {
    let doc: PlumbingDoc = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    doc.to_forest()
}

/// JSON when the first non-blank character is `{`, text otherwise.
pub fn parse_plumbing(text: &str) -> Result<PlumbingForest> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_dsl(text)
    }
}

pub fn to_dsl(f: &PlumbingForest) -> String {
    let mut out = format!("convention {}\n", f.edge_sign().as_str());
    for (id, m) in f.ids().iter().zip(f.framings()) {
        out.push_str(&format!("vertex {id} {m}\n"));
    }
    for &(a, b) in f.edges() {
        out.push_str(&format!("edge {} {}\n", f.id(a), f.id(b)));
    }
    out
}

pub fn to_json(f: &PlumbingForest) -> String {
    serde_json::to_string_pretty(&PlumbingDoc::from_forest(f)).expect("plain data serializes")
}
