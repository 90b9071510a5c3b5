//! JSON tree files.
//!
//! ```json
//! {
//!   "p": 2, "N": 1, "d0": 0, "root": "r",
//!   "vertices": ["r", "s", "f1", "f2"],
//!   "edges": [
//!     {"from": "r", "to": "s", "eps": 1, "m": 1, "h": 0},
//!     {"id": "leaf1", "from": "s", "to": "f1", "eps": 0, "m": 0, "h": 1},
//!     {"from": "s", "to": "f2", "eps": 0, "m": 0, "h": 1}
//!   ],
//!   "notes": ["free text"]
//! }
//! ```
//!
//! Integers must be exact JSON integers. `h` is reduced mod `p` with a warning. An edge may carry
//! `"reverse": {"m": .., "h": ..}` to override the decoration of its reverse.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::hurwitz_tree::{Decoration, Edge, HurwitzTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError { line: usize, column: usize, message: String },
    #[error("{path}: duplicate id `{id}`")]
    DuplicateId { path: String, id: String },
    #[error("{path}: edge references undeclared vertex `{vertex}`")]
    DanglingEdge { path: String, vertex: String },
    #[error("{path}: value {value} out of range ({message})")]
    OutOfRange { path: String, value: i64, message: String },
    #[error("malformed tree: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReverseDoc {
    pub m: i64,
    pub h: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub from: String,
    pub to: String,
    pub eps: i64,
    pub m: i64,
    pub h: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverse: Option<ReverseDoc>,
}

impl EdgeDoc {
    pub fn effective_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| format!("{}->{}", self.from, self.to))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDocument {
    pub p: u32,
    #[serde(rename = "N")]
    pub ram: i64,
    pub d0: i64,
    pub root: String,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A parsed document together with non-fatal warnings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub document: TreeDocument,
    pub warnings: Vec<String>,
}

/// Parses and checks ids and references; `h` values are reduced mod `p`.
pub fn parse_tree_document(text: &str) -> Result<Parsed, DocumentError> {
    let mut doc: TreeDocument = serde_json::from_str(text)
        .map_err(|e| DocumentError::SyntaxError { line: e.line(), column: e.column(), message: e.to_string() })?;
    let mut warnings = Vec::new();
    if !is_prime(doc.p as u64) {
        return Err(DocumentError::OutOfRange { path: "p".into(), value: doc.p as i64, message: "p must be prime".into() });
    }
    if doc.ram <= 0 {
        return Err(DocumentError::OutOfRange { path: "N".into(), value: doc.ram, message: "N must be positive".into() });
    }
    let mut seen = BTreeSet::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        if !seen.insert(v.clone()) {
            return Err(DocumentError::DuplicateId { path: format!("vertices[{i}]"), id: v.clone() });
        }
    }
    if !seen.contains(&doc.root) {
        return Err(DocumentError::DanglingEdge { path: "root".into(), vertex: doc.root.clone() });
    }
    let mut edge_ids = BTreeSet::new();
    let p = doc.p as i64;
    for (i, e) in doc.edges.iter_mut().enumerate() {
        for (field, v) in [("from", &e.from), ("to", &e.to)] {
            if !seen.contains(v) {
                return Err(DocumentError::DanglingEdge { path: format!("edges[{i}].{field}"), vertex: v.clone() });
            }
        }
        if !edge_ids.insert(e.effective_id()) {
            return Err(DocumentError::DuplicateId { path: format!("edges[{i}].id"), id: e.effective_id() });
        }
        if e.eps < 0 {
            return Err(DocumentError::OutOfRange { path: format!("edges[{i}].eps"), value: e.eps, message: "eps must be nonnegative".into() });
        }
        let mut reduce = |h: &mut i64, path: String| {
            if !(0..p).contains(h) {
                let r = h.rem_euclid(p);
                warnings.push(format!("{path}: h = {h} reduced to {r} mod {p}"));
                *h = r;
            }
        };
        reduce(&mut e.h, format!("edges[{i}].h"));
        if let Some(r) = e.reverse.as_mut() {
            reduce(&mut r.h, format!("edges[{i}].reverse.h"));
        }
    }
    Ok(Parsed { document: doc, warnings })
}

impl TreeDocument {
    pub fn to_tree(&self) -> Result<HurwitzTree, DocumentError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.effective_id(),
                from: e.from.clone(),
                to: e.to.clone(),
                eps: e.eps,
                m: e.m,
                h: e.h.rem_euclid(self.p as i64) as u32,
                reverse: e.reverse.as_ref().map(|r| Decoration { m: r.m, h: r.h.rem_euclid(self.p as i64) as u32 }),
            })
            .collect();
        HurwitzTree::new(self.p, self.ram, self.d0, self.root.clone(), self.vertices.clone(), edges).map_err(|e| match e {
            TreeError::MalformedTree(m) => DocumentError::Malformed(m),
            other => DocumentError::Malformed(other.to_string()),
        })
    }

    pub fn from_tree(t: &HurwitzTree) -> Self {
        TreeDocument {
            p: t.p(),
            ram: t.ram(),
            d0: t.d0(),
            root: t.root().to_string(),
            vertices: t.vertices().to_vec(),
            edges: t
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    id: Some(e.id.clone()),
                    from: e.from.clone(),
                    to: e.to.clone(),
                    eps: e.eps,
                    m: e.m,
                    h: e.h as i64,
                    reverse: e.reverse.map(|r| ReverseDoc { m: r.m, h: r.h as i64 }),
                })
                .collect(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

/// Parses text straight into a tree, discarding warnings.
pub fn parse_tree(text: &str) -> Result<HurwitzTree, DocumentError> {
    parse_tree_document(text)?.document.to_tree()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"p": 3, "N": 1, "d0": 2, "root": "a", "vertices": ["a", "b"],
        "edges": [{"from": "a", "to": "b", "eps": 0, "m": 0, "h": 4}]}"#;

    #[test]
    fn minimal_document_parses_with_warning() {
        let parsed = parse_tree_document(MINIMAL).unwrap();
        assert_eq!(parsed.document.edges[0].h, 1);
        assert_eq!(parsed.warnings.len(), 1);
        let t = parsed.document.to_tree().unwrap();
        assert_eq!(t.edges()[0].id, "a->b");
    }

    #[test]
    fn round_trip() {
        let doc = parse_tree_document(MINIMAL).unwrap().document;
        let again = parse_tree_document(&doc.to_json()).unwrap();
        assert_eq!(again.document, doc);
        assert!(again.warnings.is_empty());
    }

    #[test]
    fn semantic_errors_carry_paths() {
        let dangling = MINIMAL.replace(r#""to": "b""#, r#""to": "c""#);
        assert_eq!(
            parse_tree_document(&dangling),
            Err(DocumentError::DanglingEdge { path: "edges[0].to".into(), vertex: "c".into() })
        );
        let dup = MINIMAL.replace(r#"["a", "b"]"#, r#"["a", "a"]"#);
        assert!(matches!(parse_tree_document(&dup), Err(DocumentError::DuplicateId { .. })));
        let float = MINIMAL.replace(r#""eps": 0"#, r#""eps": 0.5"#);
        assert!(matches!(parse_tree_document(&float), Err(DocumentError::SyntaxError { line: 2, .. })));
        let neg = MINIMAL.replace(r#""eps": 0"#, r#""eps": -1"#);
        assert!(matches!(parse_tree_document(&neg), Err(DocumentError::OutOfRange { .. })));
        let unknown = MINIMAL.replace(r#""h": 4"#, r#""h": 4, "x": 1"#);
        assert!(matches!(parse_tree_document(&unknown), Err(DocumentError::SyntaxError { .. })));
    }
}
