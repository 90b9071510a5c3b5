//! Decorated rooted trees `(Γ, r₀, d₀, ε, m, h)`, the axioms H1–H7, the différente law,
//! vertex classification, subtrees and equivalence.
//!
//! Only positive edges are stored. The reverse of an edge carries `(-m, -h)` unless an
//! explicit reverse decoration is given, which exists so hand-edited files can break H1.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("malformed tree: {0}")]
    MalformedTree(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
}

/// `(m, h)` on one oriented edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoration {
    pub m: i64,
    pub h: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub eps: i64,
    pub m: i64,
    pub h: u32,
    /// Explicit decoration of the reversed edge; `None` means the one forced by H1.
    pub reverse: Option<Decoration>,
}

/// One element of `ar(s)`: an edge leaving `s`, possibly the reverse of a stored edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfEdge {
    pub edge: usize,
    pub reversed: bool,
    pub m: i64,
    pub h: u32,
    pub eps: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexKind {
    Multiplicative,
    Additive,
    Etale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    StructuralInvariant,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::StructuralInvariant => f.write_str("StructuralInvariant"),
            a => write!(f, "{a:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "id")]
pub enum Location {
    Tree,
    Vertex(String),
    Edge(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Tree => f.write_str("tree"),
            Location::Vertex(v) => write!(f, "vertex {v}"),
            Location::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub location: Location,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn axioms(&self) -> BTreeSet<Axiom> {
        self.violations.iter().map(|v| v.axiom).collect()
    }

    pub fn has(&self, axiom: Axiom, location: &Location) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom && &v.location == location)
    }
}

/// A finite rooted tree with Hurwitz decorations. Structure (connected, acyclic, oriented
/// away from the root) is enforced at construction; the axioms are checked by [`HurwitzTree::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HurwitzTree {
    p: u32,
    ram: i64,
    d0: i64,
    root: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    incoming: Vec<Option<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl HurwitzTree {
    pub fn new(
        p: u32,
        ram: i64,
        d0: i64,
        root: impl Into<String>,
        vertices: Vec<String>,
        edges: Vec<Edge>,
    ) -> Result<Self, TreeError> {
        let root = root.into();
        let bad = |m: String| Err(TreeError::MalformedTree(m));
        if !is_prime(p as u64) {
            return bad(format!("p = {p} is not prime"));
        }
        if ram <= 0 {
            return bad(format!("N = {ram} must be positive"));
        }
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return bad(format!("duplicate vertex `{v}`"));
            }
        }
        let Some(&root_ix) = index.get(&root) else {
            return bad(format!("root `{root}` is not a vertex"));
        };
        let mut edge_index = BTreeMap::new();
        let mut incoming = vec![None; vertices.len()];
        let mut outgoing = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), k).is_some() {
                return bad(format!("duplicate edge id `{}`", e.id));
            }
            let (Some(&a), Some(&b)) = (index.get(&e.from), index.get(&e.to)) else {
                return bad(format!("edge `{}` references an undeclared vertex", e.id));
            };
            if a == b {
                return bad(format!("edge `{}` is a loop", e.id));
            }
            if e.eps < 0 {
                return bad(format!("edge `{}` has negative eps", e.id));
            }
            if e.h >= p || e.reverse.is_some_and(|r| r.h >= p) {
                return bad(format!("edge `{}` has h outside 0..{p}", e.id));
            }
            if incoming[b].is_some() {
                return bad(format!("vertex `{}` has two incoming edges (cycle or bad orientation)", e.to));
            }
            incoming[b] = Some(k);
            outgoing[a].push(k);
        }
        if incoming[root_ix].is_some() {
            return bad(format!("root `{root}` has an incoming edge"));
        }
        if edges.len() + 1 != vertices.len() {
            return bad(format!("{} vertices but {} edges: not a tree", vertices.len(), edges.len()));
        }
        // Every vertex must be reachable from the root along positive edges.
        let mut seen = vec![false; vertices.len()];
        let mut queue = VecDeque::from([root_ix]);
        seen[root_ix] = true;
        while let Some(v) = queue.pop_front() {
            for &k in &outgoing[v] {
                let w = index[&edges[k].to];
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return bad(format!("vertex `{}` is not reachable from the root", vertices[v]));
        }
        Ok(HurwitzTree { p, ram, d0, root, vertices, edges, index, edge_index, incoming, outgoing })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `N = v_K(ζ - 1)`.
    pub fn ram(&self) -> i64 {
        self.ram
    }

    pub fn d0(&self) -> i64 {
        self.d0
    }

    /// `v_K(p) = N(p-1)`.
    pub fn vkp(&self) -> i128 {
        self.ram as i128 * (self.p as i128 - 1)
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Result<&Edge, TreeError> {
        self.edge_index.get(id).map(|&k| &self.edges[k]).ok_or_else(|| TreeError::UnknownEdge(id.into()))
    }

    pub fn edge_at(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    fn vix(&self, s: &str) -> Result<usize, TreeError> {
        self.index.get(s).copied().ok_or_else(|| TreeError::UnknownVertex(s.into()))
    }

    pub fn has_vertex(&self, s: &str) -> bool {
        self.index.contains_key(s)
    }

    /// The positive edge ending at `s`, `None` at the root.
    pub fn incoming(&self, s: &str) -> Result<Option<&Edge>, TreeError> {
        Ok(self.incoming[self.vix(s)?].map(|k| &self.edges[k]))
    }

    pub fn outgoing(&self, s: &str) -> Result<Vec<&Edge>, TreeError> {
        Ok(self.outgoing[self.vix(s)?].iter().map(|&k| &self.edges[k]).collect())
    }

    /// Decoration of the reverse of edge `k`.
    pub fn reverse_decoration(&self, k: usize) -> Decoration {
        let e = &self.edges[k];
        e.reverse.unwrap_or(Decoration { m: -e.m, h: (self.p - e.h) % self.p })
    }

    /// `ar(s)`: the reverse of the incoming edge first, then outgoing edges in file order.
    pub fn ar(&self, s: &str) -> Result<Vec<HalfEdge>, TreeError> {
        let v = self.vix(s)?;
        let mut out = Vec::new();
        if let Some(k) = self.incoming[v] {
            let r = self.reverse_decoration(k);
            out.push(HalfEdge { edge: k, reversed: true, m: r.m, h: r.h, eps: self.edges[k].eps });
        }
        for &k in &self.outgoing[v] {
            let e = &self.edges[k];
            out.push(HalfEdge { edge: k, reversed: false, m: e.m, h: e.h, eps: e.eps });
        }
        Ok(out)
    }

    pub fn valence(&self, s: &str) -> Result<usize, TreeError> {
        let v = self.vix(s)?;
        Ok(self.outgoing[v].len() + usize::from(self.incoming[v].is_some()))
    }

    /// No outgoing positive edge.
    pub fn is_maximal(&self, s: &str) -> Result<bool, TreeError> {
        Ok(self.outgoing[self.vix(s)?].is_empty())
    }

    /// Positive edges from the root to `s`, root side first.
    pub fn path_edges(&self, s: &str) -> Result<Vec<&Edge>, TreeError> {
        let mut v = self.vix(s)?;
        let mut out = Vec::new();
        while let Some(k) = self.incoming[v] {
            out.push(&self.edges[k]);
            v = self.index[&self.edges[k].from];
        }
        out.reverse();
        Ok(out)
    }

    /// `d(s) = d₀ + (p-1) Σ m(a)ε(a)` over the positive chain from the root.
    pub fn differente(&self, s: &str) -> Result<i128, TreeError> {
        let sum: i128 = self.path_edges(s)?.iter().map(|e| e.m as i128 * e.eps as i128).sum();
        Ok(self.d0 as i128 + (self.p as i128 - 1) * sum)
    }

    pub fn classify_vertex(&self, s: &str) -> Result<VertexKind, TreeError> {
        let d = self.differente(s)?;
        Ok(if d == self.vkp() {
            VertexKind::Multiplicative
        } else if d == 0 {
            VertexKind::Etale
        } else {
            VertexKind::Additive
        })
    }

    /// Positive edges with `ε = 0` and `m = 0`.
    pub fn leaves(&self) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.eps == 0 && e.m == 0).collect()
    }

    /// Vertices `s` with `from ≤ s` (including `from`).
    pub fn descendants(&self, from: &str) -> Result<Vec<String>, TreeError> {
        let mut out = Vec::new();
        let mut stack = vec![self.vix(from)?];
        while let Some(v) = stack.pop() {
            out.push(self.vertices[v].clone());
            for &k in self.outgoing[v].iter().rev() {
                stack.push(self.index[&self.edges[k].to]);
            }
        }
        Ok(out)
    }

    /// `Γ[a]` rooted at `o(a)` with `d₀ = d(o(a))`.
    pub fn subtree(&self, edge_id: &str) -> Result<HurwitzTree, TreeError> {
        let a = self.edge(edge_id)?;
        let mut verts = vec![a.from.clone()];
        verts.extend(self.descendants(&a.to)?);
        let keep: BTreeSet<&String> = verts.iter().collect();
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| e.id == a.id || (keep.contains(&e.from) && keep.contains(&e.to) && e.from != a.from))
            .cloned()
            .collect();
        let d0 = i64::try_from(self.differente(&a.from)?)
            .map_err(|_| TreeError::MalformedTree("différente does not fit in i64".into()))?;
        HurwitzTree::new(self.p, self.ram, d0, a.from.clone(), verts, edges)
    }

    /// Checks H1–H7 and the invariants on `d₀`.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let p = self.p as i64;
        let vkp = self.vkp();
        let mut push = |axiom, location, message: String| out.push(Violation { axiom, location, message });

        if self.d0 % (p - 1) != 0 || self.d0 < 0 || self.d0 as i128 > vkp {
            push(
                Axiom::StructuralInvariant,
                Location::Tree,
                format!("d0 = {} must be a multiple of p-1 in [0, {vkp}]", self.d0),
            );
        }

        for (k, e) in self.edges.iter().enumerate() {
            let loc = Location::Edge(e.id.clone());
            let rev = self.reverse_decoration(k);
            if rev.m != -e.m || !(rev.h + e.h).is_multiple_of(self.p) {
                push(
                    Axiom::H1,
                    loc.clone(),
                    format!("reverse carries (m, h) = ({}, {}), expected ({}, {})", rev.m, rev.h, -e.m, (self.p - e.h) % self.p),
                );
            }
            let mut decorations = vec![("", e.m, e.h)];
            if e.reverse.is_some() {
                decorations.push(("reverse ", rev.m, rev.h));
            }
            for (side, m, h) in decorations {
                if (m == 0) == (h == 0) {
                    push(Axiom::H2, loc.clone(), format!("{side}m = {m} and h = {h}: exactly one must vanish"));
                } else if m != 0 && m % p == 0 {
                    push(Axiom::H2, loc.clone(), format!("{side}m = {m} is divisible by p"));
                }
            }
            if e.eps == 0 && !self.outgoing[self.index[&e.to]].is_empty() {
                push(Axiom::H4, loc.clone(), format!("eps = 0 but terminal vertex `{}` is not maximal", e.to));
            }
            if e.eps == 0 && e.m == 0 {
                let origin = self.classify_vertex(&e.from).unwrap();
                if origin != VertexKind::Multiplicative {
                    push(Axiom::H6, loc, format!("leaf origin `{}` is {origin:?}", e.from));
                }
            }
        }

        for s in &self.vertices {
            let loc = Location::Vertex(s.clone());
            let ar = self.ar(s).unwrap();
            match ar.len() {
                2 => push(Axiom::H3, loc.clone(), "valence 2".into()),
                n if n >= 3 => {
                    let sm: i128 = ar.iter().map(|a| a.m as i128 + 1).sum();
                    if sm != 2 {
                        push(Axiom::H3, loc.clone(), format!("sum of m+1 over ar(s) is {sm}, expected 2"));
                    }
                    let sh: u64 = ar.iter().map(|a| a.h as u64).sum();
                    if !sh.is_multiple_of(self.p as u64) {
                        push(Axiom::H3, loc.clone(), format!("sum of h over ar(s) is {} mod p", sh % self.p as u64));
                    }
                }
                _ => {}
            }
            let d = self.differente(s).unwrap();
            if d < 0 || d > vkp {
                push(Axiom::H5, loc.clone(), format!("d = {d} outside [0, {vkp}]"));
            }
            let kind = self.classify_vertex(s).unwrap();
            if kind != VertexKind::Multiplicative {
                for a in ar.iter().filter(|a| a.h != 0) {
                    let side = if a.reversed { "reverse of " } else { "" };
                    push(
                        Axiom::H7,
                        loc.clone(),
                        format!("{kind:?} vertex: {side}edge {} has h = {}", self.edges[a.edge].id, a.h),
                    );
                }
            }
        }
        ValidationReport { violations: out }
    }

    /// Canonical encoding of the decorated rooted tree, independent of ids and sibling order.
    pub fn canonical_form(&self) -> String {
        let root = self.index[&self.root];
        format!("p{};N{};d{};{}", self.p, self.ram, self.d0, self.canon(root))
    }

    fn canon(&self, v: usize) -> String {
        let mut kids: Vec<String> = self.outgoing[v]
            .iter()
            .map(|&k| {
                let e = &self.edges[k];
                let r = self.reverse_decoration(k);
                let child = self.canon(self.index[&e.to]);
                format!("[{},{},{},{},{}:{}]", e.eps, e.m, e.h, r.m, r.h, child)
            })
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }

    /// Root-preserving isomorphism carrying all decorations.
    pub fn is_equivalent(&self, other: &HurwitzTree) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// Same tree with vertex and edge ids renamed.
    pub fn relabeled(&self, vmap: impl Fn(&str) -> String, emap: impl Fn(&str) -> String) -> HurwitzTree {
        let vertices = self.vertices.iter().map(|v| vmap(v)).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { id: emap(&e.id), from: vmap(&e.from), to: vmap(&e.to), ..e.clone() })
            .collect();
        HurwitzTree::new(self.p, self.ram, self.d0, vmap(&self.root), vertices, edges).expect("relabeling is a bijection")
    }
}

/// Incremental construction; vertex ids are collected from the edges in first-seen order.
#[derive(Clone, Debug)]
pub struct TreeBuilder {
    p: u32,
    ram: i64,
    d0: i64,
    root: String,
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl TreeBuilder {
    pub fn new(p: u32, ram: i64, d0: i64, root: &str) -> Self {
        TreeBuilder { p, ram, d0, root: root.into(), vertices: vec![root.into()], edges: Vec::new() }
    }

    fn note(&mut self, v: &str) {
        if !self.vertices.iter().any(|w| w == v) {
            self.vertices.push(v.into());
        }
    }

    /// Adds a positive edge with id `from->to`.
    pub fn edge(self, from: &str, to: &str, eps: i64, m: i64, h: u32) -> Self {
        let id = format!("{from}->{to}");
        self.named_edge(&id, from, to, eps, m, h)
    }

    pub fn named_edge(mut self, id: &str, from: &str, to: &str, eps: i64, m: i64, h: u32) -> Self {
        self.note(from);
        self.note(to);
        self.edges.push(Edge { id: id.into(), from: from.into(), to: to.into(), eps, m, h, reverse: None });
        self
    }

    /// `count` leaves at `from` named `{from}.f{i}`, with the given `h` values.
    pub fn leaves(mut self, from: &str, hs: &[u32]) -> Self {
        for h in hs {
            let i = self.edges.iter().filter(|e| e.from == from && e.to.starts_with(&format!("{from}.f"))).count();
            self = self.edge(from, &format!("{from}.f{i}"), 0, 0, *h);
        }
        self
    }

    pub fn build(self) -> Result<HurwitzTree, TreeError> {
        HurwitzTree::new(self.p, self.ram, self.d0, self.root, self.vertices, self.edges)
    }
}
