//! Residue vectors, adapted partitions, the small-partition criterion, point search on
//! `X*_e` and differential certificates for vertices.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::is_prime;
use crate::char_p_diff::{self, CertificateKind, CharPError, EdgeAssignment, FqElt, GaloisField, Point, RatFunc};
use crate::hurwitz_tree::{HalfEdge, HurwitzTree, TreeError, VertexKind};

/// Default cap on `|I|` for the partition criterion.
pub const DEFAULT_MAX_INDEX: usize = 40;
/// Default cap on candidate tuples examined by [`search_point`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizabilityError {
    #[error("invalid residue vector: {0}")]
    InvalidResidueVector(String),
    #[error("partition does not partition the index set 0..{0}")]
    IndexMismatch(usize),
    #[error("partition is not adapted")]
    NotAdapted,
    #[error("index set of size {size} exceeds the limit {limit}")]
    BudgetExceeded { size: usize, limit: usize },
    #[error("unsupported vertex shape: {0}")]
    UnsupportedShape(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    CharP(#[from] CharPError),
}

type Result<T> = std::result::Result<T, RealizabilityError>;

/// Nonzero elements of `F_p` summing to zero, stored as integers in `1..p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueVector {
    p: u32,
    entries: Vec<u32>,
}

impl ResidueVector {
    /// Reduces each integer mod `p`.
    pub fn new(p: u32, entries: &[i64]) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(RealizabilityError::InvalidResidueVector(format!("p = {p} is not prime")));
        }
        if entries.is_empty() {
            return Err(RealizabilityError::InvalidResidueVector("empty".into()));
        }
        let entries: Vec<u32> = entries.iter().map(|e| e.rem_euclid(p as i64) as u32).collect();
        if let Some(i) = entries.iter().position(|&e| e == 0) {
            return Err(RealizabilityError::InvalidResidueVector(format!("entry {i} is 0 mod {p}")));
        }
        let s: u64 = entries.iter().map(|&e| e as u64).sum();
        if !s.is_multiple_of(p as u64) {
            return Err(RealizabilityError::InvalidResidueVector(format!("sum is {} mod {p}", s % p as u64)));
        }
        Ok(ResidueVector { p, entries })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries as signed representatives in `(-p/2, p/2]`.
    pub fn signed(&self) -> Vec<i64> {
        let p = self.p as i64;
        self.entries.iter().map(|&e| if 2 * e as i64 > p { e as i64 - p } else { e as i64 }).collect()
    }

    fn counts(&self) -> Vec<u32> {
        let mut c = vec![0; self.p as usize];
        for &e in &self.entries {
            c[e as usize] += 1;
        }
        c
    }
}

/// Blocks of indices into a residue vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        Partition { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn check(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.blocks.iter().flatten() {
            if i >= n || seen[i] {
                return Err(RealizabilityError::IndexMismatch(n));
            }
            seen[i] = true;
        }
        if self.blocks.iter().any(|b| b.is_empty()) || seen.iter().any(|s| !s) {
            return Err(RealizabilityError::IndexMismatch(n));
        }
        Ok(())
    }
}

/// Every block sums to zero in `F_p`.
pub fn is_adapted(part: &Partition, e: &ResidueVector) -> Result<bool> {
    part.check(e.len())?;
    let p = e.p as u64;
    Ok(part.blocks.iter().all(|b| b.iter().map(|&i| e.entries[i] as u64).sum::<u64>() % p == 0))
}

/// Whether a nonempty proper sub-multiset of `values` sums to zero mod `p`.
/// Assumes the whole multiset sums to zero: a zero-sum proper part exists iff one avoids the last element.
pub fn has_proper_zero_sum(values: &[u32], p: u32) -> bool {
    let Some((_, rest)) = values.split_last() else {
        return false;
    };
    let p = p as usize;
    let mut reach = vec![false; p];
    for &v in rest {
        let prev = reach.clone();
        reach[v as usize % p] = true;
        for (r, hit) in prev.iter().enumerate() {
            if *hit {
                reach[(r + v as usize) % p] = true;
            }
        }
        if reach[0] {
            return true;
        }
    }
    false
}

/// No strictly finer adapted partition exists.
pub fn is_maximal_adapted(part: &Partition, e: &ResidueVector) -> Result<bool> {
    if !is_adapted(part, e)? {
        return Err(RealizabilityError::NotAdapted);
    }
    Ok(part.blocks.iter().all(|b| {
        let vals: Vec<u32> = b.iter().map(|&i| e.entries[i]).collect();
        !has_proper_zero_sum(&vals, e.p)
    }))
}

/// Count vectors (indexed by residue) of minimal zero-sum sub-multisets of `total`.
fn atoms(total: &[u32], p: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; total.len()];
    fn rec(r: usize, total: &[u32], cur: &mut Vec<u32>, p: u32, out: &mut Vec<Vec<u32>>) {
        if r == total.len() {
            let vals: Vec<u32> = cur.iter().enumerate().flat_map(|(v, &c)| std::iter::repeat_n(v as u32, c as usize)).collect();
            let s: u64 = vals.iter().map(|&v| v as u64).sum();
            if !vals.is_empty() && s.is_multiple_of(p as u64) && !has_proper_zero_sum(&vals, p) {
                out.push(cur.clone());
            }
            return;
        }
        for c in 0..=total[r] {
            cur[r] = c;
            rec(r + 1, total, cur, p, out);
        }
        cur[r] = 0;
    }
    rec(1, total, &mut cur, p, &mut out);
    out
}

/// A maximal adapted partition with the fewest blocks.
pub fn min_maximal_partition(e: &ResidueVector, max_index: usize) -> Result<Partition> {
    if e.len() > max_index {
        return Err(RealizabilityError::BudgetExceeded { size: e.len(), limit: max_index });
    }
    let total = e.counts();
    let atoms = atoms(&total, e.p);
    let mut memo: HashMap<Vec<u32>, Option<(usize, usize)>> = HashMap::new();
    // best(c) = fewest atoms covering c; each step takes an atom containing the first nonzero residue of c.
    fn best(c: &[u32], atoms: &[Vec<u32>], memo: &mut HashMap<Vec<u32>, Option<(usize, usize)>>) -> Option<(usize, usize)> {
        let Some(first) = c.iter().position(|&x| x > 0) else {
            return Some((0, usize::MAX));
        };
        if let Some(v) = memo.get(c) {
            return *v;
        }
        let mut out: Option<(usize, usize)> = None;
        for (k, a) in atoms.iter().enumerate() {
            if a[first] == 0 || a.iter().zip(c).any(|(x, y)| x > y) {
                continue;
            }
            let rest: Vec<u32> = c.iter().zip(a).map(|(y, x)| y - x).collect();
            if let Some((n, _)) = best(&rest, atoms, memo) {
                if out.is_none_or(|(b, _)| n + 1 < b) {
                    out = Some((n + 1, k));
                }
            }
        }
        memo.insert(c.to_vec(), out);
        out
    }
    best(&total, &atoms, &mut memo).expect("the singleton-free decomposition always exists");
    // Replay the choices, assigning concrete indices.
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); e.p as usize];
    for (i, &v) in e.entries.iter().enumerate() {
        pools[v as usize].push(i);
    }
    let mut c = total;
    let mut blocks = Vec::new();
    while let Some((_, k)) = memo.get(&c).copied().flatten().filter(|_| c.iter().any(|&x| x > 0)) {
        let a = &atoms[k];
        let mut block = Vec::new();
        for (v, &n) in a.iter().enumerate() {
            for _ in 0..n {
                block.push(pools[v].remove(0));
            }
        }
        block.sort_unstable();
        blocks.push(block);
        c = c.iter().zip(a).map(|(y, x)| y - x).collect();
    }
    blocks.sort();
    Ok(Partition { blocks })
}

/// Some maximal adapted partition has at most `bound` blocks.
pub fn criterion_small_partition(e: &ResidueVector, bound: usize) -> Result<bool> {
    criterion_small_partition_with_limit(e, bound, DEFAULT_MAX_INDEX)
}

pub fn criterion_small_partition_with_limit(e: &ResidueVector, bound: usize, max_index: usize) -> Result<bool> {
    Ok(min_maximal_partition(e, max_index)?.len() <= bound)
}

/// Which power sums define the variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape")]
pub enum PointShape {
    /// `|I| = m+1`, exponents `1..=m-1`.
    Disk,
    /// `|I| = m1+m2`, exponents `-(m2-1)..=m1-1` except 0, all coordinates nonzero.
    Annulus { m1: i64, m2: i64 },
}

impl PointShape {
    /// Exponents `ν` prime to `p` whose power sums must vanish.
    pub fn exponents(&self, len: usize, p: u32) -> Vec<i64> {
        let (lo, hi) = match *self {
            PointShape::Disk => (1, len as i64 - 2),
            PointShape::Annulus { m1, m2 } => (-(m2 - 1), m1 - 1),
        };
        (lo..=hi).filter(|&v| v != 0 && v % p as i64 != 0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundPoint {
    pub p: u32,
    pub n: u32,
    pub coords: Vec<FqElt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub point: Option<FoundPoint>,
    pub tuples_examined: u64,
    pub budget_exhausted: bool,
}

/// Power sums `Σ e_i t_i^ν` for the given exponents.
pub fn power_sums(k: &GaloisField, e: &ResidueVector, coords: &[FqElt], exponents: &[i64]) -> Option<Vec<FqElt>> {
    exponents
        .iter()
        .map(|&nu| {
            coords.iter().zip(&e.entries).try_fold(k.zero(), |acc, (&t, &ei)| {
                Some(k.add(acc, k.mul_int(k.pow(t, nu)?, ei as i64)))
            })
        })
        .collect()
}

/// Independent check of a candidate point.
pub fn is_point_of(k: &GaloisField, e: &ResidueVector, shape: PointShape, coords: &[FqElt]) -> bool {
    if coords.len() != e.len() {
        return false;
    }
    let mut sorted = coords.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != coords.len() {
        return false;
    }
    if matches!(shape, PointShape::Annulus { .. }) && coords.iter().any(|c| c.0 == 0) {
        return false;
    }
    match power_sums(k, e, coords, &shape.exponents(e.len(), e.p)) {
        Some(sums) => sums.iter().all(|s| s.0 == 0),
        None => false,
    }
}

struct Searcher<'a> {
    k: &'a GaloisField,
    add: Option<Vec<u32>>,
    q: usize,
    weights: Vec<u32>,
    /// `scaled[w][x][j] = w · x^{ν_j}` for each residue `w`.
    scaled: Vec<Vec<Vec<FqElt>>>,
    group_start: Vec<bool>,
    min_value: u32,
    budget: u64,
    examined: u64,
    coords: Vec<FqElt>,
    used: Vec<bool>,
}

impl Searcher<'_> {
    fn add(&self, a: FqElt, b: FqElt) -> FqElt {
        match &self.add {
            Some(t) => FqElt(t[a.0 as usize * self.q + b.0 as usize]),
            None => self.k.add(a, b),
        }
    }

    fn place(&mut self, i: usize, x: FqElt, sums: &[FqElt]) -> Vec<FqElt> {
        self.coords[i] = x;
        self.used[x.0 as usize] = true;
        let w = self.weights[i] as usize;
        sums.iter().zip(&self.scaled[w][x.0 as usize]).map(|(s, t)| self.add(*s, *t)).collect()
    }

    /// Depth-first over lexicographic tuples; `true` once a point is found or the budget runs out.
    fn go(&mut self, i: usize, sums: Vec<FqElt>) -> bool {
        if i == self.coords.len() {
            self.examined += 1;
            return sums.iter().all(|s| s.0 == 0) || self.examined >= self.budget;
        }
        let start = if self.group_start[i] { self.min_value } else { self.coords[i - 1].0 + 1 };
        for x in start..self.q as u32 {
            if self.used[x as usize] {
                continue;
            }
            let next = self.place(i, FqElt(x), &sums);
            if self.go(i + 1, next) {
                return true;
            }
            self.used[x as usize] = false;
        }
        false
    }
}

/// Searches `X*_e(F_{p^n})` for `n = 1..=n_max`. `None` is not a proof of emptiness.
///
/// Disk shape fixes `t_0 = 0, t_1 = 1` (affine normalization); annulus shape fixes `t_0 = 1`
/// (scaling). Coordinates of equal residues beyond the fixed ones are taken increasing.
pub fn search_point(e: &ResidueVector, shape: PointShape, n_max: u32, budget: u64) -> SearchOutcome {
    let p = e.p;
    let len = e.len();
    let mut examined = 0u64;
    if let PointShape::Annulus { m1, m2 } = shape {
        if m1 < 1 || m2 < 1 || (m1 + m2) as usize != len {
            return SearchOutcome { point: None, tuples_examined: 0, budget_exhausted: false };
        }
    }
    let annulus = matches!(shape, PointShape::Annulus { .. });
    let exps = shape.exponents(len, p);
    // Group equal residues among the free coordinates so they can be ordered.
    let fixed = if annulus { 1 } else { 2.min(len) };
    let mut order: Vec<usize> = (0..len).collect();
    order[fixed..].sort_by_key(|&i| e.entries[i]);
    let weights: Vec<u32> = order.iter().map(|&i| e.entries[i]).collect();
    for n in 1..=n_max {
        let Ok(k) = GaloisField::new(p, n) else { break };
        let q = k.size() as usize;
        let available = if annulus { q - 1 } else { q };
        if available < len {
            continue;
        }
        let pw: Vec<Vec<FqElt>> = k
            .elements()
            .map(|x| exps.iter().map(|&nu| k.pow(x, nu).unwrap_or(FqElt(0))).collect())
            .collect();
        let scaled = (0..p)
            .map(|w| pw.iter().map(|row| row.iter().map(|&v| k.mul_int(v, w as i64)).collect()).collect())
            .collect();
        let add = (q <= 1024).then(|| {
            let mut t = vec![0u32; q * q];
            for a in 0..q {
                for b in 0..q {
                    t[a * q + b] = k.add(FqElt(a as u32), FqElt(b as u32)).0;
                }
            }
            t
        });
        let group_start = (0..len).map(|i| i <= fixed || weights[i] != weights[i - 1]).collect();
        let mut s = Searcher {
            k: &k,
            add,
            q,
            weights: weights.clone(),
            scaled,
            group_start,
            min_value: if annulus { 1 } else { 0 },
            budget: budget.saturating_sub(examined),
            examined: 0,
            coords: vec![FqElt(0); len],
            used: vec![false; q],
        };
        let mut sums = vec![FqElt(0); exps.len()];
        let start = if annulus {
            s.used[0] = true;
            sums = s.place(0, FqElt(1), &sums);
            1
        } else {
            sums = s.place(0, FqElt(0), &sums);
            if len > 1 {
                sums = s.place(1, FqElt(1), &sums);
            }
            fixed
        };
        let stopped = s.go(start, sums);
        examined += s.examined;
        let reordered = ResidueVector { p, entries: weights.clone() };
        if stopped && is_point_of(&k, &reordered, shape, &s.coords) {
            let mut coords = vec![FqElt(0); len];
            for (slot, &i) in order.iter().enumerate() {
                coords[i] = s.coords[slot];
            }
            return SearchOutcome { point: Some(FoundPoint { p, n, coords }), tuples_examined: examined, budget_exhausted: false };
        }
        if examined >= budget {
            return SearchOutcome { point: None, tuples_examined: examined, budget_exhausted: true };
        }
    }
    SearchOutcome { point: None, tuples_examined: examined, budget_exhausted: false }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexShape {
    DiskMult,
    DiskAdd,
    AnnMult,
    AnnAdd,
}

impl VertexShape {
    pub fn is_mult(self) -> bool {
        matches!(self, VertexShape::DiskMult | VertexShape::AnnMult)
    }
}

/// Reference to an element of `ar(s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdgeRef {
    pub edge: String,
    pub reversed: bool,
    pub m: i64,
    pub h: u32,
}

/// The residue vector attached to a vertex, with the edge bookkeeping needed for certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexVector {
    pub e: ResidueVector,
    pub bound: usize,
    pub shape: VertexShape,
    /// Edges with negative `m`: placed at infinity, then at 0.
    pub negative: Vec<HalfEdgeRef>,
    /// Indices `0..others.len()` of `e` correspond to these edges; the rest is padding.
    pub others: Vec<HalfEdgeRef>,
    pub padding: usize,
    /// Entries before reduction mod `p`: `h` or `m` of each edge, then `-1` for padding.
    pub raw: Vec<i64>,
}

impl VertexVector {
    pub fn point_shape(&self) -> PointShape {
        match self.shape {
            VertexShape::DiskMult | VertexShape::DiskAdd => PointShape::Disk,
            _ => PointShape::Annulus { m1: -self.negative[0].m, m2: -self.negative[1].m },
        }
    }
}

fn half_ref(t: &HurwitzTree, a: &HalfEdge) -> HalfEdgeRef {
    HalfEdgeRef { edge: t.edge_at(a.edge).id.clone(), reversed: a.reversed, m: a.m, h: a.h }
}

pub fn vertex_residue_vector(t: &HurwitzTree, s: &str) -> Result<VertexVector> {
    let unsupported = |m: String| Err(RealizabilityError::UnsupportedShape(m));
    let ar = t.ar(s)?;
    if ar.len() < 3 {
        return unsupported(format!("vertex `{s}` has valence {}", ar.len()));
    }
    let kind = t.classify_vertex(s)?;
    if kind == VertexKind::Etale {
        return unsupported(format!("vertex `{s}` is étale"));
    }
    let (neg, rest): (Vec<&HalfEdge>, Vec<&HalfEdge>) = ar.iter().partition(|a| a.m < 0);
    let annulus = match neg.len() {
        1 => false,
        2 => true,
        n => return unsupported(format!("vertex `{s}` has {n} edges with negative m")),
    };
    let p = t.p();
    let total: i64 = neg.iter().map(|a| -a.m).sum();
    let bound = neg.iter().map(|a| (-a.m / p as i64) as usize).sum::<usize>() + 1;
    let size = if annulus { total } else { total + 1 };
    let (shape, raw): (VertexShape, Vec<i64>) = if kind == VertexKind::Multiplicative {
        if let Some(a) = rest.iter().find(|a| a.m != 0) {
            return unsupported(format!("multiplicative vertex `{s}` has edge {} with m = {}", t.edge_at(a.edge).id, a.m));
        }
        let shape = if annulus { VertexShape::AnnMult } else { VertexShape::DiskMult };
        (shape, rest.iter().map(|a| a.h as i64).collect())
    } else {
        let shape = if annulus { VertexShape::AnnAdd } else { VertexShape::DiskAdd };
        (shape, rest.iter().map(|a| a.m).collect())
    };
    if raw.len() as i64 > size {
        return unsupported(format!("vertex `{s}` has more edges than its residue vector allows"));
    }
    let padding = if shape.is_mult() {
        if raw.len() as i64 != size {
            return unsupported(format!("vertex `{s}`: {} edges, expected {size}", raw.len()));
        }
        0
    } else {
        (size - raw.len() as i64) as usize
    };
    let mut entries = raw;
    entries.extend(std::iter::repeat_n(-1, padding));
    let e = ResidueVector::new(p, &entries)?;
    Ok(VertexVector {
        raw: entries,
        e,
        bound,
        shape,
        negative: neg.iter().map(|a| half_ref(t, a)).collect(),
        others: rest.iter().map(|a| half_ref(t, a)).collect(),
        padding,
    })
}

/// A differential certificate for one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub p: u32,
    pub field_degree: u32,
    pub kind: CertificateKind,
    /// `t_i` for each index of the residue vector.
    pub point: Vec<FqElt>,
    /// Human-readable `u`.
    pub u: String,
    /// Where each edge of `ar(s)` goes.
    pub assignment: Vec<(HalfEdgeRef, Point)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum VertexStatus {
    ProvedByCriterion,
    Certified { certificate: Box<Certificate> },
    Unknown,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyOutcome {
    pub vertex: String,
    pub status: VertexStatus,
    pub criterion_holds: Option<bool>,
    pub witness_partition: Option<Partition>,
    pub residue_vector: Option<VertexVector>,
    pub search: Option<SearchOutcome>,
}

/// Builds `u` and the edge assignment from a point and checks them with [`char_p_diff::verify_certificate`].
pub fn build_certificate(vv: &VertexVector, pt: &FoundPoint) -> Result<Option<(Certificate, RatFunc)>> {
    let k = GaloisField::new(pt.p, pt.n)?;
    let mut u = RatFunc::constant(k.one());
    for (i, &ti) in pt.coords.iter().enumerate() {
        let exp = match (vv.shape.is_mult(), vv.others.get(i)) {
            (true, _) => vv.e.entries()[i] as i64,
            (false, Some(edge)) => -edge.m,
            (false, None) => 1,
        };
        u = u.mul(&k, &RatFunc::linear_power(&k, ti, exp));
    }
    let mut assignment: Vec<(HalfEdgeRef, Point)> = Vec::new();
    let places = [Point::Infinity, Point::Finite(k.zero())];
    for (edge, place) in vv.negative.iter().zip(places) {
        assignment.push((edge.clone(), place));
    }
    for (edge, &ti) in vv.others.iter().zip(&pt.coords) {
        assignment.push((edge.clone(), Point::Finite(ti)));
    }
    let kind = if vv.shape.is_mult() { CertificateKind::Mult } else { CertificateKind::Add };
    let edges: Vec<EdgeAssignment> = assignment.iter().map(|(e, pt)| EdgeAssignment { point: *pt, m: e.m, h: e.h }).collect();
    if !char_p_diff::verify_certificate(&k, &u, &edges, kind)? {
        return Ok(None);
    }
    let cert = Certificate {
        p: pt.p,
        field_degree: pt.n,
        kind,
        point: pt.coords.clone(),
        u: u.format(&k),
        assignment,
    };
    Ok(Some((cert, u)))
}

/// Criterion first, then a certificate search. A found certificate takes precedence in the status.
pub fn certify_vertex(t: &HurwitzTree, s: &str, n_max: u32, budget: u64) -> Result<CertifyOutcome> {
    let mut out = CertifyOutcome {
        vertex: s.to_string(),
        status: VertexStatus::NotApplicable,
        criterion_holds: None,
        witness_partition: None,
        residue_vector: None,
        search: None,
    };
    if t.valence(s)? < 3 {
        return Ok(out);
    }
    let vv = vertex_residue_vector(t, s)?;
    let crit = match min_maximal_partition(&vv.e, DEFAULT_MAX_INDEX) {
        Ok(part) => {
            let holds = part.len() <= vv.bound;
            out.witness_partition = Some(part);
            Some(holds)
        }
        Err(RealizabilityError::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    out.criterion_holds = crit;
    let search = search_point(&vv.e, vv.point_shape(), n_max, budget);
    let cert = match &search.point {
        Some(pt) => build_certificate(&vv, pt)?.map(|(c, _)| c),
        None => None,
    };
    out.status = match (cert, crit) {
        (Some(c), _) => VertexStatus::Certified { certificate: Box::new(c) },
        (None, Some(true)) => VertexStatus::ProvedByCriterion,
        _ => VertexStatus::Unknown,
    };
    out.search = Some(search);
    out.residue_vector = Some(vv);
    Ok(out)
}

/// Blocks as lists of labels, e.g. the unreduced entries of a vertex vector.
pub fn block_values(part: &Partition, labels: &[i64]) -> Vec<Vec<i64>> {
    part.blocks.iter().map(|b| b.iter().map(|&i| labels[i]).collect()).collect()
}

/// Multiset of residues, for comparing partitions up to index choice.
pub fn value_profile(part: &Partition, e: &ResidueVector) -> Vec<BTreeMap<u32, usize>> {
    let mut out: Vec<BTreeMap<u32, usize>> = part
        .blocks
        .iter()
        .map(|b| {
            let mut m = BTreeMap::new();
            for &i in b {
                *m.entry(e.entries[i]).or_insert(0) += 1;
            }
            m
        })
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(p: u32, xs: &[i64]) -> ResidueVector {
        ResidueVector::new(p, xs).unwrap()
    }

    fn neg_ones(n: usize) -> Vec<i64> {
        vec![-1; n]
    }

    #[test]
    fn residue_vector_invariants() {
        assert!(ResidueVector::new(5, &[1, 4]).is_ok());
        assert!(ResidueVector::new(5, &[1, 3]).is_err());
        assert!(ResidueVector::new(5, &[5, 0]).is_err());
        assert!(ResidueVector::new(4, &[1, 3]).is_err());
    }

    #[test]
    fn quoted_partition_is_adapted_and_maximal() {
        let mut xs = vec![4, 4, 1];
        xs.extend(neg_ones(9));
        let e = rv(5, &xs);
        let part = Partition::new(vec![vec![0, 3, 4, 5, 6], vec![1, 7, 8, 9, 10], vec![2, 11]]);
        assert!(is_adapted(&part, &e).unwrap());
        assert!(is_maximal_adapted(&part, &e).unwrap());
        assert!(criterion_small_partition(&e, 3).unwrap());
        assert!(!is_adapted(&Partition::new(vec![vec![0], (1..12).collect()]), &e).unwrap());
        assert!(is_adapted(&Partition::new(vec![(0..12).collect()]), &e).unwrap());
        assert!(!is_maximal_adapted(&Partition::new(vec![(0..12).collect()]), &e).unwrap());
    }

    #[test]
    fn partition_errors() {
        let e = rv(2, &[1, 1]);
        assert_eq!(is_adapted(&Partition::new(vec![vec![0]]), &e), Err(RealizabilityError::IndexMismatch(2)));
        assert_eq!(is_adapted(&Partition::new(vec![vec![0, 0, 1]]), &e), Err(RealizabilityError::IndexMismatch(2)));
        assert_eq!(is_maximal_adapted(&Partition::new(vec![vec![0], vec![1]]), &e), Err(RealizabilityError::NotAdapted));
    }

    #[test]
    fn pairs_are_maximal_for_p2() {
        let e = rv(2, &[1, 1, 1, 1]);
        let part = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        assert!(is_maximal_adapted(&part, &e).unwrap());
        assert_eq!(min_maximal_partition(&e, 40).unwrap().len(), 2);
    }

    #[test]
    fn second_quoted_example() {
        let mut xs = vec![2, 3, 4];
        xs.extend(neg_ones(9));
        assert!(criterion_small_partition(&rv(5, &xs), 3).unwrap());
    }

    #[test]
    fn budget_on_index_set() {
        let e = rv(2, &vec![1; 42]);
        assert!(matches!(criterion_small_partition(&e, 100), Err(RealizabilityError::BudgetExceeded { .. })));
    }

    #[test]
    fn search_examples() {
        let out = search_point(&rv(2, &[1, 1, 1, 1]), PointShape::Disk, 4, DEFAULT_BUDGET);
        let pt = out.point.unwrap();
        assert_eq!(pt.n, 2);
        let k = GaloisField::new(2, 2).unwrap();
        assert!(is_point_of(&k, &rv(2, &[1, 1, 1, 1]), PointShape::Disk, &pt.coords));
        assert_eq!(search_point(&rv(3, &[1, -1]), PointShape::Disk, 1, 10).point.unwrap().coords, vec![FqElt(0), FqElt(1)]);
        assert_eq!(search_point(&rv(5, &[1, 4]), PointShape::Disk, 1, 10).point.unwrap().coords, vec![FqElt(0), FqElt(1)]);
    }

    #[test]
    fn annulus_search_avoids_zero() {
        let e = rv(3, &[1, 2]);
        let pt = search_point(&e, PointShape::Annulus { m1: 1, m2: 1 }, 1, 100).point.unwrap();
        assert_eq!(pt.coords, vec![FqElt(1), FqElt(2)]);
    }

    #[test]
    fn budget_stops_search() {
        let e = rv(2, &[1; 10]);
        let out = search_point(&e, PointShape::Disk, 4, 3);
        assert!(out.point.is_none());
        assert!(out.budget_exhausted);
        assert_eq!(out.tuples_examined, 3);
    }
}
