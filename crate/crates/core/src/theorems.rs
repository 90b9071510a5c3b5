//! Disk conditions D1–D3, annulus conditions C1–C4, structural properties along the
//! fundamental chain and the small-conductor classifier.
//!
//! Verdicts never claim non-realizability: the vertex criterion is sufficient only and
//! point search is budget-bounded.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hurwitz_tree::{HurwitzTree, Location, TreeError, VertexKind};
use crate::realizability::{self, CertifyOutcome, RealizabilityError, VertexStatus, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error("tree fails the Hurwitz axioms: {0}")]
    InvalidTree(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Realizability(#[from] RealizabilityError),
}

type Result<T> = std::result::Result<T, TheoremError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    D1,
    D2,
    D3,
    C1,
    C2,
    C3,
    C4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub location: Location,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub passed: bool,
    pub failures: Vec<Failure>,
}

impl ConditionResult {
    fn from_failures(condition: Condition, failures: Vec<Failure>) -> Self {
        ConditionResult { condition, passed: failures.is_empty(), failures }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "failed")]
pub enum Verdict {
    RealizableProved,
    ConditionsFailed(Vec<Condition>),
    ConditionsHoldRealizabilityUnknown,
}

/// Realizability of one vertex of valence at least 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRealization {
    pub vertex: String,
    pub status: VertexStatus,
    /// Set when the vertex shape has no criterion; the status is then `Unknown`.
    pub unsupported: Option<String>,
    pub outcome: Option<CertifyOutcome>,
}

impl VertexRealization {
    pub fn proved(&self) -> bool {
        matches!(self.status, VertexStatus::ProvedByCriterion | VertexStatus::Certified { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub n_max: u32,
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { n_max: 3, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskReport {
    pub d1: ConditionResult,
    pub d2: ConditionResult,
    pub d3: Vec<VertexRealization>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub c1: ConditionResult,
    pub c2: ConditionResult,
    pub c3: ConditionResult,
    pub c4: Vec<VertexRealization>,
    pub fundamental_chain: Option<Vec<String>>,
    pub thickness: Option<i64>,
    pub verdict: Verdict,
}

fn require_valid(t: &HurwitzTree) -> Result<()> {
    let rep = t.validate();
    if rep.is_valid() {
        return Ok(());
    }
    let msgs: Vec<String> = rep.violations.iter().map(|v| format!("{} at {}: {}", v.axiom, v.location, v.message)).collect();
    Err(TheoremError::InvalidTree(msgs.join("; ")))
}

fn root_valence_one(t: &HurwitzTree, cond: Condition) -> ConditionResult {
    let v = t.valence(t.root()).unwrap();
    let failures = if v == 1 {
        vec![]
    } else {
        vec![Failure { location: Location::Vertex(t.root().into()), message: format!("root has valence {v}") }]
    };
    ConditionResult::from_failures(cond, failures)
}

/// Maximal vertices (other than `skip`) whose incoming edge is not a leaf.
fn non_leaf_into_maximal(t: &HurwitzTree, skip: Option<&str>, cond: Condition) -> ConditionResult {
    let mut failures = Vec::new();
    for e in t.edges() {
        if Some(e.to.as_str()) == skip || !t.is_maximal(&e.to).unwrap() {
            continue;
        }
        if !(e.eps == 0 && e.m == 0) {
            failures.push(Failure {
                location: Location::Edge(e.id.clone()),
                message: format!("edge into maximal vertex `{}` is not a leaf (eps = {}, m = {})", e.to, e.eps, e.m),
            });
        }
    }
    ConditionResult::from_failures(cond, failures)
}

fn realize_all(t: &HurwitzTree, opts: SearchOptions) -> Result<Vec<VertexRealization>> {
    let mut out = Vec::new();
    for s in t.vertices() {
        if t.valence(s)? < 3 {
            continue;
        }
        match realizability::certify_vertex(t, s, opts.n_max, opts.budget) {
            Ok(o) => out.push(VertexRealization { vertex: s.clone(), status: o.status.clone(), unsupported: None, outcome: Some(o) }),
            Err(RealizabilityError::UnsupportedShape(m)) => {
                out.push(VertexRealization { vertex: s.clone(), status: VertexStatus::Unknown, unsupported: Some(m), outcome: None })
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

fn verdict(conditions: &[&ConditionResult], vertices: &[VertexRealization]) -> Verdict {
    let failed: Vec<Condition> = conditions.iter().filter(|c| !c.passed).map(|c| c.condition).collect();
    if !failed.is_empty() {
        Verdict::ConditionsFailed(failed)
    } else if vertices.iter().all(VertexRealization::proved) {
        Verdict::RealizableProved
    } else {
        Verdict::ConditionsHoldRealizabilityUnknown
    }
}

pub fn check_disk(t: &HurwitzTree, opts: SearchOptions) -> Result<DiskReport> {
    require_valid(t)?;
    let d1 = root_valence_one(t, Condition::D1);
    let d2 = non_leaf_into_maximal(t, None, Condition::D2);
    let d3 = realize_all(t, opts)?;
    let verdict = verdict(&[&d1, &d2], &d3);
    Ok(DiskReport { d1, d2, d3, verdict })
}

/// `m(a) + 1` equals the number of leaves of `Γ[a]`.
pub fn disk_leaf_formula(t: &HurwitzTree, edge_id: &str) -> Result<bool> {
    let a = t.edge(edge_id)?;
    let sub = t.subtree(edge_id)?;
    Ok(a.m as i128 + 1 == sub.leaves().len() as i128)
}

/// Maximal vertices whose incoming edge has positive thickness.
fn thick_maximal(t: &HurwitzTree) -> Vec<String> {
    t.edges().iter().filter(|e| e.eps != 0 && t.is_maximal(&e.to).unwrap()).map(|e| e.to.clone()).collect()
}

/// Root-to-`r'₀` chain when exactly one maximal vertex has an incoming edge with `ε ≠ 0`.
pub fn fundamental_chain(t: &HurwitzTree) -> Option<Vec<String>> {
    let thick = thick_maximal(t);
    let [end] = thick.as_slice() else { return None };
    let mut chain = vec![t.root().to_string()];
    chain.extend(t.path_edges(end).unwrap().iter().map(|e| e.to.clone()));
    Some(chain)
}

/// Positive edges along the fundamental chain.
fn chain_edges<'a>(t: &'a HurwitzTree, chain: &[String]) -> Vec<&'a crate::hurwitz_tree::Edge> {
    t.path_edges(chain.last().unwrap()).unwrap()
}

pub fn check_annulus(t: &HurwitzTree, opts: SearchOptions) -> Result<AnnulusReport> {
    require_valid(t)?;
    let c1 = root_valence_one(t, Condition::C1);
    let thick = thick_maximal(t);
    let c2 = ConditionResult::from_failures(
        Condition::C2,
        if thick.len() == 1 {
            vec![]
        } else {
            vec![Failure {
                location: Location::Tree,
                message: format!("{} maximal vertices with incoming eps != 0: {:?}", thick.len(), thick),
            }]
        },
    );
    let chain = fundamental_chain(t);
    let c3 = non_leaf_into_maximal(t, thick.first().filter(|_| thick.len() == 1).map(String::as_str), Condition::C3);
    let c4 = realize_all(t, opts)?;
    let thickness = chain.as_ref().map(|c| chain_edges(t, c).iter().map(|e| e.eps).sum());
    let verdict = verdict(&[&c1, &c2, &c3], &c4);
    Ok(AnnulusReport { c1, c2, c3, c4, fundamental_chain: chain, thickness, verdict })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub passed: bool,
    pub message: String,
}

impl NamedCheck {
    fn new(name: &str, passed: bool, message: String) -> Self {
        NamedCheck { name: name.into(), passed, message }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub fundamental_chain: Vec<String>,
    pub checks: Vec<NamedCheck>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&NamedCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn annulus_chain(t: &HurwitzTree) -> Result<Vec<String>> {
    require_valid(t)?;
    if t.valence(t.root())? != 1 {
        return Err(TheoremError::PreconditionFailed("root valence is not 1".into()));
    }
    fundamental_chain(t).ok_or_else(|| TheoremError::PreconditionFailed("no unique fundamental chain".into()))
}

pub fn annulus_structure_checks(t: &HurwitzTree) -> Result<StructureReport> {
    let chain = annulus_chain(t)?;
    let edges = chain_edges(t, &chain);
    let mut checks = Vec::new();

    let m_eta = edges.first().unwrap().m as i128;
    let m_eta2 = -(edges.last().unwrap().m as i128);
    let leaves = t.leaves().len() as i128;
    checks.push(NamedCheck::new(
        "leaf_count",
        leaves == m_eta + m_eta2,
        format!("{leaves} leaves, m(a_eta) + m(a_eta') = {m_eta} + {m_eta2}"),
    ));

    let mult: Vec<usize> = chain
        .iter()
        .enumerate()
        .filter(|(_, s)| t.classify_vertex(s).unwrap() == VertexKind::Multiplicative)
        .map(|(i, _)| i)
        .collect();
    let ok = match mult.as_slice() {
        [] | [_] => true,
        [a, b] => b - a == 1,
        _ => false,
    };
    checks.push(NamedCheck::new(
        "multiplicative_fundamental",
        ok,
        format!("multiplicative fundamental vertices at chain positions {mult:?}"),
    ));

    let stray: Vec<&str> = t
        .leaves()
        .iter()
        .filter(|e| !chain.contains(&e.from) && !t.is_maximal(&e.from).unwrap())
        .map(|e| e.id.as_str())
        .collect();
    checks.push(NamedCheck::new(
        "leaf_origins",
        stray.is_empty(),
        if stray.is_empty() {
            "every leaf starts at a fundamental vertex".into()
        } else {
            format!("leaves with non-fundamental origin: {stray:?}")
        },
    ));

    let slopes: Vec<i64> = edges.iter().map(|e| e.m).collect();
    checks.push(NamedCheck::new(
        "concavity",
        slopes.windows(2).all(|w| w[0] >= w[1]),
        format!("fundamental slopes m(a): {slopes:?}"),
    ));

    let d_end = t.differente(chain.last().unwrap())?;
    let sum: i128 = edges.iter().map(|e| e.m as i128 * e.eps as i128).sum();
    checks.push(NamedCheck::new(
        "differente_law",
        d_end == t.d0() as i128 + (t.p() as i128 - 1) * sum,
        format!("d(r'0) = {d_end}"),
    ));
    Ok(StructureReport { fundamental_chain: chain, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmallConductorType {
    I,
    II,
    III,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConductorType {
    #[serde(rename = "type")]
    pub ty: SmallConductorType,
    pub m1: i64,
    pub m2: i64,
    pub thickness: i64,
    pub epsilon_checks: Vec<NamedCheck>,
    pub shape_checks: Vec<NamedCheck>,
}

impl ConductorType {
    /// All per-type assertions hold.
    pub fn consistent(&self) -> bool {
        self.epsilon_checks.iter().chain(&self.shape_checks).all(|c| c.passed)
    }
}

/// Classifies by `e·m₁·m₂` against `N(m₁+m₂)` and checks the shape that type forces.
pub fn small_conductor_type(t: &HurwitzTree) -> Result<ConductorType> {
    let chain = annulus_chain(t)?;
    let c3 = non_leaf_into_maximal(t, chain.last().map(String::as_str), Condition::C3);
    if !c3.passed {
        return Err(TheoremError::PreconditionFailed("C3 fails".into()));
    }
    let r2 = chain.last().unwrap();
    for r in [t.root(), r2.as_str()] {
        if t.differente(r)? != 0 {
            return Err(TheoremError::PreconditionFailed(format!("boundary vertex `{r}` is not étale")));
        }
    }
    let edges = chain_edges(t, &chain);
    let (a1, a2) = (edges[0], *edges.last().unwrap());
    let (m1, m2) = (a1.m, -a2.m);
    let p = t.p() as i64;
    if !(1..p).contains(&m1) || !(1..p).contains(&m2) {
        return Err(TheoremError::PreconditionFailed(format!("conductors m1 = {m1}, m2 = {m2} must lie in 1..{p}")));
    }
    let e: i64 = edges.iter().map(|e| e.eps).sum();
    let n = t.ram() as i128;
    let lhs = e as i128 * m1 as i128 * m2 as i128;
    let rhs = n * (m1 + m2) as i128;
    let ty = match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => SmallConductorType::I,
        std::cmp::Ordering::Equal => SmallConductorType::II,
        std::cmp::Ordering::Less => SmallConductorType::III,
    };

    let interior: Vec<&String> = chain[1..chain.len() - 1].iter().collect();
    let kind = |s: &str| t.classify_vertex(s).unwrap();
    let leaf_count = |s: &str| t.outgoing(s).unwrap().iter().filter(|e| e.eps == 0 && e.m == 0).count() as i64;
    let mut shape = vec![NamedCheck::new("interior_length", interior.len() <= 2, format!("{} interior vertices", interior.len()))];
    let eps_rel = |a: &crate::hurwitz_tree::Edge, m: i64, strict: bool| {
        let (l, r) = (a.eps as i128 * m as i128, n);
        let ok = if strict { l < r } else { l == r };
        let rel = if strict { "<" } else { "=" };
        NamedCheck::new(&format!("eps({})", a.id), ok, format!("eps = {} {rel} N/m = {n}/{m}", a.eps))
    };
    let epsilon_checks = match ty {
        SmallConductorType::I | SmallConductorType::II => vec![eps_rel(a1, m1, false), eps_rel(a2, m2, false)],
        SmallConductorType::III => vec![eps_rel(a1, m1, true), eps_rel(a2, m2, true)],
    };
    match ty {
        SmallConductorType::I => {
            let ok = interior.len() == 2 && interior.iter().all(|s| kind(s) == VertexKind::Multiplicative);
            shape.push(NamedCheck::new("two_multiplicative", ok, format!("interior {interior:?}")));
            if interior.len() == 2 {
                for (s, m) in [(interior[0], m1), (interior[1], m2)] {
                    let l = leaf_count(s);
                    shape.push(NamedCheck::new(&format!("leaves({s})"), l == m, format!("{l} leaves, expected {m}")));
                }
            }
        }
        SmallConductorType::II => {
            let ok = interior.len() == 1 && kind(interior[0]) == VertexKind::Multiplicative;
            shape.push(NamedCheck::new("one_multiplicative", ok, format!("interior {interior:?}")));
            if let [s] = interior.as_slice() {
                let l = leaf_count(s);
                shape.push(NamedCheck::new(&format!("leaves({s})"), l == m1 + m2, format!("{l} leaves, expected {}", m1 + m2)));
            }
        }
        SmallConductorType::III => {
            let ok = interior.len() == 1 && kind(interior[0]) == VertexKind::Additive;
            shape.push(NamedCheck::new("one_additive", ok, format!("interior {interior:?}")));
            if let [s] = interior.as_slice() {
                let q = t.outgoing(s)?.iter().filter(|e| !chain.contains(&e.to)).count() as i64;
                shape.push(NamedCheck::new(
                    "non_fundamental_edges",
                    q <= m1.min(m2),
                    format!("{q} non-fundamental edges, bound {}", m1.min(m2)),
                ));
            }
        }
    }
    Ok(ConductorType { ty, m1, m2, thickness: e, epsilon_checks, shape_checks: shape })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz_tree::TreeBuilder;

    fn type_ii() -> HurwitzTree {
        TreeBuilder::new(3, 1, 0, "r1").edge("r1", "s", 1, 1, 0).edge("s", "r2", 1, -1, 0).leaves("s", &[1, 2]).build().unwrap()
    }

    #[test]
    fn basic_disk() {
        let t = TreeBuilder::new(2, 1, 0, "r").edge("r", "s", 1, 1, 0).leaves("s", &[1, 1]).build().unwrap();
        let rep = check_disk(&t, SearchOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::RealizableProved);
        assert!(disk_leaf_formula(&t, "r->s").unwrap());
        assert!(disk_leaf_formula(&t, "s->s.f0").unwrap());
        assert_eq!(fundamental_chain(&t), None);
    }

    #[test]
    fn type_ii_annulus() {
        let t = type_ii();
        assert!(t.validate().is_valid(), "{:?}", t.validate());
        let rep = check_annulus(&t, SearchOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::RealizableProved, "{rep:?}");
        assert_eq!(rep.thickness, Some(2));
        let ct = small_conductor_type(&t).unwrap();
        assert_eq!(ct.ty, SmallConductorType::II);
        assert!(ct.consistent(), "{ct:?}");
        assert!(annulus_structure_checks(&t).unwrap().passed());
    }

    #[test]
    fn invalid_tree_is_rejected() {
        let t = TreeBuilder::new(2, 1, 0, "r").edge("r", "s", 1, 1, 0).leaves("s", &[1, 0]).build().unwrap();
        assert!(matches!(check_disk(&t, SearchOptions::default()), Err(TheoremError::InvalidTree(_))));
    }
}
