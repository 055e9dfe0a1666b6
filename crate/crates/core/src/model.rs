//! Graphs, domains, unit-arc representations and the validators tying them
//! together.
//!
//! A unit arc is identified with its clockwise start `s` and covers the
//! closed set `[s, s + 1]` (taken modulo the circumference on a circle).
//! Two arcs intersect iff their starts are at distance at most 1, so arcs
//! that touch at a single endpoint are adjacent.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex names must be non-empty")]
    EmptyName,
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("edge endpoint {0:?} is not a listed vertex")]
    UnknownEndpoint(String),
    #[error("loop on vertex {0:?}")]
    Loop(String),
    #[error("duplicate edge {0:?}-{1:?}")]
    DuplicateEdge(String, String),
}

/// Simple undirected graph over named vertices. Vertex order is the
/// canonical iteration order everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Graph, GraphError> {
        let mut index = HashMap::with_capacity(vertices.len());
        let mut names = Vec::with_capacity(vertices.len());
        for v in vertices {
            let v = v.as_ref();
            if v.is_empty() {
                return Err(GraphError::EmptyName);
            }
            if index.insert(v.to_string(), names.len()).is_some() {
                return Err(GraphError::DuplicateVertex(v.to_string()));
            }
            names.push(v.to_string());
        }
        let n = names.len();
        let mut g = Graph {
            names,
            index,
            adj: vec![vec![false; n]; n],
            edges: Vec::with_capacity(edges.len()),
        };
        for (u, v) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            let iu = g.lookup(u)?;
            let iv = g.lookup(v)?;
            if iu == iv {
                return Err(GraphError::Loop(u.to_string()));
            }
            if g.adj[iu][iv] {
                return Err(GraphError::DuplicateEdge(u.to_string(), v.to_string()));
            }
            g.adj[iu][iv] = true;
            g.adj[iv][iu] = true;
            g.edges.push((iu.min(iv), iu.max(iv)));
        }
        g.edges.sort_unstable();
        Ok(g)
    }

    fn from_indexed(names: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
        let index = names.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let n = names.len();
        let mut adj = vec![vec![false; n]; n];
        let mut list = Vec::new();
        for (u, v) in edges {
            if u != v && !adj[u][v] {
                adj[u][v] = true;
                adj[v][u] = true;
                list.push((u.min(v), u.max(v)));
            }
        }
        list.sort_unstable();
        Graph {
            names,
            index,
            adj,
            edges: list,
        }
    }

    fn lookup(&self, v: &str) -> Result<usize, GraphError> {
        self.index
            .get(v)
            .copied()
            .ok_or_else(|| GraphError::UnknownEndpoint(v.to_string()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Edges as index pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(a), Some(b)) => self.adj[a][b],
            _ => false,
        }
    }

    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(u, v)| (self.names[u].clone(), self.names[v].clone()))
            .collect()
    }

    /// Subgraph induced by `keep`, preserving canonical order.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> Graph {
        let names: Vec<String> = keep.iter().map(|&i| self.names[i].clone()).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|(u, v)| Some((*pos.get(u)?, *pos.get(v)?)));
        Graph::from_indexed(names, edges)
    }

    /// Same graph with vertices listed in a different order.
    pub fn reordered(&self, order: &[usize]) -> Graph {
        assert_eq!(order.len(), self.len());
        let names = order.iter().map(|&i| self.names[i].clone()).collect();
        let mut inv = vec![0; order.len()];
        for (p, &i) in order.iter().enumerate() {
            inv[i] = p;
        }
        Graph::from_indexed(names, self.edges.iter().map(|&(u, v)| (inv[u], inv[v])))
    }

    /// Path on `len` vertices named `{prefix}0 .. {prefix}{len-1}`.
    pub fn path(prefix: &str, len: usize) -> Graph {
        let names = (0..len).map(|t| format!("{prefix}{t}")).collect();
        Graph::from_indexed(names, (1..len).map(|t| (t - 1, t)))
    }

    /// Vertex-disjoint union; names must not collide.
    pub fn disjoint_union(parts: &[Graph]) -> Result<Graph, GraphError> {
        let mut names = Vec::new();
        let mut edges = Vec::new();
        for g in parts {
            let off = names.len();
            names.extend(g.names.iter().cloned());
            edges.extend(g.edges.iter().map(|&(u, v)| (u + off, v + off)));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(GraphError::DuplicateVertex(n.clone()));
            }
        }
        Ok(Graph::from_indexed(names, edges))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("circle circumference must exceed 2, got {0}")]
    CircleTooSmall(Rat),
    #[error("line window must be at least 1, got {0}")]
    WindowTooSmall(Rat),
}

/// Where the unit arcs live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    Circle { circumference: Rat },
    Line { window: Rat },
}

impl Domain {
    pub fn circle(circumference: Rat) -> Result<Domain, DomainError> {
        if circumference <= Rat::from_int(2) {
            return Err(DomainError::CircleTooSmall(circumference));
        }
        Ok(Domain::Circle { circumference })
    }

    pub fn line(window: Rat) -> Result<Domain, DomainError> {
        if window < Rat::one() {
            return Err(DomainError::WindowTooSmall(window));
        }
        Ok(Domain::Line { window })
    }

    /// Whether a start point is admissible: `[0, C)` on a circle,
    /// `[0, W - 1]` on a line.
    pub fn in_range(&self, s: &Rat) -> bool {
        if s.is_negative() {
            return false;
        }
        match self {
            Domain::Circle { circumference } => s < circumference,
            Domain::Line { window } => *s <= window - &Rat::one(),
        }
    }

    /// Distance between two start points under the domain's metric.
    pub fn distance(&self, a: &Rat, b: &Rat) -> Rat {
        match self {
            Domain::Circle { circumference } => circ_dist(a, b, circumference),
            Domain::Line { .. } => abs(&(a - b)),
        }
    }

    /// Image of a start under the orientation-reversing symmetry.
    pub fn reflect(&self, s: &Rat) -> Rat {
        match self {
            Domain::Circle { circumference } => {
                (&(circumference - s) - &Rat::one()).rem_euclid(circumference)
            }
            Domain::Line { window } => &(window - &Rat::one()) - s,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Circle { circumference } => write!(f, "circle(C={circumference})"),
            Domain::Line { window } => write!(f, "line(W={window})"),
        }
    }
}

fn abs(x: &Rat) -> Rat {
    if x.is_negative() {
        -x
    } else {
        x.clone()
    }
}

/// Shorter of the two ways around a circle of circumference `c`.
pub fn circ_dist(a: &Rat, b: &Rat, c: &Rat) -> Rat {
    let cw = (a - b).rem_euclid(c);
    let ccw = (b - a).rem_euclid(c);
    cw.min(ccw)
}

/// Closed unit arcs starting at `su` and `sv` share a point.
pub fn intersects(su: &Rat, sv: &Rat, domain: &Domain) -> bool {
    domain.distance(su, sv) <= Rat::one()
}

/// Pinned start points for a subset of the vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialRep {
    pub fixed: BTreeMap<String, Rat>,
}

impl PartialRep {
    pub fn new() -> PartialRep {
        PartialRep::default()
    }

    pub fn pin(&mut self, v: impl Into<String>, start: Rat) {
        self.fixed.insert(v.into(), start);
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn get(&self, v: &str) -> Option<&Rat> {
        self.fixed.get(v)
    }
}

/// Start point of every vertex's arc.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Representation {
    pub starts: BTreeMap<String, Rat>,
}

impl Representation {
    pub fn get(&self, v: &str) -> Option<&Rat> {
        self.starts.get(v)
    }

    /// Lowest start to highest arc end, for line representations.
    pub fn extent(&self) -> Option<Rat> {
        let lo = self.starts.values().min()?;
        let hi = self.starts.values().max()?;
        Some(&(hi - lo) + &Rat::one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchKind {
    /// Adjacent in the graph, disjoint in the geometry.
    MissingEdge,
    /// Intersecting in the geometry, non-adjacent in the graph.
    ExtraEdge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairMismatch {
    pub u: String,
    pub v: String,
    pub distance: Rat,
    pub kind: MismatchKind,
}

impl fmt::Display for PairMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            MismatchKind::MissingEdge => "edge absent in geometry",
            MismatchKind::ExtraEdge => "extra edge in geometry",
        };
        write!(f, "{}-{}: {what} (distance {})", self.u, self.v, self.distance)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("representation misses vertices {0:?}")]
    MissingVertices(Vec<String>),
    #[error("representation names unknown vertices {0:?}")]
    UnknownVertices(Vec<String>),
    #[error("start of {vertex:?} out of range for {domain}: {start}")]
    OutOfRange {
        vertex: String,
        start: Rat,
        domain: String,
    },
    #[error("geometry disagrees with the graph on {} pair(s): {}", .0.len(), join(.0))]
    Mismatch(Vec<PairMismatch>),
}

fn join(m: &[PairMismatch]) -> String {
    m.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; ")
}

/// Intersection graph of `rep` over `vertices` (in that order).
pub fn derived_graph<S: AsRef<str>>(rep: &Representation, domain: &Domain, vertices: &[S]) -> Graph {
    let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
    let starts: Vec<&Rat> = names.iter().map(|v| &rep.starts[v]).collect();
    let n = names.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if intersects(starts[u], starts[v], domain) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_indexed(names, edges)
}

fn check_ranges<'a>(
    domain: &Domain,
    starts: impl Iterator<Item = (&'a String, &'a Rat)>,
) -> Result<(), RepError> {
    for (v, s) in starts {
        if !domain.in_range(s) {
            return Err(RepError::OutOfRange {
                vertex: v.clone(),
                start: s.clone(),
                domain: domain.to_string(),
            });
        }
    }
    Ok(())
}

fn mismatches(g: &Graph, starts: &[&Rat], domain: &Domain) -> Vec<PairMismatch> {
    let mut out = Vec::new();
    for u in 0..g.len() {
        for v in u + 1..g.len() {
            let distance = domain.distance(starts[u], starts[v]);
            let geometric = distance <= Rat::one();
            if geometric != g.adjacent(u, v) {
                out.push(PairMismatch {
                    u: g.name(u).to_string(),
                    v: g.name(v).to_string(),
                    distance,
                    kind: if geometric {
                        MismatchKind::ExtraEdge
                    } else {
                        MismatchKind::MissingEdge
                    },
                });
            }
        }
    }
    out
}

/// Checks that `rep` covers exactly `g`'s vertices, lies in range, and
/// realizes exactly `g`'s edges.
pub fn validate_rep(g: &Graph, rep: &Representation, domain: &Domain) -> Result<(), RepError> {
    let missing: Vec<String> = g
        .vertices()
        .iter()
        .filter(|v| !rep.starts.contains_key(*v))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(RepError::MissingVertices(missing));
    }
    let unknown: Vec<String> = rep
        .starts
        .keys()
        .filter(|v| g.index_of(v).is_none())
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(RepError::UnknownVertices(unknown));
    }
    check_ranges(domain, rep.starts.iter())?;
    let starts: Vec<&Rat> = g.vertices().iter().map(|v| &rep.starts[v]).collect();
    let bad = mismatches(g, &starts, domain);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(RepError::Mismatch(bad))
    }
}

/// Checks that the pinned arcs form a representation of the subgraph
/// they induce.
pub fn validate_partial(g: &Graph, partial: &PartialRep, domain: &Domain) -> Result<(), RepError> {
    let unknown: Vec<String> = partial
        .fixed
        .keys()
        .filter(|v| g.index_of(v).is_none())
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(RepError::UnknownVertices(unknown));
    }
    let keep: BTreeSet<usize> = partial.fixed.keys().filter_map(|v| g.index_of(v)).collect();
    let sub = g.induced(&keep);
    let rep = Representation {
        starts: partial.fixed.clone(),
    };
    validate_rep(&sub, &rep, domain)
}

/// `rep` agrees exactly with every pinned start.
pub fn extends(rep: &Representation, partial: &PartialRep) -> bool {
    partial
        .fixed
        .iter()
        .all(|(v, s)| rep.starts.get(v) == Some(s))
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("partial representation rejected: {0}")]
    Partial(#[from] RepError),
}

/// A graph together with a domain and a validated partial representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveInstance {
    graph: Graph,
    domain: Domain,
    partial: PartialRep,
}

impl SolveInstance {
    pub fn new(graph: Graph, domain: Domain, partial: PartialRep) -> Result<SolveInstance, InstanceError> {
        validate_partial(&graph, &partial, &domain)?;
        Ok(SolveInstance {
            graph,
            domain,
            partial,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn partial(&self) -> &PartialRep {
        &self.partial
    }

    /// Full acceptance check for a candidate answer.
    pub fn check(&self, rep: &Representation) -> Result<(), CheckError> {
        validate_rep(&self.graph, rep, &self.domain)?;
        if !extends(rep, &self.partial) {
            let bad = self
                .partial
                .fixed
                .iter()
                .filter(|(v, s)| rep.starts.get(*v) != Some(s))
                .map(|(v, _)| v.clone())
                .collect();
            return Err(CheckError::NotExtending(bad));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("witness moves pinned vertices {0:?}")]
    NotExtending(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainFile {
    Circle { circumference: Rat },
    Line { window: Rat },
}

/// On-disk instance schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub domain: DomainFile,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub fixed: BTreeMap<String, Rat>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<SolveInstance, InstanceError> {
        let domain = match self.domain {
            DomainFile::Circle { circumference } => Domain::circle(circumference)?,
            DomainFile::Line { window } => Domain::line(window)?,
        };
        let graph = Graph::new(&self.vertices, &self.edges)?;
        SolveInstance::new(graph, domain, PartialRep { fixed: self.fixed })
    }
}

impl From<&SolveInstance> for InstanceFile {
    fn from(inst: &SolveInstance) -> InstanceFile {
        InstanceFile {
            domain: match inst.domain() {
                Domain::Circle { circumference } => DomainFile::Circle {
                    circumference: circumference.clone(),
                },
                Domain::Line { window } => DomainFile::Line {
                    window: window.clone(),
                },
            },
            vertices: inst.graph().vertices().to_vec(),
            edges: inst.graph().edge_names(),
            fixed: inst.partial().fixed.clone(),
        }
    }
}
