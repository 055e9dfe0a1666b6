//! Exact decision procedure for extending partial unit-arc representations.
//!
//! The search opens the circle at an anchor, enumerates the clockwise order
//! of the start points one position at a time, and for every edge picks
//! the side on which the two arcs meet (directly, or around the far side
//! of the cut). Each branch is a conjunction of difference constraints over
//! [`EpsRat`]; strict separations `> 1` are written `>= 1 + ι`. An
//! incrementally closed shortest-path matrix prunes inconsistent prefixes
//! and forces side choices, and a leaf is certified by Bellman-Ford before
//! its potentials are turned into a rational witness.
//!
//! Search order is fixed: positions are filled by trying the unplaced
//! vertices in canonical order, and edge sides are tried direct-first.

mod diff;
mod reference;

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

pub use diff::{feasible, DiffConstraint, DiffSystem, Feasibility};
pub use reference::{solve_reference, REFERENCE_MAX_VERTICES};

use crate::arith::{EpsRat, Rat};
use crate::model::{Domain, Representation, SolveInstance};
use diff::Closure;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("reference solver is limited to {max} vertices, instance has {got}")]
    TooLarge { max: usize, got: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Search limits; `None` is unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_checks: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn checks(n: u64) -> Budget {
        Budget {
            max_checks: Some(n),
            max_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Ordering positions tried (prefix extensions).
    pub orderings: u64,
    /// Consistency checks: prefix extensions, side choices and leaf
    /// certifications.
    pub feasibility_checks: u64,
    #[serde(serialize_with = "as_millis")]
    #[serde(rename = "elapsed_ms")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat { witness: Representation, stats: Stats },
    Unsat { stats: Stats },
    Unknown { stats: Stats },
}

impl SolveOutcome {
    pub fn verdict(&self) -> Verdict {
        match self {
            SolveOutcome::Sat { .. } => Verdict::Sat,
            SolveOutcome::Unsat { .. } => Verdict::Unsat,
            SolveOutcome::Unknown { .. } => Verdict::Unknown,
        }
    }

    pub fn stats(&self) -> &Stats {
        match self {
            SolveOutcome::Sat { stats, .. }
            | SolveOutcome::Unsat { stats }
            | SolveOutcome::Unknown { stats } => stats,
        }
    }

    pub fn witness(&self) -> Option<&Representation> {
        match self {
            SolveOutcome::Sat { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat { .. })
    }
}

fn one() -> EpsRat {
    EpsRat::real(Rat::one())
}

/// `1 + ι`, the least admissible separation of disjoint arcs.
fn strict_one() -> EpsRat {
    EpsRat::new(Rat::one(), 1)
}

/// Vertex `v` lives in difference variable `v + 1`; variable 0 is zero.
fn var(v: usize) -> usize {
    v + 1
}

/// Vertex whose arc opens the circle: the smallest pinned start (earliest
/// in canonical order on ties), else the first vertex placed at 0.
fn anchor(inst: &SolveInstance) -> Option<(usize, Rat)> {
    let g = inst.graph();
    let pinned = (0..g.len())
        .filter_map(|v| inst.partial().get(g.name(v)).map(|s| (v, s.clone())))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    pinned.or_else(|| (!g.is_empty()).then(|| (0, Rat::zero())))
}

/// Constraints shared by every branch: coordinate range, pins and the
/// anchor. In unrolled circle coordinates every start lies in
/// `[a, a + C)` where `a` is the anchor's start.
fn base_constraints(inst: &SolveInstance, anchor: Option<&(usize, Rat)>) -> Vec<DiffConstraint> {
    let g = inst.graph();
    let mut out = Vec::new();
    let mut push = |from: usize, to: usize, bound: EpsRat| out.push(DiffConstraint { from, to, bound });
    let (lo, hi) = match inst.domain() {
        Domain::Circle { circumference } => {
            let a = anchor.map(|x| x.1.clone()).unwrap_or_default();
            let hi = EpsRat::new(&a + circumference, -1);
            (a, hi)
        }
        Domain::Line { window } => (Rat::zero(), EpsRat::real(window - &Rat::one())),
    };
    for v in 0..g.len() {
        push(var(v), 0, EpsRat::real(-&lo));
        push(0, var(v), hi.clone());
    }
    let mut pins: Vec<(usize, Rat)> = (0..g.len())
        .filter_map(|v| inst.partial().get(g.name(v)).map(|s| (v, s.clone())))
        .collect();
    if let (Domain::Circle { .. }, Some((v, a))) = (inst.domain(), anchor) {
        if inst.partial().is_empty() {
            pins.push((*v, a.clone()));
        }
    }
    for (v, s) in pins {
        push(0, var(v), EpsRat::real(s.clone()));
        push(var(v), 0, EpsRat::real(-s));
    }
    out
}

/// Ordering constraints between `p` and a vertex `w` known to start at or
/// after it (clockwise from the cut), excluding the edge-side choice.
fn order_constraints(inst: &SolveInstance, p: usize, w: usize, out: &mut Vec<DiffConstraint>) {
    out.push(DiffConstraint {
        from: var(w),
        to: var(p),
        bound: EpsRat::zero(),
    });
    if !inst.graph().adjacent(p, w) {
        out.push(DiffConstraint {
            from: var(w),
            to: var(p),
            bound: -strict_one(),
        });
        if let Domain::Circle { circumference } = inst.domain() {
            out.push(DiffConstraint {
                from: var(p),
                to: var(w),
                bound: EpsRat::new(circumference - &Rat::one(), -1),
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Undecided,
    /// The arcs meet inside the unrolled window: `|y_u - y_v| <= 1`.
    Direct,
    /// The arcs meet across the cut: `|y_u - y_v| >= C - 1`.
    Wrap,
}

/// Side constraint for an edge `u -> v` with `u` starting no later than `v`.
fn side_constraint(side: Side, u: usize, v: usize, circumference: &Rat) -> DiffConstraint {
    match side {
        Side::Direct => DiffConstraint {
            from: var(u),
            to: var(v),
            bound: one(),
        },
        Side::Wrap => DiffConstraint {
            from: var(v),
            to: var(u),
            bound: EpsRat::real(&Rat::one() - circumference),
        },
        Side::Undecided => unreachable!("no constraint for an undecided side"),
    }
}

#[derive(Debug, Clone)]
struct Node {
    closure: Closure,
    log: Vec<DiffConstraint>,
    /// Position in the clockwise order, if placed.
    position: Vec<Option<usize>>,
    placed: usize,
    /// Side per edge index of `graph.edges()`.
    sides: Vec<Side>,
}

impl Node {
    fn add(&mut self, c: DiffConstraint) -> bool {
        let ok = self.closure.add(c.from, c.to, &c.bound);
        self.log.push(c);
        ok
    }

    fn admits(&self, c: &DiffConstraint) -> bool {
        self.closure.admits(c.from, c.to, &c.bound)
    }

    /// Ordered endpoints of an edge if their clockwise order is settled.
    fn oriented(&self, u: usize, v: usize) -> Option<(usize, usize)> {
        match (self.position[u], self.position[v]) {
            (Some(a), Some(b)) => Some(if a <= b { (u, v) } else { (v, u) }),
            (Some(_), None) => Some((u, v)),
            (None, Some(_)) => Some((v, u)),
            (None, None) => None,
        }
    }
}

enum Search {
    Found(Representation),
    Exhausted,
    OutOfBudget,
}

struct Solver<'a> {
    inst: &'a SolveInstance,
    budget: Budget,
    started: Instant,
    stats: Stats,
    circumference: Option<Rat>,
}

impl<'a> Solver<'a> {
    fn over_budget(&self) -> bool {
        if matches!(self.budget.max_checks, Some(max) if self.stats.feasibility_checks >= max) {
            return true;
        }
        matches!(self.budget.max_time, Some(t) if self.started.elapsed() >= t)
    }

    fn root(&mut self) -> Option<Node> {
        let g = self.inst.graph();
        let n = g.len();
        let anchor = anchor(self.inst);
        let mut node = Node {
            closure: Closure::new(n + 1),
            log: Vec::new(),
            position: vec![None; n],
            placed: 0,
            sides: vec![Side::Undecided; g.edge_count()],
        };
        for c in base_constraints(self.inst, anchor.as_ref()) {
            if !node.add(c) {
                return None;
            }
        }
        let empty = self.inst.partial().is_empty();
        match self.inst.domain() {
            Domain::Line { .. } => {
                for (e, &(u, v)) in g.edges().iter().enumerate() {
                    node.sides[e] = Side::Direct;
                    for (a, b) in [(u, v), (v, u)] {
                        if !node.add(DiffConstraint {
                            from: var(a),
                            to: var(b),
                            bound: one(),
                        }) {
                            return None;
                        }
                    }
                }
                // Reflection s -> W - 1 - s reverses the order of any two
                // starts, so one of each mirror pair has x_0 <= x_1.
                if empty && n >= 2 && !node.add(DiffConstraint {
                    from: var(1),
                    to: var(0),
                    bound: EpsRat::zero(),
                }) {
                    return None;
                }
            }
            Domain::Circle { circumference } => {
                let (a, _) = anchor.expect("non-empty graph");
                // Reflection fixing the anchor maps y to -y (mod C), so the
                // second vertex can be kept within half a turn clockwise.
                if empty && n >= 2 {
                    let half = circumference * &Rat::new(1, 2).expect("nonzero");
                    if !node.add(DiffConstraint {
                        from: var(a),
                        to: var(if a == 0 { 1 } else { 0 }),
                        bound: EpsRat::real(half),
                    }) {
                        return None;
                    }
                }
                if !self.place(&mut node, a) {
                    return None;
                }
            }
        }
        self.propagate(&mut node).then_some(node)
    }

    fn place(&self, node: &mut Node, p: usize) -> bool {
        let n = self.inst.graph().len();
        let mut cons = Vec::new();
        for w in 0..n {
            if w != p && node.position[w].is_none() {
                order_constraints(self.inst, p, w, &mut cons);
            }
        }
        node.position[p] = Some(node.placed);
        node.placed += 1;
        cons.into_iter().all(|c| node.add(c))
    }

    /// Forces every side choice the current bounds leave no freedom for.
    fn propagate(&self, node: &mut Node) -> bool {
        let Some(c) = &self.circumference else {
            return true;
        };
        let wrap_gap = EpsRat::real(c - &Rat::one());
        let edges = self.inst.graph().edges();
        loop {
            let mut changed = false;
            for (e, &(u, v)) in edges.iter().enumerate() {
                if node.sides[e] != Side::Undecided {
                    continue;
                }
                match node.oriented(u, v) {
                    Some((a, b)) => {
                        let direct = side_constraint(Side::Direct, a, b, c);
                        let wrap = side_constraint(Side::Wrap, a, b, c);
                        let (side, forced) = match (node.admits(&direct), node.admits(&wrap)) {
                            (false, false) => return false,
                            (true, false) => (Side::Direct, direct),
                            (false, true) => (Side::Wrap, wrap),
                            (true, true) => continue,
                        };
                        node.sides[e] = side;
                        if !node.add(forced) {
                            return false;
                        }
                        changed = true;
                    }
                    None => {
                        // Order unknown: wrapping needs |y_u - y_v| >= C - 1
                        // one way or the other.
                        let can_wrap = [(u, v), (v, u)].iter().any(|&(a, b)| {
                            node.closure
                                .bound(var(a), var(b))
                                .is_none_or(|d| *d >= wrap_gap)
                        });
                        if can_wrap {
                            continue;
                        }
                        node.sides[e] = Side::Direct;
                        for (a, b) in [(u, v), (v, u)] {
                            if !node.add(side_constraint(Side::Direct, a, b, c)) {
                                return false;
                            }
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn descend(&mut self, node: Node) -> Result<Search, SolverError> {
        let g = self.inst.graph();
        // Branch on the first open side whose orientation is settled.
        let open = g.edges().iter().enumerate().find_map(|(e, &(u, v))| {
            (node.sides[e] == Side::Undecided)
                .then(|| node.oriented(u, v).map(|ab| (e, ab)))
                .flatten()
        });
        if let Some((e, (a, b))) = open {
            let c = self.circumference.clone().expect("sides only open on a circle");
            for side in [Side::Direct, Side::Wrap] {
                if self.over_budget() {
                    return Ok(Search::OutOfBudget);
                }
                self.stats.feasibility_checks += 1;
                let mut child = node.clone();
                child.sides[e] = side;
                if !child.add(side_constraint(side, a, b, &c)) || !self.propagate(&mut child) {
                    continue;
                }
                match self.descend(child)? {
                    Search::Exhausted => {}
                    done => return Ok(done),
                }
            }
            return Ok(Search::Exhausted);
        }

        if node.placed == g.len() {
            if self.over_budget() {
                return Ok(Search::OutOfBudget);
            }
            return self.leaf(&node);
        }

        for p in 0..g.len() {
            if node.position[p].is_some() {
                continue;
            }
            if self.over_budget() {
                return Ok(Search::OutOfBudget);
            }
            self.stats.orderings += 1;
            self.stats.feasibility_checks += 1;
            let mut child = node.clone();
            if !self.place(&mut child, p) || !self.propagate(&mut child) {
                continue;
            }
            match self.descend(child)? {
                Search::Exhausted => {}
                done => return Ok(done),
            }
        }
        Ok(Search::Exhausted)
    }

    fn leaf(&mut self, node: &Node) -> Result<Search, SolverError> {
        self.stats.feasibility_checks += 1;
        let mut sys = DiffSystem::new(self.inst.graph().len() + 1);
        for c in &node.log {
            sys.add(c.from, c.to, c.bound.clone());
        }
        match feasible(&sys) {
            Feasibility::Sat(pot) => {
                let starts = &pot[1..];
                materialize_epsilon(starts, self.inst).map(Search::Found)
            }
            Feasibility::Unsat => Err(SolverError::Internal(
                "closed prefix accepted a system Bellman-Ford rejects".into(),
            )),
        }
    }
}

/// Decides whether the instance's partial representation extends to the
/// whole graph.
///
/// Complete under an unlimited budget; `Unknown` only ever reports an
/// exhausted budget. Every `Sat` witness has already passed
/// [`SolveInstance::check`].
pub fn solve(inst: &SolveInstance, budget: Budget) -> Result<SolveOutcome, SolverError> {
    let mut solver = Solver {
        inst,
        budget,
        started: Instant::now(),
        stats: Stats::default(),
        circumference: match inst.domain() {
            Domain::Circle { circumference } => Some(circumference.clone()),
            Domain::Line { .. } => None,
        },
    };
    let result = if inst.graph().is_empty() {
        Search::Found(Representation::default())
    } else {
        match solver.root() {
            Some(root) => solver.descend(root)?,
            None => Search::Exhausted,
        }
    };
    let mut stats = solver.stats;
    stats.elapsed = solver.started.elapsed();
    Ok(match result {
        Search::Found(witness) => SolveOutcome::Sat { witness, stats },
        Search::Exhausted => SolveOutcome::Unsat { stats },
        Search::OutOfBudget => SolveOutcome::Unknown { stats },
    })
}

/// Upper limit on the exponent when shrinking `ι = 2^-t`.
const MAX_IOTA_EXPONENT: u32 = 4096;

/// Replaces `ι` in per-vertex potentials (canonical vertex order, unrolled
/// coordinates) by successively smaller powers of two until the result is
/// a valid representation extending the partial one.
pub fn materialize_epsilon(potentials: &[EpsRat], inst: &SolveInstance) -> Result<Representation, SolverError> {
    let g = inst.graph();
    if potentials.len() != g.len() {
        return Err(SolverError::Internal(format!(
            "{} potentials for {} vertices",
            potentials.len(),
            g.len()
        )));
    }
    let concrete = |iota: &Rat| Representation {
        starts: g
            .vertices()
            .iter()
            .zip(potentials)
            .map(|(v, p)| {
                let s = p.substitute(iota);
                let s = match inst.domain() {
                    Domain::Circle { circumference } => s.rem_euclid(circumference),
                    Domain::Line { .. } => s,
                };
                (v.clone(), s)
            })
            .collect(),
    };
    if potentials.iter().all(|p| p.inf == 0) {
        let rep = concrete(&Rat::zero());
        return match inst.check(&rep) {
            Ok(()) => Ok(rep),
            Err(e) => Err(SolverError::Internal(format!("infinitesimal-free potentials rejected: {e}"))),
        };
    }
    for t in 1..=MAX_IOTA_EXPONENT {
        let rep = concrete(&Rat::pow2_neg(t));
        if inst.check(&rep).is_ok() {
            return Ok(rep);
        }
    }
    Err(SolverError::Internal(format!(
        "no iota down to 2^-{MAX_IOTA_EXPONENT} realizes the potentials"
    )))
}
