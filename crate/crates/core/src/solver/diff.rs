//! Difference-constraint systems over [`EpsRat`].
//!
//! A constraint `(i, j, c)` reads `x_j - x_i <= c` and becomes the edge
//! `i -> j` of weight `c`. Variable 0 is the designated zero.

use crate::arith::{EpsRat, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffConstraint {
    pub from: usize,
    pub to: usize,
    pub bound: EpsRat,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiffSystem {
    num_vars: usize,
    constraints: Vec<DiffConstraint>,
    pins: Vec<(usize, Rat)>,
}

impl DiffSystem {
    /// A system over `num_vars` variables, the first of which is the zero.
    pub fn new(num_vars: usize) -> DiffSystem {
        DiffSystem {
            num_vars: num_vars.max(1),
            constraints: Vec::new(),
            pins: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// `x_to - x_from <= bound`.
    pub fn add(&mut self, from: usize, to: usize, bound: EpsRat) {
        assert!(
            from < self.num_vars && to < self.num_vars,
            "constraint references undeclared variable"
        );
        self.constraints.push(DiffConstraint { from, to, bound });
    }

    /// `x_var = value`.
    pub fn pin(&mut self, var: usize, value: Rat) {
        assert!(var < self.num_vars, "pin references undeclared variable");
        self.pins.push((var, value));
    }

    pub fn constraints(&self) -> &[DiffConstraint] {
        &self.constraints
    }

    /// Constraints with every pin expanded into its paired bounds against
    /// the zero variable.
    pub fn expanded(&self) -> Vec<DiffConstraint> {
        let mut all = self.constraints.clone();
        for (v, value) in &self.pins {
            all.push(DiffConstraint {
                from: 0,
                to: *v,
                bound: EpsRat::real(value.clone()),
            });
            all.push(DiffConstraint {
                from: *v,
                to: 0,
                bound: EpsRat::real(-value),
            });
        }
        all
    }

    /// Whether `values` (indexed by variable) satisfies every constraint.
    pub fn satisfied_by(&self, values: &[EpsRat]) -> bool {
        self.expanded()
            .iter()
            .all(|c| &values[c.to] - &values[c.from] <= c.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Sat(Vec<EpsRat>),
    Unsat,
}

impl Feasibility {
    pub fn is_sat(&self) -> bool {
        matches!(self, Feasibility::Sat(_))
    }
}

fn relax(dist: &mut [Option<EpsRat>], from: usize, to: usize, w: &EpsRat) -> bool {
    let Some(df) = &dist[from] else {
        return false;
    };
    let cand = df + w;
    match &dist[to] {
        Some(dt) if *dt <= cand => false,
        _ => {
            dist[to] = Some(cand);
            true
        }
    }
}

/// Bellman-Ford feasibility. On success returns potentials with the zero
/// variable at 0 and every variable that is bounded below (relative to the
/// zero) placed at its least feasible value.
pub fn feasible(sys: &DiffSystem) -> Feasibility {
    let n = sys.num_vars;
    let cons = sys.expanded();

    // x_v = -dist(v, sink) with a virtual sink reachable from every
    // variable at weight 0; computed on the reversed graph.
    let mut to_sink: Vec<Option<EpsRat>> = vec![Some(EpsRat::zero()); n];
    let mut changed = true;
    let mut rounds = 0;
    while changed {
        if rounds > n {
            return Feasibility::Unsat;
        }
        changed = false;
        for c in &cons {
            changed |= relax(&mut to_sink, c.to, c.from, &c.bound);
        }
        rounds += 1;
    }
    let generic: Vec<EpsRat> = to_sink.into_iter().map(|d| -d.unwrap()).collect();

    // Least solution relative to the zero for variables that can reach it.
    let mut to_zero: Vec<Option<EpsRat>> = vec![None; n];
    to_zero[0] = Some(EpsRat::zero());
    for _ in 0..n {
        let mut any = false;
        for c in &cons {
            any |= relax(&mut to_zero, c.to, c.from, &c.bound);
        }
        if !any {
            break;
        }
    }

    // Variables that cannot reach the zero carry no lower bound; their
    // outgoing edges stay among themselves, so one uniform shift fixes
    // every upper bound imposed on them.
    let base = generic[0].clone();
    let mut shift = EpsRat::zero();
    for c in &cons {
        if let (Some(dfrom), None) = (&to_zero[c.from], &to_zero[c.to]) {
            let excess = &(&(&generic[c.to] - &base) + dfrom) - &c.bound;
            if excess > shift {
                shift = excess;
            }
        }
    }
    let values: Vec<EpsRat> = (0..n)
        .map(|v| match &to_zero[v] {
            Some(d) => -d,
            None => &(&generic[v] - &base) - &shift,
        })
        .collect();
    debug_assert!(sys.satisfied_by(&values), "potentials violate the system");
    Feasibility::Sat(values)
}

/// Incrementally maintained all-pairs shortest paths: `d[i][j]` is the
/// tightest upper bound on `x_j - x_i` implied so far, `None` meaning
/// unbounded.
#[derive(Debug, Clone)]
pub(crate) struct Closure {
    n: usize,
    d: Vec<Option<EpsRat>>,
}

impl Closure {
    pub(crate) fn new(n: usize) -> Closure {
        let mut d = vec![None; n * n];
        for i in 0..n {
            d[i * n + i] = Some(EpsRat::zero());
        }
        Closure { n, d }
    }

    pub(crate) fn bound(&self, i: usize, j: usize) -> Option<&EpsRat> {
        self.d[i * self.n + j].as_ref()
    }

    /// Adding `x_j - x_i <= c` keeps the system consistent.
    pub(crate) fn admits(&self, i: usize, j: usize, c: &EpsRat) -> bool {
        match self.bound(j, i) {
            Some(back) => !(back + c).is_negative(),
            None => true,
        }
    }

    /// Adds `x_j - x_i <= c`; returns `false` (leaving `self` unspecified)
    /// when that closes a negative cycle.
    pub(crate) fn add(&mut self, i: usize, j: usize, c: &EpsRat) -> bool {
        if !self.admits(i, j, c) {
            return false;
        }
        if matches!(self.bound(i, j), Some(cur) if cur <= c) {
            return true;
        }
        let n = self.n;
        let row_j: Vec<Option<EpsRat>> = self.d[j * n..(j + 1) * n].to_vec();
        for a in 0..n {
            let Some(dai) = self.d[a * n + i].clone() else {
                continue;
            };
            let via = &dai + c;
            for (b, djb) in row_j.iter().enumerate() {
                let Some(djb) = djb else { continue };
                let cand = &via + djb;
                let slot = &mut self.d[a * n + b];
                if slot.as_ref().is_none_or(|cur| cand < *cur) {
                    *slot = Some(cand);
                }
            }
        }
        true
    }
}

/// Variables with a constraint path to the zero.
#[cfg(test)]
fn reaches_zero(sys: &DiffSystem) -> Vec<bool> {
    let cons = sys.expanded();
    let mut seen = vec![false; sys.num_vars];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for c in cons.iter().filter(|c| c.to == v) {
            if !seen[c.from] {
                seen[c.from] = true;
                queue.push_back(c.from);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: i64, k: i64) -> EpsRat {
        EpsRat::new(Rat::from_int(n), k)
    }

    #[test]
    fn strict_against_closed_is_unsat() {
        let mut s = DiffSystem::new(2);
        s.add(0, 1, e(1, 0));
        s.add(1, 0, e(-1, -1));
        assert_eq!(feasible(&s), Feasibility::Unsat);
    }

    #[test]
    fn touching_is_sat() {
        let mut s = DiffSystem::new(2);
        s.add(0, 1, e(1, 0));
        s.add(1, 0, e(-1, 0));
        let Feasibility::Sat(x) = feasible(&s) else { panic!() };
        assert_eq!(&x[1] - &x[0], e(1, 0));
    }

    #[test]
    fn empty_system_is_all_zero() {
        let s = DiffSystem::new(4);
        assert_eq!(feasible(&s), Feasibility::Sat(vec![EpsRat::zero(); 4]));
    }

    #[test]
    fn leftmost_path_layout() {
        // P4 on a line: a=1, b=2, c=3, d=4 in order, consecutive >= 0,
        // edges <= 1, non-edges >= 1 + iota.
        let mut s = DiffSystem::new(5);
        for v in 1..5 {
            s.add(v, 0, e(0, 0));
        }
        for v in 1..4 {
            s.add(v + 1, v, e(0, 0));
            s.add(v, v + 1, e(1, 0));
        }
        for (u, v) in [(1, 3), (1, 4), (2, 4)] {
            s.add(v, u, e(-1, -1));
        }
        let Feasibility::Sat(x) = feasible(&s) else { panic!() };
        assert_eq!(x, vec![e(0, 0), e(0, 0), e(0, 1), e(1, 1), e(1, 2)]);
    }

    #[test]
    fn pins_and_unanchored_variables() {
        let mut s = DiffSystem::new(4);
        s.pin(1, Rat::new(5, 2).unwrap());
        // x3 has no lower bound but must sit at most 2 below x1
        s.add(1, 3, e(-2, 0));
        s.add(3, 2, e(0, 0));
        let Feasibility::Sat(x) = feasible(&s) else { panic!() };
        assert!(s.satisfied_by(&x));
        assert_eq!(x[0], EpsRat::zero());
        assert_eq!(x[1], EpsRat::real(Rat::new(5, 2).unwrap()));
        assert_eq!(reaches_zero(&s), vec![true, true, false, false]);
    }

    #[test]
    fn closure_detects_cycle_and_tightens() {
        let mut c = Closure::new(3);
        assert!(c.add(0, 1, &e(1, 0)));
        assert!(c.add(1, 2, &e(1, 0)));
        assert_eq!(c.bound(0, 2), Some(&e(2, 0)));
        assert!(c.admits(2, 0, &e(-2, 0)));
        assert!(!c.admits(2, 0, &e(-2, -1)));
        assert!(!c.add(2, 0, &e(-3, 0)));
    }
}
