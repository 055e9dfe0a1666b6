//! Unpruned enumeration used as a differential oracle for [`super::solve`].
//!
//! Every clockwise ordering and every assignment of edge sides becomes one
//! full difference system handed to Bellman-Ford. No propagation, no
//! prefix checks, no symmetry reduction beyond opening the circle at the
//! anchor.

use std::time::Instant;

use super::{
    anchor, base_constraints, feasible, materialize_epsilon, order_constraints, side_constraint,
    var, DiffConstraint, DiffSystem, Feasibility, Side, SolveOutcome, SolverError, Stats,
};
use crate::arith::{EpsRat, Rat};
use crate::model::{Domain, Representation, SolveInstance};

pub const REFERENCE_MAX_VERTICES: usize = 7;

/// Permutations of `items` in lexicographic order of positions.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

pub fn solve_reference(inst: &SolveInstance) -> Result<SolveOutcome, SolverError> {
    let started = Instant::now();
    let g = inst.graph();
    let n = g.len();
    if n > REFERENCE_MAX_VERTICES {
        return Err(SolverError::TooLarge {
            max: REFERENCE_MAX_VERTICES,
            got: n,
        });
    }
    let mut stats = Stats::default();
    let finish = |mut stats: Stats, witness: Option<Representation>| {
        stats.elapsed = started.elapsed();
        match witness {
            Some(witness) => SolveOutcome::Sat { witness, stats },
            None => SolveOutcome::Unsat { stats },
        }
    };
    if n == 0 {
        return Ok(finish(stats, Some(Representation::default())));
    }

    let anchor = anchor(inst);
    let base = base_constraints(inst, anchor.as_ref());
    let circumference = match inst.domain() {
        Domain::Circle { circumference } => Some(circumference.clone()),
        Domain::Line { .. } => None,
    };
    let (head, rest): (Vec<usize>, Vec<usize>) = match (&circumference, &anchor) {
        (Some(_), Some((a, _))) => (vec![*a], (0..n).filter(|v| v != a).collect()),
        _ => (Vec::new(), (0..n).collect()),
    };
    let edges = g.edges();
    let side_bits = if circumference.is_some() { edges.len() } else { 0 };

    for tail in permutations(&rest) {
        stats.orderings += 1;
        let order: Vec<usize> = head.iter().chain(&tail).copied().collect();
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut fixed = base.clone();
        for i in 0..n {
            for j in i + 1..n {
                order_constraints(inst, order[i], order[j], &mut fixed);
            }
        }
        for mask in 0u64..(1u64 << side_bits) {
            stats.feasibility_checks += 1;
            let mut sys = DiffSystem::new(n + 1);
            for c in &fixed {
                sys.add(c.from, c.to, c.bound.clone());
            }
            for (e, &(u, v)) in edges.iter().enumerate() {
                let (a, b) = if pos[u] <= pos[v] { (u, v) } else { (v, u) };
                let c = match &circumference {
                    Some(c) => {
                        let side = if mask >> e & 1 == 0 { Side::Direct } else { Side::Wrap };
                        side_constraint(side, a, b, c)
                    }
                    None => DiffConstraint {
                        from: var(a),
                        to: var(b),
                        bound: EpsRat::real(Rat::one()),
                    },
                };
                sys.add(c.from, c.to, c.bound);
            }
            if let Feasibility::Sat(pot) = feasible(&sys) {
                let witness = materialize_epsilon(&pot[1..], inst)?;
                return Ok(finish(stats, Some(witness)));
            }
        }
    }
    Ok(finish(stats, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Graph, PartialRep};
    use crate::solver::{solve, Budget, Verdict};

    #[test]
    fn permutation_order() {
        assert_eq!(
            permutations(&[1, 2, 3]),
            vec![vec![1, 2, 3], vec![1, 3, 2], vec![2, 1, 3], vec![2, 3, 1], vec![3, 1, 2], vec![3, 2, 1]]
        );
    }

    #[test]
    fn agrees_on_claw_and_p4() {
        let claw = Graph::new(&["c", "x", "y", "z"], &[("c", "x"), ("c", "y"), ("c", "z")]).unwrap();
        let i = SolveInstance::new(claw, Domain::circle(Rat::from_int(14)).unwrap(), PartialRep::new()).unwrap();
        assert_eq!(solve_reference(&i).unwrap().verdict(), Verdict::Unsat);
        assert_eq!(solve(&i, Budget::unlimited()).unwrap().verdict(), Verdict::Unsat);

        let p4 = Graph::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
        let i = SolveInstance::new(p4, Domain::line(Rat::new(21, 10).unwrap()).unwrap(), PartialRep::new()).unwrap();
        let out = solve_reference(&i).unwrap();
        assert_eq!(i.check(out.witness().unwrap()), Ok(()));
        assert_eq!(solve(&i, Budget::unlimited()).unwrap().verdict(), Verdict::Sat);
    }

    #[test]
    fn size_guard() {
        let g = Graph::path("v", 8);
        let i = SolveInstance::new(g, Domain::line(Rat::from_int(20)).unwrap(), PartialRep::new()).unwrap();
        assert!(matches!(solve_reference(&i), Err(SolverError::TooLarge { max: 7, got: 8 })));
    }
}
