mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_instance, rat};
use uca_repext::arith::Rat;
use uca_repext::model::{derived_graph, extends, validate_rep, Domain, Graph, PartialRep, Representation, SolveInstance};
use uca_repext::reduction::{oracle_partition, reduce_to_repext, validate_3p, Mode, ThreePartitionInstance};
use uca_repext::solver::{solve, solve_reference, Budget, Verdict};

fn verdict(inst: &SolveInstance) -> Verdict {
    solve(inst, Budget::unlimited()).unwrap().verdict()
}

#[test]
fn agrees_with_reference_on_sparse_pins() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..60 {
        let domain = match i % 3 {
            0 => Domain::circle(rat(9, 2)).unwrap(),
            1 => Domain::circle(Rat::from_int(3)).unwrap(),
            _ => Domain::line(rat(7, 2)).unwrap(),
        };
        let n = rng.gen_range(2..=5);
        let inst = random_instance(&mut rng, n, &domain, 0.15);
        let slow = solve_reference(&inst).unwrap().verdict();
        assert_eq!(verdict(&inst), slow, "{:?} on {domain}", inst.graph().edge_names());
    }
}

#[test]
fn verdict_ignores_vertex_order() {
    // The search anchors and orders by canonical index; relabelling the
    // order must not change the answer.
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for i in 0..40 {
        let domain = if i % 2 == 0 {
            Domain::circle(Rat::from_int(5)).unwrap()
        } else {
            Domain::line(Rat::from_int(3)).unwrap()
        };
        let n = rng.gen_range(2..=6);
        let pin_prob = if i % 4 < 2 { 0.0 } else { 0.3 };
        let inst = random_instance(&mut rng, n, &domain, pin_prob);
        let base = verdict(&inst);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let shuffled = SolveInstance::new(inst.graph().reordered(&order), domain.clone(), inst.partial().clone()).unwrap();
        assert_eq!(verdict(&shuffled), base, "order {order:?}");
    }
}

#[test]
fn rotations_and_reflections_of_witnesses_stay_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let domain = Domain::circle(rat(11, 2)).unwrap();
    let c = rat(11, 2);
    let mut seen = 0;
    for _ in 0..30 {
        let n = rng.gen_range(2..=6);
        let inst = random_instance(&mut rng, n, &domain, 0.0);
        let Some(w) = solve(&inst, Budget::unlimited()).unwrap().witness().cloned() else {
            continue;
        };
        seen += 1;
        let shift = rat(rng.gen_range(0..22), 4);
        let rotated = Representation {
            starts: w.starts.iter().map(|(v, s)| (v.clone(), (s + &shift).rem_euclid(&c))).collect(),
        };
        validate_rep(inst.graph(), &rotated, &domain).unwrap();
        let reflected = Representation {
            starts: w.starts.iter().map(|(v, s)| (v.clone(), domain.reflect(s))).collect(),
        };
        validate_rep(inst.graph(), &reflected, &domain).unwrap();
    }
    assert!(seen > 5);
}

#[test]
fn paths_are_monotone_in_window() {
    for n in 2..=6 {
        let windows = [rat(1, 1), rat(3, 2), rat(2, 1), rat(21, 10), rat(5, 2), rat(3, 1), rat(31, 10), rat(7, 2)];
        let verdicts: Vec<Verdict> = windows
            .iter()
            .map(|w| verdict(&SolveInstance::new(Graph::path("p", n), Domain::line(w.clone()).unwrap(), PartialRep::new()).unwrap()))
            .collect();
        let first_sat = verdicts.iter().position(|v| *v == Verdict::Sat).unwrap_or(verdicts.len());
        assert!(verdicts[..first_sat].iter().all(|v| *v == Verdict::Unsat), "P{n}: {verdicts:?}");
        assert!(verdicts[first_sat..].iter().all(|v| *v == Verdict::Sat), "P{n}: {verdicts:?}");
    }
}

#[test]
fn repeated_solves_are_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for i in 0..20 {
        let domain = if i % 2 == 0 {
            Domain::circle(Rat::from_int(6)).unwrap()
        } else {
            Domain::line(Rat::from_int(4)).unwrap()
        };
        let inst = random_instance(&mut rng, 6, &domain, 0.3);
        let a = solve(&inst, Budget::unlimited()).unwrap();
        let b = solve(&inst, Budget::unlimited()).unwrap();
        assert_eq!(a.verdict(), b.verdict());
        assert_eq!(a.witness(), b.witness());
        assert_eq!(a.stats().feasibility_checks, b.stats().feasibility_checks);
    }
}

#[test]
fn budgets_never_change_a_decided_verdict() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for i in 0..30 {
        let domain = if i % 2 == 0 {
            Domain::circle(Rat::from_int(5)).unwrap()
        } else {
            Domain::line(Rat::from_int(3)).unwrap()
        };
        let inst = random_instance(&mut rng, 6, &domain, 0.2);
        let full = solve(&inst, Budget::unlimited()).unwrap();
        assert_ne!(full.verdict(), Verdict::Unknown);
        for cap in [0, 1, 3, 10, 50] {
            let capped = solve(&inst, Budget::checks(cap)).unwrap();
            match capped.verdict() {
                Verdict::Unknown => assert!(capped.stats().feasibility_checks <= cap),
                v => assert_eq!(v, full.verdict(), "cap {cap}"),
            }
        }
    }
}

#[test]
fn reduction_answers_match_partition_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut yes = 0;
    for _ in 0..12 {
        // Desk-scale instances; padding with ones keeps the sum at kM.
        let k = rng.gen_range(1..=2u64);
        let m = rng.gen_range(2..=4u64);
        let mut a: Vec<u64> = (0..2 * k).map(|_| rng.gen_range(1..=m)).collect();
        let sum: u64 = a.iter().sum();
        if sum > k * m {
            continue;
        }
        a.extend(std::iter::repeat_n(1, (k * m - sum) as usize));
        let inst = ThreePartitionInstance { k, m, a };
        let expected = oracle_partition(&inst, Mode::Unchecked);
        let arcs = reduce_to_repext(&inst, Mode::Unchecked).unwrap();
        let out = solve(&arcs, Budget::unlimited()).unwrap();
        assert_eq!(out.is_sat(), expected.is_some(), "{inst:?}");
        if let Some(w) = out.witness() {
            arcs.check(w).unwrap();
            yes += 1;
        }
    }
    assert!(yes > 0);
}

#[test]
fn non_partitionable_instance_has_no_extension() {
    let inst = ThreePartitionInstance { k: 2, m: 4, a: vec![3, 3, 2] };
    assert!(oracle_partition(&inst, Mode::Unchecked).is_none());
    let arcs = reduce_to_repext(&inst, Mode::Unchecked).unwrap();
    assert_eq!(verdict(&arcs), Verdict::Unsat);
}

fn arb_rep(domain: Domain) -> impl Strategy<Value = Representation> {
    let slots = match &domain {
        Domain::Circle { circumference } => (circumference.to_f64() * 8.0) as i64,
        Domain::Line { window } => ((window.to_f64() - 1.0) * 8.0) as i64 + 1,
    };
    prop::collection::vec(0..slots, 0..8).prop_map(|xs| Representation {
        starts: xs.into_iter().enumerate().map(|(i, x)| (format!("v{i}"), rat(x, 8))).collect(),
    })
}

fn arb_3p() -> impl Strategy<Value = ThreePartitionInstance> {
    (1..4u64, 1..12u64, prop::collection::vec(1..12u64, 0..10))
        .prop_map(|(k, m, a)| ThreePartitionInstance { k, m, a })
}

proptest! {
    #[test]
    fn derived_graph_round_trips(rep in arb_rep(Domain::circle(rat(13, 3)).unwrap())) {
        let domain = Domain::circle(rat(13, 3)).unwrap();
        let names: Vec<&String> = rep.starts.keys().collect();
        let g = derived_graph(&rep, &domain, &names);
        prop_assert!(validate_rep(&g, &rep, &domain).is_ok());
        let partial = PartialRep { fixed: rep.starts.clone() };
        prop_assert!(extends(&rep, &partial));
        prop_assert!(SolveInstance::new(g, domain, partial).is_ok());
    }

    #[test]
    fn derived_line_graphs_are_solved(rep in arb_rep(Domain::line(rat(5, 2)).unwrap())) {
        let domain = Domain::line(rat(5, 2)).unwrap();
        let names: Vec<&String> = rep.starts.keys().collect();
        let g = derived_graph(&rep, &domain, &names);
        let inst = SolveInstance::new(g, domain, PartialRep::new()).unwrap();
        prop_assert_eq!(verdict(&inst), Verdict::Sat);
    }

    #[test]
    fn valid_partition_instances_reduce_consistently(inst in arb_3p()) {
        let valid = validate_3p(&inst, Mode::Unchecked).is_ok();
        let reduced = reduce_to_repext(&inst, Mode::Unchecked);
        prop_assert_eq!(valid, reduced.is_ok());
        if let Ok(arcs) = reduced {
            let sum: u64 = inst.a.iter().sum();
            prop_assert_eq!(arcs.graph().len() as u64, 2 * sum + inst.k);
            prop_assert_eq!(arcs.partial().fixed.len() as u64, inst.k);
        }
        if let Some(w) = oracle_partition(&inst, Mode::Unchecked) {
            prop_assert!(valid);
            prop_assert!(w.verify(&inst, Mode::Unchecked));
        }
    }

    #[test]
    fn checked_mode_is_stricter(inst in arb_3p()) {
        if validate_3p(&inst, Mode::Checked).is_ok() {
            prop_assert!(validate_3p(&inst, Mode::Unchecked).is_ok());
        }
        if let Some(w) = oracle_partition(&inst, Mode::Checked) {
            prop_assert!(w.groups.iter().all(|g| g.len() == 3));
            prop_assert!(w.verify(&inst, Mode::Checked));
        }
    }
}
