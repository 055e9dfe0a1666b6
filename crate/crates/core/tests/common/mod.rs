#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use uca_repext::arith::Rat;
use uca_repext::model::{validate_partial, Domain, Graph, PartialRep, SolveInstance};
use uca_repext::reduction::ThreePartitionInstance;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d).unwrap()
}

/// Random graph on `n` vertices with random pins in `domain`; pins that
/// contradict each other are dropped until the partial representation
/// is admissible.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, domain: &Domain, pin_prob: f64) -> SolveInstance {
    let names: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    let graph = Graph::new(&names, &edges).unwrap();
    // starts on a quarter grid
    let slots = match domain {
        Domain::Circle { circumference } => (circumference.to_f64() * 4.0).ceil() as i64,
        Domain::Line { window } => ((window.to_f64() - 1.0) * 4.0).floor() as i64 + 1,
    };
    let mut partial = PartialRep::new();
    for v in &names {
        if rng.gen_bool(pin_prob) {
            let s = rat(rng.gen_range(0..slots), 4);
            if domain.in_range(&s) {
                partial.pin(v.clone(), s);
            }
        }
    }
    while validate_partial(&graph, &partial, domain).is_err() {
        let last = partial.fixed.keys().next_back().cloned().unwrap();
        partial.fixed.remove(&last);
    }
    SolveInstance::new(graph, domain.clone(), partial).unwrap()
}

/// Valid checked instance: each of the `k` triples is drawn inside
/// `(M/4, M/2)` and the numbers are shuffled.
pub fn random_checked(rng: &mut ChaCha8Rng) -> ThreePartitionInstance {
    loop {
        let k = rng.gen_range(1..=3u64);
        let m = rng.gen_range(8..=30u64);
        let ok = |x: u64| 4 * x > m && 2 * x < m;
        let mut a = Vec::new();
        let mut good = true;
        for _ in 0..k {
            let lo = m / 4 + 1;
            let hi = (m - 1) / 2;
            if lo > hi {
                good = false;
                break;
            }
            let x = rng.gen_range(lo..=hi);
            let y = rng.gen_range(lo..=hi);
            if x + y >= m || !ok(m - x - y) {
                good = false;
                break;
            }
            a.extend([x, y, m - x - y]);
        }
        if good {
            a.shuffle(rng);
            return ThreePartitionInstance { k, m, a };
        }
    }
}

/// Valid unchecked instance: every group's `M` split into random parts.
pub fn random_unchecked(rng: &mut ChaCha8Rng) -> ThreePartitionInstance {
    let k = rng.gen_range(1..=4u64);
    let m = rng.gen_range(1..=10u64);
    let mut a = Vec::new();
    for _ in 0..k {
        let mut left = m;
        while left > 0 {
            let x = rng.gen_range(1..=left);
            a.push(x);
            left -= x;
        }
    }
    a.shuffle(rng);
    ThreePartitionInstance { k, m, a }
}
