//! 3-Partition instances and the unit circular-arc instances built from
//! them.
//!
//! Each number `A_i` becomes a path on `2·A_i` vertices; `k` isolated
//! vertices are pinned to unit arcs starting at `j(M+2)` on a circle of
//! circumference `k(M+2)`. The pinned arcs leave `k` gaps of length `M+1`
//! and a path on `2ℓ` vertices needs just over `ℓ` units, so the pinned
//! arcs extend iff the numbers split into `k` groups of sum `M`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::Rat;
use crate::model::{Domain, Graph, PartialRep, SolveInstance};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Classic 3-Partition: `3k` numbers, `M/4 < A_i < M/2`, `M >= 8`.
    #[default]
    Checked,
    /// Any number of positive `A_i` with `Σ A_i = kM`.
    Unchecked,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Checked => "checked",
            Mode::Unchecked => "unchecked",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreePartitionInstance {
    pub k: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "A")]
    pub a: Vec<u64>,
}

/// On-disk form; `mode` defaults to checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreePartitionFile {
    pub k: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
}

impl ThreePartitionFile {
    pub fn instance(&self) -> ThreePartitionInstance {
        ThreePartitionInstance {
            k: self.k,
            m: self.m,
            a: self.a.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    #[error("k must be positive")]
    ZeroK,
    #[error("M must be positive")]
    ZeroM,
    #[error("M = {m} is below 8")]
    MTooSmall { m: u64 },
    #[error("expected 3k = {expected} numbers, got {actual}")]
    WrongCount { expected: u64, actual: usize },
    #[error("A[{index}] = 0 is not positive")]
    NonPositive { index: usize },
    #[error("A[{index}] = {value} is outside (M/4, M/2)")]
    OutOfBounds { index: usize, value: u64 },
    #[error("sum of A is {actual}, expected kM = {expected}")]
    SumMismatch { expected: u128, actual: u128 },
}

/// Every violated requirement of `mode`, in a stable order.
pub fn validate_3p(inst: &ThreePartitionInstance, mode: Mode) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if inst.k == 0 {
        out.push(Violation::ZeroK);
    }
    if inst.m == 0 {
        out.push(Violation::ZeroM);
    }
    if mode == Mode::Checked {
        if inst.m < 8 {
            out.push(Violation::MTooSmall { m: inst.m });
        }
        let expected = 3 * inst.k;
        if inst.a.len() as u64 != expected {
            out.push(Violation::WrongCount {
                expected,
                actual: inst.a.len(),
            });
        }
    }
    for (index, &value) in inst.a.iter().enumerate() {
        if value == 0 {
            out.push(Violation::NonPositive { index });
        } else if mode == Mode::Checked {
            // M/4 < A < M/2 without division
            let (v, m) = (value as u128, inst.m as u128);
            if 4 * v <= m || 2 * v >= m {
                out.push(Violation::OutOfBounds { index, value });
            }
        }
    }
    let actual: u128 = inst.a.iter().map(|&x| x as u128).sum();
    let expected = inst.k as u128 * inst.m as u128;
    if actual != expected {
        out.push(Violation::SumMismatch { expected, actual });
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("invalid 3-Partition instance: {}", describe(.0))]
    Invalid(Vec<Violation>),
    #[error("instance too large for the arc model: {0}")]
    TooLarge(String),
    #[error("construction rejected: {0}")]
    Construction(#[from] crate::model::InstanceError),
}

fn describe(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub fn path_vertex(i: usize, t: usize) -> String {
    format!("p{i}_{t}")
}

pub fn pinned_vertex(j: usize) -> String {
    format!("v{j}")
}

/// Builds the circle, the disjoint paths `P_{2A_i}` and the pinned arcs.
///
/// Vertices are `p{i}_{t}` (the `t`-th vertex of the path for `A_i`)
/// followed by `v{j}`, pinned at `j(M+2)`.
pub fn reduce_to_repext(inst: &ThreePartitionInstance, mode: Mode) -> Result<SolveInstance, ReductionError> {
    validate_3p(inst, mode).map_err(ReductionError::Invalid)?;
    let too_large = |what: &str| ReductionError::TooLarge(what.to_string());
    let k = i64::try_from(inst.k).map_err(|_| too_large("k"))?;
    let step = i64::try_from(inst.m)
        .ok()
        .and_then(|m| m.checked_add(2))
        .ok_or_else(|| too_large("M"))?;
    let circumference = k.checked_mul(step).ok_or_else(|| too_large("k(M+2)"))?;

    let mut names = Vec::new();
    let mut edges = Vec::new();
    for (i, &len) in inst.a.iter().enumerate() {
        let len = usize::try_from(len).map_err(|_| too_large("A_i"))?;
        for t in 0..2 * len {
            names.push(path_vertex(i, t));
            if t > 0 {
                edges.push((path_vertex(i, t - 1), path_vertex(i, t)));
            }
        }
    }
    let mut partial = PartialRep::new();
    for j in 0..k {
        let v = pinned_vertex(j as usize);
        names.push(v.clone());
        partial.pin(v, Rat::from_int(j * step));
    }
    let graph = Graph::new(&names, &edges).map_err(|e| ReductionError::Construction(e.into()))?;
    let domain = Domain::circle(Rat::from_int(circumference))
        .map_err(|e| ReductionError::Construction(e.into()))?;
    Ok(SolveInstance::new(graph, domain, partial)?)
}

/// Groups of indices into `A`, each summing to `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionWitness {
    pub groups: Vec<Vec<usize>>,
}

impl PartitionWitness {
    /// Groups partition the index set, each sums to `M`, and in checked
    /// mode each is a triple.
    pub fn verify(&self, inst: &ThreePartitionInstance, mode: Mode) -> bool {
        if self.groups.len() as u64 != inst.k {
            return false;
        }
        let mut seen = vec![false; inst.a.len()];
        for g in &self.groups {
            if mode == Mode::Checked && g.len() != 3 {
                return false;
            }
            let mut sum = 0u128;
            for &i in g {
                if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                    return false;
                }
                sum += inst.a[i] as u128;
            }
            if sum != inst.m as u128 {
                return false;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

struct PartitionSearch<'a> {
    a: &'a [u64],
    m: u64,
    cap: Option<usize>,
    groups: Vec<Vec<usize>>,
    sums: Vec<u64>,
}

impl PartitionSearch<'_> {
    fn assign(&mut self, i: usize) -> bool {
        if i == self.a.len() {
            return self.sums.iter().all(|&s| s == self.m);
        }
        let mut tried_empty = false;
        for g in 0..self.groups.len() {
            let empty = self.groups[g].is_empty();
            // empty groups are interchangeable: open only the first one
            if empty && tried_empty {
                break;
            }
            tried_empty |= empty;
            if self.sums[g] + self.a[i] > self.m {
                continue;
            }
            if matches!(self.cap, Some(c) if self.groups[g].len() >= c) {
                continue;
            }
            self.groups[g].push(i);
            self.sums[g] += self.a[i];
            if self.assign(i + 1) {
                return true;
            }
            self.groups[g].pop();
            self.sums[g] -= self.a[i];
        }
        false
    }
}

/// Exhaustive search for `k` groups summing to `M` (triples in checked
/// mode). Items go to groups in index order, so the witness is the
/// lexicographically first one.
pub fn oracle_partition(inst: &ThreePartitionInstance, mode: Mode) -> Option<PartitionWitness> {
    validate_3p(inst, mode).ok()?;
    let k = usize::try_from(inst.k).ok()?;
    let mut search = PartitionSearch {
        a: &inst.a,
        m: inst.m,
        cap: (mode == Mode::Checked).then_some(3),
        groups: vec![Vec::new(); k],
        sums: vec![0; k],
    };
    let found = search.assign(0);
    found.then_some(PartitionWitness { groups: search.groups })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gap {
    pub start: Rat,
    pub length: Rat,
}

/// Free stretches of the circle between consecutive pinned arcs, walking
/// clockwise from the first pinned start. Empty on a line or without pins.
pub fn gap_structure(inst: &SolveInstance) -> Vec<Gap> {
    let Domain::Circle { circumference } = inst.domain() else {
        return Vec::new();
    };
    let mut starts: Vec<Rat> = inst.partial().fixed.values().cloned().collect();
    starts.sort();
    starts.dedup();
    let one = Rat::one();
    let mut gaps = Vec::new();
    for (i, s) in starts.iter().enumerate() {
        let end = s + &one;
        let next = match starts.get(i + 1) {
            Some(n) => n.clone(),
            None => &starts[0] + circumference,
        };
        let length = &next - &end;
        if length.is_negative() || length.is_zero() {
            continue;
        }
        gaps.push(Gap {
            start: end.rem_euclid(circumference),
            length,
        });
    }
    gaps
}
