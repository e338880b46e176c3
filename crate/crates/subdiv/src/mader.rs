//! Desk-scale checks of Mader numbers: exhaustive labelled enumeration of
//! small digraphs, upper-bound verification with the oracle, and the
//! bioriented-clique lower-bound witness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{bioriented_clique, Digraph, Vertex};
use crate::oracle::{contains_subdivision, SearchBudget};
use crate::random::{random_gnp, repair_min_out, rng};

pub const MAX_ENUM_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaderError {
    #[error("exhaustive enumeration is limited to n <= {MAX_ENUM_N}, got {0}")]
    TooLarge(usize),
    #[error("pattern needs at least two vertices")]
    PatternTooSmall,
}

/// Labelled loopless digraphs on `n` vertices with `δ+ >= min_out`.
///
/// Arc sets are encoded as integers: vertex `u` owns the `n-1` bits
/// starting at `u*(n-1)`, bit `j` standing for the arc to the `j`-th other
/// vertex in increasing order. Graphs come out in increasing code order;
/// [`cursor`](Self::cursor) gives the next code for resuming.
#[derive(Debug, Clone)]
pub struct DigraphEnumerator {
    n: usize,
    min_out: usize,
    next: u64,
    end: u64,
}

pub fn enumerate_digraphs(n: usize, min_out: usize) -> Result<DigraphEnumerator, MaderError> {
    if n > MAX_ENUM_N {
        return Err(MaderError::TooLarge(n));
    }
    Ok(DigraphEnumerator { n, min_out, next: 0, end: 1u64 << (n * n.saturating_sub(1)) })
}

impl DigraphEnumerator {
    /// Restricts to codes in `start..end`.
    pub fn range(mut self, start: u64, end: u64) -> Self {
        self.next = start.max(self.next);
        self.end = end.min(self.end);
        self
    }

    pub fn cursor(&self) -> u64 {
        self.next
    }

    pub fn total_codes(&self) -> u64 {
        1u64 << (self.n * self.n.saturating_sub(1))
    }

    fn ok(&self, code: u64) -> bool {
        let w = self.n - 1;
        (0..self.n).all(|u| ((code >> (u * w)) & ((1u64 << w) - 1)).count_ones() as usize >= self.min_out)
    }
}

pub fn decode(n: usize, code: u64) -> Digraph {
    let w = n.saturating_sub(1);
    let out = (0..n)
        .map(|u| {
            (0..w)
                .filter(|j| code >> (u * w + j) & 1 == 1)
                .map(|j| if j >= u { j + 1 } else { j })
                .collect::<Vec<Vertex>>()
        })
        .collect();
    Digraph::from_out_lists(out)
}

impl Iterator for DigraphEnumerator {
    type Item = (u64, Digraph);

    fn next(&mut self) -> Option<Self::Item> {
        if self.n == 0 {
            let first = self.next == 0 && self.end > 0;
            self.next = self.end;
            return first.then(|| (0, Digraph::empty(0)));
        }
        while self.next < self.end {
            let code = self.next;
            self.next += 1;
            if self.ok(code) {
                return Some((code, decode(self.n, code)));
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    AllContain,
    Counterexample { n: usize, arcs: Vec<(Vertex, Vertex)> },
    Inconclusive { budget_exceeded: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaderReport {
    pub pattern: String,
    pub k: usize,
    pub n_max: usize,
    pub mode: Mode,
    pub tested: u64,
    pub outcome: Outcome,
}

impl MaderReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn outcome_label(&self) -> &'static str {
        match self.outcome {
            Outcome::AllContain => "all-contain",
            Outcome::Counterexample { .. } => "counterexample",
            Outcome::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn counterexample(&self) -> Option<Digraph> {
        match &self.outcome {
            Outcome::Counterexample { n, arcs } => Some(crate::digraph::build_digraph(*n, arcs).unwrap()),
            _ => None,
        }
    }
}

/// Per-host result: `Some(true)` contains, `Some(false)` does not,
/// `None` budget exhausted.
fn test_host(d: &Digraph, f: &Digraph, budget: u64) -> Option<bool> {
    contains_subdivision(d, f, &mut SearchBudget::new(budget)).ok().map(|c| c.is_some())
}

#[derive(Default, Clone, Copy)]
struct Tally {
    tested: u64,
    exceeded: u64,
    /// smallest (n, code) of a non-containing host
    first_bad: Option<(usize, u64)>,
}

fn merge(a: Tally, b: Tally) -> Tally {
    Tally {
        tested: a.tested + b.tested,
        exceeded: a.exceeded + b.exceeded,
        first_bad: match (a.first_bad, b.first_bad) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        },
    }
}

const SHARDS: u64 = 256;

/// Checks that every host with `δ+ >= k` and at most `n_max` vertices
/// contains a subdivision of `f`. `node_budget` bounds each oracle call.
pub fn verify_upper(f: &Digraph, name: &str, k: usize, n_max: usize, mode: Mode, node_budget: u64) -> Result<MaderReport, MaderError> {
    let tally = match mode {
        Mode::Exhaustive => {
            if n_max > MAX_ENUM_N {
                return Err(MaderError::TooLarge(n_max));
            }
            (1..=n_max)
                .map(|n| {
                    let total = 1u64 << (n * (n - 1));
                    let step = total.div_ceil(SHARDS).max(1);
                    (0..total.div_ceil(step))
                        .into_par_iter()
                        .map(|s| {
                            let mut t = Tally::default();
                            let it = enumerate_digraphs(n, k).unwrap().range(s * step, (s + 1) * step);
                            for (code, d) in it {
                                t.tested += 1;
                                match test_host(&d, f, node_budget) {
                                    Some(true) => {}
                                    Some(false) => {
                                        t.first_bad = Some((n, code));
                                        break;
                                    }
                                    None => t.exceeded += 1,
                                }
                            }
                            t
                        })
                        .reduce(Tally::default, merge)
                })
                .fold(Tally::default(), merge)
        }
        Mode::Sampled { count, seed } => {
            let lo = f.n().max(k + 1).min(n_max);
            (0..count)
                .into_par_iter()
                .map(|i| {
                    let d = sample_host(lo, n_max, k, seed, i);
                    let mut t = Tally { tested: 1, ..Tally::default() };
                    match test_host(&d, f, node_budget) {
                        Some(true) => {}
                        Some(false) => t.first_bad = Some((d.n(), i)),
                        None => t.exceeded = 1,
                    }
                    t
                })
                .reduce(Tally::default, merge)
        }
    };
    let outcome = match tally.first_bad {
        Some((n, code)) => {
            let d = match mode {
                Mode::Exhaustive => decode(n, code),
                Mode::Sampled { seed, .. } => sample_host(f.n().max(k + 1).min(n_max), n_max, k, seed, code),
            };
            debug_assert!(d.n() == 0 || d.min_out_degree().unwrap() >= k);
            Outcome::Counterexample { n, arcs: d.arcs() }
        }
        None if tally.exceeded > 0 => Outcome::Inconclusive { budget_exceeded: tally.exceeded },
        None => Outcome::AllContain,
    };
    Ok(MaderReport { pattern: name.to_string(), k, n_max, mode, tested: tally.tested, outcome })
}

/// The `i`-th sampled host: `n` uniform in `lo..=hi`, each arc with
/// probability 1/2, resampled a few times if `δ+ < k` and then repaired.
pub fn sample_host(lo: usize, hi: usize, k: usize, seed: u64, i: u64) -> Digraph {
    use rand::Rng;
    let mut r = rng(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let n = r.gen_range(lo..=hi);
    for _ in 0..8 {
        let d = random_gnp(n, 0.5, &mut r);
        if d.min_out_degree().unwrap_or(0) >= k {
            return d;
        }
    }
    repair_min_out(&random_gnp(n, 0.5, &mut r), k)
}

/// Bioriented clique on `|V(f)| - 1` vertices: minimum out-degree
/// `|V(f)| - 2` and too few vertices for any subdivision of `f`.
pub fn lower_witness(f: &Digraph) -> Result<Digraph, MaderError> {
    if f.n() < 2 {
        return Err(MaderError::PatternTooSmall);
    }
    Ok(bioriented_clique(f.n() - 1))
}
