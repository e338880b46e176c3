//! Seeded random digraph generators.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::{Digraph, Vertex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every vertex gets exactly `k` distinct uniformly random out-neighbours.
pub fn random_k_out<R: Rng>(n: usize, k: usize, rng: &mut R) -> Digraph {
    assert!(k < n, "need k < n");
    let out = (0..n)
        .map(|u| {
            sample(rng, n - 1, k)
                .into_iter()
                .map(|x| if x >= u { x + 1 } else { x })
                .collect::<Vec<Vertex>>()
        })
        .collect();
    Digraph::from_out_lists(out)
}

/// Each ordered pair becomes an arc independently with probability `p`.
pub fn random_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Digraph {
    let out = (0..n).map(|u| (0..n).filter(|&v| v != u && rng.gen_bool(p)).collect()).collect();
    Digraph::from_out_lists(out)
}

/// Adds the lowest-id missing out-arcs until every out-degree is at least
/// `k`.
pub fn repair_min_out(d: &Digraph, k: usize) -> Digraph {
    let n = d.n();
    let mut out: Vec<Vec<Vertex>> = d.out_lists().to_vec();
    for (u, list) in out.iter_mut().enumerate() {
        let mut v = 0;
        while list.len() < k && v < n {
            if v != u && !list.contains(&v) {
                list.push(v);
            }
            v += 1;
        }
    }
    Digraph::from_out_lists(out)
}

/// Uniform random relabelling.
pub fn shuffle_labels<R: Rng>(d: &Digraph, rng: &mut R) -> Digraph {
    use rand::seq::SliceRandom;
    let mut perm: Vec<Vertex> = (0..d.n()).collect();
    perm.shuffle(rng);
    d.relabel(&perm)
}
