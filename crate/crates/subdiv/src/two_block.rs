//! Two-block cycles `C(k1,k2)` in digraphs with minimum out-degree at least
//! `k1 + 3k2 - 5`.
//!
//! The search keeps a `k2`-good dipath `P0` ending at `x` together with two
//! forks `P1`, `P2` of length `k2 - 1` at `x`. Each round either closes a
//! subdivision or replaces `P0` by a strictly longer good dipath, so there
//! are at most `n` rounds.

use serde_json::json;
use thiserror::Error;

use crate::digraph::{pattern_two_block, Digraph, Dipath, Vertex};
use crate::finder::{checked, two_path_certificate, FindError, RunLog};
use crate::oracle::{SearchBudget, SubdivisionCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForkError {
    #[error("greedy fork stuck on path {path} at step {step}")]
    StuckGreedy { path: usize, step: usize },
}

/// Two dipaths from `v` of lengths exactly `l1` and `l2` meeting only in
/// `v` and avoiding `forbidden`. Grown greedily, first path first, always
/// taking the lowest-id fresh out-neighbour.
pub fn fork(d: &Digraph, v: Vertex, l1: usize, l2: usize, forbidden: &[bool]) -> Result<(Dipath, Dipath), ForkError> {
    let mut used = forbidden.to_vec();
    used[v] = true;
    let mut out = Vec::with_capacity(2);
    for (idx, len) in [(1, l1), (2, l2)] {
        let mut p = vec![v];
        for step in 0..len {
            let cur = *p.last().unwrap();
            let next = d.out(cur).iter().copied().find(|&w| !used[w]).ok_or(ForkError::StuckGreedy { path: idx, step })?;
            used[next] = true;
            p.push(next);
        }
        out.push(Dipath::new(p));
    }
    let p2 = out.pop().unwrap();
    let p1 = out.pop().unwrap();
    Ok((p1, p2))
}

/// Greedy maximal dipath from `v`: extend by the lowest-id out-neighbour
/// not yet on the path until none remains.
pub fn greedy_maximal_path(d: &Digraph, v: Vertex) -> Dipath {
    let mut on = vec![false; d.n()];
    on[v] = true;
    let mut p = vec![v];
    while let Some(&w) = d.out(*p.last().unwrap()).iter().find(|&&w| !on[w]) {
        on[w] = true;
        p.push(w);
    }
    Dipath::new(p)
}

struct State {
    p0: Vec<Vertex>,
    p1: Vec<Vertex>,
    p2: Vec<Vertex>,
}

fn mask(n: usize, sets: &[&[Vertex]]) -> Vec<bool> {
    let mut m = vec![false; n];
    for s in sets {
        for &v in *s {
            m[v] = true;
        }
    }
    m
}

/// Vertices of `targets` reachable from `start` by a dipath whose interior
/// avoids `blocked`, with one witness path each (BFS tree, lowest id first).
fn reach_into(d: &Digraph, start: Vertex, blocked: &[bool], targets: &[bool]) -> Vec<(Vertex, Dipath)> {
    let n = d.n();
    let mut pred = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut hit = vec![false; n];
    let mut found = Vec::new();
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    let trace = |pred: &[usize], end: Vertex, via: Vertex| {
        let mut vs = vec![end, via];
        let mut c = via;
        while c != start {
            c = pred[c];
            vs.push(c);
        }
        vs.reverse();
        Dipath::new(vs)
    };
    while let Some(u) = queue.pop_front() {
        for &w in d.out(u) {
            if targets[w] {
                if !hit[w] && w != start {
                    hit[w] = true;
                    found.push((w, trace(&pred, w, u)));
                }
                continue;
            }
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                pred[w] = u;
                queue.push_back(w);
            }
        }
    }
    found
}

/// Minimum out-degree that guarantees a `C(k1,k2)` subdivision and under
/// which the search cannot get stuck.
pub fn two_block_threshold(k1: usize, k2: usize) -> usize {
    if k2 == 1 {
        k1
    } else {
        k1 + 3 * k2 - 5
    }
}

/// Searches for a subdivision of `C(k1,k2)`.
pub fn find_two_block(d: &Digraph, k1: usize, k2: usize, budget: &mut SearchBudget) -> Result<SubdivisionCertificate, FindError> {
    find_two_block_logged(d, k1, k2, budget, &mut RunLog::default())
}

pub fn find_two_block_logged(
    d: &Digraph,
    k1: usize,
    k2: usize,
    budget: &mut SearchBudget,
    log: &mut RunLog,
) -> Result<SubdivisionCertificate, FindError> {
    if k2 == 0 || k1 < k2 || (k1, k2) == (1, 1) {
        return Err(FindError::BadParams(format!("twoblock({k1},{k2}) needs k1 >= k2 >= 1, not both 1")));
    }
    let r = search(d, k1, k2, budget, log);
    if let Err(FindError::NotFound(s)) = &r {
        let min_out = d.min_out_degree().unwrap_or(0);
        assert!(
            d.n() == 0 || min_out < two_block_threshold(k1, k2),
            "stuck at min out-degree {min_out} >= {}: {}",
            two_block_threshold(k1, k2),
            s.to_json()
        );
    }
    r
}

fn search(
    d: &Digraph,
    k1: usize,
    k2: usize,
    budget: &mut SearchBudget,
    log: &mut RunLog,
) -> Result<SubdivisionCertificate, FindError> {
    let pattern = pattern_two_block(k1, k2).unwrap();
    if k2 == 1 {
        return long_path_two_block(d, k1).map(|c| checked(d, &pattern, c));
    }
    let n = d.n();
    let mut st = seed(d, k2)?;
    log.push("seed", json!({ "p0": st.p0 }));
    let mut rounds = 0usize;
    loop {
        budget
            .tick()
            .map_err(|_| FindError::budget(budget.max_nodes, "good-path", json!({ "rounds": rounds, "p0_len": st.p0.len() - 1 })))?;
        rounds += 1;
        let before = st.p0.len();
        match round(d, k1, k2, &mut st)? {
            Some((long, short)) => {
                log.push("close", json!({ "rounds": rounds, "p0_len": st.p0.len() - 1 }));
                let cert = two_path_certificate(k1, k2, &long, &short);
                return Ok(checked(d, &pattern, cert));
            }
            None => {
                assert!(st.p0.len() > before && st.p0.len() <= n, "good path did not grow");
                log.push("extend", json!({ "p0_len": st.p0.len() - 1 }));
            }
        }
    }
}

fn seed(d: &Digraph, k2: usize) -> Result<State, FindError> {
    for u in 0..d.n() {
        for &v in d.out(u) {
            let mut forb = vec![false; d.n()];
            forb[u] = true;
            if let Ok((p1, p2)) = fork(d, v, k2 - 1, k2 - 1, &forb) {
                return Ok(State { p0: vec![u, v], p1: p1.vertices, p2: p2.vertices });
            }
        }
    }
    Err(FindError::stuck("seed", json!({ "reason": "no arc admits a fork at its head" })))
}

/// One improvement round: a closing pair of dipaths, or `None` after
/// lengthening `P0`.
fn round(d: &Digraph, k1: usize, k2: usize, st: &mut State) -> Result<Option<(Dipath, Dipath)>, FindError> {
    let n = d.n();
    let x = *st.p0.last().unwrap();
    let p0_minus_x = &st.p0[..st.p0.len() - 1];
    let p0x = mask(n, &[p0_minus_x]);

    // grow a fork at both fork ends
    for side in 0..2 {
        let (pi, pj) = if side == 0 { (&st.p1, &st.p2) } else { (&st.p2, &st.p1) };
        let a = *pi.last().unwrap();
        let mut removed = mask(n, &[pi, pj]);
        removed[a] = false;
        let reach = d.reach(&[a], &removed);
        if !p0_minus_x.iter().any(|&v| reach[v]) {
            let outside: Vec<bool> = reach.iter().map(|&r| !r).collect();
            let (f1, f2) = fork(d, a, k2 - 1, k2 - 2, &outside)
                .map_err(|e| FindError::stuck("fork-end", json!({ "end": a, "error": e.to_string() })))?;
            let w = f2.last();
            let taken = mask(n, &[pi, &f1.vertices, &f2.vertices, &st.p0]);
            let w2 = d.out(w).iter().copied().find(|&z| !taken[z]).ok_or_else(|| {
                FindError::stuck("fork-end-extend", json!({ "end": a, "w": w }))
            })?;
            let mut p0 = st.p0.clone();
            p0.extend_from_slice(&pi[1..]);
            let mut p2 = f2.vertices;
            p2.push(w2);
            *st = State { p0, p1: f1.vertices, p2 };
            return Ok(None);
        }
    }

    let pos = |v: Vertex| st.p0.iter().position(|&w| w == v).unwrap();
    let blocked_full = mask(n, &[&st.p0, &st.p1, &st.p2]);
    let a_end = *st.p1.last().unwrap();
    let b_end = *st.p2.last().unwrap();
    let set_a = reach_into(d, a_end, &blocked_full, &p0x);
    let set_b = reach_into(d, b_end, &blocked_full, &p0x);
    let a_star = set_a.iter().map(|(v, _)| *v).min_by_key(|&v| pos(v)).unwrap();
    let b_star = set_b.iter().map(|(v, _)| *v).min_by_key(|&v| pos(v)).unwrap();
    let (p1, p2, set_a) = if pos(a_star) <= pos(b_star) {
        (st.p1.clone(), st.p2.clone(), set_a)
    } else {
        (st.p2.clone(), st.p1.clone(), set_b)
    };
    let b = *p2.last().unwrap();
    let a_star = set_a.iter().map(|(v, _)| *v).min_by_key(|&v| pos(v)).unwrap();
    let pa_star = set_a.into_iter().find(|(v, _)| *v == a_star).unwrap().1;
    let q = Dipath::new(p1.clone()).concat(&pa_star);
    let r = q.len().min(k1);
    let q_prime = Dipath::new(q.vertices[..=r].to_vec());
    let y = q_prime.last();

    // B*: targets on P0 - x reachable from b avoiding P0, Q, P2 internally
    let blocked_q = mask(n, &[&st.p0, &q.vertices, &p2]);
    let b_star_set = reach_into(d, b, &blocked_q, &p0x);
    if b_star_set.len() > k1 - r {
        let (bs, pbs) = b_star_set.into_iter().max_by_key(|(v, _)| pos(*v)).unwrap();
        debug_assert!(pos(bs) - pos(a_star) >= k1 - r);
        let long = q.concat(&Dipath::new(st.p0[pos(a_star)..=pos(bs)].to_vec()));
        let short = Dipath::new(p2.clone()).concat(&pbs);
        return Ok(Some((long, short)));
    }

    // second endgame: b -> V(Q) avoiding (P0 ∪ Q' ∪ P2) \ {b, y}; y is only
    // admissible when it is not on P0
    let mut blocked2 = mask(n, &[&st.p0, &q_prime.vertices, &p2]);
    blocked2[b] = false;
    if !p0x.get(y).copied().unwrap_or(false) {
        blocked2[y] = false;
    }
    let mut targets = mask(n, &[&q.vertices]);
    for &v in &st.p0 {
        targets[v] = false;
    }
    targets[b] = false;
    if blocked2[y] {
        targets[y] = false;
    }
    if let Some(pstar) = d.shortest_path(&[b], &targets, &blocked2) {
        let qv = pstar.last();
        let long = q.sub(x, qv);
        let short = Dipath::new(p2.clone()).concat(&pstar);
        assert!(long.len() >= k1, "second endgame too short");
        return Ok(Some((long, short)));
    }

    // otherwise P0 ∘ P2 becomes a longer good path
    let reach = d.reach(&[b], &blocked2);
    let outside: Vec<bool> = reach.iter().map(|&r| !r).collect();
    let (f1, f2) = fork(d, b, k2 - 1, k2 - 2, &outside)
        .map_err(|e| FindError::stuck("regrow-fork", json!({ "end": b, "b_star": b_star_set.len(), "error": e.to_string() })))?;
    let z = f2.last();
    let taken = mask(n, &[&st.p0, &p2, &f1.vertices, &f2.vertices]);
    let z2 = d
        .out(z)
        .iter()
        .copied()
        .find(|&w| !taken[w])
        .ok_or_else(|| FindError::stuck("regrow-extend", json!({ "end": b, "z": z })))?;
    let mut p0 = st.p0.clone();
    p0.extend_from_slice(&p2[1..]);
    let mut np2 = f2.vertices;
    np2.push(z2);
    *st = State { p0, p1: f1.vertices, p2: np2 };
    Ok(None)
}

/// `C(k,1)`: on a greedy maximal dipath the terminal vertex has all its
/// out-neighbours on the path; going to the earliest one and walking along
/// to the latest gives the long side, the direct arc the short one.
fn long_path_two_block(d: &Digraph, k: usize) -> Result<SubdivisionCertificate, FindError> {
    for v in 0..d.n() {
        let p = greedy_maximal_path(d, v);
        let x = p.last();
        let ps: Vec<usize> = d.out(x).iter().map(|&w| p.position(w).unwrap()).collect();
        let (Some(&i), Some(&j)) = (ps.iter().min(), ps.iter().max()) else { continue };
        if j - i + 1 >= k && i < j {
            let mut long = vec![x];
            long.extend_from_slice(&p.vertices[i..=j]);
            let short = Dipath::arc(x, p.vertices[j]);
            return Ok(two_path_certificate(k, 1, &Dipath::new(long), &short));
        }
    }
    Err(FindError::stuck("long-path", json!({ "reason": "no terminal vertex spans k path positions" })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::*;
    use crate::oracle::*;

    #[test]
    fn fork_examples() {
        let (p1, p2) = fork(&bioriented_clique(5), 0, 2, 2, &[false; 5]).unwrap();
        assert_eq!(p1.vertices, vec![0, 1, 2]);
        assert_eq!(p2.vertices, vec![0, 3, 4]);
        let e = fork(&directed_path(3), 0, 1, 1, &[false; 4]).unwrap_err();
        assert_eq!(e, ForkError::StuckGreedy { path: 2, step: 0 });
    }

    #[test]
    fn two_block_at_threshold() {
        let mut b = SearchBudget::default();
        for (k1, k2, host) in [(3, 2, 5), (2, 2, 4)] {
            let d = bioriented_clique(host);
            let cert = find_two_block(&d, k1, k2, &mut b).unwrap();
            assert_eq!(validate_certificate(&d, &pattern_two_block(k1, k2).unwrap(), &cert), Ok(()));
        }
    }

    #[test]
    fn two_block_lower_bound_not_found() {
        for k in 2..=4 {
            let d = bioriented_clique(k + 1);
            let r = find_two_block(&d, k, 2, &mut SearchBudget::default());
            assert!(matches!(r, Err(FindError::NotFound(_))), "{r:?}");
        }
    }

    #[test]
    fn bad_params() {
        let d = bioriented_clique(4);
        assert!(matches!(find_two_block(&d, 1, 2, &mut SearchBudget::default()), Err(FindError::BadParams(_))));
        assert!(matches!(find_two_block(&d, 2, 0, &mut SearchBudget::default()), Err(FindError::BadParams(_))));
    }

    #[test]
    fn k2_one_uses_long_path() {
        for k in 2..=4 {
            let d = bioriented_clique(k + 1);
            let cert = find_two_block(&d, k, 1, &mut SearchBudget::default()).unwrap();
            assert_eq!(validate_certificate(&d, &pattern_two_block(k, 1).unwrap(), &cert), Ok(()));
        }
    }
}
