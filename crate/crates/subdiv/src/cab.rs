//! Subdivisions of `C_{a,b}` and of arbitrary oriented cycles.
//!
//! [`find_cab`] grows a chain of gadgets from a start vertex, contracting
//! arcs that admit neither a short cycle nor a common in-neighbour, and
//! closes the chain into a certificate once it meets itself. Every
//! certificate is validated before it is returned; on hosts far below the
//! degree threshold the search may stop with a stuck state instead.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::digraph::{pattern_cab, pattern_cab_paths, Arc, Digraph, Dipath, Vertex};
use crate::finder::{checked, cycle_certificate, path_system_certificate, FindError, RunLog};
use crate::gadget::{close_chain, validate_chain, validate_gadget, CabParams, Chain, Closure, Gadget, Link};
use crate::oracle::{CertPath, SearchBudget, SubdivisionCertificate};
use crate::random::rng;
use crate::two_block::{find_two_block, greedy_maximal_path};

/// Constant in the degree requirement `c·k·g²·ln g` of [`reduce_girth`].
pub const GIRTH_REDUCTION_C: f64 = 8.0;
pub const DEFAULT_GIRTH_RETRIES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GirthError {
    #[error("no attempt out of {retries} reached the targets")]
    RetriesExhausted { retries: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    /// Neither a cycle of length exactly `g` through the arc nor a common
    /// in-neighbour of its ends.
    #[error("arc ({}, {}) has no g-cycle and no common in-neighbour", .arc.0, .arc.1)]
    PropertyViolated { arc: Arc },
    #[error("degree condition fails near vertex {vertex}")]
    PreconditionUnverifiable { vertex: Vertex },
    /// The walk produced something that is not a gadget; only possible
    /// below the girth bound.
    #[error("construction did not yield a gadget: {0}")]
    Unusable(String),
}

/// A subgraph together with the original id of each of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GirthReduction {
    pub digraph: Digraph,
    pub original: Vec<Vertex>,
}

/// Out-degree that makes [`reduce_girth`] likely to succeed.
pub fn girth_reduction_degree(k: usize, g: usize) -> usize {
    let g = g.max(2) as f64;
    (GIRTH_REDUCTION_C * k as f64 * g * g * g.ln()).ceil() as usize
}

/// A subgraph with `δ+ >= k` and directed girth at least `g`.
///
/// Each attempt gives every vertex a uniform level in `0..g`, keeps the arcs
/// that go up exactly one level (mod `g`) and then repeatedly deletes
/// vertices of out-degree below `k`. Attempts run in parallel; the lowest
/// successful attempt index wins, so the result depends only on `seed`.
pub fn reduce_girth(d: &Digraph, k: usize, g: usize, seed: u64, max_retries: usize) -> Result<GirthReduction, GirthError> {
    let verify = |r: &GirthReduction| {
        r.digraph.n() > 0 && r.digraph.min_out_degree().unwrap() >= k && r.digraph.directed_girth().at_least(g)
    };
    if g <= 1 {
        let r = GirthReduction { digraph: d.clone(), original: (0..d.n()).collect() };
        return if verify(&r) { Ok(r) } else { Err(GirthError::RetriesExhausted { retries: 0 }) };
    }
    (0..max_retries as u64)
        .into_par_iter()
        .find_map_first(|i| {
            let mut r = rng(seed ^ i.wrapping_mul(0xA076_1D64_78BD_642F));
            let level: Vec<usize> = (0..d.n()).map(|_| r.gen_range(0..g)).collect();
            let mut out: Vec<Vec<Vertex>> =
                (0..d.n()).map(|u| d.out(u).iter().copied().filter(|&v| level[v] == (level[u] + 1) % g).collect()).collect();
            let mut alive = vec![true; d.n()];
            let mut deg: Vec<usize> = out.iter().map(Vec::len).collect();
            let mut inn: Vec<Vec<Vertex>> = vec![Vec::new(); d.n()];
            for (u, list) in out.iter().enumerate() {
                for &v in list {
                    inn[v].push(u);
                }
            }
            let mut stack: Vec<Vertex> = (0..d.n()).filter(|&v| deg[v] < k).collect();
            while let Some(v) = stack.pop() {
                if !alive[v] {
                    continue;
                }
                alive[v] = false;
                for &u in &inn[v] {
                    if alive[u] {
                        deg[u] -= 1;
                        if deg[u] < k {
                            stack.push(u);
                        }
                    }
                }
            }
            let keep: Vec<bool> = alive.clone();
            for (u, list) in out.iter_mut().enumerate() {
                if !keep[u] {
                    list.clear();
                }
                list.retain(|&v| keep[v]);
            }
            let (sub, original) = Digraph::from_out_lists(out).induced(&keep);
            let res = GirthReduction { digraph: sub, original };
            verify(&res).then_some(res)
        })
        .ok_or(GirthError::RetriesExhausted { retries: max_retries })
}

/// Cycle of length exactly `g` through `(x, y)` found as a shortest
/// `y -> x` dipath of length `g - 1`; listed from `x`.
fn exact_g_cycle(d: &Digraph, x: Vertex, y: Vertex, g: usize) -> Option<Vec<Vertex>> {
    let mut dst = vec![false; d.n()];
    dst[x] = true;
    let p = d.shortest_path(&[y], &dst, &vec![false; d.n()])?;
    (p.len() + 1 == g).then(|| {
        let mut c = vec![x];
        c.extend_from_slice(&p.vertices[..p.vertices.len() - 1]);
        c
    })
}

/// Lowest common in-neighbour of `x` and `y` outside `{x, y}`, preferring
/// one outside `avoid`.
fn common_in(d: &Digraph, x: Vertex, y: Vertex, avoid: &[Vertex]) -> Option<Vertex> {
    let ys = d.inn(y);
    let common: Vec<Vertex> =
        d.inn(x).iter().copied().filter(|z| *z != x && *z != y && ys.binary_search(z).is_ok()).collect();
    common.iter().copied().find(|z| !avoid.contains(z)).or(common.first().copied())
}

/// Removes closed sub-walks so that every vertex appears once.
fn loop_erase(walk: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::new();
    for &v in walk {
        if let Some(i) = out.iter().position(|&w| w == v) {
            out.truncate(i + 1);
        } else {
            out.push(v);
        }
    }
    out
}

/// A type-I or extended type-II gadget on the arc `(p, q)` built by the
/// two common-in-neighbour walks.
pub fn embed_gadget_i_or_ii(d: &Digraph, p: Vertex, q: Vertex, params: &CabParams) -> Result<Gadget, EmbedError> {
    let g = params.g;
    let b = params.b;
    let l = params.ii_len();
    let finish = |gadget: Gadget| validate_gadget(d, &gadget, params).map(|_| gadget).map_err(EmbedError::Unusable);
    let mut rs = vec![p];
    for i in 1..=l {
        let prev = rs[i - 1];
        if let Some(c) = exact_g_cycle(d, prev, q, g) {
            // closed walk q, C[q, prev], r_{i-2}, ..., r_0 = p
            let mut walk = c[1..].to_vec();
            walk.push(prev);
            walk.extend(rs[..i - 1].iter().rev());
            let path = loop_erase(&walk);
            if path.last() != Some(&p) {
                return Err(EmbedError::Unusable("walk does not close at p".into()));
            }
            let mut cycle = vec![p];
            cycle.extend_from_slice(&path[..path.len() - 1]);
            return finish(Gadget::TypeI { p, q, cycle: Dipath::new(cycle) });
        }
        let mut avoid = rs.clone();
        avoid.push(q);
        match common_in(d, prev, q, &avoid) {
            Some(z) => rs.push(z),
            None => return Err(EmbedError::PropertyViolated { arc: (prev, q) }),
        }
    }
    let r = rs[l];
    let u = rs[l - 1];
    let p1 = Dipath::new(rs.iter().rev().copied().collect());
    let mut ws = vec![r];
    for i in 1..=b {
        let prev = ws[i - 1];
        if let Some(c) = exact_g_cycle(d, prev, u, g) {
            let in_ws = |v: Vertex| ws[..i - 1].contains(&v);
            let in_rs = |v: Vertex| rs[..l].contains(&v);
            let jv = (1..c.len())
                .rev()
                .find(|&j| c[j] == q || in_ws(c[j]) || in_rs(c[j]))
                .expect("u lies on the cycle");
            let v = c[jv];
            if in_ws(v) {
                return Err(EmbedError::Unusable(format!("cycle returns to the second walk at {v}")));
            }
            let tail: Vec<Vertex> = c[jv + 1..].to_vec();
            if v == q {
                let mut cycle = vec![p, q];
                cycle.extend_from_slice(&tail);
                cycle.push(c[0]);
                cycle.extend(rs[1..l].iter().rev());
                return finish(Gadget::TypeI { p, q, cycle: Dipath::new(loop_erase(&cycle)) });
            }
            let mut p2 = tail;
            p2.extend(ws.iter().rev());
            return finish(Gadget::TypeIIExtended { p, q, r, p1, p2: Dipath::new(p2), link: Link::BackArc(v) });
        }
        let mut avoid = ws.clone();
        avoid.extend_from_slice(&rs);
        avoid.push(q);
        match common_in(d, prev, u, &avoid) {
            Some(z) => ws.push(z),
            None => return Err(EmbedError::PropertyViolated { arc: (prev, u) }),
        }
    }
    let p2 = Dipath::new(ws.iter().rev().copied().collect());
    finish(Gadget::TypeIIExtended { p, q, r, p1, p2, link: Link::FirstToSecond })
}

/// A type-III gadget reachable from `v` in `d` minus `removed`, with the
/// dipath `P0` from `v` to its `p`.
///
/// Grows a tree level by level, hanging `arity` paths of length `2b - 1`
/// from each node (found greedily). At the first node where the fan cannot
/// be completed, a stuck path end `w` with an out-neighbour `x` in the tree
/// far enough from the branching point closes the gadget. `levels` bounds
/// the tree depth in branch levels.
pub fn embed_gadget_iii(
    d: &Digraph,
    removed: &[bool],
    v: Vertex,
    b: usize,
    arity: usize,
    levels: usize,
) -> Result<(Dipath, Gadget), EmbedError> {
    let n = d.n();
    let seg = 2 * b - 1;
    let mut in_tree = removed.to_vec();
    let mut tree = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    in_tree[v] = true;
    tree[v] = true;
    let mut level = vec![v];
    for _ in 0..=levels {
        let mut next = Vec::new();
        for &u in &level {
            let mut used = vec![false; n];
            let mut paths: Vec<Vec<Vertex>> = vec![vec![u]; arity];
            loop {
                let mut grew = false;
                for path in paths.iter_mut().filter(|p| p.len() <= seg) {
                    let w = *path.last().unwrap();
                    if let Some(&x) = d.out(w).iter().find(|&&x| !in_tree[x] && !used[x]) {
                        used[x] = true;
                        path.push(x);
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
            if paths.iter().all(|p| p.len() == seg + 1) {
                for path in &paths {
                    for w in path.windows(2) {
                        parent[w[1]] = w[0];
                        depth[w[1]] = depth[w[0]] + 1;
                        in_tree[w[1]] = true;
                        tree[w[1]] = true;
                    }
                    next.push(*path.last().unwrap());
                }
                continue;
            }
            return close_iii(d, &tree, &parent, &depth, v, u, &paths, seg);
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Err(EmbedError::PreconditionUnverifiable { vertex: v })
}

fn tree_path(parent: &[usize], anc: Vertex, x: Vertex) -> Vec<Vertex> {
    let mut vs = vec![x];
    let mut c = x;
    while c != anc {
        c = parent[c];
        vs.push(c);
    }
    vs.reverse();
    vs
}

#[allow(clippy::too_many_arguments)]
fn close_iii(
    d: &Digraph,
    tree: &[bool],
    parent: &[usize],
    depth: &[usize],
    root: Vertex,
    u: Vertex,
    paths: &[Vec<Vertex>],
    seg: usize,
) -> Result<(Dipath, Gadget), EmbedError> {
    let lca = |mut a: Vertex, mut b: Vertex| {
        while depth[a] > depth[b] {
            a = parent[a];
        }
        while depth[b] > depth[a] {
            b = parent[b];
        }
        while a != b {
            a = parent[a];
            b = parent[b];
        }
        a
    };
    let mut last_w = u;
    for q in paths.iter().filter(|p| p.len() <= seg) {
        let w = *q.last().unwrap();
        last_w = w;
        for &x in d.out(w) {
            if !tree[x] {
                continue;
            }
            let y = lca(u, x);
            if depth[u] - depth[y] < seg || depth[x] - depth[y] < seg {
                continue;
            }
            let p1 = tree_path(parent, y, x);
            let pu = tree_path(parent, y, u);
            let mut p2 = pu[1..].to_vec();
            p2.extend_from_slice(&q[1..]);
            p2.push(x);
            let p0 = Dipath::new(tree_path(parent, root, y));
            let gadget = Gadget::TypeIII { p: y, q: pu[1], r: x, p1: Dipath::new(p1), p2: Dipath::new(p2) };
            return Ok((p0, gadget));
        }
    }
    Err(EmbedError::PreconditionUnverifiable { vertex: last_w })
}

/// Record of one arc contraction: `deleted` was removed and each vertex in
/// `redirected` got the arc to `target` in place of its arc to `deleted`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionRecord {
    pub deleted: Vertex,
    pub target: Vertex,
    pub redirected: Vec<Vertex>,
}

impl ContractionRecord {
    /// Applies the contraction to `d`.
    pub fn apply(&self, d: &Digraph) -> Digraph {
        let (x, y) = (self.deleted, self.target);
        let mut out: Vec<Vec<Vertex>> = d.out_lists().to_vec();
        out[x].clear();
        for list in out.iter_mut() {
            if let Some(i) = list.iter().position(|&w| w == x) {
                list.remove(i);
                if !list.contains(&y) {
                    list.push(y);
                }
            }
        }
        Digraph::from_out_lists(out)
    }

    /// Turns a `C_{a,b}` certificate in the contracted graph into one in
    /// the graph before contraction.
    pub fn lift(&self, cert: &SubdivisionCertificate) -> SubdivisionCertificate {
        let (x, y) = (self.deleted, self.target);
        let mut hits: Vec<(usize, usize)> = Vec::new();
        for (pi, p) in cert.paths.iter().enumerate() {
            for i in 1..p.vertices.len() {
                if p.vertices[i] == y && self.redirected.contains(&p.vertices[i - 1]) {
                    hits.push((pi, i));
                }
            }
        }
        let mut out = cert.clone();
        match hits.len() {
            0 => {}
            1 => {
                let (pi, i) = hits[0];
                out.paths[pi].vertices.insert(i, x);
            }
            2 => {
                for &(pi, i) in &hits {
                    assert_eq!(i + 1, out.paths[pi].vertices.len(), "in-degree 2 only at sinks");
                    out.paths[pi].vertices[i] = x;
                }
                for h in out.branch.values_mut() {
                    if *h == y {
                        *h = x;
                    }
                }
            }
            k => panic!("vertex {y} has in-degree {k} in a C_(a,b) subdivision"),
        }
        out
    }
}

/// A chain together with the start index of its recent part `C'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodChainState {
    pub chain: Chain,
    pub params: CabParams,
    pub i0: usize,
}

impl GoodChainState {
    pub fn new(chain: Chain, params: CabParams) -> Self {
        let window = params.spacing() * (params.a + 3) * (params.b + 1);
        let i0 = chain.m().saturating_sub(window);
        GoodChainState { chain, params, i0 }
    }

    pub fn recent(&self) -> Chain {
        self.chain.sub(self.i0, self.chain.m())
    }
}

enum Step {
    Closed(SubdivisionCertificate),
    Extended(Chain),
    Contract(Vertex, Vertex),
    Stuck(serde_json::Value),
}

fn tick(budget: &mut SearchBudget) -> Result<(), FindError> {
    budget.tick().map_err(|_| FindError::budget(budget.max_nodes, "chain", json!({})))
}

/// BFS from `s` avoiding `blocked`, up to `max_depth`, in visiting order
/// with one shortest path each.
fn bfs_paths(d: &Digraph, s: Vertex, blocked: &[bool], max_depth: usize) -> Vec<Dipath> {
    let n = d.n();
    let mut pred = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    dist[s] = 0;
    let mut order = vec![s];
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == max_depth {
            continue;
        }
        for &v in d.out(u) {
            if dist[v] == usize::MAX && !blocked[v] {
                dist[v] = dist[u] + 1;
                pred[v] = u;
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    order
        .into_iter()
        .map(|v| {
            let mut vs = vec![v];
            let mut c = v;
            while c != s {
                c = pred[c];
                vs.push(c);
            }
            vs.reverse();
            Dipath::new(vs)
        })
        .collect()
}

fn extend_chain(chain: &Chain, path: &Dipath, gadget: Option<Gadget>) -> Chain {
    let mut c = chain.clone();
    c.append(path, gadget);
    c
}

/// One round of chain growth: try closures, then the ball around the
/// spine end, then a type-III gadget.
fn grow_step(d: &Digraph, chain: &Chain, params: &CabParams, budget: &mut SearchBudget, log: &mut RunLog) -> Result<Step, FindError> {
    let state = GoodChainState::new(chain.clone(), *params);
    let m = chain.m();
    let vm = chain.last();
    let vc = chain.vertex_set();
    let vcp = state.recent().vertex_set();
    let mut blocked = vec![false; d.n()];
    for &v in &vc {
        blocked[v] = v != vm;
    }
    let threshold = params.close_threshold();
    // arcs back into the chain from the region reachable from v_m
    if chain.a2_count() >= threshold {
        let reach = bfs_paths(d, vm, &blocked, usize::MAX);
        for q in &reach {
            tick(budget)?;
            let u = q.last();
            for &x in d.out(u) {
                if x == vm || !vc.contains(&x) {
                    continue;
                }
                let j = chain.owners(x)[0];
                if chain.sub(j, m).a2_count() < threshold {
                    continue;
                }
                let c2 = extend_chain(&chain.sub(j, m), q, None);
                match close_chain(d, &c2, &Closure::Condition1 { x }, params) {
                    Ok(cert) => {
                        log.push("close", json!({ "condition": 1, "via": "back-arc", "spine": c2.m(), "gadgets": c2.a2_count() }));
                        return Ok(Step::Closed(cert));
                    }
                    Err(e) => log.push("close-failed", json!({ "error": e.to_string() })),
                }
            }
        }
    }
    let ball = bfs_paths(d, vm, &blocked, params.spacing());
    for q in ball.iter().skip(1) {
        tick(budget)?;
        let t = q.len();
        let (w, u) = (q.vertices[t - 1], q.last());
        let gs = match embed_gadget_i_or_ii(d, w, u, params) {
            Ok(gs) => gs,
            Err(EmbedError::PropertyViolated { arc: (x, y) }) => {
                if d.has_arc(y, x) {
                    log.push("skip", json!({ "reason": "digon blocks contraction", "arc": [x, y] }));
                    continue;
                }
                return Ok(Step::Contract(x, y));
            }
            Err(_) => continue,
        };
        let gv = gs.vertices();
        if gv.len() > params.max_gadget_size() || gv.iter().any(|v| vcp.contains(v)) {
            continue;
        }
        let meets_chain = gv.iter().any(|v| vc.contains(v));
        match (&gs, meets_chain) {
            (Gadget::TypeIIExtended { .. }, false) => {
                let basic = gs.basic_part();
                let bv = basic.vertices();
                if q.vertices[..t - 1].iter().any(|v| bv.binary_search(v).is_ok()) {
                    continue;
                }
                let c1 = extend_chain(chain, q, Some(basic));
                if validate_chain(d, &c1, params).is_ok() {
                    log.push("extend", json!({ "kind": "II", "spine": c1.m(), "gadgets": c1.a2_count() }));
                    return Ok(Step::Extended(c1));
                }
            }
            (Gadget::TypeI { cycle, .. }, false) => {
                let j = (0..t).find(|&j| gv.binary_search(&q.vertices[j]).is_ok()).unwrap();
                let wj = q.vertices[j];
                let pos = cycle.position(wj).unwrap();
                let succ = cycle.vertices[(pos + 1) % cycle.vertices.len()];
                let mut qv = q.vertices[..=j].to_vec();
                qv.push(succ);
                let c1 = extend_chain(chain, &Dipath::new(qv), Some(Gadget::cycle_through(&cycle.vertices, wj)));
                if validate_chain(d, &c1, params).is_ok() {
                    log.push("extend", json!({ "kind": "I", "spine": c1.m(), "gadgets": c1.a2_count() }));
                    return Ok(Step::Extended(c1));
                }
            }
            (Gadget::TypeIIExtended { .. }, true) => {
                let Some(i1) = (0..state.i0).rev().find(|&i| chain.gadget(i).vertices().iter().any(|v| gv.binary_search(v).is_ok()))
                else {
                    continue;
                };
                let c1 = extend_chain(&chain.sub(i1, m), &Dipath::new(q.vertices[..t].to_vec()), None);
                if c1.a2_count() < threshold {
                    continue;
                }
                match close_chain(d, &c1, &Closure::Condition2 { zstar: u, gstar: gs.clone() }, params) {
                    Ok(cert) => {
                        log.push("close", json!({ "condition": 2, "spine": c1.m(), "gadgets": c1.a2_count() }));
                        return Ok(Step::Closed(cert));
                    }
                    Err(e) => log.push("close-failed", json!({ "error": e.to_string() })),
                }
            }
            (Gadget::TypeI { cycle, .. }, true) => {
                let j = (0..t).find(|&j| gv.binary_search(&q.vertices[j]).is_ok()).unwrap();
                let cyc = &cycle.vertices;
                let pos = cycle.position(q.vertices[j]).unwrap();
                let len = cyc.len();
                let Some(step) = (1..len).find(|&s| vc.contains(&cyc[(pos + s) % len])) else {
                    continue;
                };
                let x = cyc[(pos + step) % len];
                let mut qv = q.vertices[..=j].to_vec();
                qv.extend((1..step).map(|s| cyc[(pos + s) % len]));
                let i = chain.owners(x)[0];
                let c1 = extend_chain(&chain.sub(i, m), &Dipath::new(qv), None);
                if c1.a2_count() < threshold || !c1.spine.is_simple() {
                    continue;
                }
                match close_chain(d, &c1, &Closure::Condition1 { x }, params) {
                    Ok(cert) => {
                        log.push("close", json!({ "condition": 1, "via": "cycle", "spine": c1.m(), "gadgets": c1.a2_count() }));
                        return Ok(Step::Closed(cert));
                    }
                    Err(e) => log.push("close-failed", json!({ "error": e.to_string() })),
                }
            }
            _ => {}
        }
    }
    tick(budget)?;
    let arity = usize::try_from(params.d).unwrap_or(usize::MAX).min(d.n() + 1);
    match embed_gadget_iii(d, &blocked, vm, params.b, arity, params.h) {
        Ok((p0, g3)) => {
            let arc = Dipath::arc(g3.p(), g3.q());
            let c1 = extend_chain(&extend_chain(chain, &p0, None), &arc, Some(g3));
            if validate_chain(d, &c1, params).is_ok() {
                log.push("extend", json!({ "kind": "III", "spine": c1.m(), "gadgets": c1.a2_count() }));
                return Ok(Step::Extended(c1));
            }
            Ok(Step::Stuck(json!({ "reason": "type-III gadget does not extend the chain" })))
        }
        Err(e) => Ok(Step::Stuck(json!({ "reason": e.to_string() }))),
    }
}

/// Searches for a subdivision of `C_{a,b}`.
pub fn find_cab(d: &Digraph, a: usize, b: usize, budget: &mut SearchBudget) -> Result<SubdivisionCertificate, FindError> {
    find_cab_logged(d, a, b, budget, &mut RunLog::default())
}

pub fn find_cab_logged(
    d: &Digraph,
    a: usize,
    b: usize,
    budget: &mut SearchBudget,
    log: &mut RunLog,
) -> Result<SubdivisionCertificate, FindError> {
    if a < 2 {
        return Err(FindError::DegeneratePattern(format!("cab({a},{b}): use the two-block finder for a = 1")));
    }
    let params = CabParams::new(a, b).map_err(|e| FindError::BadParams(e.to_string()))?;
    let pattern = pattern_cab(a, b).map_err(|e| FindError::DegeneratePattern(e.to_string()))?;
    let k = usize::try_from(params.k).unwrap_or(usize::MAX);
    let trimmed: Vec<Vec<Vertex>> = d.out_lists().iter().map(|l| l[..l.len().min(k)].to_vec()).collect();
    let removed = d.arc_count() - trimmed.iter().map(Vec::len).sum::<usize>();
    if removed > 0 {
        log.push("trim", json!({ "arcs": removed }));
    }
    let mut work = Digraph::from_out_lists(trimmed);
    let mut alive = vec![true; d.n()];
    let mut records: Vec<ContractionRecord> = Vec::new();
    'restart: loop {
        let Some(v0) = (0..work.n()).find(|&v| alive[v]) else {
            return Err(FindError::stuck("empty", json!({ "contractions": records.len() })));
        };
        let mut chain = Chain::start(v0);
        loop {
            let at = |e: FindError, chain: &Chain| match e {
                FindError::BudgetExceeded { max, .. } => FindError::budget(
                    max,
                    "chain",
                    json!({
                        "spine": chain.m(),
                        "gadgets": chain.a2_count(),
                        "needed": params.close_threshold(),
                        "end": chain.last(),
                        "contractions": records.len(),
                    }),
                ),
                e => e,
            };
            tick(budget).map_err(|e| at(e, &chain))?;
            let size = chain.vertex_set().len();
            match grow_step(&work, &chain, &params, budget, log).map_err(|e| at(e, &chain))? {
                Step::Closed(cert) => {
                    let mut cert = cert;
                    for r in records.iter().rev() {
                        cert = r.lift(&cert);
                    }
                    return Ok(checked(d, &pattern, cert));
                }
                Step::Extended(c1) => {
                    assert!(c1.vertex_set().len() > size, "chain extension must add vertices");
                    chain = c1;
                }
                Step::Contract(x, y) => {
                    let rec = ContractionRecord { deleted: x, target: y, redirected: work.inn(x).to_vec() };
                    let before = work.n() + work.arc_count();
                    work = rec.apply(&work);
                    alive[x] = false;
                    let live = alive.iter().filter(|&&a| a).count();
                    assert!(live + work.arc_count() < before, "contraction must shrink the graph");
                    log.push("contract", json!({ "deleted": x, "target": y, "redirected": rec.redirected.len() }));
                    records.push(rec);
                    continue 'restart;
                }
                Step::Stuck(detail) => {
                    return Err(FindError::stuck(
                        "chain",
                        json!({
                            "detail": detail,
                            "spine": chain.m(),
                            "gadgets": chain.a2_count(),
                            "needed": params.close_threshold(),
                            "end": chain.last(),
                            "contractions": records.len(),
                        }),
                    ));
                }
            }
        }
    }
}

/// A directed cycle of length at least `δ+ + 1`, from the end of a greedy
/// maximal path back to its earliest out-neighbour on the path.
pub fn long_dicycle(d: &Digraph) -> Result<Vec<Vertex>, FindError> {
    if let Some(v) = (0..d.n()).find(|&v| d.out_degree(v) == 0) {
        return Err(FindError::PreconditionViolated { vertex: v });
    }
    if d.n() == 0 {
        return Err(FindError::BadParams("empty digraph".into()));
    }
    let p = greedy_maximal_path(d, 0);
    let w = p.last();
    let i = d.out(w).iter().map(|&x| p.position(x).expect("maximal path")).min().unwrap();
    Ok(p.vertices[i..].to_vec())
}

/// Host on which the chain search closes from any start vertex.
///
/// A directed ring on `m + 1` spine vertices, `m = 2 * close_threshold +
/// slack`, and a cycle of length exactly `g` through every ring arc whose
/// other vertices are private. The directed girth is `g`. Gadgets land on
/// every other ring arc, and the arc back into the start of the chain
/// splits it into two strong alternating paths wired into a `C_{a,b}`.
pub fn synthetic_chain_host(a: usize, b: usize, slack: usize) -> Result<Digraph, FindError> {
    let params = CabParams::new(a, b).map_err(|e| FindError::BadParams(e.to_string()))?;
    let g = params.g;
    let ring = 2 * params.close_threshold() + slack + 1;
    let mut out: Vec<Vec<Vertex>> = vec![Vec::new(); ring];
    for i in 0..ring {
        let next = (i + 1) % ring;
        out[i].push(next);
        // next -> x_1 -> ... -> x_{g-2} -> i
        let first = out.len();
        for j in 0..g - 2 {
            out.push(vec![if j + 3 == g { i } else { first + j + 1 }]);
        }
        out[next].push(first);
    }
    Ok(Digraph::from_out_lists(out))
}

/// Shape of an oriented cycle: its vertices in cyclic order starting at a
/// source (or anywhere for a directed cycle) and the blocks between
/// consecutive sources and sinks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleShape {
    pub order: Vec<Vertex>,
    /// Each block as a dipath from its source to its sink, in cyclic
    /// order: a block leaving the start source forward first.
    pub blocks: Vec<Vec<Vertex>>,
}

impl CycleShape {
    pub fn sources(&self) -> usize {
        self.blocks.len() / 2
    }

    pub fn longest_block(&self) -> usize {
        self.blocks.iter().map(|b| b.len() - 1).max().unwrap_or(0)
    }

    pub fn is_directed(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Checks that `c` is an orientation of a cycle and splits it into blocks.
pub fn cycle_shape(c: &Digraph) -> Result<CycleShape, FindError> {
    let n = c.n();
    let bad = |m: &str| Err(FindError::BadParams(format!("not an oriented cycle: {m}")));
    if n < 2 {
        return bad("fewer than two vertices");
    }
    if n == 2 {
        if c.arc_count() == 2 && c.has_arc(0, 1) && c.has_arc(1, 0) {
            return Ok(CycleShape { order: vec![0, 1], blocks: vec![] });
        }
        return bad("two vertices need a digon");
    }
    if c.has_digon() || (0..n).any(|v| c.out_degree(v) + c.in_degree(v) != 2) || c.arc_count() != n {
        return bad("every vertex needs exactly two incident arcs");
    }
    let nbrs = |v: Vertex| -> Vec<Vertex> { c.out(v).iter().chain(c.inn(v)).copied().collect() };
    let start = (0..n).find(|&v| c.out_degree(v) == 2).unwrap_or(0);
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = nbrs(start)[0];
    while cur != start {
        order.push(cur);
        let nx = nbrs(cur).into_iter().find(|&w| w != prev).unwrap();
        prev = cur;
        cur = nx;
    }
    if order.len() != n {
        return bad("underlying graph is disconnected");
    }
    if (0..n).all(|v| c.out_degree(v) == 1) {
        // walk in arc direction
        let mut order = vec![0];
        while order.len() < n {
            order.push(c.out(*order.last().unwrap())[0]);
        }
        return Ok(CycleShape { order, blocks: vec![] });
    }
    // split the closed walk at sources and sinks
    let mut blocks = Vec::new();
    let mut cur_block = vec![order[0]];
    for i in 1..=n {
        let v = order[i % n];
        cur_block.push(v);
        if c.out_degree(v) == 2 || c.in_degree(v) == 2 {
            let mut blk = std::mem::replace(&mut cur_block, vec![v]);
            if c.out_degree(blk[0]) != 2 {
                blk.reverse();
            }
            blocks.push(blk);
        }
    }
    Ok(CycleShape { order, blocks })
}

/// Host dipath standing for a whole pattern path in a certificate.
fn host_path(cert: &SubdivisionCertificate, pattern_path: &[Vertex]) -> Dipath {
    let mut vs = vec![cert.branch[&pattern_path[0]]];
    for w in pattern_path.windows(2) {
        let p = cert.paths.iter().find(|p| p.from == w[0] && p.to == w[1]).expect("pattern arc covered");
        vs.extend_from_slice(&p.vertices[1..]);
    }
    Dipath::new(vs)
}

/// Relabels pattern vertices of a certificate through `map`.
fn relabel_pattern(cert: SubdivisionCertificate, map: &[Vertex]) -> SubdivisionCertificate {
    SubdivisionCertificate {
        branch: cert.branch.into_iter().map(|(x, h)| (map[x], h)).collect(),
        paths: cert
            .paths
            .into_iter()
            .map(|p| CertPath { from: map[p.from], to: map[p.to], vertices: p.vertices })
            .collect(),
    }
}

/// Searches for a subdivision of the oriented cycle `c`.
pub fn find_oriented_cycle_subdivision(d: &Digraph, c: &Digraph, budget: &mut SearchBudget) -> Result<SubdivisionCertificate, FindError> {
    find_oriented_cycle_subdivision_seeded(d, c, budget, 0, &mut RunLog::default())
}

/// As [`find_oriented_cycle_subdivision`], with the seed for girth
/// reduction and a run log.
pub fn find_oriented_cycle_subdivision_seeded(
    d: &Digraph,
    c: &Digraph,
    budget: &mut SearchBudget,
    seed: u64,
    log: &mut RunLog,
) -> Result<SubdivisionCertificate, FindError> {
    let shape = cycle_shape(c)?;
    let l = c.n();
    if shape.is_directed() {
        let cyc = long_dicycle(d)?;
        if cyc.len() < l {
            return Err(FindError::stuck("long-dicycle", json!({ "found": cyc.len(), "needed": l })));
        }
        log.push("dicycle", json!({ "length": cyc.len() }));
        let cert = relabel_pattern(cycle_certificate(l, &cyc), &shape.order);
        return Ok(checked(d, c, cert));
    }
    let a = shape.sources();
    if a == 1 {
        let (mut long, mut short) = (shape.blocks[0].clone(), shape.blocks[1].clone());
        if long.len() < short.len() {
            std::mem::swap(&mut long, &mut short);
        }
        let (k1, k2) = (long.len() - 1, short.len() - 1);
        let cert = find_two_block(d, k1, k2, budget)?;
        // pattern ids: 0 source, 1 sink, then interiors of the two paths
        let mut map = vec![long[0], long[k1]];
        map.extend_from_slice(&long[1..k1]);
        map.extend_from_slice(&short[1..k2]);
        return Ok(checked(d, c, relabel_pattern(cert, &map)));
    }
    let b = shape.longest_block();
    let params = CabParams::new(a, b).map_err(|e| FindError::BadParams(e.to_string()))?;
    let (host, original) = if d.directed_girth().at_least(params.g) {
        (d.clone(), (0..d.n()).collect::<Vec<_>>())
    } else {
        let delta = d.min_out_degree().unwrap_or(0);
        let per = girth_reduction_degree(1, params.g).max(1);
        let target = (delta / per).clamp(1, usize::try_from(params.k).unwrap_or(usize::MAX));
        match reduce_girth(d, target, params.g, seed, DEFAULT_GIRTH_RETRIES) {
            Ok(r) => {
                log.push("reduce-girth", json!({ "target": target, "g": params.g, "kept": r.digraph.n() }));
                (r.digraph, r.original)
            }
            Err(e) => return Err(FindError::stuck("reduce-girth", json!({ "target": target, "error": e.to_string() }))),
        }
    };
    let cab = find_cab_logged(&host, a, b, budget, log)?;
    let cab = cab.map_host(|v| original[v]);
    // blocks of c in pattern_cab order: s_i -> t_i, s_i -> t_{i+1}
    let blocks = &shape.blocks;
    let mut pattern_paths = Vec::new();
    for i in 0..a {
        pattern_paths.push(blocks[(2 * i + 2 * a - 1) % (2 * a)].clone());
        pattern_paths.push(blocks[2 * i].clone());
    }
    let hosts: Vec<Dipath> = pattern_cab_paths(a, b).iter().map(|p| host_path(&cab, p)).collect();
    let cert = path_system_certificate(&pattern_paths, &hosts);
    Ok(checked(d, c, cert))
}
