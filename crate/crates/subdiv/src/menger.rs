//! Disjoint dipaths and separating sets via unit-capacity max-flow.
//!
//! Vertex-disjoint variants split every vertex `w` into `w_in -> w_out`
//! with capacity one while arcs are uncapacitated, so minimum cuts consist
//! of vertices only. Augmenting paths are found by BFS scanning edges in
//! insertion order, and edges are inserted by increasing vertex id, so the
//! returned certificates depend only on the input.

use std::collections::VecDeque;

use thiserror::Error;

use crate::digraph::{Digraph, Dipath, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MengerError {
    #[error("source and target coincide")]
    SameVertex,
    #[error("arc ({0},{1}) present between the terminals")]
    ArcPresent(Vertex, Vertex),
    #[error("vertex {0} lies in the target set")]
    VertexInSet(Vertex),
    #[error("empty target set")]
    EmptySet,
    #[error("graph needs at least two vertices")]
    EmptyGraph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathsOrCut {
    Paths(Vec<Dipath>),
    Cut(Vec<Vertex>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanOrCut {
    Fan(Vec<Dipath>),
    Cut(Vec<Vertex>),
}

#[derive(Clone, Copy)]
struct Edge {
    to: usize,
    cap: u32,
}

/// Residual network with paired forward/backward edges.
pub(crate) struct Flow {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl Flow {
    pub(crate) fn new(nodes: usize) -> Flow {
        Flow { edges: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub(crate) fn add(&mut self, from: usize, to: usize, cap: u32) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut pred = vec![usize::MAX; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    pred[to] = e;
                    if to == t {
                        let mut c = t;
                        while c != s {
                            let e = pred[c];
                            self.edges[e].cap -= 1;
                            self.edges[e ^ 1].cap += 1;
                            c = self.edges[e ^ 1].to;
                        }
                        return true;
                    }
                    queue.push_back(to);
                }
            }
        }
        false
    }

    /// Pushes up to `limit` units; returns the value reached.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut f = 0;
        while f < limit && self.augment(s, t) {
            f += 1;
        }
        f
    }

    fn residual_reach(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        seen
    }

    fn flow_on(&self, e: usize) -> u32 {
        self.edges[e ^ 1].cap
    }
}

struct Split {
    flow: Flow,
    /// edge id of the arc `(u,v)` keyed by position in `D.arcs()`
    arc_edges: Vec<(Vertex, Vertex, usize)>,
}

fn split_network(d: &Digraph, big: &[Vertex], extra: usize) -> Split {
    let n = d.n();
    let mut flow = Flow::new(2 * n + extra);
    let inf = n as u32 + 1;
    for w in 0..n {
        let cap = if big.contains(&w) { inf } else { 1 };
        flow.add(2 * w, 2 * w + 1, cap);
    }
    let mut arc_edges = Vec::with_capacity(d.arc_count());
    for (u, v) in d.arcs() {
        let e = flow.add(2 * u + 1, 2 * v, inf);
        arc_edges.push((u, v, e));
    }
    Split { flow, arc_edges }
}

/// Walks flow-carrying arcs from `start`, consuming them, until `stop`
/// accepts the current vertex.
fn decompose(split: &mut Split, n: usize, start: Vertex, count: usize, stop: impl Fn(Vertex) -> bool) -> Vec<Dipath> {
    let mut next: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for &(u, v, e) in &split.arc_edges {
        if split.flow.flow_on(e) > 0 {
            next[u].push(v);
        }
    }
    for l in next.iter_mut() {
        l.reverse();
    }
    let mut paths = Vec::with_capacity(count);
    for _ in 0..count {
        let mut vs = vec![start];
        let mut c = start;
        loop {
            let v = next[c].pop().expect("flow conservation");
            vs.push(v);
            c = v;
            if stop(c) {
                break;
            }
        }
        paths.push(Dipath::new(vs));
    }
    paths.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    paths
}

fn cut_from_residual(split: &Split, n: usize, s: usize, skip: &[Vertex]) -> Vec<Vertex> {
    let reach = split.flow.residual_reach(s);
    (0..n).filter(|&w| !skip.contains(&w) && reach[2 * w] && !reach[2 * w + 1]).collect()
}

/// `k` internally disjoint `u -> v` dipaths, or a set of fewer than `k`
/// vertices (avoiding `u`, `v`) meeting every `u -> v` dipath.
pub fn vertex_disjoint_paths(d: &Digraph, u: Vertex, v: Vertex, k: usize) -> Result<PathsOrCut, MengerError> {
    if u == v {
        return Err(MengerError::SameVertex);
    }
    if d.has_arc(u, v) {
        return Err(MengerError::ArcPresent(u, v));
    }
    let n = d.n();
    let mut split = split_network(d, &[u, v], 0);
    let f = split.flow.max_flow(2 * u + 1, 2 * v, k);
    let res = if f >= k {
        PathsOrCut::Paths(decompose(&mut split, n, u, k, |c| c == v))
    } else {
        PathsOrCut::Cut(cut_from_residual(&split, n, 2 * u + 1, &[u, v]))
    };
    if cfg!(debug_assertions) {
        assert!(check_paths_or_cut(d, u, v, k, &res), "menger duality violated");
    }
    Ok(res)
}

/// `k` dipaths from `v` to distinct vertices of `set`, pairwise meeting
/// only in `v` and with no interior vertex in `set`, or a set `K` of fewer
/// than `k` vertices other than `v` separating `v` from `set`.
pub fn fan_to_set(d: &Digraph, v: Vertex, set: &[Vertex], k: usize) -> Result<FanOrCut, MengerError> {
    if set.is_empty() {
        return Err(MengerError::EmptySet);
    }
    if set.contains(&v) {
        return Err(MengerError::VertexInSet(v));
    }
    let n = d.n();
    let mut split = split_network(d, &[v], 1);
    let sink = 2 * n;
    let mut in_set = vec![false; n];
    for &a in set {
        in_set[a] = true;
    }
    for a in 0..n {
        if in_set[a] {
            split.flow.add(2 * a + 1, sink, n as u32 + 1);
        }
    }
    let f = split.flow.max_flow(2 * v + 1, sink, k);
    let res = if f >= k {
        // each unit ends in a distinct set vertex; trim at the first one
        let paths = decompose(&mut split, n, v, k, |c| in_set[c]);
        FanOrCut::Fan(paths)
    } else {
        FanOrCut::Cut(cut_from_residual(&split, n, 2 * v + 1, &[v]))
    };
    if cfg!(debug_assertions) {
        assert!(check_fan_or_cut(d, v, set, k, &res), "fan duality violated");
    }
    Ok(res)
}

/// Minimum number of arcs whose deletion leaves a digraph that is not
/// strongly connected (0 when already not strong).
pub fn strong_arc_connectivity(d: &Digraph) -> Result<usize, MengerError> {
    let n = d.n();
    if n < 2 {
        return Err(MengerError::EmptyGraph);
    }
    if !d.is_strongly_connected() {
        return Ok(0);
    }
    // a global minimum arc cut separates vertex 0 from some t in one of
    // the two directions
    let mut best = d.min_out_degree().unwrap().min(d.min_in_degree().unwrap());
    for t in 1..n {
        for (s, t) in [(0, t), (t, 0)] {
            let mut flow = Flow::new(n);
            for (x, y) in d.arcs() {
                flow.add(x, y, 1);
            }
            best = best.min(flow.max_flow(s, t, best));
        }
    }
    Ok(best)
}

/// Checks the invariants of a [`vertex_disjoint_paths`] answer.
pub fn check_paths_or_cut(d: &Digraph, u: Vertex, v: Vertex, k: usize, r: &PathsOrCut) -> bool {
    match r {
        PathsOrCut::Paths(ps) => {
            let mut used = vec![false; d.n()];
            ps.len() == k
                && ps.iter().all(|p| {
                    p.first() == u
                        && p.last() == v
                        && p.valid_in(d)
                        && p.interior().iter().all(|&w| !std::mem::replace(&mut used[w], true))
                })
        }
        PathsOrCut::Cut(cut) => {
            let mut blocked = vec![false; d.n()];
            for &w in cut {
                blocked[w] = true;
            }
            cut.len() < k && !cut.contains(&u) && !cut.contains(&v) && !d.reach(&[u], &blocked)[v]
        }
    }
}

/// Checks the invariants of a [`fan_to_set`] answer.
pub fn check_fan_or_cut(d: &Digraph, v: Vertex, set: &[Vertex], k: usize, r: &FanOrCut) -> bool {
    match r {
        FanOrCut::Fan(ps) => {
            let mut used = vec![false; d.n()];
            ps.len() == k
                && ps.iter().all(|p| {
                    p.first() == v
                        && p.len() >= 1
                        && set.contains(&p.last())
                        && p.valid_in(d)
                        && p.interior().iter().all(|w| !set.contains(w))
                        && p.vertices[1..].iter().all(|&w| !std::mem::replace(&mut used[w], true))
                })
        }
        FanOrCut::Cut(cut) => {
            let mut blocked = vec![false; d.n()];
            for &w in cut {
                blocked[w] = true;
            }
            let reach = d.reach(&[v], &blocked);
            cut.len() < k && !cut.contains(&v) && set.iter().all(|&a| blocked[a] || !reach[a])
        }
    }
}
