//! Simple digraphs with sorted adjacency, pattern generators and basic
//! structural queries.
//!
//! Vertices are dense ids `0..n`. Loops and parallel arcs are rejected;
//! digons are allowed. A [`Digraph`] never changes after construction,
//! every "mutation" returns a fresh value.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type Arc = (Vertex, Vertex);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop arc at vertex {0}")]
    LoopArc(Vertex),
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("empty graph")]
    EmptyGraph,
    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    out_adj: Vec<Vec<Vertex>>,
    in_adj: Vec<Vec<Vertex>>,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, arcs={:?})", self.n, self.arcs())
    }
}

/// Length of a shortest directed cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn at_least(self, g: usize) -> bool {
        match self {
            Girth::Finite(x) => x >= g,
            Girth::Infinite => true,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(x) => write!(f, "{x}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

pub fn build_digraph(n: usize, arcs: &[Arc]) -> Result<Digraph, GraphError> {
    let mut out_adj = vec![Vec::new(); n];
    for &(u, v) in arcs {
        if u >= n {
            return Err(GraphError::VertexOutOfRange { v: u, n });
        }
        if v >= n {
            return Err(GraphError::VertexOutOfRange { v, n });
        }
        if u == v {
            return Err(GraphError::LoopArc(u));
        }
        out_adj[u].push(v);
    }
    Ok(Digraph::from_out_lists(out_adj))
}

impl Digraph {
    /// Builds from raw out-lists; sorts and dedups. Panics on loops or
    /// out-of-range heads, use [`build_digraph`] for checked input.
    pub fn from_out_lists(mut out_adj: Vec<Vec<Vertex>>) -> Digraph {
        let n = out_adj.len();
        let mut in_adj = vec![Vec::new(); n];
        for (u, list) in out_adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            for &v in list.iter() {
                assert!(v < n && v != u, "bad arc ({u},{v})");
                in_adj[v].push(u);
            }
        }
        // in-lists come out sorted because u increases monotonically
        Digraph { n, out_adj, in_adj }
    }

    pub fn empty(n: usize) -> Digraph {
        Digraph { n, out_adj: vec![Vec::new(); n], in_adj: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn out(&self, v: Vertex) -> &[Vertex] {
        &self.out_adj[v]
    }

    pub fn inn(&self, v: Vertex) -> &[Vertex] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.in_adj[v].len()
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && self.out_adj[u].binary_search(&v).is_ok()
    }

    pub fn arcs(&self) -> Vec<Arc> {
        let mut a = Vec::with_capacity(self.arc_count());
        for (u, list) in self.out_adj.iter().enumerate() {
            a.extend(list.iter().map(|&v| (u, v)));
        }
        a
    }

    pub fn out_lists(&self) -> &[Vec<Vertex>] {
        &self.out_adj
    }

    pub fn transpose(&self) -> Digraph {
        Digraph { n: self.n, out_adj: self.in_adj.clone(), in_adj: self.out_adj.clone() }
    }

    pub fn with_arcs(&self, add: &[Arc]) -> Digraph {
        let mut out = self.out_adj.clone();
        for &(u, v) in add {
            out[u].push(v);
        }
        Digraph::from_out_lists(out)
    }

    pub fn without_arcs(&self, del: &[Arc]) -> Digraph {
        let mut out = self.out_adj.clone();
        for &(u, v) in del {
            out[u].retain(|&w| w != v);
        }
        Digraph::from_out_lists(out)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Digraph) -> Digraph {
        let off = self.n;
        let mut out = self.out_adj.clone();
        out.extend(other.out_adj.iter().map(|l| l.iter().map(|&v| v + off).collect()));
        Digraph::from_out_lists(out)
    }

    /// Keeps the vertices flagged in `keep`, relabelled in increasing order.
    /// Returns the subgraph and the map new id -> old id.
    pub fn induced(&self, keep: &[bool]) -> (Digraph, Vec<Vertex>) {
        let mut new_id = vec![usize::MAX; self.n];
        let mut old = Vec::new();
        for v in 0..self.n {
            if keep[v] {
                new_id[v] = old.len();
                old.push(v);
            }
        }
        let out = old
            .iter()
            .map(|&u| {
                self.out_adj[u].iter().filter(|&&v| keep[v]).map(|&v| new_id[v]).collect()
            })
            .collect();
        (Digraph::from_out_lists(out), old)
    }

    /// Relabels vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Digraph {
        let mut out = vec![Vec::new(); self.n];
        for (u, list) in self.out_adj.iter().enumerate() {
            out[perm[u]] = list.iter().map(|&v| perm[v]).collect();
        }
        Digraph::from_out_lists(out)
    }

    pub fn min_out_degree(&self) -> Result<usize, GraphError> {
        self.out_adj.iter().map(Vec::len).min().ok_or(GraphError::EmptyGraph)
    }

    pub fn max_out_degree(&self) -> Result<usize, GraphError> {
        self.out_adj.iter().map(Vec::len).max().ok_or(GraphError::EmptyGraph)
    }

    pub fn min_in_degree(&self) -> Result<usize, GraphError> {
        self.in_adj.iter().map(Vec::len).min().ok_or(GraphError::EmptyGraph)
    }

    pub fn max_in_degree(&self) -> Result<usize, GraphError> {
        self.in_adj.iter().map(Vec::len).max().ok_or(GraphError::EmptyGraph)
    }

    pub fn has_digon(&self) -> bool {
        self.arcs().into_iter().any(|(u, v)| self.has_arc(v, u))
    }

    /// Vertices reachable from `src` (inclusive) avoiding `blocked`.
    pub fn reach(&self, src: &[Vertex], blocked: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &s in src {
            if !blocked[s] && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.out_adj[u] {
                if !seen[v] && !blocked[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Shortest dipath from any vertex of `src` to any vertex flagged in
    /// `dst`, avoiding `blocked` (sources and targets must be unblocked).
    /// Neighbours are scanned in increasing id order, so ties resolve
    /// towards lower ids.
    pub fn shortest_path(&self, src: &[Vertex], dst: &[bool], blocked: &[bool]) -> Option<Dipath> {
        let mut pred = vec![usize::MAX; self.n];
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &s in src {
            if blocked[s] || seen[s] {
                continue;
            }
            if dst[s] {
                return Some(Dipath::trivial(s));
            }
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.out_adj[u] {
                if seen[v] || blocked[v] {
                    continue;
                }
                seen[v] = true;
                pred[v] = u;
                if dst[v] {
                    let mut vs = vec![v];
                    let mut c = v;
                    while pred[c] != usize::MAX {
                        c = pred[c];
                        vs.push(c);
                    }
                    vs.reverse();
                    return Some(Dipath::new(vs));
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// BFS distances from `src` along out-arcs; `usize::MAX` if unreachable.
    pub fn distances(&self, src: Vertex, blocked: &[bool]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        if blocked[src] {
            return dist;
        }
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.out_adj[u] {
                if dist[v] == usize::MAX && !blocked[v] {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn directed_girth(&self) -> Girth {
        let mut best = usize::MAX;
        let none = vec![false; self.n];
        for s in 0..self.n {
            let dist = self.distances(s, &none);
            for &u in &self.in_adj[s] {
                if dist[u] != usize::MAX {
                    best = best.min(dist[u] + 1);
                }
            }
        }
        if best == usize::MAX {
            Girth::Infinite
        } else {
            Girth::Finite(best)
        }
    }

    /// Strongly connected components in reverse topological order (sink
    /// components first). Each component is sorted; among components that
    /// are mutually unordered the one with the lower minimum id comes first.
    pub fn strong_components(&self) -> Vec<Vec<Vertex>> {
        let comp = tarjan(self);
        let count = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut members = vec![Vec::new(); count];
        for v in 0..self.n {
            members[comp[v]].push(v);
        }
        // condensation, then Kahn on the reversed DAG with a min-heap keyed
        // by representative id for a deterministic order
        let mut succ = vec![Vec::new(); count];
        let mut outdeg = vec![0usize; count];
        for (u, v) in self.arcs() {
            let (cu, cv) = (comp[u], comp[v]);
            if cu != cv {
                succ[cv].push(cu);
                outdeg[cu] += 1;
            }
        }
        let mut heap = std::collections::BinaryHeap::new();
        for c in 0..count {
            if outdeg[c] == 0 {
                heap.push(std::cmp::Reverse((members[c][0], c)));
            }
        }
        let mut order = Vec::with_capacity(count);
        while let Some(std::cmp::Reverse((_, c))) = heap.pop() {
            order.push(std::mem::take(&mut members[c]));
            for &p in &succ[c] {
                outdeg[p] -= 1;
                if outdeg[p] == 0 {
                    let rep = members[p][0];
                    heap.push(std::cmp::Reverse((rep, p)));
                }
            }
        }
        order
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n > 0 && self.strong_components().len() == 1
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.arc_count());
        for (u, v) in self.arcs() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Digraph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
        let nums = parse_pair(header, hl + 1)?;
        let (n, m) = nums;
        let mut arcs = Vec::with_capacity(m);
        for (i, l) in lines {
            arcs.push(parse_pair(l, i + 1)?);
        }
        if arcs.len() != m {
            return Err(GraphError::Parse {
                line: hl + 1,
                msg: format!("header announces {m} arcs, found {}", arcs.len()),
            });
        }
        build_digraph(n, &arcs)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph D {\n");
        for v in 0..self.n {
            s.push_str(&format!("  {v};\n"));
        }
        for (u, v) in self.arcs() {
            s.push_str(&format!("  {u} -> {v};\n"));
        }
        s.push_str("}\n");
        s
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), GraphError> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        let tok = it.next().ok_or(GraphError::Parse { line: lineno, msg: "expected two integers".into() })?;
        tok.parse().map_err(|_| GraphError::Parse { line: lineno, msg: format!("bad integer {tok:?}") })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(GraphError::Parse { line: lineno, msg: "trailing tokens".into() });
    }
    Ok((a, b))
}

fn tarjan(d: &Digraph) -> Vec<usize> {
    let n = d.n();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(Vertex, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            if *pos < d.out(u).len() {
                let v = d.out(u)[*pos];
                *pos += 1;
                if index[v] == usize::MAX {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == u {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// A directed path given by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dipath {
    pub vertices: Vec<Vertex>,
}

impl Dipath {
    pub fn new(vertices: Vec<Vertex>) -> Dipath {
        assert!(!vertices.is_empty(), "a dipath has at least one vertex");
        Dipath { vertices }
    }

    pub fn trivial(v: Vertex) -> Dipath {
        Dipath { vertices: vec![v] }
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn first(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn last(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn interior(&self) -> &[Vertex] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }

    /// Subpath `P[x,y]`; `x` must not come after `y`.
    pub fn sub(&self, x: Vertex, y: Vertex) -> Dipath {
        let i = self.position(x).expect("x on path");
        let j = self.position(y).expect("y on path");
        assert!(i <= j, "subpath endpoints out of order");
        Dipath::new(self.vertices[i..=j].to_vec())
    }

    /// `self ∘ other`; the last vertex of `self` must equal the first of
    /// `other`.
    pub fn concat(&self, other: &Dipath) -> Dipath {
        assert_eq!(self.last(), other.first(), "concatenation endpoints differ");
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        Dipath::new(v)
    }

    pub fn arc(u: Vertex, v: Vertex) -> Dipath {
        Dipath::new(vec![u, v])
    }

    pub fn is_simple(&self) -> bool {
        let mut s = self.vertices.clone();
        s.sort_unstable();
        s.windows(2).all(|w| w[0] != w[1])
    }

    /// Checks simplicity and that every consecutive pair is an arc of `d`.
    pub fn valid_in(&self, d: &Digraph) -> bool {
        self.vertices.iter().all(|&v| v < d.n())
            && self.is_simple()
            && self.vertices.windows(2).all(|w| d.has_arc(w[0], w[1]))
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

// ---- generators ----

/// Bioriented complete graph on `k` vertices.
pub fn bioriented_clique(k: usize) -> Digraph {
    Digraph::from_out_lists((0..k).map(|u| (0..k).filter(|&v| v != u).collect()).collect())
}

/// Bioriented star with centre 0 and leaves `1..=k`.
pub fn bioriented_star(k: usize) -> Digraph {
    let mut out = vec![Vec::new(); k + 1];
    for leaf in 1..=k {
        out[0].push(leaf);
        out[leaf].push(0);
    }
    Digraph::from_out_lists(out)
}

/// Bioriented path `0 - 1 - ... - l` (l edges).
pub fn bioriented_path(l: usize) -> Digraph {
    let mut out = vec![Vec::new(); l + 1];
    for i in 0..l {
        out[i].push(i + 1);
        out[i + 1].push(i);
    }
    Digraph::from_out_lists(out)
}

/// Arcs `(i,j)` for all `i < j`.
pub fn transitive_tournament(k: usize) -> Digraph {
    Digraph::from_out_lists((0..k).map(|u| (u + 1..k).collect()).collect())
}

/// Bioriented triangle on `{0,1,2}` without the arc `(1,2)`.
/// Vertex 2 is the one with out-degree 2 and in-degree 1, vertex 1 has
/// out-degree 1.
pub fn k3_minus_e() -> Digraph {
    build_digraph(3, &[(0, 1), (1, 0), (0, 2), (2, 0), (2, 1)]).unwrap()
}

/// Directed cycle `0 -> 1 -> ... -> l-1 -> 0`.
pub fn directed_cycle(l: usize) -> Digraph {
    Digraph::from_out_lists((0..l).map(|u| vec![(u + 1) % l]).collect())
}

/// Directed path `0 -> 1 -> ... -> l` (length `l`).
pub fn directed_path(l: usize) -> Digraph {
    Digraph::from_out_lists((0..=l).map(|u| if u < l { vec![u + 1] } else { vec![] }).collect())
}

/// The oriented cycle with sources `s_0..s_{a-1}` (ids `0..a`), sinks
/// `t_0..t_{a-1}` (ids `a..2a`) and, for each `i`, dipaths of length `b`
/// from `s_i` to `t_i` and from `s_i` to `t_{(i+1) mod a}`. Interior vertices
/// follow, path by path in the order `s_0->t_0, s_0->t_1, s_1->t_1, ...`.
pub fn pattern_cab(a: usize, b: usize) -> Result<Digraph, GraphError> {
    if a == 0 || b == 0 {
        return Err(GraphError::DegeneratePattern(format!("cab({a},{b})")));
    }
    if a == 1 && b == 1 {
        return Err(GraphError::DegeneratePattern("cab(1,1) needs parallel arcs".into()));
    }
    let n = 2 * a * b;
    let mut out = vec![Vec::new(); n];
    let mut next = 2 * a;
    for i in 0..a {
        for t in [a + i, a + (i + 1) % a] {
            let mut prev = i;
            for _ in 1..b {
                out[prev].push(next);
                prev = next;
                next += 1;
            }
            out[prev].push(t);
        }
    }
    Ok(Digraph::from_out_lists(out))
}

/// Pattern paths of [`pattern_cab`] in generation order, as vertex lists.
pub fn pattern_cab_paths(a: usize, b: usize) -> Vec<Vec<Vertex>> {
    let mut paths = Vec::new();
    let mut next = 2 * a;
    for i in 0..a {
        for t in [a + i, a + (i + 1) % a] {
            let mut p = vec![i];
            for _ in 1..b {
                p.push(next);
                next += 1;
            }
            p.push(t);
            paths.push(p);
        }
    }
    paths
}

/// Two internally disjoint dipaths from `x = 0` to `y = 1` of lengths `k1`
/// and `k2`; interior of the first path is `2..k1+1`, then the second.
pub fn pattern_two_block(k1: usize, k2: usize) -> Result<Digraph, GraphError> {
    if k2 == 0 || k1 < k2 || (k1 == 1 && k2 == 1) {
        return Err(GraphError::DegeneratePattern(format!("twoblock({k1},{k2})")));
    }
    let mut out = vec![Vec::new(); k1 + k2];
    let mut next = 2;
    for len in [k1, k2] {
        let mut prev = 0;
        for _ in 1..len {
            out[prev].push(next);
            prev = next;
            next += 1;
        }
        out[prev].push(1);
    }
    Ok(Digraph::from_out_lists(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_errors() {
        let d = build_digraph(2, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(d.arc_count(), 2);
        assert_eq!(d.min_out_degree(), Ok(1));
        assert_eq!(build_digraph(2, &[(0, 0)]), Err(GraphError::LoopArc(0)));
        assert!(matches!(build_digraph(2, &[(0, 2)]), Err(GraphError::VertexOutOfRange { .. })));
        assert_eq!(Digraph::empty(0).min_out_degree(), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn degrees() {
        assert_eq!(bioriented_clique(4).min_out_degree(), Ok(3));
        assert_eq!(transitive_tournament(4).min_out_degree(), Ok(0));
        assert_eq!(pattern_cab(2, 3).unwrap().min_out_degree(), Ok(0));
    }

    #[test]
    fn girth_examples() {
        assert_eq!(directed_cycle(5).directed_girth(), Girth::Finite(5));
        assert_eq!(transitive_tournament(5).directed_girth(), Girth::Infinite);
        assert_eq!(bioriented_clique(3).directed_girth(), Girth::Finite(2));
        let tri = build_digraph(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(tri.directed_girth(), Girth::Finite(3));
    }

    #[test]
    fn components() {
        assert_eq!(directed_cycle(4).strong_components(), vec![vec![0, 1, 2, 3]]);
        assert_eq!(directed_path(2).strong_components(), vec![vec![2], vec![1], vec![0]]);
        let two = build_digraph(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]).unwrap();
        assert_eq!(two.strong_components(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn generators() {
        assert_eq!(bioriented_clique(3).arc_count(), 6);
        assert_eq!(k3_minus_e().arc_count(), 5);
        let s = bioriented_star(3);
        assert_eq!(s.arc_count(), 6);
        assert_eq!(s.out_degree(0), 3);
        assert_eq!(pattern_cab(1, 1), Err(GraphError::DegeneratePattern("cab(1,1) needs parallel arcs".into())));
        assert!(pattern_two_block(1, 1).is_err());
        let c = pattern_two_block(3, 2).unwrap();
        assert_eq!(c.n(), 5);
        let sources = (0..5).filter(|&v| c.in_degree(v) == 0).count();
        let sinks = (0..5).filter(|&v| c.out_degree(v) == 0).count();
        assert_eq!((sources, sinks), (1, 1));
    }

    #[test]
    fn cab_2_1_is_alternating_c4() {
        let c = pattern_cab(2, 1).unwrap();
        assert_eq!(c.n(), 4);
        assert_eq!(c.arc_count(), 4);
        for v in 0..2 {
            assert_eq!((c.out_degree(v), c.in_degree(v)), (2, 0));
        }
        for v in 2..4 {
            assert_eq!((c.out_degree(v), c.in_degree(v)), (0, 2));
        }
    }

    #[test]
    fn edge_list_roundtrip_and_errors() {
        let d = bioriented_clique(4);
        assert_eq!(Digraph::parse_edge_list(&d.to_edge_list()).unwrap(), d);
        assert!(Digraph::parse_edge_list("3 1\n0 x\n").is_err());
        assert!(Digraph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(d.to_dot().contains("0 -> 1;"));
    }

    #[test]
    fn dipath_ops() {
        let p = Dipath::new(vec![3, 1, 4, 5]);
        assert_eq!(p.len(), 3);
        assert_eq!(p.sub(1, 5).vertices, vec![1, 4, 5]);
        assert_eq!(p.interior(), &[1, 4]);
        let q = Dipath::new(vec![5, 9]);
        assert_eq!(p.concat(&q).vertices, vec![3, 1, 4, 5, 9]);
        assert_eq!(Dipath::trivial(2).len(), 0);
    }
}
