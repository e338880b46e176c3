//! Exhaustive subdivision containment, certificate validation and an
//! even-dicycle detector.
//!
//! This module is the independent checker for every constructive finder in
//! the crate and deliberately shares no search logic with them.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{Arc, Digraph, Dipath, Vertex};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget of {max} nodes exceeded")]
    BudgetExceeded { max: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub consumed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(DEFAULT_BUDGET)
    }
}

impl SearchBudget {
    pub fn new(max_nodes: u64) -> Self {
        SearchBudget { max_nodes, consumed: 0 }
    }

    pub fn tick(&mut self) -> Result<(), OracleError> {
        if self.consumed >= self.max_nodes {
            return Err(OracleError::BudgetExceeded { max: self.max_nodes });
        }
        self.consumed += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertPath {
    pub from: Vertex,
    pub to: Vertex,
    pub vertices: Vec<Vertex>,
}

/// Branch map (pattern vertex -> host vertex) and one host dipath per
/// pattern arc; `from`/`to` are pattern vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SubdivisionCertificate {
    pub branch: BTreeMap<Vertex, Vertex>,
    pub paths: Vec<CertPath>,
}

impl SubdivisionCertificate {
    pub fn from_parts(branch: &[Vertex], paths: Vec<(Arc, Dipath)>) -> Self {
        SubdivisionCertificate {
            branch: branch.iter().copied().enumerate().collect(),
            paths: paths
                .into_iter()
                .map(|((x, y), p)| CertPath { from: x, to: y, vertices: p.vertices })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Applies `f` to every host vertex.
    pub fn map_host(&self, f: impl Fn(Vertex) -> Vertex) -> Self {
        SubdivisionCertificate {
            branch: self.branch.iter().map(|(&k, &v)| (k, f(v))).collect(),
            paths: self
                .paths
                .iter()
                .map(|p| CertPath { from: p.from, to: p.to, vertices: p.vertices.iter().map(|&v| f(v)).collect() })
                .collect(),
        }
    }

    /// All host vertices used by the embedding.
    pub fn host_vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.branch.values().copied().collect();
        for p in &self.paths {
            vs.extend_from_slice(&p.vertices);
        }
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Checks a certificate against host `d` and pattern `f`; on failure returns
/// the first violation found.
pub fn validate_certificate(d: &Digraph, f: &Digraph, cert: &SubdivisionCertificate) -> Result<(), String> {
    if cert.branch.len() != f.n() || cert.branch.keys().any(|&x| x >= f.n()) {
        return Err(format!(
            "branch arity mismatch: pattern has {} vertices, certificate maps {}",
            f.n(),
            cert.branch.len()
        ));
    }
    let mut is_branch = vec![false; d.n()];
    for (&x, &h) in &cert.branch {
        if h >= d.n() {
            return Err(format!("branch image {h} of pattern vertex {x} out of range"));
        }
        if std::mem::replace(&mut is_branch[h], true) {
            return Err(format!("branch map not injective at host vertex {h}"));
        }
    }
    let arcs = f.arcs();
    if cert.paths.len() != arcs.len() {
        return Err(format!("path count {} differs from pattern arc count {}", cert.paths.len(), arcs.len()));
    }
    let mut seen_arc = BTreeMap::new();
    for p in &cert.paths {
        if !f.has_arc(p.from, p.to) {
            return Err(format!("path for non-arc ({},{})", p.from, p.to));
        }
        if seen_arc.insert((p.from, p.to), ()).is_some() {
            return Err(format!("duplicate path for arc ({},{})", p.from, p.to));
        }
    }
    let mut owner = vec![usize::MAX; d.n()];
    for (i, p) in cert.paths.iter().enumerate() {
        let vs = &p.vertices;
        if vs.len() < 2 {
            return Err(format!("path for ({},{}) has length 0", p.from, p.to));
        }
        if vs[0] != cert.branch[&p.from] || *vs.last().unwrap() != cert.branch[&p.to] {
            return Err(format!("path for ({},{}) has wrong endpoints", p.from, p.to));
        }
        if let Some(&v) = vs.iter().find(|&&v| v >= d.n()) {
            return Err(format!("vertex {v} out of range"));
        }
        for w in vs.windows(2) {
            if !d.has_arc(w[0], w[1]) {
                return Err(format!("arc absent: ({},{})", w[0], w[1]));
            }
        }
        for &v in &vs[1..vs.len() - 1] {
            if is_branch[v] {
                return Err(format!("internal vertex {v} is a branch image"));
            }
            if owner[v] != usize::MAX {
                return Err(format!("internal overlap at vertex {v}"));
            }
            owner[v] = i;
        }
    }
    Ok(())
}

/// Automorphisms of a small digraph as permutation vectors.
pub fn automorphisms(f: &Digraph) -> Vec<Vec<Vertex>> {
    fn extend(f: &Digraph, perm: &mut Vec<Vertex>, used: &mut [bool], out: &mut Vec<Vec<Vertex>>) {
        let i = perm.len();
        if i == f.n() {
            out.push(perm.clone());
            return;
        }
        for c in 0..f.n() {
            if used[c] || f.out_degree(c) != f.out_degree(i) || f.in_degree(c) != f.in_degree(i) {
                continue;
            }
            let ok = (0..i).all(|j| {
                f.has_arc(i, j) == f.has_arc(c, perm[j]) && f.has_arc(j, i) == f.has_arc(perm[j], c)
            });
            if ok {
                used[c] = true;
                perm.push(c);
                extend(f, perm, used, out);
                perm.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(f, &mut Vec::new(), &mut vec![false; f.n()], &mut out);
    out
}

const SYMMETRY_LIMIT: usize = 8;

struct Search<'a> {
    d: &'a Digraph,
    f: &'a Digraph,
    order: Vec<Vertex>,
    /// `smaller_than[x]`: pattern vertices whose image must exceed that of `x`
    smaller_than: Vec<Vec<Vertex>>,
    batches: Vec<Vec<(usize, Arc)>>,
    phi: Vec<Option<Vertex>>,
    used: Vec<bool>,
    paths: Vec<Option<Dipath>>,
    budget: &'a mut SearchBudget,
}

impl<'a> Search<'a> {
    fn new(d: &'a Digraph, f: &'a Digraph, budget: &'a mut SearchBudget) -> Self {
        let k = f.n();
        let deg = |x: Vertex| f.out_degree(x) + f.in_degree(x);
        let mut order: Vec<Vertex> = Vec::with_capacity(k);
        let mut placed = vec![false; k];
        while order.len() < k {
            let best = (0..k)
                .filter(|&x| !placed[x])
                .max_by_key(|&x| {
                    let links = order.iter().filter(|&&y| f.has_arc(x, y) || f.has_arc(y, x)).count();
                    (links, deg(x), std::cmp::Reverse(x))
                })
                .unwrap();
            placed[best] = true;
            order.push(best);
        }
        // lex-leader constraints along a stabiliser chain
        let mut smaller_than = vec![Vec::new(); k];
        if k <= SYMMETRY_LIMIT {
            let mut group = automorphisms(f);
            for &x in &order {
                let mut orbit: Vec<Vertex> = group.iter().map(|p| p[x]).filter(|&y| y != x).collect();
                orbit.sort_unstable();
                orbit.dedup();
                smaller_than[x] = orbit;
                group.retain(|p| p[x] == x);
            }
        }
        let pos: Vec<usize> = {
            let mut pos = vec![0; k];
            for (i, &x) in order.iter().enumerate() {
                pos[x] = i;
            }
            pos
        };
        let mut batches = vec![Vec::new(); k];
        for (idx, (x, y)) in f.arcs().into_iter().enumerate() {
            batches[pos[x].max(pos[y])].push((idx, (x, y)));
        }
        let m = f.arc_count();
        Search {
            d,
            f,
            order,
            smaller_than,
            batches,
            phi: vec![None; k],
            used: vec![false; d.n()],
            paths: vec![None; m],
            budget,
        }
    }

    fn assign(&mut self, j: usize) -> Result<bool, OracleError> {
        if j == self.order.len() {
            return Ok(true);
        }
        let x = self.order[j];
        let (need_out, need_in) = (self.f.out_degree(x), self.f.in_degree(x));
        for h in 0..self.d.n() {
            if self.used[h] || self.d.out_degree(h) < need_out || self.d.in_degree(h) < need_in {
                continue;
            }
            let sym_ok = (0..j).all(|i| {
                let y = self.order[i];
                !self.smaller_than[y].contains(&x) || self.phi[y].unwrap() < h
            });
            if !sym_ok {
                continue;
            }
            self.budget.tick()?;
            self.phi[x] = Some(h);
            self.used[h] = true;
            if self.route(j, 0)? {
                return Ok(true);
            }
            self.used[h] = false;
            self.phi[x] = None;
        }
        Ok(false)
    }

    fn reaches(&self, from: Vertex, to: Vertex) -> bool {
        let mut blocked = self.used.clone();
        blocked[from] = false;
        blocked[to] = false;
        let mut seen = vec![false; self.d.n()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &w in self.d.out(u) {
                if w == to {
                    return true;
                }
                if !seen[w] && !blocked[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        false
    }

    fn route(&mut self, j: usize, idx: usize) -> Result<bool, OracleError> {
        if idx == self.batches[j].len() {
            return self.assign(j + 1);
        }
        for &(_, (x, y)) in &self.batches[j][idx..] {
            if !self.reaches(self.phi[x].unwrap(), self.phi[y].unwrap()) {
                return Ok(false);
            }
        }
        let (_, (x, y)) = self.batches[j][idx];
        let (hx, hy) = (self.phi[x].unwrap(), self.phi[y].unwrap());
        let mut path = vec![hx];
        self.extend_path(j, idx, hy, &mut path)
    }

    /// Distances to `target` along reversed arcs through unused vertices.
    fn dist_to(&self, target: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.d.n()];
        dist[target] = 0;
        let mut queue = VecDeque::from([target]);
        while let Some(u) = queue.pop_front() {
            for &w in self.d.inn(u) {
                if dist[w] == usize::MAX && !self.used[w] {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn extend_path(&mut self, j: usize, idx: usize, target: Vertex, path: &mut Vec<Vertex>) -> Result<bool, OracleError> {
        self.budget.tick()?;
        let cur = *path.last().unwrap();
        let dist = self.dist_to(target);
        let mut cand: Vec<Vertex> = self
            .d
            .out(cur)
            .iter()
            .copied()
            .filter(|&w| w == target || (!self.used[w] && dist[w] != usize::MAX))
            .collect();
        cand.sort_by_key(|&w| (dist[w], w));
        let arc_idx = self.batches[j][idx].0;
        for w in cand {
            path.push(w);
            if w == target {
                self.paths[arc_idx] = Some(Dipath::new(path.clone()));
                if self.route(j, idx + 1)? {
                    return Ok(true);
                }
                self.paths[arc_idx] = None;
            } else {
                self.used[w] = true;
                if self.extend_path(j, idx, target, path)? {
                    return Ok(true);
                }
                self.used[w] = false;
            }
            path.pop();
        }
        Ok(false)
    }

    fn certificate(&self) -> SubdivisionCertificate {
        let branch: Vec<Vertex> = self.phi.iter().map(|p| p.unwrap()).collect();
        let arcs = self.f.arcs();
        SubdivisionCertificate::from_parts(
            &branch,
            arcs.into_iter().zip(self.paths.iter().map(|p| p.clone().unwrap())).collect(),
        )
    }
}

/// Searches for a subdivision of `f` in `d`. `Ok(None)` means the search
/// space was exhausted.
pub fn contains_subdivision(
    d: &Digraph,
    f: &Digraph,
    budget: &mut SearchBudget,
) -> Result<Option<SubdivisionCertificate>, OracleError> {
    if f.n() > d.n() || f.arc_count() > d.arc_count() {
        return Ok(None);
    }
    let mut s = Search::new(d, f, budget);
    if s.assign(0)? {
        let cert = s.certificate();
        debug_assert_eq!(validate_certificate(d, f, &cert), Ok(()));
        Ok(Some(cert))
    } else {
        Ok(None)
    }
}

/// True iff `d` has a directed cycle of even length.
pub fn has_even_dicycle(d: &Digraph, budget: &mut SearchBudget) -> Result<bool, OracleError> {
    fn dfs(d: &Digraph, s: Vertex, cur: Vertex, len: usize, on: &mut [bool], budget: &mut SearchBudget) -> Result<bool, OracleError> {
        budget.tick()?;
        for &w in d.out(cur) {
            if w == s && (len + 1) % 2 == 0 {
                return Ok(true);
            }
            if w > s && !on[w] {
                on[w] = true;
                if dfs(d, s, w, len + 1, on, budget)? {
                    return Ok(true);
                }
                on[w] = false;
            }
        }
        Ok(false)
    }
    let mut on = vec![false; d.n()];
    for s in 0..d.n() {
        on[s] = true;
        if dfs(d, s, s, 0, &mut on, budget)? {
            return Ok(true);
        }
        on[s] = false;
    }
    Ok(false)
}
