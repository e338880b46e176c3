//! Subdivisions of the bioriented triangle minus one arc.
//!
//! Input: a digraph and a vertex `v0` with `d+(v0) >= 1` and `d+(v) >= 2`
//! elsewhere. The search reduces the graph (trim surplus arcs, restrict to
//! a terminal strong component, cut along a one-vertex separation, contract
//! the out-neighbour of `v0`) until two fan paths close the pattern, then
//! replays the reductions backwards on the found subgraph.
//!
//! All reductions keep the original vertex ids; removed vertices are only
//! masked out.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;

use crate::digraph::{k3_minus_e, Arc, Digraph, Dipath, Vertex};
use crate::finder::{checked, FindError, RunLog};
use crate::menger::{fan_to_set, FanOrCut};
use crate::oracle::{CertPath, SubdivisionCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ReductionStep {
    TrimArcs { arcs: Vec<Arc> },
    Restrict { kept: Vec<Vertex>, v0: Vertex },
    /// Keep `W ∪ {s0}` and add the arc `(s0, w)` standing for `path`.
    ContractPartition { w_side: Vec<Vertex>, s0: Vertex, w: Vertex, path: Vec<Vertex> },
    /// Delete `v1`, add `(v0, v2)` and `(x, v0)` for each redirected `x`.
    ContractV1 { v0: Vertex, v1: Vertex, v2: Vertex, redirected: Vec<Vertex> },
}

#[derive(Clone)]
struct Work {
    alive: Vec<bool>,
    out: Vec<BTreeSet<Vertex>>,
}

impl Work {
    fn from(d: &Digraph) -> Work {
        Work { alive: vec![true; d.n()], out: (0..d.n()).map(|v| d.out(v).iter().copied().collect()).collect() }
    }

    fn digraph(&self) -> Digraph {
        Digraph::from_out_lists(self.out.iter().map(|s| s.iter().copied().collect()).collect())
    }

    fn in_nbrs(&self, v: Vertex) -> Vec<Vertex> {
        (0..self.out.len()).filter(|&u| self.out[u].contains(&v)).collect()
    }

    fn restrict(&mut self, keep: &[bool]) {
        for v in 0..self.out.len() {
            if !keep[v] {
                self.alive[v] = false;
                self.out[v].clear();
            }
        }
        for s in self.out.iter_mut() {
            s.retain(|&w| keep[w]);
        }
    }
}

/// Finds a subdivision of [`k3_minus_e`]. `depth_budget` caps the number of
/// reductions; `None` uses `|V| + |A| + 1`, which always suffices.
pub fn find_k3e(d: &Digraph, v0: Vertex, depth_budget: Option<usize>) -> Result<SubdivisionCertificate, FindError> {
    find_k3e_logged(d, v0, depth_budget, &mut RunLog::default())
}

pub fn find_k3e_logged(
    d: &Digraph,
    v0: Vertex,
    depth_budget: Option<usize>,
    log: &mut RunLog,
) -> Result<SubdivisionCertificate, FindError> {
    if v0 >= d.n() || d.out_degree(v0) < 1 {
        return Err(FindError::PreconditionViolated { vertex: v0 });
    }
    if let Some(v) = (0..d.n()).find(|&v| v != v0 && d.out_degree(v) < 2) {
        return Err(FindError::PreconditionViolated { vertex: v });
    }
    let limit = depth_budget.unwrap_or(d.n() + d.arc_count() + 1);
    let mut g = Work::from(d);
    let mut v0 = v0;
    let mut steps: Vec<ReductionStep> = Vec::new();
    let found: BTreeSet<Arc> = loop {
        if steps.len() > limit {
            return Err(FindError::DepthBudgetExceeded);
        }
        // surplus arcs
        let mut trimmed = Vec::new();
        for v in 0..g.out.len() {
            let keep = if v == v0 { 1 } else { 2 };
            while g.alive[v] && g.out[v].len() > keep {
                let last = *g.out[v].iter().next_back().unwrap();
                g.out[v].remove(&last);
                trimmed.push((v, last));
            }
        }
        if !trimmed.is_empty() {
            log.push("trim", json!({ "arcs": trimmed.len() }));
            steps.push(ReductionStep::TrimArcs { arcs: trimmed });
            continue;
        }
        let dg = g.digraph();
        let comps: Vec<Vec<Vertex>> = dg.strong_components().into_iter().filter(|c| g.alive[c[0]]).collect();
        if comps.len() > 1 {
            // components come sink-first; the first one is terminal
            let x = comps[0].clone();
            let mut keep = vec![false; g.out.len()];
            for &v in &x {
                keep[v] = true;
            }
            if !keep[v0] {
                v0 = x[0];
            }
            g.restrict(&keep);
            log.push("restrict", json!({ "kept": x.len(), "v0": v0 }));
            steps.push(ReductionStep::Restrict { kept: x, v0 });
            continue;
        }
        let v1 = *g.out[v0].iter().next().expect("v0 keeps one out-arc");
        let in0 = g.in_nbrs(v0);
        let in1 = g.in_nbrs(v1);
        if let Some(&z0) = in0.iter().find(|z| in1.contains(z)) {
            match fan_to_set(&dg, v1, &[v0, z0], 2).expect("v1 is not in {v0, z0}") {
                FanOrCut::Fan(paths) => {
                    let mut arcs = BTreeSet::from([(v0, v1), (z0, v0), (z0, v1)]);
                    for p in &paths {
                        arcs.extend(p.arcs());
                    }
                    log.push("fan", json!({ "v0": v0, "v1": v1, "z0": z0 }));
                    break arcs;
                }
                FanOrCut::Cut(cut) => {
                    assert_eq!(cut.len(), 1, "strong graph has a nonempty separator");
                    let s0 = cut[0];
                    let mut blocked = vec![false; g.out.len()];
                    blocked[s0] = true;
                    let w_side = dg.reach(&[v1], &blocked);
                    let p = dg.shortest_path(&[s0], &w_side, &vec![false; g.out.len()]).expect("strong graph reaches W");
                    let w = p.last();
                    let mut keep = w_side.clone();
                    keep[s0] = true;
                    let w_list: Vec<Vertex> = (0..g.out.len()).filter(|&v| w_side[v]).collect();
                    g.restrict(&keep);
                    g.out[s0].insert(w);
                    v0 = s0;
                    log.push("partition", json!({ "s0": s0, "w": w, "w_side": w_list.len(), "path_len": p.len() }));
                    steps.push(ReductionStep::ContractPartition { w_side: w_list, s0, w, path: p.vertices });
                }
            }
            continue;
        }
        let v2 = *g.out[v1].iter().find(|&&x| x != v0).expect("v1 has out-degree 2");
        let redirected: Vec<Vertex> = in1.iter().copied().filter(|&x| x != v0).collect();
        let mut keep = g.alive.clone();
        keep[v1] = false;
        g.restrict(&keep);
        assert!(g.out[v0].is_empty());
        g.out[v0].insert(v2);
        for &x in &redirected {
            assert!(g.out[x].insert(v0), "contraction created a parallel arc");
        }
        log.push("contract", json!({ "v0": v0, "v1": v1, "v2": v2, "redirected": redirected.len() }));
        steps.push(ReductionStep::ContractV1 { v0, v1, v2, redirected });
    };
    let mut s = found;
    for step in steps.iter().rev() {
        s = lift(step, s);
    }
    let cert = subgraph_certificate(&s);
    Ok(checked(d, &k3_minus_e(), cert))
}

/// Maps a subdivision in the reduced graph to one in the graph before
/// `step`.
fn lift(step: &ReductionStep, s: BTreeSet<Arc>) -> BTreeSet<Arc> {
    match step {
        ReductionStep::TrimArcs { .. } | ReductionStep::Restrict { .. } => s,
        ReductionStep::ContractPartition { s0, w, path, .. } => {
            if s.contains(&(*s0, *w)) && !is_path_arc(path, *s0, *w) {
                let mut s = s;
                s.remove(&(*s0, *w));
                s.extend(Dipath::new(path.clone()).arcs());
                s
            } else {
                s
            }
        }
        ReductionStep::ContractV1 { v0, v1, v2, redirected } => {
            let touches = s.iter().any(|&(a, b)| a == *v0 || b == *v0);
            if !touches {
                return s;
            }
            let mut out = BTreeSet::new();
            let mut v0_keeps_in = false;
            for &(a, b) in &s {
                if (a, b) == (*v0, *v2) {
                    out.insert((*v1, *v2));
                } else if b == *v0 && redirected.contains(&a) {
                    out.insert((a, *v1));
                } else {
                    if b == *v0 {
                        v0_keeps_in = true;
                    }
                    out.insert((a, b));
                }
            }
            if v0_keeps_in {
                out.insert((*v0, *v1));
            }
            out
        }
    }
}

fn is_path_arc(path: &[Vertex], a: Vertex, b: Vertex) -> bool {
    path.len() == 2 && path[0] == a && path[1] == b
}

/// Reads the branch vertices off the degree signature of the subgraph and
/// traces the connecting paths.
fn subgraph_certificate(s: &BTreeSet<Arc>) -> SubdivisionCertificate {
    use std::collections::BTreeMap;
    let mut outs: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    let mut indeg: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &(a, b) in s {
        outs.entry(a).or_default().push(b);
        *indeg.entry(b).or_default() += 1;
        indeg.entry(a).or_default();
    }
    let signature = |v: Vertex| (indeg[&v], outs.get(&v).map_or(0, Vec::len));
    let mut branch = [usize::MAX; 3];
    for &v in indeg.keys() {
        match signature(v) {
            (2, 2) => branch[0] = v,
            (2, 1) => branch[1] = v,
            (1, 2) => branch[2] = v,
            (1, 1) => {}
            sig => panic!("subgraph vertex {v} has signature {sig:?}"),
        }
    }
    let pat_of = |v: Vertex| branch.iter().position(|&b| b == v);
    let mut by_arc = BTreeMap::new();
    for (px, &hx) in branch.iter().enumerate() {
        for &first in &outs[&hx] {
            let mut vs = vec![hx, first];
            let mut c = first;
            while pat_of(c).is_none() {
                c = outs[&c][0];
                vs.push(c);
            }
            by_arc.insert((px, pat_of(c).unwrap()), vs);
        }
    }
    let paths = k3_minus_e()
        .arcs()
        .into_iter()
        .map(|(x, y)| CertPath { from: x, to: y, vertices: by_arc.remove(&(x, y)).expect("pattern arc traced") })
        .collect();
    SubdivisionCertificate { branch: branch.iter().copied().enumerate().collect(), paths }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::*;
    use crate::oracle::validate_certificate;

    #[test]
    fn pattern_itself() {
        let d = k3_minus_e();
        let cert = find_k3e(&d, 1, None).unwrap();
        assert_eq!(validate_certificate(&d, &k3_minus_e(), &cert), Ok(()));
    }

    #[test]
    fn bioriented_triangle_any_root() {
        let d = bioriented_clique(3);
        for v in 0..3 {
            assert!(find_k3e(&d, v, None).is_ok());
        }
    }

    #[test]
    fn precondition() {
        assert_eq!(find_k3e(&bioriented_clique(2), 0, None), Err(FindError::PreconditionViolated { vertex: 1 }));
        assert_eq!(find_k3e(&directed_path(3), 3, None), Err(FindError::PreconditionViolated { vertex: 3 }));
    }
}
