//! Gadgets, alternating paths and gadget chains, the building material of
//! the `C_{a,b}` finder.
//!
//! A gadget hangs off an arc `(p, q)`:
//! * type I: a directed cycle of length at least `g` through `(p, q)`;
//! * type II (basic): a dipath `P1` from `r` to `p` of length at least
//!   `2b² + b - 2` all of whose vertices dominate `q`; the extended form adds
//!   a dipath `P2` of length at least `b` ending at `r`, plus a link arc;
//! * type III: dipaths `P1` from `p` and `P2` from `q`, internally disjoint,
//!   meeting at `r`, each of length at least `2b - 1`.
//!
//! An `(a,b)`-alternating path is the oriented path
//! `s_1 -Q_1-> t_1 <-Q'_1- s_2 -Q_2-> t_2 ... s_a -Q_a-> t_a`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{build_digraph, pattern_cab, pattern_cab_paths, Arc, Digraph, Dipath, Vertex};
use crate::finder::{checked, path_system_certificate};
use crate::oracle::SubdivisionCertificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CabParams {
    pub a: usize,
    pub b: usize,
    pub g: usize,
    pub h: usize,
    pub k: u128,
    pub d: u128,
}

impl CabParams {
    pub fn new(a: usize, b: usize) -> Result<Self, GadgetError> {
        if a == 0 || b == 0 {
            return Err(GadgetError::DegeneratePattern(format!("cab({a},{b})")));
        }
        let g = 4 * b * b;
        let (a_, b_, g_) = (a as u128, b as u128, g as u128);
        let k = 12 * b_ * b_ * (4 * g_ + 3) * (4 * g_ + 3) * (a_ + 3) * (b_ + 1);
        let d = 2 * b_ * (4 * g_ + 3) * (a_ + 3) * (b_ + 1);
        Ok(CabParams { a, b, g, h: 4 * g + 2, k, d })
    }

    /// Minimum length of `P1` in a type-II gadget.
    pub fn ii_len(&self) -> usize {
        2 * self.b * self.b + self.b - 2
    }

    /// Minimum length of both paths of a type-III gadget.
    pub fn iii_len(&self) -> usize {
        2 * self.b - 1
    }

    /// Maximum gap between consecutive gadget arcs on a good chain's spine.
    pub fn spacing(&self) -> usize {
        (4 * self.g + 3) * (2 * self.b - 1)
    }

    pub fn max_gadget_size(&self) -> usize {
        (8 * self.g + 6) * (2 * self.b - 1)
    }

    /// Number of gadget arcs a chain needs before it can be closed.
    pub fn close_threshold(&self) -> usize {
        (self.a + 3) * (self.b + 1) - 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("operation not defined for a {0:?} gadget")]
    WrongKind(GadgetKind),
    #[error("bad target set: {0}")]
    BadTarget(String),
    #[error("chain has {have} gadget arcs, needs {need}")]
    ChainTooPoor { have: usize, need: usize },
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("overlap: {0}")]
    OverlapViolation(String),
    #[error("gadgets do not intersect")]
    Disjoint,
    #[error("bad starred gadget: {0}")]
    BadStar(String),
    #[error("invalid gadget: {0}")]
    BadGadget(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("closure conditions fail: {0}")]
    ClosureInvalid(String),
    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),
    #[error("no alternating path: {0}")]
    NoAlternatingPath(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GadgetKind {
    Trivial,
    TypeI,
    TypeIIBasic,
    TypeIIExtended,
    TypeIII,
}

/// Which clause makes an extended type-II gadget extended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    /// Arc from the first vertex of `P2` to the second vertex of `P1`.
    FirstToSecond,
    /// Arc from this vertex of `P1 - r` to the first vertex of `P2`.
    BackArc(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Gadget {
    Trivial { p: Vertex, q: Vertex },
    /// `cycle` starts `p, q, ...`; its last vertex has the arc back to `p`.
    TypeI { p: Vertex, q: Vertex, cycle: Dipath },
    /// `p1` runs from `r` to `p`.
    TypeIIBasic { p: Vertex, q: Vertex, r: Vertex, p1: Dipath },
    TypeIIExtended { p: Vertex, q: Vertex, r: Vertex, p1: Dipath, p2: Dipath, link: Link },
    /// `p1` runs from `p` to `r`, `p2` from `q` to `r`.
    TypeIII { p: Vertex, q: Vertex, r: Vertex, p1: Dipath, p2: Dipath },
}

impl Gadget {
    /// Type-I gadget on the cycle `cyc` (vertex list, closing arc implied),
    /// rotated so that `p` comes first.
    pub fn cycle_through(cyc: &[Vertex], p: Vertex) -> Gadget {
        let i = cyc.iter().position(|&v| v == p).expect("p on cycle");
        let mut vs = cyc[i..].to_vec();
        vs.extend_from_slice(&cyc[..i]);
        Gadget::TypeI { p, q: vs[1], cycle: Dipath::new(vs) }
    }

    pub fn kind(&self) -> GadgetKind {
        match self {
            Gadget::Trivial { .. } => GadgetKind::Trivial,
            Gadget::TypeI { .. } => GadgetKind::TypeI,
            Gadget::TypeIIBasic { .. } => GadgetKind::TypeIIBasic,
            Gadget::TypeIIExtended { .. } => GadgetKind::TypeIIExtended,
            Gadget::TypeIII { .. } => GadgetKind::TypeIII,
        }
    }

    pub fn p(&self) -> Vertex {
        match *self {
            Gadget::Trivial { p, .. }
            | Gadget::TypeI { p, .. }
            | Gadget::TypeIIBasic { p, .. }
            | Gadget::TypeIIExtended { p, .. }
            | Gadget::TypeIII { p, .. } => p,
        }
    }

    pub fn q(&self) -> Vertex {
        match *self {
            Gadget::Trivial { q, .. }
            | Gadget::TypeI { q, .. }
            | Gadget::TypeIIBasic { q, .. }
            | Gadget::TypeIIExtended { q, .. }
            | Gadget::TypeIII { q, .. } => q,
        }
    }

    pub fn r(&self) -> Option<Vertex> {
        match *self {
            Gadget::TypeIIBasic { r, .. } | Gadget::TypeIIExtended { r, .. } | Gadget::TypeIII { r, .. } => Some(r),
            _ => None,
        }
    }

    /// Sorted vertex set.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut vs = vec![self.p(), self.q()];
        match self {
            Gadget::Trivial { .. } => {}
            Gadget::TypeI { cycle, .. } => vs.extend_from_slice(&cycle.vertices),
            Gadget::TypeIIBasic { p1, .. } => vs.extend_from_slice(&p1.vertices),
            Gadget::TypeIIExtended { p1, p2, .. } | Gadget::TypeIII { p1, p2, .. } => {
                vs.extend_from_slice(&p1.vertices);
                vs.extend_from_slice(&p2.vertices);
            }
        }
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices().binary_search(&v).is_ok()
    }

    /// The arcs making up the gadget, sorted.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut arcs = vec![(self.p(), self.q())];
        match self {
            Gadget::Trivial { .. } => {}
            Gadget::TypeI { cycle, .. } => {
                arcs.extend(cycle.arcs());
                arcs.push((cycle.last(), cycle.first()));
            }
            Gadget::TypeIIBasic { q, p1, .. } => {
                arcs.extend(p1.arcs());
                arcs.extend(p1.vertices.iter().map(|&v| (v, *q)));
            }
            Gadget::TypeIIExtended { q, p1, p2, link, .. } => {
                arcs.extend(p1.arcs());
                arcs.extend(p1.vertices.iter().map(|&v| (v, *q)));
                arcs.extend(p2.arcs());
                arcs.push(link_arc(p1, p2, *link));
            }
            Gadget::TypeIII { p1, p2, .. } => {
                arcs.extend(p1.arcs());
                arcs.extend(p2.arcs());
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        arcs
    }

    /// Drops `P2` and the link of an extended type-II gadget.
    pub fn basic_part(&self) -> Gadget {
        match self {
            Gadget::TypeIIExtended { p, q, r, p1, .. } => Gadget::TypeIIBasic { p: *p, q: *q, r: *r, p1: p1.clone() },
            g => g.clone(),
        }
    }
}

fn link_arc(p1: &Dipath, p2: &Dipath, link: Link) -> Arc {
    match link {
        Link::FirstToSecond => (p2.first(), p1.vertices.get(1).copied().unwrap_or(p1.first())),
        Link::BackArc(w) => (w, p2.first()),
    }
}

/// Checks the kind-specific definition against `d`; reports the first
/// violation.
pub fn validate_gadget(d: &Digraph, gadget: &Gadget, params: &CabParams) -> Result<(), String> {
    let has = |u: Vertex, v: Vertex| u < d.n() && v < d.n() && d.has_arc(u, v);
    let path_ok = |name: &str, p: &Dipath| -> Result<(), String> {
        if !p.is_simple() {
            return Err(format!("{name} repeats a vertex"));
        }
        if let Some((u, v)) = p.arcs().find(|&(u, v)| !has(u, v)) {
            return Err(format!("{name} uses absent arc ({u},{v})"));
        }
        Ok(())
    };
    let (p, q) = (gadget.p(), gadget.q());
    if p == q || !has(p, q) {
        return Err(format!("arc ({p},{q}) absent"));
    }
    match gadget {
        Gadget::Trivial { .. } => Ok(()),
        Gadget::TypeI { cycle, .. } => {
            path_ok("cycle", cycle)?;
            if cycle.vertices.len() < 2 || cycle.vertices[0] != p || cycle.vertices[1] != q {
                return Err("cycle does not start with the arc (p,q)".into());
            }
            if !has(cycle.last(), p) {
                return Err("cycle is not closed".into());
            }
            if cycle.vertices.len() < params.g {
                return Err(format!("cycle length {} below g = {}", cycle.vertices.len(), params.g));
            }
            Ok(())
        }
        Gadget::TypeIIBasic { r, p1, .. } | Gadget::TypeIIExtended { r, p1, .. } => {
            path_ok("P1", p1)?;
            if p1.first() != *r || p1.last() != p {
                return Err("P1 must run from r to p".into());
            }
            if p1.len() < params.ii_len() {
                return Err(format!("P1 too short: {} < {}", p1.len(), params.ii_len()));
            }
            if p1.contains(q) {
                return Err("q lies on P1".into());
            }
            if let Some(&v) = p1.vertices.iter().find(|&&v| !has(v, q)) {
                return Err(format!("P1 vertex {v} has no arc to q"));
            }
            if let Gadget::TypeIIExtended { p2, link, .. } = gadget {
                path_ok("P2", p2)?;
                if p2.len() < params.b {
                    return Err(format!("P2 too short: {} < {}", p2.len(), params.b));
                }
                if p2.last() != *r {
                    return Err("P2 must end at r".into());
                }
                if p2.vertices.iter().any(|&v| v != *r && p1.contains(v)) {
                    return Err("P1 and P2 share a vertex other than r".into());
                }
                if p2.contains(q) {
                    return Err("q lies on P2".into());
                }
                if let Link::BackArc(w) = link {
                    if w == r || !p1.contains(*w) {
                        return Err(format!("link vertex {w} not on P1 - r"));
                    }
                }
                let (u, v) = link_arc(p1, p2, *link);
                if !has(u, v) {
                    return Err(format!("link arc ({u},{v}) absent"));
                }
            }
            Ok(())
        }
        Gadget::TypeIII { r, p1, p2, .. } => {
            path_ok("P1", p1)?;
            path_ok("P2", p2)?;
            if p1.first() != p || p1.last() != *r || p2.first() != q || p2.last() != *r {
                return Err("P1 must run p -> r and P2 q -> r".into());
            }
            if p1.len() < params.iii_len() {
                return Err(format!("P1 too short: {} < {}", p1.len(), params.iii_len()));
            }
            if p2.len() < params.iii_len() {
                return Err(format!("P2 too short: {} < {}", p2.len(), params.iii_len()));
            }
            if p1.vertices.iter().any(|&v| v != *r && p2.contains(v)) {
                return Err("P1 and P2 are not internally disjoint".into());
            }
            Ok(())
        }
    }
}

/// The digraph formed by the arcs of the given gadgets.
pub fn gadget_union(gadgets: &[&Gadget]) -> Digraph {
    let arcs: Vec<Arc> = gadgets.iter().flat_map(|g| g.arcs()).collect();
    let n = arcs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    build_digraph(n, &arcs).expect("gadget arcs are loopless")
}

// ---- alternating paths ----

/// `q[i]` runs from `s[i]` to `t[i]`; `qp[i]` from `s[i+1]` to `t[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingPath {
    pub s: Vec<Vertex>,
    pub t: Vec<Vertex>,
    pub q: Vec<Dipath>,
    pub qp: Vec<Dipath>,
    pub strong: bool,
}

impl AlternatingPath {
    pub fn from_paths(q: Vec<Dipath>, qp: Vec<Dipath>, b: usize) -> Self {
        assert!(!q.is_empty() && qp.len() + 1 == q.len());
        let s = q.iter().map(Dipath::first).collect();
        let t = q.iter().map(Dipath::last).collect();
        let strong = q[0].len() >= b && q[q.len() - 1].len() >= b;
        AlternatingPath { s, t, q, qp, strong }
    }

    /// A single dipath as a `(1,b)`-alternating path.
    pub fn dipath(p: Dipath, b: usize) -> Self {
        AlternatingPath::from_paths(vec![p], vec![], b)
    }

    pub fn a(&self) -> usize {
        self.q.len()
    }

    pub fn first(&self) -> Vertex {
        self.s[0]
    }

    pub fn last(&self) -> Vertex {
        self.t[self.a() - 1]
    }

    /// Vertices in order along the underlying oriented path.
    pub fn sequence(&self) -> Vec<Vertex> {
        let mut seq = self.q[0].vertices.clone();
        for i in 0..self.qp.len() {
            seq.extend(self.qp[i].vertices.iter().rev().skip(1));
            seq.extend_from_slice(&self.q[i + 1].vertices[1..]);
        }
        seq
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.sequence().into_iter().collect()
    }

    pub fn arcs(&self) -> Vec<Arc> {
        self.q.iter().chain(&self.qp).flat_map(|p| p.arcs().collect::<Vec<_>>()).collect()
    }

    /// Replaces `Q_a` by `Q_a ∘ tail`.
    fn extend_last(&mut self, tail: &Dipath, b: usize) {
        let a = self.a();
        self.q[a - 1] = self.q[a - 1].concat(tail);
        *self = AlternatingPath::from_paths(std::mem::take(&mut self.q), std::mem::take(&mut self.qp), b);
    }

    /// Replaces `Q_1` by `head ∘ Q_1`.
    fn extend_first(&mut self, head: &Dipath, b: usize) {
        self.q[0] = head.concat(&self.q[0]);
        *self = AlternatingPath::from_paths(std::mem::take(&mut self.q), std::mem::take(&mut self.qp), b);
    }

    /// Checks the definition (and, given `d`, that all arcs exist).
    pub fn check(&self, b: usize, d: Option<&Digraph>) -> Result<(), String> {
        let a = self.q.len();
        if a == 0 || self.s.len() != a || self.t.len() != a || self.qp.len() + 1 != a {
            return Err("inconsistent sizes".into());
        }
        for i in 0..a {
            if self.q[i].first() != self.s[i] || self.q[i].last() != self.t[i] {
                return Err(format!("Q_{} does not run from s_{} to t_{}", i + 1, i + 1, i + 1));
            }
            if i > 0 && i + 1 < a && self.q[i].len() < b {
                return Err(format!("Q_{} shorter than {b}", i + 1));
            }
        }
        for i in 0..a - 1 {
            if self.qp[i].first() != self.s[i + 1] || self.qp[i].last() != self.t[i] {
                return Err(format!("Q'_{} does not run from s_{} to t_{}", i + 1, i + 2, i + 1));
            }
            if self.qp[i].len() < b {
                return Err(format!("Q'_{} shorter than {b}", i + 1));
            }
        }
        let strong = self.q[0].len() >= b && self.q[a - 1].len() >= b;
        if strong != self.strong {
            return Err(format!("strong flag is {} but should be {strong}", self.strong));
        }
        let seq = self.sequence();
        let mut seen = BTreeSet::new();
        if let Some(v) = seq.iter().find(|&&v| !seen.insert(v)) {
            return Err(format!("vertex {v} repeats along the path"));
        }
        if let Some(d) = d {
            for (u, v) in self.arcs() {
                if u >= d.n() || v >= d.n() || !d.has_arc(u, v) {
                    return Err(format!("arc absent: ({u},{v})"));
                }
            }
        }
        Ok(())
    }
}

/// The `(2,b)`-alternating path inside a type-I or type-II gadget with
/// `s_1 = t_1 = p` and `t_2 = q`.
pub fn base_alt_path(gadget: &Gadget, params: &CabParams) -> Result<AlternatingPath, GadgetError> {
    let b = params.b;
    match gadget {
        Gadget::TypeI { p, cycle, .. } => {
            let mut back = cycle.vertices[1..].to_vec();
            back.push(*p);
            let q_end = cycle.vertices[1];
            Ok(AlternatingPath::from_paths(vec![Dipath::trivial(*p), Dipath::trivial(q_end)], vec![Dipath::new(back)], b))
        }
        Gadget::TypeIIBasic { p, q, r, p1 } | Gadget::TypeIIExtended { p, q, r, p1, .. } => {
            Ok(AlternatingPath::from_paths(vec![Dipath::trivial(*p), Dipath::arc(*r, *q)], vec![p1.clone()], b))
        }
        g => Err(GadgetError::WrongKind(g.kind())),
    }
}

/// Shortest dipath over the gadget's own arcs from any of `sources` to any
/// of `targets`; ties go to the lowest ids.
fn gadget_bfs(gadget: &Gadget, sources: &[Vertex], targets: &[Vertex]) -> Option<Dipath> {
    let mut out: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for (u, v) in gadget.arcs() {
        out.entry(u).or_default().push(v);
    }
    let mut prev: HashMap<Vertex, Option<Vertex>> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut srcs = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    for &s in &srcs {
        prev.insert(s, None);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if targets.contains(&u) {
            let mut vs = vec![u];
            let mut c = u;
            while let Some(Some(p)) = prev.get(&c) {
                vs.push(*p);
                c = *p;
            }
            vs.reverse();
            return Some(Dipath::new(vs));
        }
        for &v in out.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(v) {
                e.insert(Some(u));
                queue.push_back(v);
            }
        }
    }
    None
}

/// Shortest dipath inside the gadget from `x` to `{p, q}`.
pub fn reach_pq(gadget: &Gadget, x: Vertex) -> Result<Dipath, GadgetError> {
    if gadget.kind() == GadgetKind::TypeIII {
        return Err(GadgetError::WrongKind(GadgetKind::TypeIII));
    }
    if !gadget.contains(x) {
        return Err(GadgetError::BadTarget(format!("{x} is not a gadget vertex")));
    }
    Ok(gadget_bfs(gadget, &[x], &[gadget.p(), gadget.q()]).expect("{p,q} reachable inside type I/II gadgets"))
}

/// Which construction produced an exit path of an extended type-II gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExitBranch {
    /// target on `P2`: `Q'_1 = P2[x,r] ∘ P1`
    OnSecondPath,
    FirstToSecond,
    BackArcFromP,
    /// `w` comes before the chosen target along `P1`
    BackArcBeforeTarget,
    /// the chosen target comes before `w`
    BackArcAfterTarget,
}

/// An alternating path with `1 <= a <= 2`, starting in `{p, q}` and ending
/// in `X`, meeting each of `{p, q}` and `X` once. `X` is either a nonempty
/// subset of `P1 - {p, r}` or a single vertex outside `{p, q}`.
pub fn extended_exit_path(gadget: &Gadget, x_set: &[Vertex], params: &CabParams) -> Result<AlternatingPath, GadgetError> {
    extended_exit_path_traced(gadget, x_set, params).map(|(r, _)| r)
}

pub fn extended_exit_path_traced(
    gadget: &Gadget,
    x_set: &[Vertex],
    params: &CabParams,
) -> Result<(AlternatingPath, ExitBranch), GadgetError> {
    let Gadget::TypeIIExtended { p, q, r, p1, p2, link } = gadget else {
        return Err(GadgetError::WrongKind(gadget.kind()));
    };
    let (p, q, r) = (*p, *q, *r);
    let b = params.b;
    if x_set.is_empty() {
        return Err(GadgetError::BadTarget("empty target set".into()));
    }
    if let [x] = x_set {
        if *x == p || *x == q || !gadget.contains(*x) {
            return Err(GadgetError::BadTarget(format!("{x} is p, q or outside the gadget")));
        }
        if p2.contains(*x) {
            let back = p2.sub(*x, r).concat(p1);
            let path = AlternatingPath::from_paths(vec![Dipath::trivial(p), Dipath::trivial(*x)], vec![back], b);
            return Ok((path, ExitBranch::OnSecondPath));
        }
    }
    if let Some(&x) = x_set.iter().find(|&&x| x == p || x == r || !p1.contains(x)) {
        return Err(GadgetError::BadTarget(format!("{x} is not on P1 - {{p, r}}")));
    }
    let in_x = |v: Vertex| x_set.contains(&v);
    let z = p2.first();
    let y = p1.vertices[1];
    // first target met walking P1 from y
    let first_from_y = || *p1.vertices[1..].iter().find(|&&v| in_x(v)).expect("X is nonempty");
    let rq = Dipath::arc(r, q);
    let res = match *link {
        Link::FirstToSecond => {
            let x = first_from_y();
            let q2 = Dipath::arc(z, y).concat(&p1.sub(y, x));
            (
                AlternatingPath::from_paths(vec![Dipath::trivial(q), q2], vec![p2.concat(&rq)], b),
                ExitBranch::FirstToSecond,
            )
        }
        Link::BackArc(w) if w == p => {
            let x = first_from_y();
            let path = Dipath::arc(p, z).concat(p2).concat(&p1.sub(r, x));
            (AlternatingPath::dipath(path, b), ExitBranch::BackArcFromP)
        }
        Link::BackArc(w) => {
            let pw = p1.position(w).unwrap();
            // closest target to w along P1, ties toward r
            let xp = *x_set
                .iter()
                .min_by_key(|&&x| {
                    let px = p1.position(x).unwrap();
                    (px.abs_diff(pw), px > pw)
                })
                .unwrap();
            let back = Dipath::arc(w, z).concat(p2).concat(&rq);
            if pw <= p1.position(xp).unwrap() {
                (
                    AlternatingPath::from_paths(vec![Dipath::trivial(q), p1.sub(w, xp)], vec![back], b),
                    ExitBranch::BackArcBeforeTarget,
                )
            } else {
                (
                    AlternatingPath::from_paths(
                        vec![Dipath::trivial(q), Dipath::trivial(xp)],
                        vec![p1.sub(xp, w).concat(&back)],
                        b,
                    ),
                    ExitBranch::BackArcAfterTarget,
                )
            }
        }
    };
    Ok(res)
}

// ---- chains ----

/// Spine `v_0..v_m` with gadgets on the arcs whose index (`i` for
/// `(v_i, v_{i+1})`) is a key of `gadgets`; all other spine arcs carry the
/// trivial gadget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub spine: Dipath,
    pub gadgets: BTreeMap<usize, Gadget>,
}

impl Chain {
    pub fn start(v: Vertex) -> Chain {
        Chain { spine: Dipath::trivial(v), gadgets: BTreeMap::new() }
    }

    /// Length of the spine.
    pub fn m(&self) -> usize {
        self.spine.len()
    }

    pub fn v(&self, i: usize) -> Vertex {
        self.spine.vertices[i]
    }

    pub fn last(&self) -> Vertex {
        self.spine.last()
    }

    pub fn a2_count(&self) -> usize {
        self.gadgets.len()
    }

    pub fn gadget(&self, i: usize) -> Gadget {
        self.gadgets.get(&i).cloned().unwrap_or(Gadget::Trivial { p: self.v(i), q: self.v(i + 1) })
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        let mut s: BTreeSet<Vertex> = self.spine.vertices.iter().copied().collect();
        for g in self.gadgets.values() {
            s.extend(g.vertices());
        }
        s
    }

    /// Indices `i` with `v` in the gadget on `(v_i, v_{i+1})`, trivial
    /// gadgets included.
    pub fn owners(&self, v: Vertex) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(i) = self.spine.position(v) {
            if i > 0 {
                out.push(i - 1);
            }
            if i < self.m() {
                out.push(i);
            }
        }
        for (&i, g) in &self.gadgets {
            if !out.contains(&i) && g.contains(v) {
                out.push(i);
            }
        }
        out.sort_unstable();
        out
    }

    /// The subchain on `v_i..v_j`.
    pub fn sub(&self, i: usize, j: usize) -> Chain {
        assert!(i <= j && j <= self.m());
        Chain {
            spine: Dipath::new(self.spine.vertices[i..=j].to_vec()),
            gadgets: self.gadgets.range(i..j).map(|(&k, g)| (k - i, g.clone())).collect(),
        }
    }

    /// Appends `path` (starting at the current end) to the spine; if given,
    /// `gadget` sits on the last arc of `path`.
    pub fn append(&mut self, path: &Dipath, gadget: Option<Gadget>) {
        self.spine = self.spine.concat(path);
        if let Some(g) = gadget {
            let i = self.m() - 1;
            assert_eq!((g.p(), g.q()), (self.v(i), self.v(i + 1)));
            self.gadgets.insert(i, g);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("chain serializes")
    }
}

/// Checks the chain definition against `d`.
pub fn validate_chain(d: &Digraph, chain: &Chain, params: &CabParams) -> Result<(), String> {
    if !chain.spine.valid_in(d) {
        return Err("spine is not a dipath of the host".into());
    }
    let spine: BTreeSet<Vertex> = chain.spine.vertices.iter().copied().collect();
    let mut owner: HashMap<Vertex, usize> = HashMap::new();
    for (&i, g) in &chain.gadgets {
        if i >= chain.m() {
            return Err(format!("gadget index {i} beyond spine"));
        }
        if !matches!(g.kind(), GadgetKind::TypeI | GadgetKind::TypeIIBasic | GadgetKind::TypeIII) {
            return Err(format!("gadget {i} has kind {:?}", g.kind()));
        }
        if (g.p(), g.q()) != (chain.v(i), chain.v(i + 1)) {
            return Err(format!("gadget {i} is not on its spine arc"));
        }
        validate_gadget(d, g, params).map_err(|e| format!("gadget {i}: {e}"))?;
        for v in g.vertices() {
            if spine.contains(&v) {
                if v != chain.v(i) && v != chain.v(i + 1) {
                    return Err(format!("gadget {i} meets the spine at {v}"));
                }
            } else if let Some(j) = owner.insert(v, i) {
                return Err(format!("gadgets {j} and {i} share vertex {v}"));
            }
        }
    }
    Ok(())
}

/// A strong `(a,b)`-alternating path inside the chain from `v_0` to `v_m`.
pub fn chain_alt_path(chain: &Chain, a: usize, b: usize) -> Result<AlternatingPath, GadgetError> {
    let need = (a * (b + 1)).saturating_sub(1).max(b);
    if a == 0 || chain.a2_count() < need {
        return Err(GadgetError::ChainTooPoor { have: chain.a2_count(), need });
    }
    let params = CabParams::new(a, b)?;
    let r = chain_alt_rec(chain, chain.m(), a, &params);
    debug_assert_eq!(r.check(b, None), Ok(()));
    debug_assert!(r.strong && r.first() == chain.v(0) && r.last() == chain.last());
    Ok(r)
}

fn chain_alt_rec(chain: &Chain, end: usize, a: usize, params: &CabParams) -> AlternatingPath {
    let b = params.b;
    let spine_to_end = |from: usize| Dipath::new(chain.spine.vertices[from..=end].to_vec());
    if a == 1 {
        return AlternatingPath::dipath(spine_to_end(0), b);
    }
    let j = *chain.gadgets.range(..end - b).next_back().map(|(j, _)| j).expect("enough gadget arcs");
    let prev = chain_alt_rec(chain, j, a - 1, params);
    let (mut q, mut qp) = (prev.q, prev.qp);
    match &chain.gadgets[&j] {
        g @ (Gadget::TypeI { .. } | Gadget::TypeIIBasic { .. } | Gadget::TypeIIExtended { .. }) => {
            let r0 = base_alt_path(g, params).expect("type I/II");
            qp.push(r0.qp[0].clone());
            q.push(r0.q[1].concat(&spine_to_end(j + 1)));
        }
        Gadget::TypeIII { p1, p2, .. } => {
            let last = q.len() - 1;
            q[last] = q[last].concat(p1);
            qp.push(p2.clone());
            q.push(spine_to_end(j + 1));
        }
        Gadget::Trivial { .. } => unreachable!("trivial gadgets are not stored"),
    }
    AlternatingPath::from_paths(q, qp, b)
}

/// Joins two strong alternating paths, `R1` ending where `R2` starts and
/// vice versa, into a `C_{a1+a2-2, b}` certificate.
pub fn join_alt_paths(r1: &AlternatingPath, r2: &AlternatingPath, b: usize) -> Result<SubdivisionCertificate, GadgetError> {
    let a = r1.a() + r2.a();
    if a < 3 || (a == 3 && b == 1) {
        return Err(GadgetError::DegeneratePattern(format!("cab({},{b})", a.saturating_sub(2))));
    }
    let a = a - 2;
    for (name, r) in [("R1", r1), ("R2", r2)] {
        r.check(b, None).map_err(|e| GadgetError::OverlapViolation(format!("{name}: {e}")))?;
        if !r.strong {
            return Err(GadgetError::EndpointMismatch(format!("{name} is not strong")));
        }
    }
    if r1.first() != r2.last() || r2.first() != r1.last() {
        return Err(GadgetError::EndpointMismatch("paths do not close up".into()));
    }
    let shared: Vec<Vertex> = r1.vertex_set().intersection(&r2.vertex_set()).copied().collect();
    let mut joints = vec![r1.first(), r1.last()];
    joints.sort_unstable();
    if shared != joints {
        return Err(GadgetError::OverlapViolation(format!("shared vertices {shared:?}")));
    }
    // cyclic list of (dipath, forward) segments, merged into maximal blocks
    let mut segs: Vec<(Dipath, bool)> = Vec::new();
    for r in [r1, r2] {
        segs.push((r.q[0].clone(), true));
        for i in 0..r.qp.len() {
            segs.push((r.qp[i].clone(), false));
            segs.push((r.q[i + 1].clone(), true));
        }
    }
    let start = segs.iter().position(|s| !s.1).expect("a >= 1 gives a backward block");
    segs.rotate_left(start);
    let mut blocks: Vec<(Dipath, bool)> = Vec::new();
    for (p, fwd) in segs {
        match blocks.last_mut() {
            Some((last, true)) if fwd => *last = last.concat(&p),
            _ => blocks.push((p, fwd)),
        }
    }
    assert_eq!(blocks.len(), 2 * a);
    let host: Vec<Dipath> = blocks.into_iter().map(|(p, _)| p).collect();
    if let Some(p) = host.iter().find(|p| p.len() < b) {
        return Err(GadgetError::EndpointMismatch(format!("block of length {} < {b}", p.len())));
    }
    let cert = path_system_certificate(&pattern_cab_paths(a, b), &host);
    let arcs: Vec<Arc> = r1.arcs().into_iter().chain(r2.arcs()).collect();
    let n = arcs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let union = build_digraph(n, &arcs).expect("loopless");
    Ok(checked(&union, &pattern_cab(a, b).expect("a >= 2 or b >= 2"), cert))
}

/// Which proof case produced a gadget-intersection path, and on which side
/// of a type-III gadget it was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntersectionCase {
    /// `G` trivial, type I or type II.
    Reach,
    /// `G` type III meeting `P1*` far from `{p, q}`.
    Far { side: Side },
    /// `G` type III missing `P2*`; `side` is `None` when the exit path
    /// already ends in `{p, q}`.
    MissesSecond { side: Option<Side> },
    /// `G` type III meeting `P2*`.
    MeetsSecond { side: Side },
    /// The direct construction met `{p, q}` or `{p*, q*}` twice; found by
    /// bounded search instead.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

/// For a gadget `G` meeting an extended type-II gadget `G*` that avoids
/// `p(G*)` and `q(G*)`: an alternating path with `1 <= a <= 3` from
/// `{p*, q*}` to `{p, q}` meeting each pair once.
pub fn gadget_intersection_path(g: &Gadget, gstar: &Gadget, params: &CabParams) -> Result<AlternatingPath, GadgetError> {
    gadget_intersection_path_traced(g, gstar, params).map(|(r, _)| r)
}

pub fn gadget_intersection_path_traced(
    g: &Gadget,
    gstar: &Gadget,
    params: &CabParams,
) -> Result<(AlternatingPath, IntersectionCase), GadgetError> {
    let Gadget::TypeIIExtended { p: ps, q: qs, p1: p1s, p2: p2s, .. } = gstar else {
        return Err(GadgetError::BadStar(format!("kind {:?}", gstar.kind())));
    };
    let (ps, qs) = (*ps, *qs);
    let b = params.b;
    let union = gadget_union(&[g, gstar]);
    validate_gadget(&union, gstar, params).map_err(GadgetError::BadStar)?;
    validate_gadget(&union, g, params).map_err(GadgetError::BadGadget)?;
    let vg = g.vertices();
    let in_g = |v: Vertex| vg.binary_search(&v).is_ok();
    if in_g(ps) || in_g(qs) {
        return Err(GadgetError::BadStar("p* or q* lies in G".into()));
    }
    let common: Vec<Vertex> = gstar.vertices().into_iter().filter(|&v| in_g(v)).collect();
    if common.is_empty() {
        return Err(GadgetError::Disjoint);
    }
    let (p, q) = (g.p(), g.q());
    let (res, case) = match g {
        Gadget::TypeIII { r, p1, p2, .. } => {
            let r = *r;
            let dist = |x: Vertex| -> usize {
                if x == r {
                    p1.len().min(p2.len())
                } else {
                    p1.position(x).or_else(|| p2.position(x)).unwrap()
                }
            };
            // side of G holding x, r counted on P1
            let side_of = |x: Vertex| if p1.contains(x) { Side::First } else { Side::Second };
            let from_branch = |x: Vertex| match side_of(x) {
                Side::First => p1.sub(p, x),
                Side::Second => p2.sub(q, x),
            };
            if let Some(&x) = p1s.vertices.iter().find(|&&x| in_g(x) && dist(x) + 1 >= b) {
                let path = from_branch(x).concat(&Dipath::arc(x, qs));
                let start = path.first();
                (
                    AlternatingPath::from_paths(vec![Dipath::trivial(qs), Dipath::trivial(start)], vec![path], b),
                    IntersectionCase::Far { side: side_of(x) },
                )
            } else if !p2s.vertices.iter().any(|&v| in_g(v)) {
                let (mut rstar, _) = extended_exit_path_traced(gstar, &common, params)?;
                let x = rstar.last();
                if x == p || x == q {
                    (rstar, IntersectionCase::MissesSecond { side: None })
                } else {
                    let side = side_of(x);
                    let (tail, back, end) = match side {
                        Side::First => (p1.sub(x, r), p2.clone(), q),
                        Side::Second => (p2.sub(x, r), p1.clone(), p),
                    };
                    rstar.extend_last(&tail, b);
                    let mut qv = rstar.q;
                    let mut qpv = rstar.qp;
                    qpv.push(back);
                    qv.push(Dipath::trivial(end));
                    (AlternatingPath::from_paths(qv, qpv, b), IntersectionCase::MissesSecond { side: Some(side) })
                }
            } else {
                let iw = (0..p2s.vertices.len()).rev().find(|&i| in_g(p2s.vertices[i])).unwrap();
                let pstar = Dipath::new(p2s.vertices[iw..].to_vec()).concat(p1s);
                let mut starts: Vec<usize> = vec![0];
                starts.extend((1..pstar.vertices.len()).filter(|&i| in_g(pstar.vertices[i])));
                starts.push(pstar.vertices.len());
                let comp = starts
                    .windows(2)
                    .map(|w| &pstar.vertices[w[0]..w[1]])
                    .find(|c| c.len() > b)
                    .ok_or_else(|| GadgetError::BadStar("no long segment of P* outside G".into()))?;
                let mut rs_path = Dipath::new(comp.to_vec());
                if rs_path.last() != ps {
                    rs_path = rs_path.concat(&Dipath::arc(rs_path.last(), qs));
                }
                let u = rs_path.first();
                let side = side_of(u);
                let path = from_branch(u).concat(&rs_path);
                let (end, start) = (path.last(), path.first());
                (
                    AlternatingPath::from_paths(vec![Dipath::trivial(end), Dipath::trivial(start)], vec![path], b),
                    IntersectionCase::MeetsSecond { side },
                )
            }
        }
        _ => {
            let path = gadget_bfs(g, &common, &[p, q]).expect("{p,q} reachable in G");
            let x = path.first();
            let mut rstar = extended_exit_path(gstar, &[x], params)?;
            rstar.extend_last(&path, b);
            (rstar, IntersectionCase::Reach)
        }
    };
    let ok = |r: &AlternatingPath| {
        let vs = r.vertex_set();
        r.check(b, Some(&union)).is_ok()
            && (1..=3).contains(&r.a())
            && (r.last() == p || r.last() == q)
            && (r.first() == ps || r.first() == qs)
            && vs.contains(&p) as u8 + vs.contains(&q) as u8 == 1
            && vs.contains(&ps) as u8 + vs.contains(&qs) as u8 == 1
    };
    if ok(&res) {
        return Ok((res, case));
    }
    // Reach can fail when both p and q lie in G*: the exit path to x may
    // pass through the other one.
    let found = search_alt_path(&union, &[ps, qs], &[p, q], 3, b, SEARCH_NODES)
        .ok_or_else(|| GadgetError::NoAlternatingPath(format!("{case:?} construction invalid, search failed")))?;
    debug_assert!(ok(&found));
    Ok((found, IntersectionCase::Search))
}

const SEARCH_NODES: usize = 1_000_000;

/// Depth-first search in `h` for an alternating path with at most `max_a`
/// forward blocks, starting at one of `starts`, ending at one of `ends`,
/// meeting each set once, with backward blocks of length at least `b`.
fn search_alt_path(h: &Digraph, starts: &[Vertex], ends: &[Vertex], max_a: usize, b: usize, nodes: usize) -> Option<AlternatingPath> {
    struct Dfs<'a> {
        h: &'a Digraph,
        ends: &'a [Vertex],
        max_a: usize,
        b: usize,
        left: usize,
        on: Vec<bool>,
        seq: Vec<Vertex>,
        fwd: Vec<bool>,
    }
    impl Dfs<'_> {
        // `back_runs` counts finished and current backward runs; `run` is
        // the length of the current backward run (0 when moving forward)
        fn go(&mut self, back_runs: usize, run: usize) -> bool {
            if self.left == 0 {
                return false;
            }
            self.left -= 1;
            let c = *self.seq.last().unwrap();
            if self.ends.contains(&c) {
                return run == 0 || run >= self.b;
            }
            let can_fwd = run == 0 || run >= self.b;
            let can_back = run > 0 || back_runs < self.max_a - 1;
            let outs: Vec<Vertex> = if can_fwd { self.h.out(c).to_vec() } else { Vec::new() };
            for v in outs {
                if self.on[v] {
                    continue;
                }
                self.step(v, true);
                if self.go(back_runs, 0) {
                    return true;
                }
                self.undo();
            }
            let ins: Vec<Vertex> = if can_back { self.h.inn(c).to_vec() } else { Vec::new() };
            for v in ins {
                if self.on[v] {
                    continue;
                }
                self.step(v, false);
                let br = if run == 0 { back_runs + 1 } else { back_runs };
                if self.go(br, run + 1) {
                    return true;
                }
                self.undo();
            }
            false
        }

        fn step(&mut self, v: Vertex, f: bool) {
            self.on[v] = true;
            self.seq.push(v);
            self.fwd.push(f);
        }

        fn undo(&mut self) {
            let v = self.seq.pop().unwrap();
            self.fwd.pop();
            self.on[v] = false;
        }
    }
    for &s in starts {
        let mut dfs = Dfs { h, ends, max_a, b, left: nodes, on: vec![false; h.n()], seq: vec![s], fwd: vec![], };
        for &t in starts {
            dfs.on[t] = true;
        }
        if dfs.go(0, 0) {
            // split the walk into forward and backward runs
            let mut q: Vec<Dipath> = Vec::new();
            let mut qp: Vec<Dipath> = Vec::new();
            let mut cur = vec![dfs.seq[0]];
            let mut cur_fwd = true;
            for (i, &f) in dfs.fwd.iter().enumerate() {
                let v = dfs.seq[i + 1];
                if f != cur_fwd {
                    let last = *cur.last().unwrap();
                    if cur_fwd {
                        q.push(Dipath::new(std::mem::replace(&mut cur, vec![last])));
                    } else {
                        cur.reverse();
                        qp.push(Dipath::new(std::mem::replace(&mut cur, vec![last])));
                    }
                    cur_fwd = f;
                }
                cur.push(v);
            }
            if cur_fwd {
                q.push(Dipath::new(cur));
            } else {
                let last = *cur.last().unwrap();
                cur.reverse();
                qp.push(Dipath::new(cur));
                q.push(Dipath::trivial(last));
            }
            return Some(AlternatingPath::from_paths(q, qp, b));
        }
    }
    None
}

/// How a chain closes on itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    /// The spine end has an arc to `x`, a vertex of the first gadget.
    Condition1 { x: Vertex },
    /// The spine end has an arc to `zstar` outside the chain, and `gstar`
    /// is an extended type-II gadget on that arc meeting the chain only in
    /// the first gadget and the spine end.
    Condition2 { zstar: Vertex, gstar: Gadget },
}

/// Turns a rich enough chain with a closure into a `C_{a,b}` certificate.
pub fn close_chain(d: &Digraph, chain: &Chain, closure: &Closure, params: &CabParams) -> Result<SubdivisionCertificate, GadgetError> {
    let (a, b) = (params.a, params.b);
    if a < 2 {
        return Err(GadgetError::DegeneratePattern(format!("cab({a},{b})")));
    }
    let need = params.close_threshold();
    if chain.a2_count() < need {
        return Err(GadgetError::ChainTooPoor { have: chain.a2_count(), need });
    }
    validate_chain(d, chain, params).map_err(GadgetError::InvalidChain)?;
    let l = chain.m();
    let zl = chain.last();
    let g = chain.gadget(0);
    let (z0, z1) = (chain.v(0), chain.v(1));
    let rstar = match closure {
        Closure::Condition1 { x } => {
            let x = *x;
            if !g.contains(x) {
                return Err(GadgetError::ClosureInvalid(format!("{x} is not in the first gadget")));
            }
            if !d.has_arc(zl, x) {
                return Err(GadgetError::ClosureInvalid(format!("arc ({zl},{x}) absent")));
            }
            let into = Dipath::arc(zl, x);
            if x == z0 || x == z1 {
                AlternatingPath::dipath(into, b)
            } else if let Gadget::TypeIII { r, p1, p2, .. } = &g {
                let (own, other) = if p1.contains(x) { (p1, p2) } else { (p2, p1) };
                let q1 = into.concat(&own.sub(x, *r));
                AlternatingPath::from_paths(vec![q1, Dipath::trivial(other.first())], vec![other.clone()], b)
            } else {
                AlternatingPath::dipath(into.concat(&reach_pq(&g, x)?), b)
            }
        }
        Closure::Condition2 { zstar, gstar } => {
            let zs = *zstar;
            let cv = chain.vertex_set();
            if cv.contains(&zs) {
                return Err(GadgetError::ClosureInvalid(format!("{zs} lies on the chain")));
            }
            if gstar.kind() != GadgetKind::TypeIIExtended || gstar.p() != zl || gstar.q() != zs {
                return Err(GadgetError::ClosureInvalid("G* must be extended type II on (z_l, z*)".into()));
            }
            validate_gadget(d, gstar, params).map_err(GadgetError::ClosureInvalid)?;
            let gv = g.vertices();
            let sv = gstar.vertices();
            if !sv.iter().any(|v| gv.binary_search(v).is_ok()) {
                return Err(GadgetError::ClosureInvalid("G* misses the first gadget".into()));
            }
            if let Some(v) = sv.iter().find(|&&v| cv.contains(&v) && v != zl && gv.binary_search(&v).is_err()) {
                return Err(GadgetError::ClosureInvalid(format!("G* meets the chain at {v}")));
            }
            gadget_intersection_path(&g, gstar, params)?
        }
    };
    let a1 = rstar.a();
    let mut r1 = rstar;
    let mut head = Dipath::new(chain.spine.vertices[l - b..].to_vec());
    if r1.first() != zl {
        head = head.concat(&Dipath::arc(zl, r1.first()));
    }
    r1.extend_first(&head, b);
    let ti = chain.spine.position(r1.last()).unwrap();
    r1.extend_last(&Dipath::new(chain.spine.vertices[ti..=b + 1].to_vec()), b);
    let a2 = a + 2 - a1;
    let r2 = chain_alt_path(&chain.sub(b + 1, l - b), a2, b)?;
    let cert = join_alt_paths(&r1, &r2, b)?;
    Ok(checked(d, &pattern_cab(a, b).expect("a >= 2"), cert))
}
