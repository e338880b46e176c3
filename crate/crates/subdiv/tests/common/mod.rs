//! Random gadget, chain and closure fixtures shared by the gadget tests and
//! the acceptance suite. Vertex ids are drawn at random from `0..CAP`.

#![allow(dead_code)]

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use subdiv::digraph::{build_digraph, Arc, Digraph, Dipath, Vertex};
use subdiv::gadget::{CabParams, Chain, Closure, Gadget, Link};
use subdiv::random::rng;

pub const CAP: usize = 8192;

pub struct Fx {
    pub rng: ChaCha8Rng,
    used: HashSet<Vertex>,
}

impl Fx {
    pub fn new(seed: u64) -> Self {
        Fx { rng: rng(seed), used: HashSet::new() }
    }

    pub fn fresh(&mut self) -> Vertex {
        loop {
            let v = self.rng.gen_range(0..CAP);
            if self.used.insert(v) {
                return v;
            }
        }
    }

    pub fn fresh_n(&mut self, k: usize) -> Vec<Vertex> {
        (0..k).map(|_| self.fresh()).collect()
    }

    pub fn extra(&mut self) -> usize {
        self.rng.gen_range(0..3)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }
}

pub fn host(arcs: &[Arc]) -> Digraph {
    build_digraph(CAP, arcs).unwrap()
}

pub fn type_i(fx: &mut Fx, p: Vertex, q: Vertex, params: &CabParams) -> Gadget {
    let len = params.g + fx.extra();
    let mut cycle = vec![p, q];
    cycle.extend(fx.fresh_n(len - 2));
    Gadget::TypeI { p, q, cycle: Dipath::new(cycle) }
}

/// `P1` from `r` to `p` with at least `min_len` arcs.
fn first_path(fx: &mut Fx, p: Vertex, min_len: usize) -> Dipath {
    let len = min_len + fx.extra();
    let mut vs = fx.fresh_n(len);
    vs.push(p);
    Dipath::new(vs)
}

pub fn type_ii_basic(fx: &mut Fx, p: Vertex, q: Vertex, params: &CabParams) -> Gadget {
    let p1 = first_path(fx, p, params.ii_len());
    Gadget::TypeIIBasic { p, q, r: p1.first(), p1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    FirstToSecond,
    FromP,
    /// back arc from a vertex of `P1 - {p, r}`
    Inner,
}

pub fn type_ii_extended(fx: &mut Fx, p: Vertex, q: Vertex, params: &CabParams, link: LinkKind) -> Gadget {
    let min = if link == LinkKind::Inner { params.ii_len().max(2) } else { params.ii_len() };
    let p1 = first_path(fx, p, min);
    let r = p1.first();
    let len2 = params.b + fx.extra();
    let mut p2 = fx.fresh_n(len2);
    p2.push(r);
    let link = match link {
        LinkKind::FirstToSecond => Link::FirstToSecond,
        LinkKind::FromP => Link::BackArc(p),
        LinkKind::Inner => Link::BackArc(p1.vertices[fx.rng.gen_range(1..p1.vertices.len() - 1)]),
    };
    Gadget::TypeIIExtended { p, q, r, p1, p2: Dipath::new(p2), link }
}

pub fn type_iii(fx: &mut Fx, p: Vertex, q: Vertex, params: &CabParams) -> Gadget {
    let r = fx.fresh();
    let mut p1 = vec![p];
    let l1 = params.iii_len() + fx.extra() - 1;
    p1.extend(fx.fresh_n(l1));
    p1.push(r);
    let mut p2 = vec![q];
    let l2 = params.iii_len() + fx.extra() - 1;
    p2.extend(fx.fresh_n(l2));
    p2.push(r);
    Gadget::TypeIII { p, q, r, p1: Dipath::new(p1), p2: Dipath::new(p2) }
}

/// A gadget of a kind allowed on a chain, chosen at random.
pub fn chain_gadget(fx: &mut Fx, p: Vertex, q: Vertex, params: &CabParams) -> Gadget {
    match fx.rng.gen_range(0..3) {
        0 => type_i(fx, p, q, params),
        1 => type_ii_basic(fx, p, q, params),
        _ => type_iii(fx, p, q, params),
    }
}

pub fn relabel(g: &Gadget, f: &impl Fn(Vertex) -> Vertex) -> Gadget {
    let m = |p: &Dipath| Dipath::new(p.vertices.iter().map(|&v| f(v)).collect());
    let link_map = |l: &Link| match *l {
        Link::FirstToSecond => Link::FirstToSecond,
        Link::BackArc(w) => Link::BackArc(f(w)),
    };
    match g {
        Gadget::Trivial { p, q } => Gadget::Trivial { p: f(*p), q: f(*q) },
        Gadget::TypeI { p, q, cycle } => Gadget::TypeI { p: f(*p), q: f(*q), cycle: m(cycle) },
        Gadget::TypeIIBasic { p, q, r, p1 } => Gadget::TypeIIBasic { p: f(*p), q: f(*q), r: f(*r), p1: m(p1) },
        Gadget::TypeIIExtended { p, q, r, p1, p2, link } => {
            Gadget::TypeIIExtended { p: f(*p), q: f(*q), r: f(*r), p1: m(p1), p2: m(p2), link: link_map(link) }
        }
        Gadget::TypeIII { p, q, r, p1, p2 } => Gadget::TypeIII { p: f(*p), q: f(*q), r: f(*r), p1: m(p1), p2: m(p2) },
    }
}

/// Replaces the vertices in `from` by the matching ones in `to`.
pub fn substitute(g: &Gadget, from: &[Vertex], to: &[Vertex]) -> Gadget {
    relabel(g, &|v| from.iter().position(|&x| x == v).map_or(v, |i| to[i]))
}

/// Distance of a type-III vertex from `{p, q}` along its own path.
pub fn iii_dist(g: &Gadget, x: Vertex) -> usize {
    let Gadget::TypeIII { r, p1, p2, .. } = g else { panic!("type III expected") };
    if x == *r {
        p1.len().min(p2.len())
    } else {
        p1.position(x).or_else(|| p2.position(x)).unwrap()
    }
}

/// A random chain with at least `gadgets` gadget arcs and a few trivial
/// arcs in between, plus its host arcs. The first arc is trivial with
/// probability `trivial_first`.
pub fn random_chain(fx: &mut Fx, params: &CabParams, gadgets: usize, trivial_first: f64) -> (Chain, Vec<Arc>) {
    let mut chain = Chain::start(fx.fresh());
    let first_trivial = fx.rng.gen_bool(trivial_first);
    let mut count = 0;
    let mut first = true;
    while count < gadgets {
        let trivial = if first { first_trivial } else { fx.rng.gen_bool(0.3) };
        first = false;
        let p = chain.last();
        let q = fx.fresh();
        let g = (!trivial).then(|| chain_gadget(fx, p, q, params));
        count += g.is_some() as usize;
        chain.append(&Dipath::arc(p, q), g);
    }
    for _ in 0..fx.rng.gen_range(0..3) {
        let p = chain.last();
        let q = fx.fresh();
        chain.append(&Dipath::arc(p, q), None);
    }
    let arcs = chain_arcs(&chain);
    (chain, arcs)
}

pub fn chain_arcs(chain: &Chain) -> Vec<Arc> {
    let mut arcs: Vec<Arc> = chain.spine.arcs().collect();
    for i in 0..chain.m() {
        arcs.extend(chain.gadget(i).arcs());
    }
    arcs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Want {
    Reach,
    Far,
    MissesSecond,
    MeetsSecond,
}

/// An extended type-II gadget `G*` and a gadget `G` meeting it away from
/// `p*` and `q*`, shaped to land in the requested proof case.
pub fn intersecting_pair(fx: &mut Fx, params: &CabParams, want: Want) -> (Gadget, Gadget) {
    let b = params.b;
    let (ps, qs) = (fx.fresh(), fx.fresh());
    let link = *[LinkKind::FirstToSecond, LinkKind::FromP, LinkKind::Inner].choose(&mut fx.rng).unwrap();
    let gstar = type_ii_extended(fx, ps, qs, params, link);
    let Gadget::TypeIIExtended { r: rs, p1: p1s, p2: p2s, .. } = &gstar else { unreachable!() };
    let star_p1: Vec<Vertex> = p1s.vertices.iter().copied().filter(|&v| v != ps).collect();
    let star_p1_only: Vec<Vertex> = star_p1.iter().copied().filter(|v| v != rs).collect();
    let star_p2: Vec<Vertex> = p2s.vertices.iter().copied().filter(|v| v != rs).collect();
    let star_all: Vec<Vertex> = gstar.vertices().into_iter().filter(|&v| v != ps && v != qs).collect();
    let (p, q) = (fx.fresh(), fx.fresh());
    let (g, from, to) = match want {
        Want::Reach => {
            let g = match fx.rng.gen_range(0..3) {
                0 => Gadget::Trivial { p, q },
                1 => type_i(fx, p, q, params),
                _ => type_ii_basic(fx, p, q, params),
            };
            let gv = g.vertices();
            let k = fx.rng.gen_range(1..=gv.len().min(3));
            let from: Vec<Vertex> = gv.choose_multiple(&mut fx.rng, k).copied().collect();
            let to: Vec<Vertex> = star_all.choose_multiple(&mut fx.rng, k).copied().collect();
            (g, from, to)
        }
        Want::Far => {
            let g = type_iii(fx, p, q, params);
            let far: Vec<Vertex> = g.vertices().into_iter().filter(|&x| iii_dist(&g, x) + 1 >= b).collect();
            let mut from = vec![*far.choose(&mut fx.rng).unwrap()];
            let mut to = vec![*star_p1.choose(&mut fx.rng).unwrap()];
            if fx.coin() {
                let x = *g.vertices().choose(&mut fx.rng).unwrap();
                let y = *star_all.choose(&mut fx.rng).unwrap();
                if !from.contains(&x) && !to.contains(&y) {
                    from.push(x);
                    to.push(y);
                }
            }
            (g, from, to)
        }
        Want::MissesSecond | Want::MeetsSecond => {
            let g = type_iii(fx, p, q, params);
            let near: Vec<Vertex> = g.vertices().into_iter().filter(|&x| iii_dist(&g, x) + 2 <= b).collect();
            let k = fx.rng.gen_range(usize::from(want == Want::MissesSecond)..=near.len().min(2));
            let mut from: Vec<Vertex> = near.choose_multiple(&mut fx.rng, k).copied().collect();
            let mut to: Vec<Vertex> = star_p1_only.choose_multiple(&mut fx.rng, k).copied().collect();
            if want == Want::MeetsSecond {
                let rest: Vec<Vertex> = g.vertices().into_iter().filter(|x| !from.contains(x)).collect();
                let k2 = fx.rng.gen_range(1..=2.min(star_p2.len()));
                from.extend(rest.choose_multiple(&mut fx.rng, k2));
                to.extend(star_p2.choose_multiple(&mut fx.rng, k2));
            }
            (g, from, to)
        }
    };
    (substitute(&g, &from, &to), gstar)
}

/// A chain rich enough to close together with a closure and the host arcs
/// that realise it.
pub fn closable_chain(fx: &mut Fx, params: &CabParams, condition: u8) -> (Chain, Closure, Vec<Arc>) {
    let target = params.close_threshold() + fx.extra();
    let (chain, mut arcs) = random_chain(fx, params, target, 0.15);
    let zl = chain.last();
    let g0 = chain.gadget(0);
    if condition == 1 {
        let x = *g0.vertices().choose(&mut fx.rng).unwrap();
        arcs.push((zl, x));
        return (chain, Closure::Condition1 { x }, arcs);
    }
    let zs = fx.fresh();
    let link = *[LinkKind::FirstToSecond, LinkKind::FromP, LinkKind::Inner].choose(&mut fx.rng).unwrap();
    let gstar = type_ii_extended(fx, zl, zs, params, link);
    let star: Vec<Vertex> = gstar.vertices().into_iter().filter(|&v| v != zl && v != zs).collect();
    let g0v = g0.vertices();
    let k = fx.rng.gen_range(1..=3.min(g0v.len()));
    let from: Vec<Vertex> = star.choose_multiple(&mut fx.rng, k).copied().collect();
    let to: Vec<Vertex> = g0v.choose_multiple(&mut fx.rng, k).copied().collect();
    let gstar = substitute(&gstar, &from, &to);
    arcs.extend(gstar.arcs());
    (chain, Closure::Condition2 { zstar: zs, gstar }, arcs)
}

// ---- per-operation fixture runners: Ok(label of the branch taken) or Err ----

use subdiv::cab::embed_gadget_iii;
use subdiv::digraph::pattern_cab;
use subdiv::gadget::{
    base_alt_path, chain_alt_path, close_chain, extended_exit_path_traced, gadget_intersection_path_traced, gadget_union,
    validate_chain, validate_gadget, AlternatingPath,
};
use subdiv::oracle::validate_certificate;

fn meets_once(r: &AlternatingPath, set: &[Vertex]) -> bool {
    let vs = r.vertex_set();
    set.iter().filter(|v| vs.contains(v)).count() == 1
}

pub fn params_for(fx: &mut Fx, a_range: std::ops::RangeInclusive<usize>, b_range: std::ops::RangeInclusive<usize>) -> CabParams {
    let a = fx.rng.gen_range(a_range);
    let b = fx.rng.gen_range(b_range);
    CabParams::new(a, b).unwrap()
}

pub fn run_base(seed: u64) -> Result<String, String> {
    let mut fx = Fx::new(seed);
    let params = params_for(&mut fx, 2..=2, 1..=3);
    let (p, q) = (fx.fresh(), fx.fresh());
    let g = match seed % 3 {
        0 => type_i(&mut fx, p, q, &params),
        1 => type_ii_basic(&mut fx, p, q, &params),
        _ => type_ii_extended(&mut fx, p, q, &params, LinkKind::FirstToSecond),
    };
    let d = gadget_union(&[&g]);
    validate_gadget(&d, &g, &params)?;
    let r = base_alt_path(&g, &params).map_err(|e| e.to_string())?;
    r.check(params.b, Some(&d))?;
    if r.a() != 2 || r.s[0] != p || r.t[0] != p || r.t[1] != q {
        return Err(format!("wrong shape: s={:?} t={:?}", r.s, r.t));
    }
    Ok(format!("{:?}", g.kind()))
}

pub fn run_exit(seed: u64) -> Result<String, String> {
    let mut fx = Fx::new(seed);
    let params = params_for(&mut fx, 2..=2, 1..=3);
    let (p, q) = (fx.fresh(), fx.fresh());
    let branch = seed % 5;
    let link = match branch {
        0 | 1 => LinkKind::FirstToSecond,
        2 => LinkKind::FromP,
        _ => LinkKind::Inner,
    };
    let mut g = type_ii_extended(&mut fx, p, q, &params, link);
    if link == LinkKind::FirstToSecond && branch == 1 && params.ii_len() < 2 {
        g = type_ii_extended(&mut fx, p, q, &params, LinkKind::Inner);
        if let Gadget::TypeIIExtended { link, .. } = &mut g {
            *link = Link::FirstToSecond;
        }
    }
    let Gadget::TypeIIExtended { r, p1, p2, link, .. } = &g else { unreachable!() };
    let inner: Vec<Vertex> = p1.vertices.iter().copied().filter(|&v| v != p && v != *r).collect();
    let x_set: Vec<Vertex> = if branch == 0 || inner.is_empty() {
        let on_p2: Vec<Vertex> = p2.vertices.iter().copied().filter(|v| v != r).collect();
        vec![*on_p2.choose(&mut fx.rng).unwrap()]
    } else if let (Link::BackArc(w), 3 | 4) = (link, branch) {
        // put targets on the requested side of w
        let pw = p1.position(*w).unwrap();
        let side: Vec<Vertex> = inner
            .iter()
            .copied()
            .filter(|&x| if branch == 3 { p1.position(x).unwrap() >= pw } else { p1.position(x).unwrap() < pw })
            .collect();
        let pool = if side.is_empty() { &inner } else { &side };
        let k = fx.rng.gen_range(1..=pool.len().min(3));
        pool.choose_multiple(&mut fx.rng, k).copied().collect()
    } else {
        let k = fx.rng.gen_range(1..=inner.len().min(3));
        inner.choose_multiple(&mut fx.rng, k).copied().collect()
    };
    let d = gadget_union(&[&g]);
    validate_gadget(&d, &g, &params)?;
    let (res, how) = extended_exit_path_traced(&g, &x_set, &params).map_err(|e| e.to_string())?;
    res.check(params.b, Some(&d))?;
    if !(1..=2).contains(&res.a()) {
        return Err(format!("a = {}", res.a()));
    }
    if !(res.first() == p || res.first() == q) || !x_set.contains(&res.last()) {
        return Err("wrong endpoints".into());
    }
    if !meets_once(&res, &[p, q]) || !meets_once(&res, &x_set) {
        return Err("endpoint sets met more than once".into());
    }
    Ok(format!("{how:?}"))
}

pub fn run_chain(seed: u64) -> Result<String, String> {
    let mut fx = Fx::new(seed);
    let params = params_for(&mut fx, 1..=4, 1..=3);
    let (a, b) = (params.a, params.b);
    let need = (a * (b + 1) - 1).max(b);
    let target = need + fx.extra();
    let (chain, arcs) = random_chain(&mut fx, &params, target, 0.3);
    let d = host(&arcs);
    validate_chain(&d, &chain, &params)?;
    let r = chain_alt_path(&chain, a, b).map_err(|e| e.to_string())?;
    r.check(b, Some(&d))?;
    if r.a() != a || !r.strong || r.first() != chain.v(0) || r.last() != chain.last() {
        return Err(format!("a={} strong={} ends {}..{}", r.a(), r.strong, r.first(), r.last()));
    }
    Ok(format!("a={a}"))
}

pub fn run_intersection(seed: u64) -> Result<String, String> {
    let mut fx = Fx::new(seed);
    let want = [Want::Reach, Want::Far, Want::MissesSecond, Want::MeetsSecond][seed as usize % 4];
    let lo = if want == Want::MissesSecond { 2 } else { 1 };
    let params = params_for(&mut fx, 2..=2, lo..=3);
    let (g, gstar) = intersecting_pair(&mut fx, &params, want);
    let d = gadget_union(&[&g, &gstar]);
    let (res, case) = gadget_intersection_path_traced(&g, &gstar, &params).map_err(|e| e.to_string())?;
    res.check(params.b, Some(&d))?;
    if !(1..=3).contains(&res.a()) {
        return Err(format!("a = {}", res.a()));
    }
    let (p, q, ps, qs) = (g.p(), g.q(), gstar.p(), gstar.q());
    if !(res.first() == ps || res.first() == qs) || !(res.last() == p || res.last() == q) {
        return Err("wrong endpoints".into());
    }
    if !meets_once(&res, &[p, q]) || !meets_once(&res, &[ps, qs]) {
        return Err("endpoint pairs met more than once".into());
    }
    Ok(format!("{case:?}"))
}

pub fn run_close(seed: u64) -> Result<String, String> {
    let mut fx = Fx::new(seed);
    let params = params_for(&mut fx, 2..=4, 1..=3);
    let condition = 1 + (seed % 2) as u8;
    let (chain, closure, arcs) = closable_chain(&mut fx, &params, condition);
    let d = host(&arcs);
    let cert = close_chain(&d, &chain, &closure, &params).map_err(|e| e.to_string())?;
    validate_certificate(&d, &pattern_cab(params.a, params.b).unwrap(), &cert)?;
    Ok(format!("condition {condition}"))
}

/// A `(2b-1)`-subdivided `arity`-ary tree of depth 2 hanging from vertex 0,
/// with full fans under every leaf but one, whose single path stops one
/// vertex short and has an arc back to another leaf.
pub fn run_tree(seed: u64) -> Result<String, String> {
    let mut fx = Fx::new(seed);
    let b = fx.rng.gen_range(1..=3);
    let arity = fx.rng.gen_range(2..=3);
    let seg = 2 * b - 1;
    let mut arcs: Vec<Arc> = Vec::new();
    let root = fx.fresh();
    let mut level = vec![root];
    let mut all_tree = vec![root];
    for _ in 0..2 {
        let mut next = Vec::new();
        for &u in &level {
            for _ in 0..arity {
                let mut prev = u;
                for _ in 0..seg {
                    let v = fx.fresh();
                    arcs.push((prev, v));
                    all_tree.push(v);
                    prev = v;
                }
                next.push(prev);
            }
        }
        level = next;
    }
    // leaves get full fans except one, whose single short path is stuck
    let stuck_leaf = *level.choose(&mut fx.rng).unwrap();
    let mut w = stuck_leaf;
    for _ in 0..seg - 1 {
        let v = fx.fresh();
        arcs.push((w, v));
        w = v;
    }
    let far: Vec<Vertex> = level.iter().copied().filter(|&l| l != stuck_leaf).collect();
    let x = *far.choose(&mut fx.rng).unwrap();
    arcs.push((w, x));
    for &l in &level {
        if l == stuck_leaf {
            continue;
        }
        for _ in 0..arity {
            let mut prev = l;
            for _ in 0..seg {
                let v = fx.fresh();
                arcs.push((prev, v));
                prev = v;
            }
        }
    }
    let d = host(&arcs);
    let removed = vec![false; d.n()];
    let (p0, g) = embed_gadget_iii(&d, &removed, root, b, arity, 3).map_err(|e| e.to_string())?;
    let params = CabParams::new(2, b).unwrap();
    validate_gadget(&d, &g, &params)?;
    if !p0.valid_in(&d) || p0.first() != root || p0.last() != g.p() {
        return Err("P0 does not lead from the root to p".into());
    }
    if p0.vertices[..p0.vertices.len() - 1].iter().any(|&v| g.contains(v)) {
        return Err("P0 meets the gadget".into());
    }
    Ok(format!("b={b}"))
}
