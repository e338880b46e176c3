//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Every tolerance is a constant below.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use subdiv::cab::{find_cab, long_dicycle, reduce_girth, synthetic_chain_host};
use subdiv::constructions::{join_no_k4, join_no_s4, shipped_even_free_block, shipped_s3_free_block};
use subdiv::digraph::*;
use subdiv::finder::FindError;
use subdiv::gadget::CabParams;
use subdiv::k3e::find_k3e;
use subdiv::mader::enumerate_digraphs;
use subdiv::menger::{check_paths_or_cut, strong_arc_connectivity, vertex_disjoint_paths, PathsOrCut};
use subdiv::oracle::{contains_subdivision, validate_certificate, SearchBudget};
use subdiv::random::{random_gnp, random_k_out, rng};
use subdiv::two_block::find_two_block;

const K3E_MAX_N: usize = 5;
const K3E_TIME_LIMIT: Duration = Duration::from_secs(120);
const TWO_BLOCK_MAX_N: usize = 5;
const TWO_BLOCK_RANDOM_HOSTS: u64 = 1000;
const TWO_BLOCK_RANDOM_MAX_N: usize = 30;
const TWO_BLOCK_TIME_LIMIT: Duration = Duration::from_secs(300);
const LOWER_BOUND_BUDGET: u64 = 100_000_000;
const DICYCLE_MAX_K: usize = 5;
const DICYCLE_HOSTS: u64 = 1000;
const GADGET_FIXTURES: u64 = 1000;
const GIRTH_HOSTS: u64 = 20;
const GIRTH_N: usize = 4000;
const GIRTH_OUT: usize = 200;
const GIRTH_K: usize = 10;
const GIRTH_G: usize = 8;
const GIRTH_RETRIES: usize = 64;
const GIRTH_MIN_SUCCESS: f64 = 0.9;
const GIRTH_TIME_LIMIT: Duration = Duration::from_secs(60);
const CAB_RANDOM_HOSTS: u64 = 10_000;
const CAB_MAX_N: usize = 200;
const CAB_BUDGET: u64 = 200_000;
const CONSTRUCTION_BUDGET: u64 = 10_000_000;
const MENGER_INSTANCES: u64 = 10_000;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `check` on every digraph with `n` vertices and `δ+ >= k`, sharded
/// over the code space. Returns the number of hosts tested.
fn exhaustive(n: usize, k: usize, check: impl Fn(u64, &Digraph) -> Result<(), String> + Sync) -> Result<u64, String> {
    let total = enumerate_digraphs(n, k).map_err(|e| e.to_string())?.total_codes();
    let step = total.div_ceil(256).max(1);
    (0..total.div_ceil(step))
        .into_par_iter()
        .map(|s| {
            let mut tested = 0u64;
            for (code, d) in enumerate_digraphs(n, k).unwrap().range(s * step, (s + 1) * step) {
                check(code, &d).map_err(|e| format!("n={n} code={code}: {e}"))?;
                tested += 1;
            }
            Ok(tested)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

fn oracle_none(host: &Digraph, f: &Digraph, what: &str) -> Result<(), String> {
    match contains_subdivision(host, f, &mut SearchBudget::new(LOWER_BOUND_BUDGET)) {
        Ok(None) => Ok(()),
        Ok(Some(c)) => Err(format!("{what}: oracle found {c:?}")),
        Err(e) => Err(format!("{what}: {e}")),
    }
}

fn k3e_exhaustive() -> Outcome {
    let start = Instant::now();
    let pat = k3_minus_e();
    let mut tested = 0;
    for n in 3..=K3E_MAX_N {
        tested += exhaustive(n, 2, |code, d| {
            let v0 = code as usize % n;
            let cert = find_k3e(d, v0, None).map_err(|e| e.to_string())?;
            validate_certificate(d, &pat, &cert)
        })?;
    }
    oracle_none(&bioriented_clique(2), &pat, "K3-e in bivec K2")?;
    let t = start.elapsed();
    ensure(t < K3E_TIME_LIMIT, || format!("took {t:?}"))?;
    Ok(format!("{tested} hosts, 0 failures, {t:.1?}"))
}

fn two_block() -> Outcome {
    let start = Instant::now();
    let pat22 = pattern_two_block(2, 2).unwrap();
    let mut tested = 0;
    for n in 4..=TWO_BLOCK_MAX_N {
        tested += exhaustive(n, 3, |_, d| {
            let cert = find_two_block(d, 2, 2, &mut SearchBudget::default()).map_err(|e| e.to_string())?;
            validate_certificate(d, &pat22, &cert)
        })?;
    }
    let pat32 = pattern_two_block(3, 2).unwrap();
    (0..TWO_BLOCK_RANDOM_HOSTS).into_par_iter().try_for_each(|seed| {
        let mut r = rng(seed);
        let n = r.gen_range(5..=TWO_BLOCK_RANDOM_MAX_N);
        let d = random_k_out(n, 4, &mut r);
        let cert = find_two_block(&d, 3, 2, &mut SearchBudget::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        validate_certificate(&d, &pat32, &cert).map_err(|e| format!("seed {seed}: {e}"))
    })?;
    let t = start.elapsed();
    ensure(t < TWO_BLOCK_TIME_LIMIT, || format!("took {t:?}"))?;
    Ok(format!("(2,2): {tested} hosts; (3,2): {TWO_BLOCK_RANDOM_HOSTS} hosts; {t:.1?}"))
}

fn lower_bounds() -> Outcome {
    oracle_none(&bioriented_clique(2), &k3_minus_e(), "K3-e in bivec K2")?;
    oracle_none(&bioriented_clique(4), &pattern_two_block(3, 2).unwrap(), "C(3,2) in bivec K4")?;
    oracle_none(&bioriented_clique(3), &pattern_two_block(2, 2).unwrap(), "C(2,2) in bivec K3")?;
    Ok("3 of 3 exhausted".into())
}

fn is_dicycle(d: &Digraph, c: &[Vertex]) -> bool {
    let mut seen = vec![false; d.n()];
    c.len() >= 2
        && c.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        && (0..c.len()).all(|i| d.has_arc(c[i], c[(i + 1) % c.len()]))
}

fn long_cycles() -> Outcome {
    let mut shortest = BTreeMap::new();
    for k in 1..=DICYCLE_MAX_K {
        let min = (0..DICYCLE_HOSTS)
            .into_par_iter()
            .map(|i| -> Result<usize, String> {
                let mut r = rng(k as u64 * 1_000_003 + i);
                let n = r.gen_range(k + 1..=k + 60);
                let d = random_k_out(n, k, &mut r);
                let c = long_dicycle(&d).map_err(|e| format!("k={k} host {i}: {e}"))?;
                ensure(is_dicycle(&d, &c) && c.len() > k, || format!("k={k} host {i}: {c:?}"))?;
                if k >= 2 {
                    let cert = find_two_block(&d, k, 1, &mut SearchBudget::default()).map_err(|e| format!("k={k} host {i}: {e}"))?;
                    validate_certificate(&d, &pattern_two_block(k, 1).unwrap(), &cert)?;
                }
                Ok(c.len())
            })
            .try_reduce(|| usize::MAX, |a, b| Ok(a.min(b)))?;
        shortest.insert(k, min);
        if k >= 2 {
            oracle_none(&bioriented_clique(k), &pattern_two_block(k, 1).unwrap(), &format!("C({k},1) in bivec K{k}"))?;
        }
        oracle_none(&bioriented_clique(k), &directed_cycle(k + 1), &format!("C{} in bivec K{k}", k + 1))?;
    }
    Ok(format!("shortest cycle per k: {shortest:?}"))
}

fn gadget_suite() -> Outcome {
    type Runner = fn(u64) -> Result<String, String>;
    let runners: [(&str, Runner, &[&str]); 6] = [
        ("base_alt_path", common::run_base, &[]),
        (
            "extended_exit_path",
            common::run_exit,
            &["OnSecondPath", "FirstToSecond", "BackArcFromP", "BackArcBeforeTarget", "BackArcAfterTarget"],
        ),
        ("chain_alt_path", common::run_chain, &[]),
        ("gadget_intersection_path", common::run_intersection, &["Reach", "Far", "MissesSecond", "MeetsSecond"]),
        ("close_chain", common::run_close, &["condition 1", "condition 2"]),
        ("type_iii_embedding", common::run_tree, &[]),
    ];
    let mut summary = Vec::new();
    for (name, run, required) in runners {
        let labels: Vec<String> = (0..GADGET_FIXTURES)
            .into_par_iter()
            .map(|seed| run(seed).map_err(|e| format!("{name} seed {seed}: {e}")))
            .collect::<Result<_, _>>()?;
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for l in labels {
            let key = l.split(" {").next().unwrap().to_string();
            *seen.entry(key).or_default() += 1;
        }
        for r in required {
            ensure(seen.contains_key(*r), || format!("{name}: case {r} never forced: {seen:?}"))?;
        }
        summary.push(format!("{name} {seen:?}"));
    }
    Ok(summary.join("; "))
}

fn girth_reduction() -> Outcome {
    let mut ok = 0;
    let mut slowest = Duration::ZERO;
    for seed in 0..GIRTH_HOSTS {
        let d = random_k_out(GIRTH_N, GIRTH_OUT, &mut rng(seed));
        let start = Instant::now();
        let res = reduce_girth(&d, GIRTH_K, GIRTH_G, seed, GIRTH_RETRIES);
        let t = start.elapsed();
        slowest = slowest.max(t);
        ensure(t < GIRTH_TIME_LIMIT, || format!("host {seed} took {t:?}"))?;
        if let Ok(r) = res {
            let h = &r.digraph;
            ensure(h.n() > 0 && h.min_out_degree().unwrap() >= GIRTH_K, || format!("host {seed}: out-degree"))?;
            ensure(h.directed_girth().at_least(GIRTH_G), || format!("host {seed}: girth {}", h.directed_girth()))?;
            ok += 1;
        }
    }
    let rate = ok as f64 / GIRTH_HOSTS as f64;
    ensure(rate >= GIRTH_MIN_SUCCESS, || format!("success rate {rate}"))?;
    Ok(format!("{ok}/{GIRTH_HOSTS} succeeded, slowest {slowest:.1?}"))
}

/// Relabels ring vertices among themselves and private vertices among
/// themselves.
fn shuffle_within(d: &Digraph, ring: usize, seed: u64) -> Digraph {
    let mut r = rng(seed);
    let mut perm: Vec<usize> = (0..ring).collect();
    perm.shuffle(&mut r);
    let mut rest: Vec<usize> = (ring..d.n()).collect();
    rest.shuffle(&mut r);
    perm.extend(rest);
    d.relabel(&perm)
}

fn cab_soundness() -> Outcome {
    let tallies = (0..CAB_RANDOM_HOSTS)
        .into_par_iter()
        .map(|seed| -> Result<[u64; 3], String> {
            let mut r = rng(seed);
            let n = r.gen_range(10..=CAB_MAX_N);
            let d = if seed % 2 == 0 {
                random_gnp(n, [0.02, 0.05, 0.1, 0.3, 0.5, 0.7][r.gen_range(0..6)], &mut r)
            } else {
                random_k_out(n, r.gen_range(1..=(n - 1).min(40)), &mut r)
            };
            let (a, b) = (r.gen_range(2..=3), r.gen_range(1..=3));
            let mut t = [0u64; 3];
            match find_cab(&d, a, b, &mut SearchBudget::new(CAB_BUDGET)) {
                Ok(cert) => {
                    validate_certificate(&d, &pattern_cab(a, b).unwrap(), &cert).map_err(|e| format!("seed {seed}: {e}"))?;
                    t[0] += 1;
                }
                Err(e @ (FindError::NotFound(_) | FindError::BudgetExceeded { .. })) => {
                    let s = e.stuck_state().unwrap();
                    let v: serde_json::Value = serde_json::from_str(&s.to_json()).map_err(|e| e.to_string())?;
                    ensure(!s.stage.is_empty() && v["detail"].is_object(), || format!("seed {seed}: {}", s.to_json()))?;
                    t[if matches!(e, FindError::NotFound(_)) { 1 } else { 2 }] += 1;
                }
                Err(e) => return Err(format!("seed {seed}: {e}")),
            }
            Ok(t)
        })
        .try_reduce(|| [0; 3], |x, y| Ok([x[0] + y[0], x[1] + y[1], x[2] + y[2]]))?;

    let mut synthetic = 0;
    for a in [2, 3] {
        for b in [1, 2, 3] {
            let pat = pattern_cab(a, b).unwrap();
            let ring = 2 * CabParams::new(a, b).unwrap().close_threshold() + 5;
            let base = synthetic_chain_host(a, b, 4).map_err(|e| e.to_string())?;
            for seed in 0..10 {
                let d = if seed == 0 { base.clone() } else { shuffle_within(&base, ring, seed) };
                let cert = find_cab(&d, a, b, &mut SearchBudget::default()).map_err(|e| format!("synthetic cab({a},{b}) seed {seed}: {e}"))?;
                validate_certificate(&d, &pat, &cert)?;
                synthetic += 1;
            }
        }
    }
    Ok(format!(
        "random: {} found, {} not found, {} over budget, all valid; synthetic: {synthetic}/{synthetic}",
        tallies[0], tallies[1], tallies[2]
    ))
}

fn constructions() -> Outcome {
    let (g, _) = join_no_k4(&shipped_even_free_block()).map_err(|e| e.to_string())?;
    let (h, _) = join_no_s4(&shipped_s3_free_block()).map_err(|e| e.to_string())?;
    let kg = strong_arc_connectivity(&g).map_err(|e| e.to_string())?;
    let kh = strong_arc_connectivity(&h).map_err(|e| e.to_string())?;
    ensure(kg >= 1 && kh >= 1, || format!("arc connectivity {kg}, {kh}"))?;
    for (host, f, what) in [(&g, bioriented_clique(4), "bivec K4 in G1"), (&h, bioriented_star(4), "bivec S4 in H1")] {
        match contains_subdivision(host, &f, &mut SearchBudget::new(CONSTRUCTION_BUDGET)) {
            Ok(None) => {}
            Ok(Some(_)) => return Err(format!("{what}: found")),
            Err(e) => return Err(format!("{what}: {e}")),
        }
    }
    Ok(format!("G1 n={} k'={kg}, H1 n={} k'={kh}", g.n(), h.n()))
}

/// Independent check of a Menger answer: BFS and disjointness by hand.
fn menger_by_hand(d: &Digraph, u: Vertex, v: Vertex, k: usize, r: &PathsOrCut) -> Result<(), String> {
    match r {
        PathsOrCut::Paths(ps) => {
            ensure(ps.len() == k, || format!("{} paths", ps.len()))?;
            let mut used = vec![false; d.n()];
            for p in ps {
                ensure(p.first() == u && p.last() == v && p.valid_in(d), || format!("bad path {p:?}"))?;
                for &x in p.interior() {
                    ensure(!std::mem::replace(&mut used[x], true), || format!("vertex {x} shared"))?;
                }
            }
            Ok(())
        }
        PathsOrCut::Cut(c) => {
            ensure(c.len() < k && !c.contains(&u) && !c.contains(&v), || format!("bad cut {c:?}"))?;
            let mut blocked = vec![false; d.n()];
            let mut stack = vec![u];
            for &x in c {
                blocked[x] = true;
            }
            blocked[u] = true;
            while let Some(x) = stack.pop() {
                for &y in d.out(x) {
                    ensure(y != v, || format!("cut {c:?} does not separate"))?;
                    if !blocked[y] {
                        blocked[y] = true;
                        stack.push(y);
                    }
                }
            }
            Ok(())
        }
    }
}

fn menger() -> Outcome {
    let (paths, cuts) = (0..MENGER_INSTANCES)
        .into_par_iter()
        .map(|seed| -> Result<(u64, u64), String> {
            let mut r = rng(seed);
            let n = r.gen_range(3..=40);
            let d = random_gnp(n, r.gen_range(0.02..0.6), &mut r);
            let u = r.gen_range(0..n);
            let v = (u + r.gen_range(1..n)) % n;
            let d = d.without_arcs(&[(u, v)]);
            let k = r.gen_range(1..=6);
            let res = vertex_disjoint_paths(&d, u, v, k).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure(check_paths_or_cut(&d, u, v, k, &res), || format!("seed {seed}: checker rejects"))?;
            menger_by_hand(&d, u, v, k, &res).map_err(|e| format!("seed {seed}: {e}"))?;
            Ok(if matches!(res, PathsOrCut::Paths(_)) { (1, 0) } else { (0, 1) })
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(format!("{paths} path systems, {cuts} cuts"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("k3e exhaustive", k3e_exhaustive),
        ("two-block finder", two_block),
        ("tight lower bounds", lower_bounds),
        ("long dicycles and C(k,1)", long_cycles),
        ("gadget and chain operations", gadget_suite),
        ("girth reduction", girth_reduction),
        ("cab soundness and synthetic completeness", cab_soundness),
        ("constructions", constructions),
        ("menger duality", menger),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed();
        match res {
            Ok(detail) => println!("PASS {} {name} [{t:.1?}]: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name} [{t:.1?}]: {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
