//! Outcome types and run logs shared by the constructive finders.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::digraph::{Digraph, Dipath, Vertex};
use crate::oracle::{validate_certificate, CertPath, SubdivisionCertificate};

/// Where a finder stopped when no proof case applied. Serialized as JSON
/// for machine consumption.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StuckState {
    pub stage: String,
    pub detail: Value,
}

impl StuckState {
    pub fn new(stage: &str, detail: Value) -> Self {
        StuckState { stage: stage.to_string(), detail }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stuck state serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FindError {
    #[error("no subdivision found: {}", .0.to_json())]
    NotFound(StuckState),
    #[error("search budget of {max} steps exceeded: {}", .state.to_json())]
    BudgetExceeded { max: u64, state: StuckState },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),
    #[error("degree precondition violated at vertex {vertex}")]
    PreconditionViolated { vertex: Vertex },
    #[error("recursion depth budget exceeded")]
    DepthBudgetExceeded,
}

impl FindError {
    pub fn stuck(stage: &str, detail: Value) -> Self {
        FindError::NotFound(StuckState::new(stage, detail))
    }

    pub fn budget(max: u64, stage: &str, detail: Value) -> Self {
        FindError::BudgetExceeded { max, state: StuckState::new(stage, detail) }
    }

    /// The state a run stopped in, for `NotFound` and `BudgetExceeded`.
    pub fn stuck_state(&self) -> Option<&StuckState> {
        match self {
            FindError::NotFound(s) | FindError::BudgetExceeded { state: s, .. } => Some(s),
            _ => None,
        }
    }
}

/// JSON-lines event log (`{"event": ..., ...}` per line).
#[derive(Debug, Clone, Default)]
pub struct RunLog {
    pub events: Vec<Value>,
}

impl RunLog {
    pub fn push(&mut self, event: &str, mut fields: Value) {
        if let Value::Object(ref mut m) = fields {
            m.insert("event".into(), json!(event));
            self.events.push(fields);
        } else {
            self.events.push(json!({ "event": event, "data": fields }));
        }
    }

    pub fn to_jsonl(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }

    pub fn count(&self, event: &str) -> usize {
        self.events.iter().filter(|e| e["event"] == event).count()
    }
}

/// Certificate for `pattern_two_block(k1, k2)` from two internally disjoint
/// dipaths with common ends, of lengths at least `k1` and `k2`. Pattern
/// interior vertices go to the first host vertices of each path; the last
/// pattern arc absorbs the surplus.
pub fn two_path_certificate(k1: usize, k2: usize, long: &Dipath, short: &Dipath) -> SubdivisionCertificate {
    assert!(long.len() >= k1 && short.len() >= k2);
    assert_eq!((long.first(), long.last()), (short.first(), short.last()));
    let mut branch = vec![0; k1 + k2];
    branch[0] = long.first();
    branch[1] = long.last();
    let mut paths = Vec::new();
    let mut next = 2;
    for (len, host) in [(k1, long), (k2, short)] {
        let mut prev_pat = 0;
        for i in 1..len {
            branch[next] = host.vertices[i];
            paths.push(CertPath { from: prev_pat, to: next, vertices: vec![host.vertices[i - 1], host.vertices[i]] });
            prev_pat = next;
            next += 1;
        }
        paths.push(CertPath { from: prev_pat, to: 1, vertices: host.vertices[len - 1..].to_vec() });
    }
    SubdivisionCertificate { branch: branch.into_iter().enumerate().collect(), paths }
}

/// Certificate for a pattern that is itself a directed cycle
/// `0 -> 1 -> ... -> l-1 -> 0`, from a host dicycle given as a vertex list
/// (first vertex not repeated) of length at least `l`.
pub fn cycle_certificate(l: usize, cycle: &[Vertex]) -> SubdivisionCertificate {
    assert!(cycle.len() >= l);
    let mut paths = Vec::new();
    for i in 0..l - 1 {
        paths.push(CertPath { from: i, to: i + 1, vertices: vec![cycle[i], cycle[i + 1]] });
    }
    let mut closing = cycle[l - 1..].to_vec();
    closing.push(cycle[0]);
    paths.push(CertPath { from: l - 1, to: 0, vertices: closing });
    SubdivisionCertificate { branch: (0..l).map(|i| (i, cycle[i])).collect(), paths }
}

/// Validates before handing a certificate out; a failure here is a bug.
pub(crate) fn checked(d: &Digraph, f: &Digraph, cert: SubdivisionCertificate) -> SubdivisionCertificate {
    if let Err(e) = validate_certificate(d, f, &cert) {
        panic!("internal error: finder produced an invalid certificate: {e}");
    }
    cert
}

/// Certificate for a pattern made of internally disjoint paths, each given
/// as its pattern vertex sequence, from host dipaths at least as long.
/// Shared endpoints must land on the same host vertex.
pub fn path_system_certificate(pattern_paths: &[Vec<Vertex>], host_paths: &[Dipath]) -> SubdivisionCertificate {
    assert_eq!(pattern_paths.len(), host_paths.len());
    let mut branch = std::collections::BTreeMap::new();
    let mut paths = Vec::new();
    let mut put = |x: Vertex, h: Vertex| {
        let prev = branch.insert(x, h);
        assert!(prev.is_none() || prev == Some(h), "pattern vertex {x} mapped twice");
    };
    for (pat, host) in pattern_paths.iter().zip(host_paths) {
        let len = pat.len() - 1;
        assert!(host.len() >= len, "host path shorter than pattern path");
        for i in 0..len {
            put(pat[i], host.vertices[i]);
        }
        put(pat[len], host.last());
        for i in 0..len {
            let vs = if i + 1 < len { host.vertices[i..=i + 1].to_vec() } else { host.vertices[i..].to_vec() };
            paths.push(CertPath { from: pat[i], to: pat[i + 1], vertices: vs });
        }
    }
    SubdivisionCertificate { branch, paths }
}
