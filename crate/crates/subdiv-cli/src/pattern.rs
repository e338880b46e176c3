//! Pattern specs of the form `generator[:params]`, or a path to an
//! edge-list file.

use std::fmt;
use std::path::Path;

use subdiv::digraph::*;

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    K3e,
    Cab(usize, usize),
    TwoBlock(usize, usize),
    /// Any other pattern; searched with the oracle unless it is an
    /// oriented cycle.
    Graph { name: String, graph: Digraph },
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::K3e => write!(f, "k3e"),
            Pattern::Cab(a, b) => write!(f, "cab:{a},{b}"),
            Pattern::TwoBlock(k1, k2) => write!(f, "twoblock:{k1},{k2}"),
            Pattern::Graph { name, .. } => write!(f, "{name}"),
        }
    }
}

impl Pattern {
    pub fn digraph(&self) -> Result<Digraph, String> {
        match self {
            Pattern::K3e => Ok(k3_minus_e()),
            Pattern::Cab(a, b) => pattern_cab(*a, *b).map_err(|e| e.to_string()),
            Pattern::TwoBlock(k1, k2) => pattern_two_block(*k1, *k2).map_err(|e| e.to_string()),
            Pattern::Graph { graph, .. } => Ok(graph.clone()),
        }
    }
}

fn nums(params: &str, want: usize, spec: &str) -> Result<Vec<usize>, String> {
    let v: Vec<usize> = params
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad number {t:?} in pattern {spec:?}")))
        .collect::<Result<_, _>>()?;
    if v.len() != want {
        return Err(format!("pattern {spec:?} takes {want} parameter(s)"));
    }
    Ok(v)
}

/// Parses a pattern spec. Unknown generators are tried as file paths.
pub fn parse(spec: &str) -> Result<Pattern, String> {
    let (gen, params) = spec.split_once(':').unwrap_or((spec, ""));
    let one = |f: fn(usize) -> Digraph| -> Result<Pattern, String> {
        let k = nums(params, 1, spec)?[0];
        Ok(Pattern::Graph { name: spec.to_string(), graph: f(k) })
    };
    match gen {
        "k3e" if params.is_empty() => Ok(Pattern::K3e),
        "cab" => {
            let v = nums(params, 2, spec)?;
            pattern_cab(v[0], v[1]).map_err(|e| e.to_string())?;
            Ok(Pattern::Cab(v[0], v[1]))
        }
        "twoblock" => {
            let v = nums(params, 2, spec)?;
            pattern_two_block(v[0], v[1]).map_err(|e| e.to_string())?;
            Ok(Pattern::TwoBlock(v[0], v[1]))
        }
        "bivec-clique" => one(bioriented_clique),
        "bivec-star" => one(bioriented_star),
        "bivec-path" => one(bioriented_path),
        "cycle" => one(directed_cycle),
        "path" => one(directed_path),
        "tournament" => one(transitive_tournament),
        _ if Path::new(spec).is_file() => {
            let text = std::fs::read_to_string(spec).map_err(|e| format!("{spec}: {e}"))?;
            let graph = Digraph::parse_edge_list(&text).map_err(|e| format!("{spec}: {e}"))?;
            Ok(Pattern::Graph { name: spec.to_string(), graph })
        }
        _ => Err(format!("unknown pattern {spec:?}")),
    }
}
