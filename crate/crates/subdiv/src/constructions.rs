//! Strongly arc-connected digraphs without subdivisions of the bioriented
//! `K4` (resp. the bioriented 4-star), assembled from supplied building
//! blocks.
//!
//! The blocks themselves (even-dicycle-free, resp. free of bioriented
//! 3-star subdivisions, with a given minimum out-degree) are inputs. Only
//! odd directed cycles and the directed 4-cycle ship here, covering `k = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{bioriented_star, directed_cycle, Digraph, GraphError, Vertex};
use crate::oracle::{contains_subdivision, has_even_dicycle, SearchBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockProperty {
    NoEvenDicycle,
    NoS3Subdivision,
}

impl BlockProperty {
    pub fn tag(self) -> &'static str {
        match self {
            BlockProperty::NoEvenDicycle => "no-even-dicycle",
            BlockProperty::NoS3Subdivision => "no-s3-subdivision",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "no-even-dicycle" => Some(BlockProperty::NoEvenDicycle),
            "no-s3-subdivision" => Some(BlockProperty::NoS3Subdivision),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("property mismatch: {0}")]
    PropertyMismatch(String),
    #[error("block has minimum out-degree {actual}, claimed {claimed}")]
    DegreeMismatch { claimed: usize, actual: usize },
    #[error("block file: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Whether the claimed property was confirmed by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    Verified,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildingBlock {
    pub graph: Digraph,
    pub property: BlockProperty,
    pub k: usize,
    pub verification: Verification,
}

const BLOCK_CHECK_BUDGET: u64 = 10_000_000;

impl BuildingBlock {
    /// Checks `δ+ = k` and, within budget, the claimed property.
    pub fn new(graph: Digraph, property: BlockProperty, k: usize) -> Result<Self, ConstructionError> {
        let actual = graph.min_out_degree()?;
        if actual != k {
            return Err(ConstructionError::DegreeMismatch { claimed: k, actual });
        }
        let mut budget = SearchBudget::new(BLOCK_CHECK_BUDGET);
        let holds = match property {
            BlockProperty::NoEvenDicycle => has_even_dicycle(&graph, &mut budget).ok().map(|even| !even),
            BlockProperty::NoS3Subdivision => {
                contains_subdivision(&graph, &bioriented_star(3), &mut budget).ok().map(|c| c.is_none())
            }
        };
        let verification = match holds {
            Some(true) => Verification::Verified,
            Some(false) => {
                return Err(ConstructionError::PropertyMismatch(format!("block violates {}", property.tag())));
            }
            None => Verification::Unverified,
        };
        Ok(BuildingBlock { graph, property, k, verification })
    }

    /// Parses an edge list preceded by `# property: <tag>`.
    pub fn parse(text: &str) -> Result<Self, ConstructionError> {
        let header = text.lines().next().unwrap_or_default();
        let tag = header
            .strip_prefix("# property:")
            .ok_or_else(|| ConstructionError::Parse("missing '# property:' header".into()))?;
        let property = BlockProperty::from_tag(tag).ok_or_else(|| ConstructionError::Parse(format!("unknown property {tag:?}")))?;
        let graph = Digraph::parse_edge_list(text)?;
        let k = graph.min_out_degree()?;
        BuildingBlock::new(graph, property, k)
    }

    pub fn to_text(&self) -> String {
        format!("# property: {}\n{}", self.property.tag(), self.graph.to_edge_list())
    }
}

/// Directed 5-cycle: out-degree 1, only odd dicycles.
pub fn shipped_even_free_block() -> BuildingBlock {
    BuildingBlock::new(directed_cycle(5), BlockProperty::NoEvenDicycle, 1).unwrap()
}

/// Directed 4-cycle: out-degree 1, no digon, so no bioriented 3-star.
pub fn shipped_s3_free_block() -> BuildingBlock {
    BuildingBlock::new(directed_cycle(4), BlockProperty::NoS3Subdivision, 1).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinLayout {
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K4Layout {
    pub join: JoinLayout,
    pub apex: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct S4Layout {
    pub x: JoinLayout,
    pub y: JoinLayout,
    pub u: Vertex,
    pub v: Vertex,
}

/// Block on `A = 0..m`, its reversal on `B = m..2m`, and every arc from
/// `B` to `A`.
fn reverse_join(block: &Digraph) -> (Digraph, JoinLayout) {
    let m = block.n();
    let mut out: Vec<Vec<Vertex>> = block.out_lists().to_vec();
    out.extend(vec![Vec::new(); m]);
    for (u, v) in block.arcs() {
        out[m + v].push(m + u);
    }
    for b in m..2 * m {
        out[b].extend(0..m);
    }
    let layout = JoinLayout { a: (0..m).collect(), b: (m..2 * m).collect() };
    (Digraph::from_out_lists(out), layout)
}

fn expect(block: &BuildingBlock, want: BlockProperty) -> Result<(), ConstructionError> {
    if block.property != want {
        return Err(ConstructionError::PropertyMismatch(format!(
            "expected a {} block, got {}",
            want.tag(),
            block.property.tag()
        )));
    }
    Ok(())
}

/// The reverse join of an even-dicycle-free block plus an apex joined to
/// every vertex by a digon.
pub fn join_no_k4(block: &BuildingBlock) -> Result<(Digraph, K4Layout), ConstructionError> {
    expect(block, BlockProperty::NoEvenDicycle)?;
    let (g, join) = reverse_join(&block.graph);
    let apex = g.n();
    let mut out: Vec<Vec<Vertex>> = g.out_lists().to_vec();
    for list in out.iter_mut() {
        list.push(apex);
    }
    out.push((0..apex).collect());
    Ok((Digraph::from_out_lists(out), K4Layout { join, apex }))
}

/// Two copies `X`, `Y` of the reverse join of an S3-free block, with new
/// vertices `u`, `v` and arcs `u -> X -> v -> Y -> u`.
pub fn join_no_s4(block: &BuildingBlock) -> Result<(Digraph, S4Layout), ConstructionError> {
    expect(block, BlockProperty::NoS3Subdivision)?;
    let (h, jl) = reverse_join(&block.graph);
    assert_eq!(h.min_out_degree()?, block.k);
    assert_eq!(h.min_in_degree()?, block.k);
    let m = h.n();
    let two = h.disjoint_union(&h);
    let (u, v) = (2 * m, 2 * m + 1);
    let mut out: Vec<Vec<Vertex>> = two.out_lists().to_vec();
    out.push((0..m).collect());
    out.push((m..2 * m).collect());
    for x in 0..m {
        out[x].push(v);
    }
    for y in m..2 * m {
        out[y].push(u);
    }
    let shift = |l: &JoinLayout, off: usize| JoinLayout {
        a: l.a.iter().map(|&z| z + off).collect(),
        b: l.b.iter().map(|&z| z + off).collect(),
    };
    let layout = S4Layout { x: shift(&jl, 0), y: shift(&jl, m), u, v };
    Ok((Digraph::from_out_lists(out), layout))
}
