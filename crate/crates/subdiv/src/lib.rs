//! Certificate-producing search for subdivisions of oriented cycles and
//! related patterns in digraphs.

pub mod constructions;
pub mod digraph;
pub mod mader;
pub mod menger;
pub mod finder;
pub mod cab;
pub mod gadget;
pub mod k3e;
pub mod oracle;
pub mod random;
pub mod two_block;

pub use digraph::{build_digraph, Arc, Digraph, Dipath, Girth, GraphError, Vertex};
