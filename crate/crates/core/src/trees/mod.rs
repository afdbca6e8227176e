//! Deterministic tree geometry: truncated rooted trees, ends, Busemann
//! levels, horospheres, shadows and canonical codes of rooted balls.

mod address;
pub mod canonical;
mod document;
mod pointed;
mod rooted;

pub use address::{AddressParseError, NodeIx, VertexId};
pub use canonical::{canonical_code, region_code};
pub use document::{deserialize, serialize_pointed, serialize_tree, TreeDocument, TREE_FORMAT};
pub use pointed::PointedTree;
pub use rooted::{LeafKind, RootedTree, MAX_DEPTH_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("malformed offspring encoding at position {position}: {reason}")]
    MalformedEncoding {
        position: usize,
        reason: &'static str,
    },
    #[error("depth violation: {0}")]
    DepthViolation(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("depth {requested} is beyond the horizon at {depth_limit}")]
    HorizonExceeded { requested: u64, depth_limit: u32 },
    #[error("spine index at position {position} does not name a child")]
    InvalidSpine { position: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// Builds a validated tree from a preorder offspring encoding.
pub fn build_tree(offspring: Vec<u32>, depth_limit: u32) -> Result<RootedTree, TreeError> {
    RootedTree::build(offspring, depth_limit)
}

/// Code of the `radius`-ball around a vertex given by address.
pub fn canonical_code_at(
    t: &RootedTree,
    center: &VertexId,
    radius: u32,
) -> Result<Vec<u8>, TreeError> {
    canonical_code(t, t.index_of(center)?, radius)
}
