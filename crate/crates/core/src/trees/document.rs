use serde::{Deserialize, Serialize};

use super::{PointedTree, RootedTree, TreeError};

pub const TREE_FORMAT: &str = "horoprod-tree/1";

#[derive(Debug, Serialize, Deserialize)]
struct TreeDoc {
    format: String,
    depth_limit: u32,
    offspring: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spine: Option<Vec<u32>>,
}

/// A parsed tree document: a bare rooted tree or one pointed at an end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeDocument {
    Rooted(RootedTree),
    Pointed(PointedTree),
}

impl TreeDocument {
    pub fn tree(&self) -> &RootedTree {
        match self {
            TreeDocument::Rooted(t) => t,
            TreeDocument::Pointed(pt) => pt.tree(),
        }
    }
}

pub fn serialize_tree(t: &RootedTree) -> String {
    to_text(t, None)
}

pub fn serialize_pointed(pt: &PointedTree) -> String {
    to_text(pt.tree(), Some(pt.spine().to_vec()))
}

fn to_text(t: &RootedTree, spine: Option<Vec<u32>>) -> String {
    let doc = TreeDoc {
        format: TREE_FORMAT.to_string(),
        depth_limit: t.depth_limit(),
        offspring: t.offspring_sequence().to_vec(),
        spine,
    };
    serde_json::to_string(&doc).expect("tree documents always serialize")
}

/// Parses a tree document.
///
/// JSON errors carry their line and column; encoding errors report the
/// offending index in the `offspring` (or `spine`) array as the column, with
/// line 0.
pub fn deserialize(text: &str) -> Result<TreeDocument, TreeError> {
    let doc: TreeDoc = serde_json::from_str(text).map_err(|e| TreeError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.format != TREE_FORMAT {
        return Err(TreeError::Parse {
            line: 0,
            column: 0,
            message: format!("unsupported format {:?}", doc.format),
        });
    }
    let tree = RootedTree::build(doc.offspring, doc.depth_limit)
        .map_err(|e| at_position(e, "offspring"))?;
    match doc.spine {
        None => Ok(TreeDocument::Rooted(tree)),
        Some(spine) => PointedTree::new(tree, spine)
            .map(TreeDocument::Pointed)
            .map_err(|e| at_position(e, "spine")),
    }
}

fn at_position(e: TreeError, field: &str) -> TreeError {
    let (column, detail) = match &e {
        TreeError::MalformedEncoding { position, .. } => (*position, e.to_string()),
        TreeError::InvalidSpine { position } => (*position, e.to_string()),
        _ => (0, e.to_string()),
    };
    TreeError::Parse {
        line: 0,
        column,
        message: format!("{field}: {detail}"),
    }
}
