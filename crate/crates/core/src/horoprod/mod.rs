//! Horospheric products of two pointed trees and their finite windows.

mod export;
mod window;

pub use export::{dot, edge_list, vertex_table, ExportFormat};
pub use window::{HoroVertex, HoroWindow, WindowSummary};

use crate::branching::{
    sample_boundary_ray_with_rng, sample_tree, BranchingError, OffspringLaw, SamplerConfig,
};
use crate::rng::stream_rng;
use crate::trees::{PointedTree, TreeError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WindowError {
    #[error("window height {height} exceeds tree depth {depth}")]
    HorizonExceeded { height: u32, depth: u32 },
    #[error("vertex {0} is not in the window")]
    UnknownVertex(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Branching(#[from] BranchingError),
}

/// Parameters of a sampled window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub left_law: OffspringLaw,
    pub right_law: OffspringLaw,
    pub left_depth: u32,
    pub right_depth: u32,
    pub height: u32,
}

/// Augmented GW tree to `depth` with a ray drawn from its finite-depth
/// branching measure. Tree draws and ray draws use separate streams so the
/// tree does not depend on the ray.
pub fn sample_pointed(
    law: &OffspringLaw,
    depth: u32,
    seed: u64,
    stream: u64,
) -> Result<PointedTree, WindowError> {
    let tree = sample_tree(
        law,
        depth,
        &mut stream_rng(seed, 2 * stream),
        true,
        &SamplerConfig::default(),
    )?;
    let ray =
        sample_boundary_ray_with_rng(tree, law, depth, &mut stream_rng(seed, 2 * stream + 1))?;
    Ok(ray.pointed)
}

pub fn sample_window(spec: &WindowSpec, seed: u64) -> Result<HoroWindow, WindowError> {
    let left = sample_pointed(&spec.left_law, spec.left_depth, seed, 0)?;
    let right = sample_pointed(&spec.right_law, spec.right_depth, seed, 1)?;
    HoroWindow::build(left, right, spec.height)
}
