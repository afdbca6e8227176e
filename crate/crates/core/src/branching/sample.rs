use rand::Rng;

use super::{BranchingError, OffspringLaw};
use crate::rng::rng_from_seed;
use crate::trees::RootedTree;

/// Limits applied by the samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub max_vertices: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            max_vertices: 20_000_000,
        }
    }
}

/// Plain Galton–Watson tree truncated at `depth`.
pub fn sample_gw(law: &OffspringLaw, depth: u32, seed: u64) -> Result<RootedTree, BranchingError> {
    sample_tree(
        law,
        depth,
        &mut rng_from_seed(seed),
        false,
        &SamplerConfig::default(),
    )
}

/// Augmented Galton–Watson tree: the root gets one extra child.
pub fn sample_augmented(
    law: &OffspringLaw,
    depth: u32,
    seed: u64,
) -> Result<RootedTree, BranchingError> {
    sample_tree(
        law,
        depth,
        &mut rng_from_seed(seed),
        true,
        &SamplerConfig::default(),
    )
}

/// Draws offspring counts generation by generation, in breadth-first order,
/// including the (unexpanded) horizon generation.
///
/// Because draws happen in BFS order, the tree sampled to depth `D` from a
/// given stream is the depth-`D` truncation of the tree sampled to any depth
/// `D' > D` from the same stream.
pub fn sample_tree<R: Rng + ?Sized>(
    law: &OffspringLaw,
    depth: u32,
    rng: &mut R,
    augmented: bool,
    config: &SamplerConfig,
) -> Result<RootedTree, BranchingError> {
    let mut bfs_counts: Vec<u32> = Vec::new();
    let mut generation_len = 1usize;
    for g in 0..=depth {
        let start = bfs_counts.len();
        if start + generation_len > config.max_vertices {
            return Err(BranchingError::ResourceLimit {
                vertices: start + generation_len,
                cap: config.max_vertices,
            });
        }
        for _ in 0..generation_len {
            bfs_counts.push(law.sample(rng));
        }
        if g == 0 && augmented {
            bfs_counts[0] += 1;
        }
        generation_len = bfs_counts[start..].iter().map(|&k| k as usize).sum();
    }
    Ok(RootedTree::build(
        bfs_to_preorder(&bfs_counts, depth),
        depth,
    )?)
}

/// Sizes `|S^0|, …, |S^depth|` using exactly the draws [`sample_tree`] makes
/// for the expanded generations.
pub fn sample_generation_sizes<R: Rng + ?Sized>(
    law: &OffspringLaw,
    depth: u32,
    rng: &mut R,
    augmented: bool,
) -> Vec<u64> {
    let mut sizes = Vec::with_capacity(depth as usize + 1);
    let mut current = 1u64;
    for g in 0..=depth {
        sizes.push(current);
        if g == depth {
            break;
        }
        let mut next: u64 = (0..current).map(|_| u64::from(law.sample(rng))).sum();
        if g == 0 && augmented {
            next += 1;
        }
        current = next;
    }
    sizes
}

fn bfs_to_preorder(counts: &[u32], depth: u32) -> Vec<u32> {
    // children of BFS vertex v occupy first_child[v]..first_child[v]+counts[v]
    let n = counts.len();
    let mut first_child = vec![0usize; n];
    let mut gen_depth = vec![0u32; n];
    let mut next = 1usize;
    for v in 0..n {
        first_child[v] = next;
        if gen_depth[v] < depth {
            let k = counts[v] as usize;
            for c in next..next + k {
                gen_depth[c] = gen_depth[v] + 1;
            }
            next += k;
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        out.push(counts[v]);
        if gen_depth[v] < depth {
            let k = counts[v] as usize;
            stack.extend((first_child[v]..first_child[v] + k).rev());
        }
    }
    out
}
