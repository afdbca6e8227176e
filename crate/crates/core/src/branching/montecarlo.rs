use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::sample::{sample_generation_sizes, sample_tree, SamplerConfig};
use super::{BranchingError, OffspringLaw};
use crate::rng::replica_rng;
use crate::stats::{chi_square_homogeneity, mean_and_se, total_variation, ChiSquare};
use crate::trees::{region_code, NodeIx, RootedTree, TreeError};

/// Monte Carlo estimate of a mean boundary mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassMeanReport {
    pub estimate: f64,
    pub std_err: f64,
    pub n_samples: usize,
    pub depth: u32,
    pub seed: u64,
    pub wall_time_ms: u128,
    pub augmented: bool,
    pub law_mean: f64,
    /// Limit value: `1` for plain trees, `1 + 1/m` for augmented ones.
    pub target: f64,
}

impl MassMeanReport {
    /// Distance to the target in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.std_err == 0.0 {
            if self.estimate == self.target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - self.target) / self.std_err
        }
    }
}

/// Mean of `|S^n|/m^n` over plain Galton–Watson samples (limit `E L = 1`).
pub fn martingale_mean(
    law: &OffspringLaw,
    depth: u32,
    replicas: usize,
    seed: u64,
) -> Result<MassMeanReport, BranchingError> {
    mass_mean(law, depth, replicas, seed, false)
}

/// Mean of `|S^n|/m^n` over augmented samples (limit `E'‖ν‖ = 1 + 1/m`).
pub fn augmented_mass_mean(
    law: &OffspringLaw,
    depth: u32,
    replicas: usize,
    seed: u64,
) -> Result<MassMeanReport, BranchingError> {
    mass_mean(law, depth, replicas, seed, true)
}

fn mass_mean(
    law: &OffspringLaw,
    depth: u32,
    replicas: usize,
    seed: u64,
    augmented: bool,
) -> Result<MassMeanReport, BranchingError> {
    if replicas == 0 {
        return Err(BranchingError::PreconditionViolated(
            "at least one replica is required".into(),
        ));
    }
    let start = Instant::now();
    let m = law.mean();
    let scale = m.powi(depth as i32);
    let values: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let sizes = sample_generation_sizes(law, depth, &mut replica_rng(seed, i), augmented);
            sizes[depth as usize] as f64 / scale
        })
        .collect();
    let est = mean_and_se(&values);
    Ok(MassMeanReport {
        estimate: est.mean,
        std_err: est.std_err,
        n_samples: est.n,
        depth,
        seed,
        wall_time_ms: start.elapsed().as_millis(),
        augmented,
        law_mean: m,
        target: if augmented { 1.0 + 1.0 / m } else { 1.0 },
    })
}

/// A tree with two adjacent distinguished vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoublyRootedTree {
    tree: RootedTree,
    primary: NodeIx,
    secondary: NodeIx,
}

impl DoublyRootedTree {
    pub fn new(
        tree: RootedTree,
        primary: NodeIx,
        secondary: NodeIx,
    ) -> Result<Self, BranchingError> {
        if primary.index() >= tree.len() || secondary.index() >= tree.len() {
            return Err(TreeError::UnknownVertex(crate::trees::VertexId::root()).into());
        }
        if tree.distance_ix(primary, secondary) != 1 {
            return Err(BranchingError::PreconditionViolated(
                "roots must be adjacent".into(),
            ));
        }
        Ok(DoublyRootedTree {
            tree,
            primary,
            secondary,
        })
    }

    /// Joins the roots of two trees with an edge. The secondary tree becomes
    /// the first child of the primary root, so its horizon must be one
    /// generation shallower.
    pub fn join(primary: &RootedTree, secondary: &RootedTree) -> Result<Self, BranchingError> {
        if primary.depth_limit() != secondary.depth_limit() + 1 {
            return Err(BranchingError::PreconditionViolated(format!(
                "secondary horizon {} must be one less than primary horizon {}",
                secondary.depth_limit(),
                primary.depth_limit()
            )));
        }
        let p = primary.offspring_sequence();
        let mut seq = Vec::with_capacity(p.len() + secondary.len());
        seq.push(p[0] + 1);
        seq.extend_from_slice(secondary.offspring_sequence());
        seq.extend_from_slice(&p[1..]);
        let tree = RootedTree::build(seq, primary.depth_limit())?;
        Ok(DoublyRootedTree {
            tree,
            primary: NodeIx::ROOT,
            secondary: NodeIx(1),
        })
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn primary(&self) -> NodeIx {
        self.primary
    }

    pub fn secondary(&self) -> NodeIx {
        self.secondary
    }

    /// The involution exchanging the two roots.
    pub fn swapped(&self) -> Self {
        DoublyRootedTree {
            tree: self.tree.clone(),
            primary: self.secondary,
            secondary: self.primary,
        }
    }

    /// Canonical code of the `radius`-neighborhood of both roots, rooted at
    /// the primary with the secondary marked.
    pub fn ball_code(&self, radius: u32) -> Result<Vec<u8>, BranchingError> {
        Ok(region_code(
            &self.tree,
            &[self.primary, self.secondary],
            radius,
            self.primary,
            &[self.secondary],
        )?)
    }

    fn swapped_ball_code(&self, radius: u32) -> Result<Vec<u8>, BranchingError> {
        Ok(region_code(
            &self.tree,
            &[self.primary, self.secondary],
            radius,
            self.secondary,
            &[self.primary],
        )?)
    }
}

/// Comparison of two empirical distributions over doubly-rooted ball codes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionComparison {
    pub total_variation: f64,
    pub chi_square: ChiSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub radius: u32,
    pub n_samples: usize,
    pub seed: u64,
    pub cells: usize,
    /// Root-neighbor pairs of augmented trees weighted by `1/deg` against
    /// two independent trees joined at the roots.
    pub augmented_vs_joined: DistributionComparison,
    /// Joined trees against their root-swapped images.
    pub joined_vs_swapped: DistributionComparison,
    pub wall_time_ms: u128,
}

impl InvarianceReport {
    pub fn passes(&self, max_tv: f64, min_p: f64) -> bool {
        [&self.augmented_vs_joined, &self.joined_vs_swapped]
            .iter()
            .all(|c| c.total_variation <= max_tv && c.chi_square.p_value >= min_p)
    }
}

/// Empirical code distributions produced by [`invariance_samples`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvarianceSamples {
    pub augmented: BTreeMap<Vec<u8>, f64>,
    pub joined: BTreeMap<Vec<u8>, f64>,
    pub swapped: BTreeMap<Vec<u8>, f64>,
}

struct ReplicaCodes {
    augmented: Vec<(Vec<u8>, f64)>,
    joined: Vec<u8>,
    swapped: Vec<u8>,
}

/// Draws the three weighted code samples used by [`invariance_test`].
pub fn invariance_samples(
    law: &OffspringLaw,
    radius: u32,
    replicas: usize,
    seed: u64,
) -> Result<InvarianceSamples, BranchingError> {
    if radius == 0 {
        return Err(BranchingError::PreconditionViolated(
            "radius must be at least 1".into(),
        ));
    }
    let cfg = SamplerConfig::default();
    let per_replica: Vec<ReplicaCodes> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| -> Result<ReplicaCodes, BranchingError> {
            let mut rng = replica_rng(seed, i);
            let aug = sample_tree(law, radius + 1, &mut rng, true, &cfg)?;
            let root = aug.root();
            let weight = 1.0 / f64::from(aug.degree(root));
            let mut augmented = Vec::with_capacity(aug.children(root).len());
            for &c in aug.children(root) {
                let code = region_code(&aug, &[root, NodeIx(c)], radius, root, &[NodeIx(c)])?;
                augmented.push((code, weight));
            }
            let first = sample_tree(law, radius + 1, &mut rng, false, &cfg)?;
            let second = sample_tree(law, radius, &mut rng, false, &cfg)?;
            let pair = DoublyRootedTree::join(&first, &second)?;
            Ok(ReplicaCodes {
                augmented,
                joined: pair.ball_code(radius)?,
                swapped: pair.swapped_ball_code(radius)?,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut out = InvarianceSamples::default();
    for r in per_replica {
        for (code, w) in r.augmented {
            *out.augmented.entry(code).or_insert(0.0) += w;
        }
        *out.joined.entry(r.joined).or_insert(0.0) += 1.0;
        *out.swapped.entry(r.swapped).or_insert(0.0) += 1.0;
    }
    Ok(out)
}

/// Tests invariance of `(1/deg)·P'` through its doubly-rooted form.
///
/// Weighted masses enter the chi-square as counts; each augmented tree
/// contributes total mass 1 split over its root-neighbor pairs, whose per-tree
/// cell masses lie in `[0, 1]`, so the multinomial variance bounds theirs.
pub fn invariance_test(
    law: &OffspringLaw,
    radius: u32,
    replicas: usize,
    seed: u64,
) -> Result<InvarianceReport, BranchingError> {
    let start = Instant::now();
    let samples = invariance_samples(law, radius, replicas, seed)?;
    let compare = |a: &BTreeMap<Vec<u8>, f64>, b: &BTreeMap<Vec<u8>, f64>| DistributionComparison {
        total_variation: total_variation(a, b),
        chi_square: chi_square_homogeneity(a, b),
    };
    let augmented_vs_joined = compare(&samples.augmented, &samples.joined);
    let joined_vs_swapped = compare(&samples.joined, &samples.swapped);
    let min_cell = augmented_vs_joined
        .chi_square
        .min_cell
        .min(joined_vs_swapped.chi_square.min_cell);
    if min_cell < 5.0 {
        return Err(BranchingError::InsufficientSamples { min_cell });
    }
    let mut cells: Vec<&Vec<u8>> = samples
        .augmented
        .keys()
        .chain(samples.joined.keys())
        .chain(samples.swapped.keys())
        .collect();
    cells.sort();
    cells.dedup();
    Ok(InvarianceReport {
        radius,
        n_samples: replicas,
        seed,
        cells: cells.len(),
        augmented_vs_joined,
        joined_vs_swapped,
        wall_time_ms: start.elapsed().as_millis(),
    })
}
