//! Offspring laws, Galton–Watson samplers and branching boundary measures.

mod law;
mod measure;
mod montecarlo;
mod sample;

pub use law::{OffspringLaw, LAW_FORMAT};
pub use measure::{
    branching_measure, branching_measure_ix, check_conformal, check_conformal_ix, estimate_l,
    sample_boundary_ray, sample_boundary_ray_with_rng, BoundaryMassEstimate, BoundaryRay,
    ConformalReport,
};
pub use montecarlo::{
    augmented_mass_mean, invariance_samples, invariance_test, martingale_mean,
    DistributionComparison, DoublyRootedTree, InvarianceReport, InvarianceSamples, MassMeanReport,
};
pub use sample::{
    sample_augmented, sample_generation_sizes, sample_gw, sample_tree, SamplerConfig,
};

use crate::trees::TreeError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BranchingError {
    #[error("invalid offspring law: {0}")]
    InvalidLaw(String),
    #[error("standing assumption violated: {0}")]
    StandingAssumption(String),
    #[error("law document: {0}")]
    Parse(String),
    #[error("sampler would exceed {cap} vertices ({vertices} requested)")]
    ResourceLimit { vertices: usize, cap: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("all child estimates vanish at depth {depth}")]
    DeadEnd { depth: u32 },
    #[error("insufficient samples: smallest cell mass {min_cell} is below 5")]
    InsufficientSamples { min_cell: f64 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}
