//! Killed random walks, Dirichlet spectral radius and isoperimetric ratios on
//! horospheric-product windows.
//!
//! Non-interior window vertices are absorbing everywhere in this module: walks
//! die on them, the spectral operator is restricted to the interior, and
//! candidate Følner sets may not contain them. Every quantity is therefore a
//! bound for the infinite graph, and reports say which direction.

mod iso;
mod spectral;
mod walk;

pub use iso::{folner_search, folner_search_with, folner_slab, iso_ratio, IsoReport, SearchConfig};
pub use spectral::{dirichlet_spectral_radius, SpectralEstimate, MAX_POWER_ITERATIONS};
pub use walk::{simulate_walk, McSpectral, ReturnEstimate, WalkReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("power iteration did not converge after {iterations} iterations (last relative change {last_change:e})")]
    NoConvergence { iterations: u32, last_change: f64 },
    #[error("window has no interior vertex")]
    EmptyInterior,
    #[error("vertex {0} is not an interior window vertex")]
    NonInteriorMember(u32),
    #[error("candidate set is empty")]
    EmptySet,
    #[error("slab n={n} needs {requirement}")]
    HorizonExceeded { n: u32, requirement: String },
    #[error("search budget must be positive")]
    ZeroBudget,
}
