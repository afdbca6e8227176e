//! Random trees, branching boundary measures and horospheric products.
//!
//! * [`trees`]: truncated rooted trees, ends, Busemann levels, canonical codes.
//! * [`branching`]: offspring laws, Galton–Watson samplers, branching-measure
//!   estimators and the invariance test for `(1/deg)·P'`.
//! * [`horoprod`]: finite windows of the horospheric product of two pointed
//!   trees.
//! * [`dynamics`]: killed random walks, Dirichlet spectral radius and
//!   isoperimetric (Følner) diagnostics on windows.

pub mod branching;
pub mod dynamics;
pub mod horoprod;
pub mod rng;
pub mod stats;
pub mod trees;

pub use branching::{BoundaryMassEstimate, DoublyRootedTree, OffspringLaw};
pub use dynamics::{IsoReport, WalkReport};
pub use horoprod::{HoroVertex, HoroWindow};
pub use trees::{NodeIx, PointedTree, RootedTree, TreeError, VertexId};
