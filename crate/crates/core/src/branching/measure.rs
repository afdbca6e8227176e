use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use rand::Rng;
use serde::Serialize;

use super::{BranchingError, OffspringLaw};
use crate::rng::rng_from_seed;
use crate::trees::{NodeIx, PointedTree, RootedTree, TreeError, VertexId};

/// Finite-depth boundary mass `count / m^depth`.
///
/// `count` is either `|S^n|` (total mass) or `|S^n ∩ Σ^apex|` (mass of a
/// shadow). The exact value is kept as a rational.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMassEstimate {
    pub count: u64,
    pub depth: u32,
    pub mean: BigRational,
    pub apex: Option<VertexId>,
}

impl BoundaryMassEstimate {
    pub fn new(count: u64, depth: u32, law: &OffspringLaw, apex: Option<VertexId>) -> Self {
        BoundaryMassEstimate {
            count,
            depth,
            mean: law.exact_mean(),
            apex,
        }
    }

    pub fn exact(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.count)) / Pow::pow(&self.mean, self.depth)
    }

    pub fn value(&self) -> f64 {
        let m = rational_to_f64(&self.mean);
        self.count as f64 / m.powi(self.depth as i32)
    }
}

impl Serialize for BoundaryMassEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundaryMassEstimate", 5)?;
        st.serialize_field("value", &self.value())?;
        st.serialize_field("count", &self.count)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("exact", &self.exact().to_string())?;
        st.serialize_field("apex", &self.apex.as_ref().map(ToString::to_string))?;
        st.end()
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `|S^n_o| / m^n`, the finite-depth martingale value.
pub fn estimate_l(
    t: &RootedTree,
    law: &OffspringLaw,
    n: u32,
) -> Result<BoundaryMassEstimate, BranchingError> {
    Ok(BoundaryMassEstimate::new(t.sphere_size(n)?, n, law, None))
}

/// `|S^n_o ∩ Σ_o^apex| / m^n`.
pub fn branching_measure(
    t: &RootedTree,
    law: &OffspringLaw,
    apex: &VertexId,
    n: u32,
) -> Result<BoundaryMassEstimate, BranchingError> {
    let a = t.index_of(apex)?;
    branching_measure_ix(t, law, a, n)
}

pub fn branching_measure_ix(
    t: &RootedTree,
    law: &OffspringLaw,
    apex: NodeIx,
    n: u32,
) -> Result<BoundaryMassEstimate, BranchingError> {
    let count = t.shadow_sphere_count_ix(apex, n)?;
    Ok(BoundaryMassEstimate::new(
        count,
        n,
        law,
        Some(t.address(apex)),
    ))
}

/// Both sides of the finite-depth conformality identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalReport {
    pub y: String,
    pub apex: String,
    pub depth: u32,
    /// `β(o, y)` for ends in the shadow of the apex.
    pub busemann: i64,
    /// `ν̂_y(Σ; n-1)`, counted on the sphere of radius `n-1` around `y`.
    pub lhs: String,
    /// `m^{-β} · ν̂_o(Σ; n)`.
    pub rhs: String,
    pub exact: bool,
}

/// Compares the branching-measure estimate seen from a root neighbor `y`
/// with the root's estimate rescaled by `m^{-β(o,y)}`.
///
/// `y` must be a child of the root lying on `[o, apex]`, with `apex` a strict
/// descendant of `y`. The left side counts the sphere around `y` directly, so
/// the comparison does not reuse the root's count.
pub fn check_conformal(
    t: &RootedTree,
    law: &OffspringLaw,
    y: &VertexId,
    apex: &VertexId,
    n: u32,
) -> Result<ConformalReport, BranchingError> {
    let yi = t.index_of(y)?;
    let ai = t.index_of(apex)?;
    check_conformal_ix(t, law, yi, ai, n)
}

pub fn check_conformal_ix(
    t: &RootedTree,
    law: &OffspringLaw,
    y: NodeIx,
    apex: NodeIx,
    n: u32,
) -> Result<ConformalReport, BranchingError> {
    let root = t.root();
    if t.parent(y) != Some(root) || y == apex || !t.is_ancestor_or_self(y, apex) {
        return Err(BranchingError::PreconditionViolated(format!(
            "{} is not a root neighbor strictly above {}",
            t.address(y),
            t.address(apex)
        )));
    }
    if n < t.depth(apex) {
        return Err(TreeError::HorizonExceeded {
            requested: u64::from(n),
            depth_limit: t.depth(apex),
        }
        .into());
    }
    if n > t.depth_limit() {
        return Err(TreeError::HorizonExceeded {
            requested: u64::from(n),
            depth_limit: t.depth_limit(),
        }
        .into());
    }

    // Σ^apex seen from y is the same set of ends; count y's sphere inside it
    let count_y = t
        .sphere_around_ix(y, n - 1)?
        .into_iter()
        .filter(|&v| t.is_ancestor_or_self(apex, v))
        .count() as u64;
    let count_o = t.shadow_sphere_count_ix(apex, n)?;

    let busemann = ray_level(t, apex, y) - ray_level(t, apex, root);
    let m = law.exact_mean();
    let lhs = BigRational::from_integer(BigInt::from(count_y)) / Pow::pow(&m, n - 1);
    let scale = if busemann <= 0 {
        Pow::pow(&m, (-busemann) as u32)
    } else {
        BigRational::one() / Pow::pow(&m, busemann as u32)
    };
    let rhs = scale * BigRational::from_integer(BigInt::from(count_o)) / Pow::pow(&m, n);
    Ok(ConformalReport {
        y: t.address(y).to_string(),
        apex: t.address(apex).to_string(),
        depth: n,
        busemann,
        exact: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    })
}

/// Busemann level of `v` for an end whose ray from the root passes through
/// `through`, valid when the confluence of `v` with that ray is at or above
/// `through`.
fn ray_level(t: &RootedTree, through: NodeIx, v: NodeIx) -> i64 {
    let c = t.lca(v, through);
    i64::from(t.depth(v)) - 2 * i64::from(t.depth(c))
}

/// A ray sampled from the normalized finite-depth branching measure.
#[derive(Debug, Clone)]
pub struct BoundaryRay {
    pub pointed: PointedTree,
    /// `‖ν̂‖ = |S^n| / m^n` at the budget depth, for self-normalized reweighting.
    pub weight: BoundaryMassEstimate,
}

/// Descends from the root choosing each child with probability proportional
/// to its shadow's sphere count at depth `max(budget, k+1)`; the chosen path
/// becomes the spine.
pub fn sample_boundary_ray(
    t: RootedTree,
    law: &OffspringLaw,
    depth_budget: u32,
    seed: u64,
) -> Result<BoundaryRay, BranchingError> {
    sample_boundary_ray_with_rng(t, law, depth_budget, &mut rng_from_seed(seed))
}

pub fn sample_boundary_ray_with_rng<R: Rng + ?Sized>(
    t: RootedTree,
    law: &OffspringLaw,
    depth_budget: u32,
    rng: &mut R,
) -> Result<BoundaryRay, BranchingError> {
    let budget = depth_budget.min(t.depth_limit());
    if depth_budget > t.depth_limit() {
        return Err(TreeError::HorizonExceeded {
            requested: u64::from(depth_budget),
            depth_limit: t.depth_limit(),
        }
        .into());
    }
    // number of depth-`budget` descendants of each vertex
    let mut below = vec![0u64; t.len()];
    for i in (0..t.len()).rev() {
        let v = NodeIx(i as u32);
        if t.depth(v) == budget {
            below[i] = 1;
        }
        if let Some(p) = t.parent(v) {
            below[p.index()] += below[i];
        }
    }

    let mut spine = Vec::with_capacity(t.depth_limit() as usize);
    let mut v = t.root();
    for k in 0..t.depth_limit() {
        let kids = t.children(v);
        let weights: Vec<u64> = if k < budget {
            kids.iter().map(|&c| below[c as usize]).collect()
        } else {
            vec![1; kids.len()]
        };
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(BranchingError::DeadEnd { depth: k });
        }
        let mut pick = rng.random_range(0..total);
        let mut rank = 0;
        for (i, &w) in weights.iter().enumerate() {
            if pick < w {
                rank = i;
                break;
            }
            pick -= w;
        }
        spine.push(rank as u32 + 1);
        v = NodeIx(kids[rank]);
    }
    let weight = BoundaryMassEstimate::new(t.sphere_size(budget)?, budget, law, None);
    let pointed = PointedTree::new(t, spine)?;
    Ok(BoundaryRay { pointed, weight })
}
