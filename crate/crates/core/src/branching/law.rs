use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BranchingError;

pub const LAW_FORMAT: &str = "horoprod-law/1";

const SUM_TOLERANCE: f64 = 1e-12;

/// Finite-support offspring distribution `{p_k}`.
///
/// The standing assumptions are `p_0 = 0` (no extinction) and a support with
/// at least two points. Laws violating them (deterministic trees, paths,
/// extinction) are only accepted through [`OffspringLaw::with_override`].
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw {
    probs: Vec<(u32, f64)>,
    mean: f64,
    overridden: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct LawDoc {
    format: String,
    probs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    allow_degenerate: bool,
}

impl OffspringLaw {
    /// A law satisfying the standing assumptions.
    pub fn new(probs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self, BranchingError> {
        let law = Self::validated(probs, false)?;
        if !law.no_extinction() {
            return Err(BranchingError::StandingAssumption(
                "p_0 must be 0 (use the override for laws with extinction)".into(),
            ));
        }
        if !law.nondegenerate() {
            return Err(BranchingError::StandingAssumption(
                "support must contain at least two points (use the override for deterministic laws)".into(),
            ));
        }
        Ok(law)
    }

    /// Any valid finite-support law, standing assumptions waived.
    pub fn with_override(
        probs: impl IntoIterator<Item = (u32, f64)>,
    ) -> Result<Self, BranchingError> {
        Self::validated(probs, true)
    }

    /// The law `{k: 1}`.
    pub fn deterministic(k: u32) -> Result<Self, BranchingError> {
        Self::with_override([(k, 1.0)])
    }

    fn validated(
        probs: impl IntoIterator<Item = (u32, f64)>,
        overridden: bool,
    ) -> Result<Self, BranchingError> {
        let mut merged: BTreeMap<u32, f64> = BTreeMap::new();
        for (k, p) in probs {
            if !p.is_finite() || p < 0.0 {
                return Err(BranchingError::InvalidLaw(format!(
                    "probability of {k} is {p}"
                )));
            }
            *merged.entry(k).or_insert(0.0) += p;
        }
        let probs: Vec<(u32, f64)> = merged.into_iter().filter(|&(_, p)| p > 0.0).collect();
        if probs.is_empty() {
            return Err(BranchingError::InvalidLaw("empty support".into()));
        }
        let total: f64 = probs.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(BranchingError::InvalidLaw(format!(
                "probabilities sum to {total}"
            )));
        }
        let mean: f64 = probs.iter().map(|&(k, p)| f64::from(k) * p).sum();
        if mean <= 0.0 {
            return Err(BranchingError::InvalidLaw(
                "mean offspring must be positive".into(),
            ));
        }
        Ok(OffspringLaw {
            probs,
            mean,
            overridden,
        })
    }

    /// `(k, p_k)` pairs with `p_k > 0`, increasing in `k`.
    pub fn probs(&self) -> &[(u32, f64)] {
        &self.probs
    }

    pub fn prob(&self, k: u32) -> f64 {
        self.probs
            .iter()
            .find(|&&(j, _)| j == k)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.probs.iter().map(|&(k, _)| k)
    }

    pub fn min_offspring(&self) -> u32 {
        self.probs[0].0
    }

    pub fn max_offspring(&self) -> u32 {
        self.probs[self.probs.len() - 1].0
    }

    /// `m = Σ k p_k`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `m` as an exact rational: the nearest integer when `m` is within
    /// `1e-12` of one, otherwise the exact binary value of the float.
    pub fn exact_mean(&self) -> BigRational {
        let rounded = self.mean.round();
        if (self.mean - rounded).abs() < SUM_TOLERANCE {
            BigRational::from_integer(BigInt::from(rounded as i64))
        } else {
            BigRational::from_float(self.mean).expect("finite mean")
        }
    }

    /// Conformal exponent `λ = log m`.
    pub fn exponent(&self) -> f64 {
        self.mean.ln()
    }

    pub fn no_extinction(&self) -> bool {
        self.prob(0) == 0.0
    }

    pub fn nondegenerate(&self) -> bool {
        self.probs.len() >= 2
    }

    pub fn satisfies_standing_assumptions(&self) -> bool {
        self.no_extinction() && self.nondegenerate()
    }

    pub fn is_overridden(&self) -> bool {
        self.overridden
    }

    /// `Σ k log k p_k < ∞`, which every finite-support law satisfies.
    pub fn kesten_stigum(&self) -> bool {
        true
    }

    /// Offspring variance `σ²`.
    pub fn variance(&self) -> f64 {
        self.probs
            .iter()
            .map(|&(k, p)| p * (f64::from(k) - self.mean).powi(2))
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(k, p) in &self.probs {
            acc += p;
            if u < acc {
                return k;
            }
        }
        self.max_offspring()
    }

    pub fn from_json(text: &str) -> Result<Self, BranchingError> {
        let doc: LawDoc =
            serde_json::from_str(text).map_err(|e| BranchingError::Parse(e.to_string()))?;
        if doc.format != LAW_FORMAT {
            return Err(BranchingError::Parse(format!(
                "unsupported format {:?}",
                doc.format
            )));
        }
        let mut probs = Vec::with_capacity(doc.probs.len());
        for (k, p) in doc.probs {
            let k: u32 = k.trim().parse().map_err(|_| {
                BranchingError::Parse(format!(
                    "offspring count {k:?} is not a nonnegative integer"
                ))
            })?;
            probs.push((k, p));
        }
        if doc.allow_degenerate {
            Self::with_override(probs)
        } else {
            Self::new(probs)
        }
    }

    pub fn to_json(&self) -> String {
        let doc = LawDoc {
            format: LAW_FORMAT.to_string(),
            probs: self
                .probs
                .iter()
                .map(|&(k, p)| (k.to_string(), p))
                .collect(),
            allow_degenerate: self.overridden,
        };
        serde_json::to_string(&doc).expect("law documents always serialize")
    }
}
