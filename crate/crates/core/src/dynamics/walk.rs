use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::horoprod::{HoroWindow, WindowSummary};
use crate::rng::replica_rng;
use crate::stats::wilson_interval;

use super::SpectralEstimate;

const Z95: f64 = 1.959_963_984_540_054;

/// Empirical `p_{2k}(o, o)` for the killed walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnEstimate {
    /// Time `2k`.
    pub time: u32,
    pub returns: u64,
    pub p: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkReport {
    pub window: WindowSummary,
    pub steps: u32,
    pub replicas: u64,
    pub seed: u64,
    /// One entry per even time `0, 2, …, steps`.
    pub returns: Vec<ReturnEstimate>,
    /// Fraction of walks still alive after `steps` steps.
    pub survival: f64,
    /// `p_{2k}^{1/2k}` at the largest `2k` with at least 10 returns, with its
    /// Wilson interval mapped through the same power. A lower-bound estimate.
    pub mc_spectral: Option<McSpectral>,
    /// Filled in by callers that also run power iteration.
    pub dirichlet: Option<SpectralEstimate>,
    pub wall_time_ms: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSpectral {
    pub time: u32,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl WalkReport {
    /// `k,p2k,ci_lo,ci_hi` rows (with header), `k` indexing time `2k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,p2k,ci_lo,ci_hi\n");
        for r in &self.returns {
            out.push_str(&format!("{},{},{},{}\n", r.time / 2, r.p, r.ci_lo, r.ci_hi));
        }
        out
    }
}

/// Runs `replicas` simple random walks of `steps` steps from the origin.
///
/// From an interior vertex the walk moves to a uniform window neighbor; on
/// reaching a non-interior vertex it is killed. Replica `i` uses the stream
/// seeded with `seed ^ i`; counts are summed, so the result does not depend on
/// thread scheduling.
pub fn simulate_walk(w: &HoroWindow, steps: u32, replicas: u64, seed: u64) -> WalkReport {
    let start = Instant::now();
    let half = (steps / 2) as usize;
    let origin = w.origin();
    let (counts, alive) = (0..replicas)
        .into_par_iter()
        .fold(
            || (vec![0u64; half + 1], 0u64),
            |(mut counts, mut alive), i| {
                let mut rng = replica_rng(seed, i);
                let mut v = origin;
                let mut dead = !w.is_interior(v);
                counts[0] += 1;
                for t in 1..=steps {
                    if dead {
                        break;
                    }
                    let nb = w.neighbors(v);
                    v = nb[rng.random_range(0..nb.len())];
                    if t % 2 == 0 && v == origin {
                        counts[(t / 2) as usize] += 1;
                    }
                    dead = !w.is_interior(v);
                }
                if !dead {
                    alive += 1;
                }
                (counts, alive)
            },
        )
        .reduce(
            || (vec![0u64; half + 1], 0u64),
            |(mut a, x), (b, y)| {
                a.iter_mut().zip(&b).for_each(|(a, b)| *a += b);
                (a, x + y)
            },
        );

    let returns: Vec<ReturnEstimate> = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let (lo, hi) = wilson_interval(c, replicas, Z95);
            ReturnEstimate {
                time: 2 * k as u32,
                returns: c,
                p: if replicas == 0 {
                    0.0
                } else {
                    c as f64 / replicas as f64
                },
                ci_lo: lo,
                ci_hi: hi,
            }
        })
        .collect();
    let mc_spectral = returns
        .iter()
        .skip(1)
        .rev()
        .find(|r| r.returns >= 10)
        .map(|r| {
            let e = 1.0 / f64::from(r.time);
            McSpectral {
                time: r.time,
                estimate: r.p.powf(e),
                ci_lo: r.ci_lo.powf(e),
                ci_hi: r.ci_hi.powf(e),
            }
        });
    WalkReport {
        window: w.summary(),
        steps,
        replicas,
        seed,
        returns,
        survival: if replicas == 0 {
            0.0
        } else {
            alive as f64 / replicas as f64
        },
        mc_spectral,
        dirichlet: None,
        wall_time_ms: start.elapsed().as_millis(),
    }
}
