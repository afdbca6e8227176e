use std::cmp::Ordering;

use rand::Rng;
use serde::Serialize;

use super::DynamicsError;
use crate::horoprod::{HoroWindow, WindowSummary};
use crate::rng::rng_from_seed;
use crate::trees::{NodeIx, PointedTree};

/// `|∂A| / |A|` for a set of interior window vertices, where `∂A` is the set of
/// members with a window neighbor outside `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoReport {
    pub description: String,
    pub method: &'static str,
    pub size: u64,
    pub boundary: u64,
    pub ratio: f64,
    /// Direction of the bound this ratio gives for the infinite graph.
    pub bound: &'static str,
    pub members: Vec<u32>,
    pub window: WindowSummary,
    pub seed: Option<u64>,
    pub evaluations: u64,
}

impl IsoReport {
    fn new(
        w: &HoroWindow,
        description: String,
        method: &'static str,
        members: Vec<u32>,
        boundary: u64,
    ) -> Self {
        let size = members.len() as u64;
        IsoReport {
            description,
            method,
            size,
            boundary,
            ratio: boundary as f64 / size as f64,
            bound: "upper bound on the isoperimetric constant",
            members,
            window: w.summary(),
            seed: None,
            evaluations: 0,
        }
    }

    /// Exact comparison of ratios.
    pub fn cmp_ratio(&self, other: &IsoReport) -> Ordering {
        cmp_frac((self.boundary, self.size), (other.boundary, other.size))
    }
}

fn cmp_frac(a: (u64, u64), b: (u64, u64)) -> Ordering {
    (u128::from(a.0) * u128::from(b.1)).cmp(&(u128::from(b.0) * u128::from(a.1)))
}

pub fn iso_ratio(w: &HoroWindow, set: &[u32]) -> Result<IsoReport, DynamicsError> {
    let mut members = set.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(DynamicsError::EmptySet);
    }
    let mut in_a = vec![false; w.len()];
    for &v in &members {
        if v as usize >= w.len() || !w.is_interior(v) {
            return Err(DynamicsError::NonInteriorMember(v));
        }
        in_a[v as usize] = true;
    }
    let boundary = members
        .iter()
        .filter(|&&v| w.neighbors(v).iter().any(|&u| !in_a[u as usize]))
        .count() as u64;
    Ok(IsoReport::new(
        w,
        format!("given set of {} vertices", members.len()),
        "given",
        members,
        boundary,
    ))
}

/// Vertices whose path to the end passes through `apex`, with level at most
/// `top`, grouped by level starting from the level of `apex`.
fn tetrahedron(pt: &PointedTree, apex: NodeIx, top: i64) -> Vec<Vec<NodeIx>> {
    let mut layers = vec![vec![apex]];
    for _ in pt.level(apex)..top {
        let next: Vec<NodeIx> = layers
            .last()
            .unwrap()
            .iter()
            .flat_map(|&v| pt.away_from_end(v))
            .collect();
        layers.push(next);
    }
    layers
}

/// Level-matched slab over the tetrahedron below the `n`-th left spine vertex
/// and the tetrahedron of the right root, intersected with the window.
///
/// Needs `H ≥ n + 1`, left depth `≥ 2n + 1` and right depth `≥ n + 1` so that
/// every member is interior.
pub fn folner_slab(w: &HoroWindow, n: u32) -> Result<Vec<u32>, DynamicsError> {
    let ld = w.left().tree().depth_limit();
    let rd = w.right().tree().depth_limit();
    let mut missing = Vec::new();
    if w.height() < n + 1 {
        missing.push(format!("height ≥ {} (have {})", n + 1, w.height()));
    }
    if ld < 2 * n + 1 {
        missing.push(format!("left depth ≥ {} (have {ld})", 2 * n + 1));
    }
    if rd < n + 1 {
        missing.push(format!("right depth ≥ {} (have {rd})", n + 1));
    }
    if !missing.is_empty() {
        return Err(DynamicsError::HorizonExceeded {
            n,
            requirement: missing.join(", "),
        });
    }
    let apex = w.left().spine_vertex(n).expect("depth checked");
    let left = tetrahedron(w.left(), apex, 0);
    let right = tetrahedron(w.right(), w.right().tree().root(), i64::from(n));
    let mut out = Vec::new();
    // left layer i has level i - n, right layer n - i has level n - i
    for (i, xs) in left.iter().enumerate() {
        for &x in xs {
            for &xr in &right[n as usize - i] {
                if let Some(id) = w.find(x, xr) {
                    out.push(id);
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Tuning for [`folner_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Candidate moves drawn per step, split between additions and removals.
    pub batch: u32,
    /// Non-improving steps before a restart.
    pub stagnation: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            batch: 16,
            stagnation: 200,
        }
    }
}

struct SetState<'a> {
    w: &'a HoroWindow,
    in_a: Vec<bool>,
    members: Vec<u32>,
    pos: Vec<u32>,
    inside: Vec<u32>,
    boundary: u64,
}

impl<'a> SetState<'a> {
    fn new(w: &'a HoroWindow, set: &[u32]) -> Self {
        let mut s = SetState {
            w,
            in_a: vec![false; w.len()],
            members: Vec::with_capacity(set.len()),
            pos: vec![u32::MAX; w.len()],
            inside: vec![0; w.len()],
            boundary: 0,
        };
        for &v in set {
            let b = s.after_add(v);
            s.add(v, b);
        }
        s
    }

    fn is_boundary(&self, v: u32) -> bool {
        self.inside[v as usize] < self.w.degree_of(v)
    }

    fn after_add(&self, u: u32) -> u64 {
        let mut b = self.boundary + u64::from(self.is_boundary(u));
        for &x in self.w.neighbors(u) {
            if self.in_a[x as usize] && self.inside[x as usize] + 1 == self.w.degree_of(x) {
                b -= 1;
            }
        }
        b
    }

    fn after_remove(&self, u: u32) -> u64 {
        let mut b = self.boundary - u64::from(self.is_boundary(u));
        for &x in self.w.neighbors(u) {
            if self.in_a[x as usize] && self.inside[x as usize] == self.w.degree_of(x) {
                b += 1;
            }
        }
        b
    }

    fn add(&mut self, u: u32, boundary: u64) {
        self.boundary = boundary;
        self.in_a[u as usize] = true;
        self.pos[u as usize] = self.members.len() as u32;
        self.members.push(u);
        for &x in self.w.neighbors(u) {
            self.inside[x as usize] += 1;
        }
    }

    fn remove(&mut self, u: u32, boundary: u64) {
        self.boundary = boundary;
        self.in_a[u as usize] = false;
        let p = self.pos[u as usize] as usize;
        self.members.swap_remove(p);
        if p < self.members.len() {
            self.pos[self.members[p] as usize] = p as u32;
        }
        self.pos[u as usize] = u32::MAX;
        for &x in self.w.neighbors(u) {
            self.inside[x as usize] -= 1;
        }
    }

    fn frac(&self) -> (u64, u64) {
        (self.boundary, self.members.len() as u64)
    }
}

fn seeds(w: &HoroWindow) -> Vec<IsoReport> {
    let mut out = Vec::new();
    for n in 1.. {
        match folner_slab(w, n) {
            Ok(set) if !set.is_empty() => {
                if let Ok(mut r) = iso_ratio(w, &set) {
                    r.description = format!("slab n={n}");
                    r.method = "slab";
                    out.push(r);
                }
            }
            _ => break,
        }
    }
    let max_dist = (0..w.len() as u32)
        .map(|v| w.distance_from_origin(v))
        .max()
        .unwrap_or(0);
    for r in 0..=max_dist {
        let set: Vec<u32> = (0..w.len() as u32)
            .take_while(|&v| w.distance_from_origin(v) <= r)
            .filter(|&v| w.is_interior(v))
            .collect();
        if let Ok(mut rep) = iso_ratio(w, &set) {
            rep.description = format!("ball r={r}");
            rep.method = "ball";
            out.push(rep);
        }
    }
    out
}

/// Greedy local search for a set with small `|∂A|/|A|`.
///
/// Starts from the best slab or ball, repeatedly applies the best of a random
/// batch of single-vertex additions and removals when it strictly lowers the
/// ratio (ties between moves go to the smallest vertex id), and restarts from
/// the next seed after 200 non-improving steps. `budget` counts evaluated
/// moves. The result is never worse than the best seed.
pub fn folner_search(w: &HoroWindow, budget: u64, seed: u64) -> Result<IsoReport, DynamicsError> {
    folner_search_with(w, budget, seed, SearchConfig::default())
}

pub fn folner_search_with(
    w: &HoroWindow,
    budget: u64,
    seed: u64,
    cfg: SearchConfig,
) -> Result<IsoReport, DynamicsError> {
    if budget == 0 {
        return Err(DynamicsError::ZeroBudget);
    }
    let mut starts = seeds(w);
    if starts.is_empty() {
        return Err(DynamicsError::EmptyInterior);
    }
    starts.sort_by(|a, b| a.cmp_ratio(b).then(a.size.cmp(&b.size)));
    let mut best = starts[0].clone();
    let mut best_from = best.description.clone();
    let mut rng = rng_from_seed(seed);
    let mut evaluations = 0u64;
    let mut restart = 0usize;

    'outer: while evaluations < budget {
        let origin_desc = starts[restart % starts.len()].description.clone();
        let mut state = SetState::new(w, &starts[restart % starts.len()].members);
        restart += 1;
        let mut stale = 0u32;
        while stale < cfg.stagnation {
            let mut chosen: Option<(u32, bool, u64)> = None;
            let mut chosen_frac = state.frac();
            for i in 0..cfg.batch {
                if evaluations >= budget {
                    break;
                }
                let x = state.members[rng.random_range(0..state.members.len())];
                let (u, adding) = if i % 2 == 0 {
                    let nb = w.neighbors(x);
                    let y = nb[rng.random_range(0..nb.len())];
                    if state.in_a[y as usize] || !w.is_interior(y) {
                        continue;
                    }
                    (y, true)
                } else {
                    if state.members.len() == 1 {
                        continue;
                    }
                    (x, false)
                };
                evaluations += 1;
                let (b, a) = if adding {
                    (state.after_add(u), state.members.len() as u64 + 1)
                } else {
                    (state.after_remove(u), state.members.len() as u64 - 1)
                };
                let ord = cmp_frac((b, a), chosen_frac);
                let better = match ord {
                    Ordering::Less => true,
                    Ordering::Equal => chosen.is_some_and(|(c, _, _)| u < c),
                    Ordering::Greater => false,
                };
                if better {
                    chosen = Some((u, adding, b));
                    chosen_frac = (b, a);
                }
            }
            match chosen {
                Some((u, adding, b)) if cmp_frac(chosen_frac, state.frac()) == Ordering::Less => {
                    if adding {
                        state.add(u, b);
                    } else {
                        state.remove(u, b);
                    }
                    stale = 0;
                    if cmp_frac(state.frac(), (best.boundary, best.size)) == Ordering::Less {
                        let mut members = state.members.clone();
                        members.sort_unstable();
                        best = IsoReport::new(w, String::new(), "search", members, state.boundary);
                        best_from = origin_desc.clone();
                    }
                }
                _ => stale += 1,
            }
            if evaluations >= budget {
                break 'outer;
            }
        }
    }
    if best.method == "search" {
        best.description = format!("greedy search from {best_from}");
    }
    best.seed = Some(seed);
    best.evaluations = evaluations;
    Ok(best)
}
