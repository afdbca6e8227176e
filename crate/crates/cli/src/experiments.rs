use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use clap::Args;
use horoprod_core::branching::{
    augmented_mass_mean, check_conformal_ix, invariance_test, martingale_mean, sample_augmented,
    sample_boundary_ray_with_rng, sample_gw, ConformalReport,
};
use horoprod_core::dynamics::{
    dirichlet_spectral_radius, folner_search, folner_slab, iso_ratio, simulate_walk,
};
use horoprod_core::horoprod::{sample_window, ExportFormat, HoroWindow, WindowSpec};
use horoprod_core::rng::{rng_from_seed, stream_rng};
use horoprod_core::trees::{serialize_pointed, serialize_tree};
use horoprod_core::NodeIx;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{is_false, parse_law, require, Params, Run};

/// Laws and sizes of a sampled window.
#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
pub struct WindowArgs {
    /// Offspring law of the left tree (file or `k:p,...`).
    #[arg(long)]
    pub left: Option<String>,
    /// Offspring law of the right tree.
    #[arg(long)]
    pub right: Option<String>,
    /// Window half-height H: levels in [-H, H].
    #[arg(long)]
    pub height: Option<u32>,
    /// Sampling depth of both trees [default: 2H].
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub left_depth: Option<u32>,
    #[arg(long)]
    pub right_depth: Option<u32>,
}

impl WindowArgs {
    fn fill_defaults(&mut self) {
        let h = *self.height.get_or_insert(4);
        let d = *self.depth.get_or_insert(2 * h);
        self.left_depth.get_or_insert(d);
        self.right_depth.get_or_insert(d);
    }

    fn sample(&self, seed: u64) -> Result<HoroWindow> {
        let spec = WindowSpec {
            left_law: parse_law(&require(&self.left, "left")?)?,
            right_law: parse_law(&require(&self.right, "right")?)?,
            left_depth: self.left_depth.unwrap_or_default(),
            right_depth: self.right_depth.unwrap_or_default(),
            height: self.height.unwrap_or_default(),
        };
        Ok(sample_window(&spec, seed)?)
    }
}

macro_rules! seeded {
    ($t:ty, |$s:ident| $body:block) => {
        impl Params for $t {
            fn fill_defaults(&mut $s) {
                $s.seed.get_or_insert(0);
                $body
            }
            fn seed(&self) -> u64 {
                self.seed.unwrap_or(0)
            }
        }
    };
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct SampleTreeArgs {
    #[arg(long)]
    pub law: Option<String>,
    /// Depth of the horizon [default: 6].
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Give the root one extra child.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub augmented: bool,
    /// Also draw a ray from the finite-depth branching measure.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub pointed: bool,
}

seeded!(SampleTreeArgs, |self| {
    self.depth.get_or_insert(6);
});

#[derive(Serialize)]
struct TreeSummary {
    vertices: usize,
    depth_limit: u32,
    generation_sizes: Vec<u64>,
    augmented: bool,
    spine: Option<Vec<u32>>,
    document: String,
}

pub fn sample_tree(a: SampleTreeArgs, run: &Run) -> Result<bool> {
    let law = parse_law(&require(&a.law, "law")?)?;
    let depth = a.depth.unwrap_or_default();
    let seed = run.seed;
    let t = if a.augmented {
        sample_augmented(&law, depth, seed)?
    } else {
        sample_gw(&law, depth, seed)?
    };
    let sizes = t.generation_sizes().to_vec();
    let vertices = t.len();
    let (text, spine) = if a.pointed {
        let ray = sample_boundary_ray_with_rng(t, &law, depth, &mut stream_rng(seed, 1))?;
        (
            serialize_pointed(&ray.pointed),
            Some(ray.pointed.spine().to_vec()),
        )
    } else {
        (serialize_tree(&t), None)
    };
    let doc = run.write("tree.json", &(text + "\n"))?;
    run.report(
        &TreeSummary {
            vertices,
            depth_limit: depth,
            generation_sizes: sizes.clone(),
            augmented: a.augmented,
            spine,
            document: "tree.json".into(),
        },
        None,
    )?;
    println!("{vertices} vertices, generation sizes {sizes:?}");
    println!("wrote {}", doc.display());
    Ok(true)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct MassMeanArgs {
    #[arg(long)]
    pub law: Option<String>,
    /// Depth n [default: 10].
    #[arg(long)]
    pub depth: Option<u32>,
    /// Number of sampled trees [default: 5000].
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Plain Galton–Watson trees instead of augmented ones.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub plain: bool,
}

seeded!(MassMeanArgs, |self| {
    self.depth.get_or_insert(10);
    self.replicas.get_or_insert(5000);
});

pub fn mass_mean(a: MassMeanArgs, run: &Run) -> Result<bool> {
    let law = parse_law(&require(&a.law, "law")?)?;
    let (depth, replicas) = (a.depth.unwrap_or_default(), a.replicas.unwrap_or_default());
    let r = if a.plain {
        martingale_mean(&law, depth, replicas, run.seed)?
    } else {
        augmented_mass_mean(&law, depth, replicas, run.seed)?
    };
    let path = run.report(&r, None)?;
    println!(
        "estimate {:.4} ± {:.4} (target {:.4}, z = {:.2})",
        r.estimate,
        r.std_err,
        r.target,
        r.z_score()
    );
    println!("wrote {}", path.display());
    Ok(true)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct ConformalArgs {
    #[arg(long)]
    pub law: Option<String>,
    /// Number of random (tree, neighbor, apex, depth) draws [default: 1000].
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Smallest tree depth [default: 3].
    #[arg(long)]
    pub min_depth: Option<u32>,
    /// Largest tree depth [default: 7].
    #[arg(long)]
    pub max_depth: Option<u32>,
}

seeded!(ConformalArgs, |self| {
    self.trials.get_or_insert(1000);
    self.min_depth.get_or_insert(3);
    self.max_depth.get_or_insert(7);
});

#[derive(Serialize)]
struct ConformalSummary {
    trials: u64,
    exact: u64,
    failures: Vec<ConformalReport>,
}

pub fn conformal(a: ConformalArgs, run: &Run) -> Result<bool> {
    let law = parse_law(&require(&a.law, "law")?)?;
    let (lo, hi) = (
        a.min_depth.unwrap_or_default(),
        a.max_depth.unwrap_or_default(),
    );
    if lo < 2 || lo > hi {
        bail!("need 2 ≤ min-depth ≤ max-depth, got {lo}..{hi}");
    }
    let trials = a.trials.unwrap_or_default();
    let mut rng = rng_from_seed(run.seed);
    let mut summary = ConformalSummary {
        trials,
        exact: 0,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let depth = rng.random_range(lo..=hi);
        let t = sample_gw(&law, depth, rng.random())?;
        let kids = t.children(t.root());
        if kids.is_empty() {
            bail!("trial {trial}: the root has no children");
        }
        let y = NodeIx(kids[rng.random_range(0..kids.len())]);
        let below: Vec<NodeIx> = (y.0 + 1..t.subtree_end(y).0).map(NodeIx).collect();
        if below.is_empty() {
            bail!(
                "trial {trial}: root neighbor {} has no descendants",
                t.address(y)
            );
        }
        let apex = below[rng.random_range(0..below.len())];
        let n = rng.random_range(t.depth(apex)..=depth);
        let r = check_conformal_ix(&t, &law, y, apex, n)?;
        if r.exact {
            summary.exact += 1;
        } else if summary.failures.len() < 20 {
            summary.failures.push(r);
        }
    }
    let ok = summary.exact == trials;
    let path = run.report(&summary, Some(ok))?;
    println!("{}/{} exact", summary.exact, trials);
    println!("wrote {}", path.display());
    Ok(ok)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct InvarianceArgs {
    #[arg(long)]
    pub law: Option<String>,
    /// Radius of the compared balls [default: 1].
    #[arg(long)]
    pub radius: Option<u32>,
    /// Samples per distribution [default: 100000].
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest total variation accepted [default: 0.02].
    #[arg(long)]
    pub max_tv: Option<f64>,
    /// Smallest chi-square p-value accepted [default: 0.001].
    #[arg(long)]
    pub min_p: Option<f64>,
}

seeded!(InvarianceArgs, |self| {
    self.radius.get_or_insert(1);
    self.replicas.get_or_insert(100_000);
    self.max_tv.get_or_insert(0.02);
    self.min_p.get_or_insert(0.001);
});

pub fn invariance(a: InvarianceArgs, run: &Run) -> Result<bool> {
    let law = parse_law(&require(&a.law, "law")?)?;
    let r = invariance_test(
        &law,
        a.radius.unwrap_or_default(),
        a.replicas.unwrap_or_default(),
        run.seed,
    )?;
    let ok = r.passes(a.max_tv.unwrap_or_default(), a.min_p.unwrap_or_default());
    let path = run.report(&r, Some(ok))?;
    for (name, c) in [
        ("size-biased vs joined", &r.augmented_vs_joined),
        ("joined vs swapped", &r.joined_vs_swapped),
    ] {
        println!(
            "{name}: TV {:.4}, chi-square p {:.4}",
            c.total_variation, c.chi_square.p_value
        );
    }
    println!(
        "{}",
        if ok {
            "invariance holds"
        } else {
            "invariance REJECTED"
        }
    );
    println!("wrote {}", path.display());
    Ok(ok)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct BuildWindowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the window as `dot`, `edges` or `vertices`.
    #[arg(long)]
    pub export: Option<String>,
}

seeded!(BuildWindowArgs, |self| {
    self.window.fill_defaults();
});

#[derive(Serialize)]
struct WindowReport {
    window: horoprod_core::horoprod::WindowSummary,
    /// Interior degree → number of interior vertices.
    interior_degrees: BTreeMap<u32, u64>,
    /// Interior vertices whose window degree differs from
    /// `(deg x - 1) + (deg x' - 1)`.
    degree_mismatches: u64,
    export: Option<String>,
}

pub fn build_window(a: BuildWindowArgs, run: &Run) -> Result<bool> {
    let format: Option<ExportFormat> = a
        .export
        .as_deref()
        .map(|s| s.parse().map_err(|e| anyhow::anyhow!("--export: {e}")))
        .transpose()?;
    let w = a.window.sample(run.seed)?;
    let mut degrees = BTreeMap::new();
    let mut mismatches = 0;
    for id in (0..w.len() as u32).filter(|&id| w.is_interior(id)) {
        let d = w.degree_of(id);
        *degrees.entry(d).or_insert(0u64) += 1;
        if d != w.product_degree(id) {
            mismatches += 1;
        }
    }
    let export = match format {
        Some(f) => {
            let ext = match f {
                ExportFormat::Dot => "dot",
                ExportFormat::EdgeList => "edges",
                ExportFormat::VertexTable => "vertices",
            };
            let name = format!("window.{ext}");
            run.write(&name, &w.export(f))?;
            Some(name)
        }
        None => None,
    };
    let ok = mismatches == 0;
    let report = WindowReport {
        window: w.summary(),
        interior_degrees: degrees,
        degree_mismatches: mismatches,
        export,
    };
    let path = run.report(&report, Some(ok))?;
    let s = &report.window;
    println!(
        "{} vertices, {} edges, {} interior",
        s.vertices, s.edges, s.interior
    );
    let hist: Vec<String> = report
        .interior_degrees
        .iter()
        .map(|(d, n)| format!("{d} (×{n})"))
        .collect();
    println!("interior degrees: {}", hist.join(", "));
    if !ok {
        println!("{mismatches} interior vertices have the wrong degree");
    }
    if let Some(e) = &report.export {
        println!("wrote {}", run.path(e).display());
    }
    println!("wrote {}", path.display());
    Ok(ok)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Walk length [default: 20].
    #[arg(long)]
    pub steps: Option<u32>,
    /// Number of walks [default: 100000].
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Also compute the Dirichlet spectral radius by power iteration.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub dirichlet: bool,
    /// Power-iteration tolerance [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
}

seeded!(WalkArgs, |self| {
    self.window.fill_defaults();
    self.steps.get_or_insert(20);
    self.replicas.get_or_insert(100_000);
    self.tol.get_or_insert(1e-10);
});

pub fn walk(a: WalkArgs, run: &Run) -> Result<bool> {
    let w = a.window.sample(run.seed)?;
    let mut r = simulate_walk(
        &w,
        a.steps.unwrap_or_default(),
        a.replicas.unwrap_or_default(),
        run.seed,
    );
    if a.dirichlet {
        r.dirichlet = Some(
            dirichlet_spectral_radius(&w, a.tol.unwrap_or_default())
                .context("Dirichlet spectral radius")?,
        );
    }
    let csv = run.write("walk.csv", &r.to_csv())?;
    let path = run.report(&r, None)?;
    println!(
        "window: {} vertices, {} interior",
        r.window.vertices, r.window.interior
    );
    println!("survival to step {}: {:.4}", r.steps, r.survival);
    if let Some(m) = &r.mc_spectral {
        println!(
            "p_2k^(1/2k) at 2k = {}: {:.4} [{:.4}, {:.4}]",
            m.time, m.estimate, m.ci_lo, m.ci_hi
        );
    }
    if let Some(d) = &r.dirichlet {
        println!(
            "Dirichlet spectral radius ≥ {:.6} ({} iterations)",
            d.rho, d.iterations
        );
    }
    println!("wrote {} and {}", csv.display(), path.display());
    Ok(true)
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct FolnerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `search` (greedy local search) or `slab` [default: search].
    #[arg(long)]
    pub method: Option<String>,
    /// Slab size parameter for `--method slab`.
    #[arg(long)]
    pub n: Option<u32>,
    /// Move evaluations for `--method search` [default: 50000].
    #[arg(long)]
    pub budget: Option<u64>,
}

seeded!(FolnerArgs, |self| {
    self.window.fill_defaults();
    self.method.get_or_insert_with(|| "search".into());
    self.budget.get_or_insert(50_000);
});

pub fn folner(a: FolnerArgs, run: &Run) -> Result<bool> {
    let w = a.window.sample(run.seed)?;
    let r = match a.method.as_deref().unwrap_or_default() {
        "search" => folner_search(&w, a.budget.unwrap_or_default(), run.seed)?,
        "slab" => {
            let n = require(&a.n, "n")?;
            let mut r = iso_ratio(&w, &folner_slab(&w, n)?)?;
            r.description = format!("slab n={n}");
            r.method = "slab";
            r
        }
        other => bail!("unknown method `{other}` (expected search or slab)"),
    };
    let path = run.report(&r, None)?;
    println!(
        "{}: |A| = {}, |∂A| = {}, ratio {:.4}",
        r.description, r.size, r.boundary, r.ratio
    );
    println!("wrote {}", path.display());
    Ok(true)
}
