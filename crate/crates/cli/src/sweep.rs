//! Parameter grids: one CSV row per (law, value) cell.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;

use anyhow::{bail, Context, Result};
use clap::Args;
use horoprod_core::branching::augmented_mass_mean;
use horoprod_core::dynamics::{dirichlet_spectral_radius, folner_slab, iso_ratio};
use horoprod_core::horoprod::{sample_window, WindowSpec};
use horoprod_core::rng::replica_rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{parse_law, require, Params, Run};

#[derive(Args, Debug, Default, Serialize, Deserialize)]
pub struct SweepArgs {
    /// `folner-slab`, `spectral` or `mass-mean`.
    #[arg(long)]
    pub kind: Option<String>,
    /// Left law of the window kinds.
    #[arg(long)]
    pub left: Option<String>,
    /// Right laws of the window kinds, one grid row each (repeatable).
    #[arg(long)]
    #[serde(default)]
    pub right: Vec<String>,
    /// Laws of the mass-mean kind (repeatable).
    #[arg(long)]
    #[serde(default)]
    pub law: Vec<String>,
    /// Grid values: `a..b` (inclusive) or `a,b,c`. Slab size n for
    /// folner-slab, tree depth for spectral and mass-mean.
    #[arg(long)]
    pub values: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replicas per mass-mean cell [default: 5000].
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Power-iteration tolerance for spectral cells [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Spectral cells use height = depth - offset [default: 3].
    #[arg(long)]
    pub height_offset: Option<u32>,
}

impl Params for SweepArgs {
    fn fill_defaults(&mut self) {
        self.seed.get_or_insert(0);
        self.replicas.get_or_insert(5000);
        self.tol.get_or_insert(1e-10);
        self.height_offset.get_or_insert(3);
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    FolnerSlab,
    Spectral,
    MassMean,
}

impl Kind {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "folner-slab" => Kind::FolnerSlab,
            "spectral" => Kind::Spectral,
            "mass-mean" => Kind::MassMean,
            _ => bail!("unknown sweep kind `{s}` (expected folner-slab, spectral or mass-mean)"),
        })
    }

    fn columns(self) -> &'static str {
        match self {
            Kind::FolnerSlab => "size,boundary,ratio",
            Kind::Spectral => "vertices,interior,rho,iterations",
            Kind::MassMean => "estimate,std_err,target",
        }
    }
}

pub fn parse_values(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a
            .trim()
            .parse()
            .with_context(|| format!("range start in `{s}`"))?;
        let b: u32 = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("range end in `{s}`"))?;
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .with_context(|| format!("grid value `{v}`"))
        })
        .collect()
}

struct Cell {
    index: u64,
    law: String,
    value: u32,
    seed: u64,
}

fn run_cell(kind: Kind, a: &SweepArgs, cell: &Cell) -> Result<String> {
    let law = parse_law(&cell.law)?;
    match kind {
        Kind::MassMean => {
            let r =
                augmented_mass_mean(&law, cell.value, a.replicas.unwrap_or_default(), cell.seed)?;
            Ok(format!("{},{},{}", r.estimate, r.std_err, r.target))
        }
        Kind::FolnerSlab => {
            let n = cell.value;
            let spec = WindowSpec {
                left_law: parse_law(&require(&a.left, "left")?)?,
                right_law: law,
                left_depth: 2 * n + 1,
                right_depth: n + 1,
                height: n + 1,
            };
            let w = sample_window(&spec, cell.seed)?;
            let r = iso_ratio(&w, &folner_slab(&w, n)?)?;
            Ok(format!("{},{},{}", r.size, r.boundary, r.ratio))
        }
        Kind::Spectral => {
            let d = cell.value;
            let off = a.height_offset.unwrap_or_default();
            if d <= off {
                bail!("depth {d} leaves no room for height depth - {off}");
            }
            let spec = WindowSpec {
                left_law: parse_law(&require(&a.left, "left")?)?,
                right_law: law,
                left_depth: d,
                right_depth: d,
                height: d - off,
            };
            let w = sample_window(&spec, cell.seed)?;
            let s = dirichlet_spectral_radius(&w, a.tol.unwrap_or_default())?;
            Ok(format!(
                "{},{},{},{}",
                w.len(),
                s.interior,
                s.rho,
                s.iterations
            ))
        }
    }
}

/// First draw of the stream for `master ^ cell`.
fn cell_seed(master: u64, cell: u64) -> u64 {
    replica_rng(master, cell).random()
}

/// `cell,status,law,value,seed` columns; commas in inline laws become `;`.
fn row(cell: &Cell, status: &str, result: &str) -> String {
    format!(
        "{},{},{},{},{},{}",
        cell.index,
        status,
        cell.law.replace(',', ";"),
        cell.value,
        cell.seed,
        result
    )
}

/// Rows already computed for this config, by cell index.
fn completed(path: &std::path::Path, header: &str) -> Result<BTreeMap<u64, String>> {
    let mut done = BTreeMap::new();
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(done);
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => bail!(
            "{} was written by another config ({h}); remove it or pick another --out",
            path.display()
        ),
        None => return Ok(done),
    }
    for line in lines.skip(1) {
        let mut fields = line.splitn(3, ',');
        let (Some(i), Some("ok")) = (fields.next(), fields.next()) else {
            continue;
        };
        if let Ok(i) = i.parse() {
            done.insert(i, line.to_string());
        }
    }
    Ok(done)
}

#[derive(Serialize)]
struct CellStatus {
    cell: u64,
    law: String,
    value: u32,
    seed: u64,
    status: String,
}

#[derive(Serialize)]
struct SweepReport {
    kind: String,
    csv: String,
    cells: Vec<CellStatus>,
    failed: usize,
}

pub fn sweep(a: SweepArgs, run: &Run) -> Result<bool> {
    let kind = Kind::parse(&require(&a.kind, "kind")?)?;
    let laws = match kind {
        Kind::MassMean => &a.law,
        _ => {
            require(&a.left, "left")?;
            &a.right
        }
    };
    let values = parse_values(a.values.as_deref().unwrap_or(""))?;
    if laws.is_empty() || values.is_empty() {
        bail!("empty grid: {} laws × {} values", laws.len(), values.len());
    }
    let cells: Vec<Cell> = laws
        .iter()
        .flat_map(|l| values.iter().map(move |&v| (l.clone(), v)))
        .enumerate()
        .map(|(i, (law, value))| Cell {
            index: i as u64,
            law,
            value,
            seed: cell_seed(run.seed, i as u64),
        })
        .collect();

    let path = run.path("sweep.csv");
    let header = format!("# config {}", run.hash);
    let columns = format!("cell,status,law,value,seed,{}", kind.columns());
    let mut rows = completed(&path, &header)?;
    if rows.is_empty() {
        fs::write(&path, format!("{header}\n{columns}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let mut file = OpenOptions::new().append(true).open(&path)?;
    let mut statuses = Vec::new();
    for cell in &cells {
        let resumed = rows.contains_key(&cell.index);
        let status = if resumed {
            "ok".to_string()
        } else {
            let line = match run_cell(kind, &a, cell) {
                Ok(result) => row(cell, "ok", &result),
                Err(e) => {
                    let msg = format!("{e:#}").replace([',', '\n'], ";");
                    row(
                        cell,
                        "error",
                        &format!("{msg}{}", ",".repeat(kind.columns().matches(',').count())),
                    )
                }
            };
            writeln!(file, "{line}")?;
            file.flush()?;
            let status = line.split(',').nth(1).unwrap_or_default().to_string();
            rows.insert(cell.index, line);
            status
        };
        let note = if resumed { " (resumed)" } else { "" };
        println!(
            "cell {} law {} value {}: {status}{note}",
            cell.index, cell.law, cell.value
        );
        statuses.push(CellStatus {
            cell: cell.index,
            law: cell.law.clone(),
            value: cell.value,
            seed: cell.seed,
            status,
        });
    }
    drop(file);

    // canonical order: header, columns, cells by index
    let mut text = format!("{header}\n{columns}\n");
    for line in rows.values() {
        text.push_str(line);
        text.push('\n');
    }
    fs::write(&path, text)?;

    let failed = statuses.iter().filter(|s| s.status != "ok").count();
    let report = SweepReport {
        kind: a.kind.clone().unwrap_or_default(),
        csv: "sweep.csv".into(),
        cells: statuses,
        failed,
    };
    let json = run.report(&report, None)?;
    println!("wrote {} and {}", path.display(), json.display());
    if failed > 0 {
        bail!("partial failure: {failed} of {} cells failed", cells.len());
    }
    Ok(true)
}
