//! Cross-product runs from a JSON config. Cells are indexed in row-major
//! order over (kernel, grid_points, half_width, eps), may run in parallel on
//! a bounded pool, and are written in index order.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{
    compute_decompose, compute_iteration, final_diameters, resolve_kernel, resolve_triple, DecomposeResult,
    GridConfig, KernelConfig, OpnormResult,
};
use crate::error::CliError;
use crate::output::{num, write_csv, write_json, SCHEMA_VERSION};
use crate::IterationArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCommand {
    Decompose,
    Maximize,
}

fn default_dim() -> usize {
    1
}
fn default_sampling() -> String {
    "center".into()
}
fn default_max_iter() -> usize {
    500
}
fn default_tol() -> f64 {
    1e-9
}
fn default_workers() -> usize {
    2
}
fn default_deltas() -> Vec<f64> {
    vec![0.05, 0.1, 0.2]
}
fn default_directions() -> usize {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub command: SweepCommand,
    pub kernels: Vec<String>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub grid_points: Vec<usize>,
    pub half_widths: Vec<f64>,
    /// Required for `decompose`, ignored by `maximize`.
    #[serde(default)]
    pub eps: Vec<f64>,
    pub p: f64,
    pub r: f64,
    #[serde(default)]
    pub hls_constant: Option<f64>,
    #[serde(default = "default_sampling")]
    pub sampling: String,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default = "default_directions")]
    pub directions: usize,
    /// Upper bound on concurrently running cells.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
struct Cell {
    index: usize,
    kernel: String,
    grid_points: usize,
    half_width: f64,
    eps: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum CellOutcome {
    Decompose(DecomposeResult),
    Maximize { summary: OpnormResult, diameters: Vec<crate::commands::DiameterSummary> },
}

#[derive(Serialize)]
struct CellRecord<'a> {
    schema_version: u32,
    command: SweepCommand,
    cell: &'a Cell,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel: Option<KernelConfig>,
    grid: GridConfig,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<CellOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cells(cfg: &SweepConfig) -> Vec<Cell> {
    let eps: Vec<Option<f64>> = match cfg.command {
        SweepCommand::Decompose => cfg.eps.iter().copied().map(Some).collect(),
        SweepCommand::Maximize => vec![None],
    };
    let mut out = Vec::new();
    for kernel in &cfg.kernels {
        for &grid_points in &cfg.grid_points {
            for &half_width in &cfg.half_widths {
                for &e in &eps {
                    out.push(Cell { index: out.len(), kernel: kernel.clone(), grid_points, half_width, eps: e });
                }
            }
        }
    }
    out
}

fn run_cell(cfg: &SweepConfig, cell: &Cell) -> (Option<KernelConfig>, Result<CellOutcome, CliError>) {
    let grid_cfg = GridConfig { dim: cfg.dim, points_per_axis: cell.grid_points, half_width: cell.half_width };
    let grid = match grid_cfg.resolve() {
        Ok(g) => g,
        Err(e) => return (None, Err(e)),
    };
    let (kernel_cfg, k) = match resolve_kernel(&cell.kernel, &cfg.sampling, &grid) {
        Ok(v) => v,
        Err(e) => return (None, Err(e)),
    };
    let outcome = match cfg.command {
        SweepCommand::Decompose => (|| {
            let trip = resolve_triple(Some(cfg.p), Some(cfg.r), false)?;
            let c = match cfg.hls_constant {
                Some(v) => convmax::HlsConstant::configured(v).map_err(CliError::input("hls_constant"))?,
                None => convmax::HlsConstant::default(),
            };
            compute_decompose(&k, &trip, cell.eps.expect("decompose cells carry eps"), &c)
                .map(|(_, r)| CellOutcome::Decompose(r))
        })(),
        SweepCommand::Maximize => (|| {
            let it = IterationArgs {
                p: Some(cfg.p),
                r: Some(cfg.r),
                max_iter: cfg.max_iter,
                tol: cfg.tol,
                seed_profile: "default".into(),
                diagnostic_l2: false,
                hls_constant: cfg.hls_constant,
            };
            let run = compute_iteration(kernel_cfg.clone(), grid_cfg, k, &it, None)?;
            let diameters = final_diameters(&run.result.f, run.config.p, &cfg.deltas, cfg.directions)?;
            Ok(CellOutcome::Maximize { summary: run.summary, diameters })
        })(),
    };
    (Some(kernel_cfg), outcome)
}

pub fn run(out: &Path, config_path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(CliError::io(config_path))?;
    let cfg: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: invalid sweep config: {e}", config_path.display())))?;
    if cfg.workers == 0 {
        return Err(CliError::Usage("workers must be positive".into()));
    }
    let cells = cells(&cfg);
    if cells.is_empty() {
        return Err(CliError::Usage(
            "empty parameter grid: kernels, grid_points, half_widths (and eps for decompose) must be non-empty".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("workers: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| cells.par_iter().map(|c| run_cell(&cfg, c)).collect());

    let cell_dir = out.join("cells");
    let mut rows = Vec::with_capacity(cells.len());
    let mut failures = 0;
    for (cell, (kernel, outcome)) in cells.iter().zip(outcomes) {
        let grid = GridConfig { dim: cfg.dim, points_per_axis: cell.grid_points, half_width: cell.half_width };
        let (status, result, error) = match outcome {
            Ok(r) => ("ok", Some(r), None),
            Err(e) => {
                failures += 1;
                ("error", None, Some(e.to_string()))
            }
        };
        let mut row = vec![
            cell.index.to_string(),
            cell.kernel.clone(),
            cell.grid_points.to_string(),
            num(cell.half_width),
            cell.eps.map(num).unwrap_or_default(),
            status.to_string(),
        ];
        let blank = || String::new();
        match &result {
            Some(CellOutcome::Decompose(d)) => {
                row.extend([blank(), num(d.certificate.bound_total), num(d.complement_lq), blank()])
            }
            Some(CellOutcome::Maximize { summary, diameters }) => {
                let widest = diameters.first().and_then(|d| d.diameter).map(num).unwrap_or_default();
                row.extend([num(summary.estimate.value), blank(), blank(), widest]);
            }
            None => row.extend([blank(), blank(), blank(), blank()]),
        }
        row.push(error.clone().unwrap_or_default());
        rows.push(row);
        let record = CellRecord {
            schema_version: SCHEMA_VERSION,
            command: cfg.command,
            cell,
            kernel,
            grid,
            status,
            result,
            error,
        };
        write_json(&cell_dir, &format!("cell_{:04}.json", cell.index), &record)?;
    }
    write_csv(
        out,
        "sweep.csv",
        &[
            "cell",
            "kernel",
            "grid_points",
            "half_width",
            "eps",
            "status",
            "phi",
            "bound_total",
            "complement_lq",
            "diameter_first_delta",
            "error",
        ],
        rows,
    )?;

    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: u32,
        command: &'static str,
        config: &'a SweepConfig,
        cells: usize,
        failures: usize,
        table: &'static str,
    }
    write_json(
        out,
        "sweep.json",
        &Summary { schema_version: SCHEMA_VERSION, command: "sweep", config: &cfg, cells: cells.len(), failures, table: "sweep.csv" },
    )
}
