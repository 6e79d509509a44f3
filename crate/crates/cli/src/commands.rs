use std::path::Path;

use convmax::decompose::Certificate;
use convmax::diagnostics::{max_diameter, sample_directions};
use convmax::kernel::{read_samples, write_samples};
use convmax::operator::fourier_symbol_max;
use convmax::rearrange::StepRearrangement;
use convmax::{
    certify_eps1, decreasing_rearrangement, delta_diameter, inclusion_constant, lorentz_norm, lp_norm, materialize,
    power_iterate, start_function, tail_diagnostics, tightness_report, weak_bound, weak_norm, young_bound,
    DiameterQuery, Error, ExponentTriple, Grid, HlsConstant, KernelSpec, PowerIterationOptions, SampledFunction,
    Sampling, StartProfile, TailThresholds,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::{num, write_csv, write_envelope};
use crate::{GridArgs, IterationArgs, KernelArgs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub dim: usize,
    pub points_per_axis: usize,
    pub half_width: f64,
}

impl GridConfig {
    pub fn resolve(&self) -> Result<Grid, CliError> {
        Grid::new(self.dim, self.half_width, self.points_per_axis)
            .map_err(CliError::input("--dim/--grid-points/--half-width"))
    }
}

impl From<&GridArgs> for GridConfig {
    fn from(g: &GridArgs) -> Self {
        GridConfig { dim: g.dim, points_per_axis: g.grid_points, half_width: g.half_width }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelConfig {
    pub spec: String,
    pub parsed: KernelSpec,
    pub sampling: Sampling,
}

pub fn resolve_kernel(spec: &str, sampling: &str, grid: &Grid) -> Result<(KernelConfig, SampledFunction), CliError> {
    let parsed: KernelSpec = spec.parse().map_err(CliError::input("--kernel"))?;
    let sampling: Sampling = sampling.parse().map_err(CliError::input("--sampling"))?;
    let k = materialize(&parsed, grid, sampling).map_err(CliError::input("--kernel"))?;
    Ok((KernelConfig { spec: parsed.to_string(), parsed, sampling }, k))
}

fn kernel_from_args(args: &KernelArgs, grid: &Grid) -> Result<(KernelConfig, SampledFunction), CliError> {
    resolve_kernel(&args.kernel, &args.sampling, grid)
}

pub fn resolve_triple(p: Option<f64>, r: Option<f64>, diagnostic_l2: bool) -> Result<ExponentTriple, CliError> {
    if diagnostic_l2 {
        if p.is_some_and(|v| v != 2.0) || r.is_some_and(|v| v != 2.0) {
            return Err(CliError::Usage("--diagnostic-l2 requires p = r = 2".into()));
        }
        return Ok(ExponentTriple::diagnostic_l2());
    }
    match (p, r) {
        (Some(p), Some(r)) => ExponentTriple::new(p, r).map_err(CliError::input("--p/--r")),
        _ => Err(CliError::Usage("--p and --r are required".into())),
    }
}

fn hls(value: Option<f64>) -> Result<HlsConstant, CliError> {
    match value {
        Some(c) => HlsConstant::configured(c).map_err(CliError::input("--hls-constant")),
        None => Ok(HlsConstant::default()),
    }
}

fn check_positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{field} must be positive and finite, got {v}")))
    }
}

#[derive(Serialize)]
struct NormsConfig {
    kernel: KernelConfig,
    grid: GridConfig,
    q: f64,
    s: f64,
}

#[derive(Serialize)]
struct NormsResult {
    lp_norm: f64,
    weak_norm: f64,
    lorentz_norm: f64,
    inclusion_constant: f64,
}

pub fn norms(out: &Path, k: &KernelArgs, g: &GridArgs, q: f64, s: f64) -> Result<String, CliError> {
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let (kernel, f) = kernel_from_args(k, &grid)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(CliError::Usage(format!("--q must be finite and at least 1, got {q}")));
    }
    check_positive("--s", s)?;
    let result = NormsResult {
        lp_norm: lp_norm(&f, q).map_err(CliError::input("--q"))?,
        weak_norm: weak_norm(&f, q),
        lorentz_norm: lorentz_norm(&f, q, s).map_err(CliError::input("--q/--s"))?,
        inclusion_constant: inclusion_constant(q, s),
    };
    write_envelope(out, "norms", &NormsConfig { kernel, grid: grid_cfg, q, s }, &result)
}

#[derive(Serialize)]
struct QConfig {
    kernel: KernelConfig,
    grid: GridConfig,
    q: f64,
}

#[derive(Serialize)]
struct RearrangeResult {
    weak_norm: f64,
    total_measure: f64,
    steps: usize,
    table: &'static str,
}

pub fn rearrange(out: &Path, k: &KernelArgs, g: &GridArgs, q: f64) -> Result<String, CliError> {
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let (kernel, f) = kernel_from_args(k, &grid)?;
    check_positive("--q", q)?;
    let step: StepRearrangement = decreasing_rearrangement(&f).map_err(CliError::input("--kernel"))?;
    let rows = step
        .levels()
        .iter()
        .zip(step.breakpoints())
        .map(|(&level, t)| vec![num(t), num(level), num(t.powf(1.0 / q) * level)]);
    write_csv(out, "rearrangement.csv", &["t", "f_star", "t_pow_q_times_f_star"], rows)?;
    let result = RearrangeResult {
        weak_norm: step.weak_norm(q),
        total_measure: step.total_measure(),
        steps: step.levels().len(),
        table: "rearrangement.csv",
    };
    write_envelope(out, "rearrange", &QConfig { kernel, grid: grid_cfg, q }, &result)
}

#[derive(Serialize)]
struct TailsConfig {
    kernel: KernelConfig,
    grid: GridConfig,
    q: f64,
    thresholds: TailThresholds,
}

pub fn tails(
    out: &Path,
    k: &KernelArgs,
    g: &GridArgs,
    q: f64,
    ratio: f64,
    points_per_decade: usize,
) -> Result<String, CliError> {
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let (kernel, f) = kernel_from_args(k, &grid)?;
    check_positive("--ratio", ratio)?;
    if points_per_decade == 0 {
        return Err(CliError::Usage("--points-per-decade must be positive".into()));
    }
    let thresholds = TailThresholds { ratio, points_per_decade, ..TailThresholds::default() };
    let diag = tail_diagnostics(&f, q, &thresholds).map_err(CliError::input("--q"))?;
    write_envelope(out, "tails", &TailsConfig { kernel, grid: grid_cfg, q, thresholds }, &diag)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeConfig {
    pub kernel: KernelConfig,
    pub grid: GridConfig,
    pub p: f64,
    pub r: f64,
    pub q: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeResult {
    #[serde(flatten)]
    pub certificate: Certificate,
    /// `‖u + w + z‖_q`, the mass left outside the core.
    pub complement_lq: f64,
}

pub fn compute_decompose(
    k: &SampledFunction,
    trip: &ExponentTriple,
    eps: f64,
    c: &HlsConstant,
) -> Result<(convmax::Decomposition, DecomposeResult), CliError> {
    check_positive("--eps", eps)?;
    let d = convmax::decompose(k, trip, eps, c).map_err(CliError::input("--eps"))?;
    let complement_lq = lp_norm(&d.remainder(), trip.q()).map_err(CliError::input("--p/--r"))?;
    let result = DecomposeResult { certificate: d.certificate.clone(), complement_lq };
    Ok((d, result))
}

#[allow(clippy::too_many_arguments)]
pub fn decompose(
    out: &Path,
    k: &KernelArgs,
    g: &GridArgs,
    p: f64,
    r: f64,
    eps: f64,
    hls_constant: Option<f64>,
    dump_parts: bool,
) -> Result<String, CliError> {
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let trip = resolve_triple(Some(p), Some(r), false)?;
    let c = hls(hls_constant)?;
    let (kernel, f) = kernel_from_args(k, &grid)?;
    let (d, result) = compute_decompose(&f, &trip, eps, &c)?;
    if dump_parts {
        let header: &[&str] =
            if grid.dim() == 1 { &["x", "k", "u", "w", "z", "core"] } else { &["x", "y", "k", "u", "w", "z", "core"] };
        let rows = (0..grid.len()).map(|i| {
            let c = grid.center(i);
            let mut row = vec![num(c[0])];
            if grid.dim() == 2 {
                row.push(num(c[1]));
            }
            for part in [&f, &d.u, &d.w, &d.z, &d.core] {
                row.push(num(part.values()[i]));
            }
            row
        });
        write_csv(out, "parts.csv", header, rows)?;
    }
    let config = DecomposeConfig { kernel, grid: grid_cfg, p, r, q: trip.q(), eps };
    write_envelope(out, "decompose", &config, &result)
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationConfig {
    pub kernel: KernelConfig,
    pub grid: GridConfig,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed_profile: StartProfile,
    pub diagnostic_l2: bool,
    pub hls_constant: HlsConstant,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateSummary {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub rel_change_at_stop: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OpnormResult {
    pub estimate: EstimateSummary,
    pub young_bound: f64,
    pub weak_bound: f64,
    /// `1 − estimate / young_bound`.
    pub eps1_young: f64,
    /// Exact periodic `L_2` norm; only in the diagnostic mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier_symbol_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier_rel_gap: Option<f64>,
    pub trajectory: &'static str,
}

pub struct IterationRun {
    pub config: IterationConfig,
    pub result: convmax::MaximizerResult,
    pub summary: OpnormResult,
}

pub fn compute_iteration(
    kernel_cfg: KernelConfig,
    grid_cfg: GridConfig,
    k: SampledFunction,
    it: &IterationArgs,
    snapshot_stride: Option<usize>,
) -> Result<IterationRun, CliError> {
    let trip = resolve_triple(it.p, it.r, it.diagnostic_l2)?;
    let c = hls(it.hls_constant)?;
    let profile: StartProfile = it.seed_profile.parse().map_err(CliError::input("--seed-profile"))?;
    let options = PowerIterationOptions {
        max_iter: it.max_iter,
        tol: it.tol,
        diagnostic_l2: it.diagnostic_l2,
        snapshot_stride,
        keep_last: None,
    };
    let f0 = start_function(k.grid(), profile);
    let result = power_iterate(&k, &trip, &f0, &options).map_err(CliError::input("--max-iter/--tol/--kernel"))?;
    let young = young_bound(&k, &trip);
    let (symbol, gap) = if it.diagnostic_l2 {
        let s = fourier_symbol_max(&k);
        (Some(s), Some((result.estimate.value - s).abs() / s))
    } else {
        (None, None)
    };
    let summary = OpnormResult {
        estimate: EstimateSummary {
            value: result.estimate.value,
            iterations: result.estimate.iterations,
            converged: result.estimate.converged,
            rel_change_at_stop: result.estimate.rel_change_at_stop,
        },
        young_bound: young,
        weak_bound: weak_bound(&k, &trip, &c),
        eps1_young: certify_eps1(&result, young),
        fourier_symbol_max: symbol,
        fourier_rel_gap: gap,
        trajectory: "trajectory.csv",
    };
    let config = IterationConfig {
        kernel: kernel_cfg,
        grid: grid_cfg,
        p: trip.p(),
        q: trip.q(),
        r: trip.r(),
        max_iter: it.max_iter,
        tol: it.tol,
        seed_profile: profile,
        diagnostic_l2: it.diagnostic_l2,
        hls_constant: c,
    };
    Ok(IterationRun { config, result, summary })
}

fn write_trajectory(out: &Path, trajectory: &[f64]) -> Result<(), CliError> {
    let rows = trajectory.iter().enumerate().map(|(i, &phi)| {
        let rel = if i == 0 { String::new() } else { num((phi - trajectory[i - 1]).abs() / phi) };
        vec![i.to_string(), num(phi), rel]
    });
    write_csv(out, "trajectory.csv", &["iter", "phi", "rel_change"], rows)
}

pub fn opnorm(out: &Path, k: &KernelArgs, g: &GridArgs, it: &IterationArgs) -> Result<String, CliError> {
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let (kernel_cfg, f) = kernel_from_args(k, &grid)?;
    let run = compute_iteration(kernel_cfg, grid_cfg, f, it, None)?;
    write_trajectory(out, &run.result.estimate.trajectory)?;
    write_envelope(out, "opnorm", &run.config, &run.summary)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiameterSummary {
    pub delta: f64,
    /// Largest over the sampled directions; `null` if infeasible.
    pub diameter: Option<f64>,
}

pub fn final_diameters(
    f: &SampledFunction,
    p: f64,
    deltas: &[f64],
    directions: usize,
) -> Result<Vec<DiameterSummary>, CliError> {
    let dirs = sample_directions(f.grid().dim(), directions).map_err(CliError::input("--directions"))?;
    deltas
        .iter()
        .map(|&delta| match max_diameter(f, delta, p, &dirs) {
            Ok(d) => Ok(DiameterSummary { delta, diameter: Some(d) }),
            Err(Error::Infeasible(_)) => Ok(DiameterSummary { delta, diameter: None }),
            Err(e) => Err(CliError::input("--deltas")(e)),
        })
        .collect()
}

#[derive(Serialize)]
struct MaximizeConfig<'a> {
    #[serde(flatten)]
    iteration: &'a IterationConfig,
    deltas: &'a [f64],
    directions: usize,
    snapshot_stride: Option<usize>,
}

#[derive(Serialize)]
struct MaximizeResult<'a> {
    #[serde(flatten)]
    summary: &'a OpnormResult,
    lp_norm_of_maximizer: f64,
    diameters: Vec<DiameterSummary>,
    maximizer: &'static str,
    snapshots: Vec<String>,
}

pub fn maximize(
    out: &Path,
    k: &KernelArgs,
    g: &GridArgs,
    it: &IterationArgs,
    deltas: &[f64],
    directions: usize,
    snapshot_stride: Option<usize>,
) -> Result<String, CliError> {
    if snapshot_stride == Some(0) {
        return Err(CliError::Usage("--snapshot-stride must be positive".into()));
    }
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let (kernel_cfg, f) = kernel_from_args(k, &grid)?;
    let run = compute_iteration(kernel_cfg, grid_cfg, f, it, snapshot_stride)?;
    let p = run.config.p;
    let diameters = final_diameters(&run.result.f, p, deltas, directions)?;
    write_trajectory(out, &run.result.estimate.trajectory)?;
    let maximizer_path = out.join("maximizer.csv");
    write_samples(&maximizer_path, &run.result.f).map_err(CliError::input("maximizer.csv"))?;
    let mut snapshots = Vec::new();
    if !run.result.snapshots.is_empty() {
        let dir = out.join("snapshots");
        crate::output::ensure_dir(&dir)?;
        for s in &run.result.snapshots {
            let name = format!("iter_{:06}.csv", s.iteration);
            write_samples(&dir.join(&name), &s.f).map_err(CliError::input("snapshots"))?;
            snapshots.push(format!("snapshots/{name}"));
        }
    }
    let result = MaximizeResult {
        summary: &run.summary,
        lp_norm_of_maximizer: lp_norm(&run.result.f, p).map_err(CliError::input("--p"))?,
        diameters,
        maximizer: "maximizer.csv",
        snapshots,
    };
    let config = MaximizeConfig { iteration: &run.config, deltas, directions, snapshot_stride };
    write_envelope(out, "maximize", &config, &result)
}

#[derive(Serialize)]
struct DiameterConfig<'a> {
    input: String,
    grid: GridConfig,
    p: f64,
    deltas: &'a [f64],
    directions: usize,
    normalize: bool,
}

#[derive(Serialize)]
struct DiameterResult {
    lp_norm: f64,
    per_delta: Vec<DiameterSummary>,
    table: &'static str,
}

pub fn diameter(
    out: &Path,
    input: &Path,
    g: &GridArgs,
    p: f64,
    deltas: &[f64],
    directions: usize,
    normalize: bool,
) -> Result<String, CliError> {
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let mut f = read_samples(input, &grid).map_err(CliError::input("--input"))?;
    let norm = lp_norm(&f, p).map_err(CliError::input("--p"))?;
    if normalize {
        f = f.normalized(p).map_err(CliError::input("--input"))?;
    }
    let dirs = sample_directions(grid.dim(), directions).map_err(CliError::input("--directions"))?;
    let mut rows = Vec::new();
    let mut per_delta = Vec::new();
    for &delta in deltas {
        let mut worst = Some(0.0_f64);
        for &dir in &dirs {
            let query = DiameterQuery::new(delta, dir, p).map_err(CliError::input("--deltas"))?;
            let d = match delta_diameter(&f, &query) {
                Ok(d) => Some(d),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(CliError::input("--input")(e)),
            };
            worst = match (worst, d) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            rows.push(vec![num(delta), num(dir[0]), num(dir[1]), d.map(num).unwrap_or_default()]);
        }
        per_delta.push(DiameterSummary { delta, diameter: worst });
    }
    write_csv(out, "diameter.csv", &["delta", "direction_x", "direction_y", "diameter"], rows)?;
    let config =
        DiameterConfig { input: input.display().to_string(), grid: grid_cfg, p, deltas, directions, normalize };
    write_envelope(out, "diameter", &config, &DiameterResult { lp_norm: norm, per_delta, table: "diameter.csv" })
}

#[derive(Serialize)]
struct TightnessConfig<'a> {
    sequence_dir: String,
    files: Vec<String>,
    grid: GridConfig,
    p: f64,
    deltas: &'a [f64],
}

pub fn tightness(out: &Path, dir: &Path, g: &GridArgs, p: f64, deltas: &[f64]) -> Result<String, CliError> {
    let grid_cfg = GridConfig::from(g);
    let grid = grid_cfg.resolve()?;
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(CliError::io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("--sequence-dir: no .csv files in {}", dir.display())));
    }
    let sequence = files
        .iter()
        .map(|f| read_samples(f, &grid).map_err(CliError::input("--sequence-dir")))
        .collect::<Result<Vec<_>, _>>()?;
    let report = tightness_report(&sequence, p, deltas).map_err(CliError::input("--p/--deltas"))?;
    let names = files.iter().map(|f| f.file_name().unwrap_or_default().to_string_lossy().into_owned()).collect();
    let config = TightnessConfig { sequence_dir: dir.display().to_string(), files: names, grid: grid_cfg, p, deltas };
    write_envelope(out, "tightness", &config, &report)
}
