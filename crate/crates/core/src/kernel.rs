//! Analytic kernel families and their discretization on a [`Grid`].
//!
//! Kernel specs use a small DSL, `name:key=value,key=value`:
//!
//! | spec                                   | kernel                                    |
//! |----------------------------------------|-------------------------------------------|
//! | `power:q=Q`                            | `|x|^{-n/Q}`                              |
//! | `power_truncated:q=Q,radius=R`         | `|x|^{-n/Q}` on `|x| <= R`, else 0        |
//! | `power_capped:q=Q,cap=M`               | `min(|x|^{-n/Q}, M)`                      |
//! | `gauss:sigma=S` (or `gaussian:`)       | `exp(-|x|^2 / (2 S^2))`                   |
//! | `indicator:radius=R`                   | `1` on `|x| <= R`, else 0                 |
//! | `samples:path=FILE`                    | values read from a CSV sample file        |
//!
//! Unknown keys, missing keys and repeated keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    Power { q: f64 },
    PowerTruncated { q: f64, radius: f64 },
    PowerCapped { q: f64, cap: f64 },
    Gaussian { sigma: f64 },
    Indicator { radius: f64 },
    Samples { path: PathBuf },
}

/// How a radial kernel profile is turned into cell values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Point values at cell centers. The singular origin cell of the power
    /// families holds the exact cell average of `|x|^{-n/q}` instead. This
    /// is the discretization to use for convolution.
    #[default]
    CellCenter,
    /// Each cell takes the profile value at the radius of the ball whose
    /// measure equals the total measure of all cells at center radius not
    /// exceeding its own. The sampled distribution function then agrees with
    /// the analytic one at every cell-count breakpoint, which is what the
    /// rearrangement diagnostics need. Support tests still use the center.
    Equimeasurable,
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" | "cell_center" => Ok(Sampling::CellCenter),
            "equimeasurable" => Ok(Sampling::Equimeasurable),
            other => Err(Error::KernelSpec(format!(
                "unknown sampling '{other}' (expected 'center' or 'equimeasurable')"
            ))),
        }
    }
}

impl KernelSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        spec.parse()
    }

    pub fn is_nonnegative(&self) -> bool {
        !matches!(self, KernelSpec::Samples { .. })
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::KernelSpec(format!("parameter {name} must be positive, got {v}")))
            }
        };
        match self {
            KernelSpec::Power { q } => positive("q", *q),
            KernelSpec::PowerTruncated { q, radius } => {
                positive("q", *q)?;
                positive("radius", *radius)
            }
            KernelSpec::PowerCapped { q, cap } => {
                positive("q", *q)?;
                positive("cap", *cap)
            }
            KernelSpec::Gaussian { sigma } => positive("sigma", *sigma),
            KernelSpec::Indicator { radius } => positive("radius", *radius),
            KernelSpec::Samples { path } => {
                if path.as_os_str().is_empty() {
                    Err(Error::KernelSpec("samples path is empty".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Radial profile `φ(ρ)` for the analytic families.
    fn profile(&self, dim: usize, rho: f64) -> f64 {
        let n = dim as f64;
        match *self {
            KernelSpec::Power { q } => rho.powf(-n / q),
            KernelSpec::PowerTruncated { q, radius } => {
                if rho <= radius {
                    rho.powf(-n / q)
                } else {
                    0.0
                }
            }
            KernelSpec::PowerCapped { q, cap } => rho.powf(-n / q).min(cap),
            KernelSpec::Gaussian { sigma } => (-rho * rho / (2.0 * sigma * sigma)).exp(),
            KernelSpec::Indicator { radius } => {
                if rho <= radius {
                    1.0
                } else {
                    0.0
                }
            }
            KernelSpec::Samples { .. } => unreachable!("sample files have no profile"),
        }
    }

    /// Compact support radius, if the family has one.
    fn support_radius(&self) -> Option<f64> {
        match *self {
            KernelSpec::PowerTruncated { radius, .. } | KernelSpec::Indicator { radius } => {
                Some(radius)
            }
            _ => None,
        }
    }

    fn singular_exponent(&self) -> Option<f64> {
        match *self {
            KernelSpec::Power { q } | KernelSpec::PowerTruncated { q, .. } => Some(q),
            _ => None,
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Power { q } => write!(f, "power:q={q}"),
            KernelSpec::PowerTruncated { q, radius } => {
                write!(f, "power_truncated:q={q},radius={radius}")
            }
            KernelSpec::PowerCapped { q, cap } => write!(f, "power_capped:q={q},cap={cap}"),
            KernelSpec::Gaussian { sigma } => write!(f, "gauss:sigma={sigma}"),
            KernelSpec::Indicator { radius } => write!(f, "indicator:radius={radius}"),
            KernelSpec::Samples { path } => write!(f, "samples:path={}", path.display()),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = BTreeMap::new();
        for pair in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                Error::KernelSpec(format!("expected key=value, got '{pair}' in '{spec}'"))
            })?;
            let key = key.trim();
            if params.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(Error::KernelSpec(format!("key '{key}' repeated in '{spec}'")));
            }
        }

        let allowed: &[&str] = match name.trim() {
            "power" => &["q"],
            "power_truncated" => &["q", "radius"],
            "power_capped" => &["q", "cap"],
            "gauss" | "gaussian" => &["sigma"],
            "indicator" => &["radius"],
            "samples" => &["path"],
            other => {
                return Err(Error::KernelSpec(format!(
                    "unknown kernel family '{other}' (expected power, power_truncated, \
                     power_capped, gauss, indicator or samples)"
                )))
            }
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::KernelSpec(format!(
                "unknown key '{bad}' for kernel '{name}' (allowed: {})",
                allowed.join(", ")
            )));
        }
        let num = |key: &str| -> Result<f64> {
            let raw = params
                .get(key)
                .ok_or_else(|| Error::KernelSpec(format!("kernel '{name}' needs key '{key}'")))?;
            raw.parse::<f64>()
                .map_err(|_| Error::KernelSpec(format!("key '{key}': '{raw}' is not a number")))
        };

        let kernel = match name.trim() {
            "power" => KernelSpec::Power { q: num("q")? },
            "power_truncated" => KernelSpec::PowerTruncated { q: num("q")?, radius: num("radius")? },
            "power_capped" => KernelSpec::PowerCapped { q: num("q")?, cap: num("cap")? },
            "gauss" | "gaussian" => KernelSpec::Gaussian { sigma: num("sigma")? },
            "indicator" => KernelSpec::Indicator { radius: num("radius")? },
            _ => {
                let path = params
                    .get("path")
                    .ok_or_else(|| Error::KernelSpec("kernel 'samples' needs key 'path'".into()))?;
                KernelSpec::Samples { path: PathBuf::from(path) }
            }
        };
        kernel.validate()?;
        Ok(kernel)
    }
}

/// Discretizes `spec` on `grid`.
pub fn materialize(spec: &KernelSpec, grid: &Grid, sampling: Sampling) -> Result<SampledFunction> {
    spec.validate()?;
    if let KernelSpec::Samples { path } = spec {
        return read_samples(path, grid);
    }
    let dim = grid.dim();
    let values: Vec<f64> = match sampling {
        Sampling::CellCenter => {
            let origin = grid.origin_index();
            (0..grid.len())
                .map(|i| {
                    if i == origin {
                        origin_value(spec, grid)
                    } else {
                        spec.profile(dim, grid.center_radius(i))
                    }
                })
                .collect()
        }
        Sampling::Equimeasurable => {
            let radii = equimeasurable_radii(grid);
            (0..grid.len())
                .map(|i| {
                    let inside = spec.support_radius().is_none_or(|r| grid.center_radius(i) <= r);
                    if inside {
                        // Support is decided by the center; the level comes from
                        // the untruncated profile at the equal-measure radius.
                        let level_spec = match *spec {
                            KernelSpec::PowerTruncated { q, .. } => KernelSpec::Power { q },
                            KernelSpec::Indicator { .. } => return 1.0,
                            ref other => other.clone(),
                        };
                        level_spec.profile(dim, radii[i])
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    SampledFunction::new(*grid, values)
}

fn origin_value(spec: &KernelSpec, grid: &Grid) -> f64 {
    match spec.singular_exponent() {
        Some(q) => power_origin_cell_average(grid.dim(), q, grid.cell_width()),
        None => spec.profile(grid.dim(), 0.0),
    }
}

/// Exact average of `|x|^{-n/q}` over the origin cell `[-w/2, w/2]^n`.
///
/// In 1-D the integral is elementary. In 2-D the inscribed disk has a polar
/// closed form and the four corner regions reduce to the one-dimensional
/// integral `∫_0^{π/4} (cos^{a-2}θ - 1) dθ` of a smooth function, which is
/// evaluated with composite Simpson.
pub fn power_origin_cell_average(dim: usize, q: f64, w: f64) -> f64 {
    let half = w / 2.0;
    match dim {
        1 => {
            let a = 1.0 / q;
            half.powf(-a) / (1.0 - a)
        }
        _ => {
            let a = 2.0 / q;
            let radial = half.powf(2.0 - a) / (2.0 - a);
            let disk = 2.0 * PI * radial;
            let corners = 8.0 * radial * simpson(|t| t.cos().powf(a - 2.0) - 1.0, 0.0, PI / 4.0, 512);
            (disk + corners) / (w * w)
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            weight * f(a + i as f64 * h)
        })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Radius of the `n`-ball whose measure equals the measure of all cells with
/// center radius at most that of cell `i`.
fn equimeasurable_radii(grid: &Grid) -> Vec<f64> {
    let mut by_radius: Vec<(i64, usize)> =
        (0..grid.len()).map(|i| (grid.radius_squared_cells(i), i)).collect();
    by_radius.sort_unstable();
    let cell = grid.cell_measure();
    let mut radii = vec![0.0; grid.len()];
    let mut start = 0;
    while start < by_radius.len() {
        let key = by_radius[start].0;
        let end = start + by_radius[start..].iter().take_while(|(r, _)| *r == key).count();
        let measure = end as f64 * cell;
        let rho = match grid.dim() {
            1 => measure / 2.0,
            _ => (measure / PI).sqrt(),
        };
        for &(_, i) in &by_radius[start..end] {
            radii[i] = rho;
        }
        start = end;
    }
    radii
}

/// Writes `f` as a CSV sample file with header `x,value` or `x,y,value`,
/// row-major by grid index (the last coordinate varies fastest).
pub fn write_samples(path: &Path, f: &SampledFunction) -> Result<()> {
    let mut out = std::io::BufWriter::new(File::create(path)?);
    write_samples_to(&mut out, f)?;
    out.flush()?;
    Ok(())
}

pub fn write_samples_to(out: &mut impl Write, f: &SampledFunction) -> Result<()> {
    let grid = f.grid();
    match grid.dim() {
        1 => writeln!(out, "x,value")?,
        _ => writeln!(out, "x,y,value")?,
    }
    for (i, v) in f.values().iter().enumerate() {
        let c = grid.center(i);
        match grid.dim() {
            1 => writeln!(out, "{},{}", c[0], v)?,
            _ => writeln!(out, "{},{},{}", c[0], c[1], v)?,
        }
    }
    Ok(())
}

/// Reads a CSV sample file, checking the header, monotone coordinates and
/// an exact match with `grid`.
pub fn read_samples(path: &Path, grid: &Grid) -> Result<SampledFunction> {
    let file = File::open(path)?;
    let fail = |reason: String| Error::SampleFile { path: path.display().to_string(), reason };
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().ok_or_else(|| fail("file is empty".into()))??;
    let expected_header = match grid.dim() {
        1 => "x,value",
        _ => "x,y,value",
    };
    if header.trim() != expected_header {
        return Err(fail(format!("header '{}' does not match '{expected_header}'", header.trim())));
    }
    let tol = 1e-9 * grid.cell_width();
    let mut values = Vec::with_capacity(grid.len());
    let mut previous: Option<[f64; 2]> = None;
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| fail(format!("row {}: {e}", row + 2)))?;
        if fields.len() != grid.dim() + 1 {
            return Err(fail(format!("row {}: expected {} fields", row + 2, grid.dim() + 1)));
        }
        if values.len() >= grid.len() {
            return Err(fail(format!("more than {} rows", grid.len())));
        }
        let coords = match grid.dim() {
            1 => [fields[0], 0.0],
            _ => [fields[0], fields[1]],
        };
        if let Some(prev) = previous {
            let increasing = match grid.dim() {
                1 => coords[0] > prev[0],
                _ => coords[0] > prev[0] || (coords[0] == prev[0] && coords[1] > prev[1]),
            };
            if !increasing {
                return Err(fail(format!("row {}: coordinates are not increasing", row + 2)));
            }
        }
        let expected = grid.center(values.len());
        if (coords[0] - expected[0]).abs() > tol || (coords[1] - expected[1]).abs() > tol {
            return Err(fail(format!(
                "row {}: coordinates {coords:?} do not match grid cell {expected:?}",
                row + 2
            )));
        }
        previous = Some(coords);
        values.push(fields[grid.dim()]);
    }
    if values.len() != grid.len() {
        return Err(fail(format!("expected {} rows, found {}", grid.len(), values.len())));
    }
    SampledFunction::new(*grid, values).map_err(|e| fail(e.to_string()))
}
