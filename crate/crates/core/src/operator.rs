//! Operator-norm bounds and the nonlinear power iteration for
//! `K_k : L_p -> L_r`, `f ↦ k * f`.
//!
//! The iteration is the dual-exponent fixed-point map
//!
//! ```text
//! g ← k * f
//! u ← k̃ * (|g|^{r-1} sign g)          (adjoint, k̃(x) = k(-x))
//! f ← |u|^{1/(p-1)} sign u,  then ‖f‖_p = 1
//! ```
//!
//! By Hölder, `Φ(f) = ‖k * f‖_r` never decreases along the iterates: with
//! `J = |g_t|^{r-1} sign g_t`, `Φ(f_t)^r = ⟨f_t, K*J⟩ ≤ ‖K*J‖_{p'} =
//! ⟨K f_{t+1}, J⟩ ≤ Φ(f_{t+1}) Φ(f_t)^{r-1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convolution::{Boundary, ConvolutionOperator};
use crate::decompose::HlsConstant;
use crate::error::{Error, Result};
use crate::exponents::ExponentTriple;
use crate::grid::{lp_norm, lp_norm_unchecked, SampledFunction};
use crate::rearrange::weak_norm;

/// `‖k‖_q`, which bounds `‖K_k‖_{p→r}` by Young's inequality. The bound is
/// exact for the discrete operator too.
pub fn young_bound(k: &SampledFunction, trip: &ExponentTriple) -> f64 {
    lp_norm(k, trip.q()).expect("q >= 1 for a valid triple")
}

/// `C · ‖k‖_{q,∞}`.
pub fn weak_bound(k: &SampledFunction, trip: &ExponentTriple, c: &HlsConstant) -> f64 {
    c.value() * weak_norm(k, trip.q())
}

/// `‖k * f‖_r / ‖f‖_p` with the zero-padded operator.
pub fn rayleigh_quotient(k: &SampledFunction, f: &SampledFunction, trip: &ExponentTriple) -> Result<f64> {
    let op = ConvolutionOperator::new(k, Boundary::ZeroPadded);
    let norm = lp_norm(f, trip.p())?;
    if norm == 0.0 {
        return Err(Error::Degenerate("Rayleigh quotient of the zero function".into()));
    }
    Ok(lp_norm(&op.apply(f)?, trip.r())? / norm)
}

/// Starting function for the iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "seed")]
pub enum StartProfile {
    /// Centered Gaussian with `σ = half_width / 8`.
    #[default]
    Gaussian,
    /// Strictly positive random mixture of a few Gaussian bumps plus a small
    /// floor, drawn from a seeded ChaCha stream.
    Seeded(u64),
}

impl std::str::FromStr for StartProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" | "gaussian" => Ok(StartProfile::Gaussian),
            other => other
                .parse::<u64>()
                .map(StartProfile::Seeded)
                .map_err(|_| Error::domain(format!("seed profile must be 'default' or an integer, got '{other}'"))),
        }
    }
}

/// Materializes a start profile (unnormalized).
pub fn start_function(grid: &crate::grid::Grid, profile: StartProfile) -> SampledFunction {
    let h = grid.half_width();
    match profile {
        StartProfile::Gaussian => {
            let sigma = h / 8.0;
            SampledFunction::from_fn(*grid, |x| (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * sigma * sigma)).exp())
                .expect("finite")
        }
        StartProfile::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bumps: Vec<([f64; 2], f64, f64)> = (0..rng.gen_range(1..=4))
                .map(|_| {
                    let center = [rng.gen_range(-h / 2.0..h / 2.0), rng.gen_range(-h / 2.0..h / 2.0)];
                    let sigma = rng.gen_range(h / 32.0..h / 4.0);
                    let weight = rng.gen_range(0.2..1.0);
                    (center, sigma, weight)
                })
                .collect();
            let dim = grid.dim();
            SampledFunction::from_fn(*grid, |x| {
                let bump_sum: f64 = bumps
                    .iter()
                    .map(|(c, s, wgt)| {
                        let dx = x[0] - c[0];
                        let dy = if dim == 2 { x[1] - c[1] } else { 0.0 };
                        wgt * (-(dx * dx + dy * dy) / (2.0 * s * s)).exp()
                    })
                    .sum();
                bump_sum + 1e-3
            })
            .expect("finite")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Runs the `p = r = 2` periodic diagnostic. Requires
    /// [`ExponentTriple::diagnostic_l2`].
    pub diagnostic_l2: bool,
    /// Record every `k`-th iterate (the final one is always recorded when
    /// set).
    pub snapshot_stride: Option<usize>,
    /// Keep only the most recent snapshots.
    pub keep_last: Option<usize>,
}

impl Default for PowerIterationOptions {
    fn default() -> Self {
        PowerIterationOptions { max_iter: 500, tol: 1e-9, diagnostic_l2: false, snapshot_stride: None, keep_last: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormEstimate {
    pub value: f64,
    /// `Φ(f_t)` for every evaluated iterate.
    pub trajectory: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub rel_change_at_stop: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub iteration: usize,
    pub f: SampledFunction,
}

#[derive(Debug, Clone)]
pub struct MaximizerResult {
    /// Final iterate, `‖f‖_p = 1`.
    pub f: SampledFunction,
    pub estimate: OperatorNormEstimate,
    /// `1 - Φ(f) / young_bound`: `f` is certified an `ε₁`-maximizer at this
    /// level against the a-priori Young bound.
    pub eps1_level: f64,
    pub snapshots: Vec<Snapshot>,
}

fn signed_pow(v: f64, e: f64) -> f64 {
    v.abs().powf(e).copysign(v)
}

fn normalize(values: &mut [f64], p: f64, cell_measure: f64) -> f64 {
    let norm = lp_norm_unchecked(values, p, cell_measure);
    if norm > 0.0 {
        values.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

pub fn power_iterate(
    k: &SampledFunction,
    trip: &ExponentTriple,
    f0: &SampledFunction,
    options: &PowerIterationOptions,
) -> Result<MaximizerResult> {
    k.grid().ensure_same(f0.grid())?;
    if options.max_iter < 1 {
        return Err(Error::domain("max_iter must be at least 1"));
    }
    if !(options.tol > 0.0) {
        return Err(Error::domain(format!("tol must be positive, got {}", options.tol)));
    }
    if options.diagnostic_l2 != trip.is_diagnostic() {
        return Err(Error::domain(
            "the p = r = 2 exponents and the diagnostic flag must be used together",
        ));
    }
    let (p, r) = (trip.p(), trip.r());
    let grid = *k.grid();
    let cell = grid.cell_measure();
    let boundary = if options.diagnostic_l2 { Boundary::Periodic } else { Boundary::ZeroPadded };
    let op = ConvolutionOperator::new(k, boundary);
    let positive = k.is_nonnegative();

    let mut f: Vec<f64> = f0.values().to_vec();
    if positive {
        f.iter_mut().for_each(|v| *v = v.abs());
    }
    if normalize(&mut f, p, cell) == 0.0 {
        return Err(Error::Degenerate("starting function has zero L_p norm".into()));
    }

    let mut trajectory: Vec<f64> = Vec::with_capacity(options.max_iter.min(4096));
    let mut snapshots = Vec::new();
    let mut converged = false;
    let mut rel_change = f64::INFINITY;
    for iteration in 0..options.max_iter {
        let mut g = op.apply_values(&f);
        if positive {
            g.iter_mut().for_each(|v| *v = v.abs());
        }
        let phi = lp_norm_unchecked(&g, r, cell);
        if phi == 0.0 {
            return Err(Error::Degenerate(format!("k * f vanishes at iteration {iteration}")));
        }
        if let Some(&prev) = trajectory.last() {
            rel_change = (phi - prev).abs() / phi;
        }
        trajectory.push(phi);
        let last = rel_change < options.tol || iteration + 1 == options.max_iter;
        if let Some(stride) = options.snapshot_stride {
            if iteration % stride.max(1) == 0 || last {
                snapshots.push(Snapshot { iteration, f: SampledFunction::new(grid, f.clone())? });
                if options.keep_last.is_some_and(|n| snapshots.len() > n.max(1)) {
                    snapshots.remove(0);
                }
            }
        }
        if rel_change < options.tol {
            converged = true;
            break;
        }
        if last {
            break;
        }

        // Scale g first so |g|^{r-1} stays in range.
        let g_scale = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let dual: Vec<f64> = g.iter().map(|v| signed_pow(v / g_scale, r - 1.0)).collect();
        let mut u = op.adjoint_values(&dual);
        if positive {
            u.iter_mut().for_each(|v| *v = v.abs());
        }
        let u_scale = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if u_scale == 0.0 {
            return Err(Error::Degenerate(format!("adjoint step vanished at iteration {iteration}")));
        }
        f = u.iter().map(|v| signed_pow(v / u_scale, 1.0 / (p - 1.0))).collect();
        normalize(&mut f, p, cell);
    }

    let value = *trajectory.last().expect("at least one iteration");
    let estimate = OperatorNormEstimate {
        value,
        iterations: trajectory.len(),
        trajectory,
        converged,
        rel_change_at_stop: if rel_change.is_finite() { rel_change } else { 1.0 },
    };
    let mut result = MaximizerResult {
        f: SampledFunction::new(grid, f)?,
        estimate,
        eps1_level: 0.0,
        snapshots,
    };
    result.eps1_level = certify_eps1(&result, young_bound(k, trip));
    Ok(result)
}

/// `1 - Φ(f) / reference`, clamped to `[0, 1]`.
pub fn certify_eps1(result: &MaximizerResult, reference_value: f64) -> f64 {
    let phi = result.estimate.value;
    if reference_value <= 0.0 {
        return if phi > 0.0 { 0.0 } else { 1.0 };
    }
    (1.0 - phi / reference_value).clamp(0.0, 1.0)
}

/// Exact `L_2 -> L_2` norm of the periodic discrete operator, for checking
/// the diagnostic mode.
pub fn fourier_symbol_max(k: &SampledFunction) -> f64 {
    ConvolutionOperator::new(k, Boundary::Periodic).symbol_max()
}
