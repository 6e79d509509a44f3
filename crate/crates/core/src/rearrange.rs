//! Distribution functions, decreasing rearrangements and Lorentz quasi-norms.
//!
//! The decreasing rearrangement of a sampled function is exactly piecewise
//! constant, so every Lorentz integral here is evaluated in closed form step by
//! step; nothing is integrated numerically in `t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SampledFunction;

/// `cell_measure · #{cells : |f| > λ}`.
pub fn distribution_function(f: &SampledFunction, lambda: f64) -> f64 {
    let count = f.values().iter().filter(|v| v.abs() > lambda).count();
    count as f64 * f.grid().cell_measure()
}

/// The decreasing rearrangement `f*` of a sampled function.
///
/// Level `j` occupies `[t_{j-1}, t_j)` where `t_j` is `cell_measure` times the
/// number of cells at levels `0..=j`. Levels are strictly positive and
/// strictly decreasing (equal levels are coalesced).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRearrangement {
    levels: Vec<f64>,
    counts: Vec<usize>,
    cell_measure: f64,
}

impl StepRearrangement {
    fn from_function(f: &SampledFunction) -> Self {
        let mut magnitudes: Vec<f64> =
            f.values().iter().map(|v| v.abs()).filter(|&v| v > 0.0).collect();
        // Stable sort, so ties keep grid-index order.
        magnitudes.sort_by(|a, b| b.total_cmp(a));
        let mut levels: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for v in magnitudes {
            match levels.last() {
                Some(&last) if last == v => *counts.last_mut().unwrap() += 1,
                _ => {
                    levels.push(v);
                    counts.push(1);
                }
            }
        }
        StepRearrangement { levels, counts, cell_measure: f.grid().cell_measure() }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of cells carried by each level.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Right endpoints `t_1 < … < t_m`, each a whole number of cells.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut cumulative = 0usize;
        self.counts
            .iter()
            .map(|c| {
                cumulative += c;
                cumulative as f64 * self.cell_measure
            })
            .collect()
    }

    /// Measure of the support, `t_m`.
    pub fn total_measure(&self) -> f64 {
        self.counts.iter().sum::<usize>() as f64 * self.cell_measure
    }

    /// `f*(t)`, right-continuous; zero past the support.
    pub fn value_at(&self, t: f64) -> f64 {
        let mut cumulative = 0usize;
        for (level, count) in self.levels.iter().zip(&self.counts) {
            cumulative += count;
            if t < cumulative as f64 * self.cell_measure {
                return *level;
            }
        }
        0.0
    }

    /// Measure where the step function exceeds `λ`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let count: usize = self
            .levels
            .iter()
            .zip(&self.counts)
            .take_while(|(level, _)| **level > lambda)
            .map(|(_, c)| c)
            .sum();
        count as f64 * self.cell_measure
    }

    /// `sup_t t^{1/q} f*(t)`; within each step the product peaks at the right
    /// edge.
    pub fn weak_norm(&self, q: f64) -> f64 {
        self.levels
            .iter()
            .zip(self.breakpoints())
            .map(|(level, t)| t.powf(1.0 / q) * level)
            .fold(0.0, f64::max)
    }

    /// `∫_a^∞ f*(t)^s t^{s/q - 1} dt`, exactly.
    pub fn lorentz_tail(&self, q: f64, s: f64, a: f64) -> f64 {
        let e = s / q;
        let mut left: f64 = 0.0;
        let mut total = 0.0;
        for (level, right) in self.levels.iter().zip(self.breakpoints()) {
            if right > a {
                let lo = left.max(a);
                total += level.powf(s) * (q / s) * (right.powf(e) - lo.powf(e));
            }
            left = right;
        }
        total
    }

    /// Smallest `a` with `∫_a^∞ (t^{1/q} f*)^s dt/t ≤ eps`, found by solving
    /// the closed form inside the step where the tail crosses `eps`.
    pub fn truncation_point(&self, q: f64, s: f64, eps: f64) -> f64 {
        let e = s / q;
        let breakpoints = self.breakpoints();
        let mut tail_after = 0.0;
        for j in (0..self.levels.len()).rev() {
            let right = breakpoints[j];
            let left = if j == 0 { 0.0 } else { breakpoints[j - 1] };
            let weight = self.levels[j].powf(s) * (q / s);
            let step_integral = weight * (right.powf(e) - left.powf(e));
            if tail_after + step_integral > eps {
                // weight · (right^e − a^e) + tail_after = eps
                let a_pow = right.powf(e) - (eps - tail_after) / weight;
                return a_pow.max(0.0).powf(1.0 / e).clamp(left, right);
            }
            tail_after += step_integral;
        }
        0.0
    }
}

/// Decreasing rearrangement; fails on the zero function.
pub fn decreasing_rearrangement(f: &SampledFunction) -> Result<StepRearrangement> {
    if f.is_zero() {
        return Err(Error::Degenerate("decreasing rearrangement of the zero function".into()));
    }
    Ok(StepRearrangement::from_function(f))
}

/// `‖f‖_{q,∞} = sup_t t^{1/q} f*(t)`.
pub fn weak_norm(f: &SampledFunction, q: f64) -> f64 {
    StepRearrangement::from_function(f).weak_norm(q)
}

/// `‖f‖_{q,s} = (Σ_j level_j^s (q/s)(t_j^{s/q} - t_{j-1}^{s/q}))^{1/s}`.
pub fn lorentz_norm(f: &SampledFunction, q: f64, s: f64) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::domain(format!("lorentz_norm requires q > 0, got {q}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("lorentz_norm requires 0 < s < ∞, got {s}")));
    }
    let step = StepRearrangement::from_function(f);
    Ok(step.lorentz_tail(q, s, 0.0).powf(1.0 / s))
}

/// Discrete Schwarz symmetrization: cells are filled in order of increasing
/// center radius (ties by grid index) with the magnitudes sorted descending.
pub fn symmetric_decreasing(f: &SampledFunction) -> SampledFunction {
    let grid = *f.grid();
    let mut order: Vec<(i64, usize)> =
        (0..grid.len()).map(|i| (grid.radius_squared_cells(i), i)).collect();
    order.sort_unstable();
    let mut magnitudes: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    magnitudes.sort_by(|a, b| b.total_cmp(a));
    let mut values = vec![0.0; grid.len()];
    for ((_, cell), v) in order.into_iter().zip(magnitudes) {
        values[cell] = v;
    }
    SampledFunction::new(grid, values).expect("permutation of finite values")
}

/// Knobs for [`tail_diagnostics`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailThresholds {
    /// End values must fall below `ratio · weak_norm`.
    pub ratio: f64,
    /// Ladder density.
    pub points_per_decade: usize,
    /// Width of the window at each end that must be monotone.
    pub window_decades: f64,
    /// Allowed relative disagreement between the `t` and `λ` forms of the
    /// weak norm.
    pub cross_check_tolerance: f64,
}

impl Default for TailThresholds {
    fn default() -> Self {
        TailThresholds {
            ratio: 0.1,
            points_per_decade: 64,
            window_decades: 1.0,
            cross_check_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonmemberSmallT,
    NonmemberLargeT,
    Inconclusive,
}

/// Grid-scale evidence for or against membership in the subspace of weak
/// `L_q` whose functions satisfy `t^{1/q} f*(t) → 0` at both `t → 0` and
/// `t → ∞` (equivalently `λ^q d_f(λ) → 0` at both ends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostics {
    pub q: f64,
    pub weak_norm: f64,
    pub threshold: f64,
    /// `(t, t^{1/q} f*(t))` over the first window above one cell.
    pub small_t_tail: Vec<(f64, f64)>,
    /// Same over the last window below the box measure.
    pub large_t_tail: Vec<(f64, f64)>,
    /// `(λ, λ^q d_f(λ))` over the top window of levels (pairs with small `t`).
    pub lambda_form_small: Vec<(f64, f64)>,
    /// Same over the bottom window of levels (pairs with large `t`).
    pub lambda_form_large: Vec<(f64, f64)>,
    /// `sup_λ λ d_f(λ)^{1/q}` on the ladder divided by the weak norm.
    pub cross_check_ratio: f64,
    pub verdict: Verdict,
}

/// Geometric ladder from `lo` to `hi` inclusive.
pub(crate) fn geometric_ladder(lo: f64, hi: f64, points_per_decade: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let decades = (hi / lo).log10();
    let steps = ((decades * points_per_decade as f64).ceil() as usize).max(1);
    (0..=steps)
        .map(|i| {
            if i == steps {
                hi
            } else {
                lo * 10f64.powf(decades * i as f64 / steps as f64)
            }
        })
        .collect()
}

/// True when `seq` does not increase (up to rounding) from front to back.
fn nonincreasing(seq: impl Iterator<Item = f64>) -> bool {
    let mut prev = f64::INFINITY;
    for v in seq {
        if v > prev * (1.0 + 1e-12) + f64::MIN_POSITIVE {
            return false;
        }
        prev = v;
    }
    true
}

pub fn tail_diagnostics(f: &SampledFunction, q: f64, thresholds: &TailThresholds) -> Result<TailDiagnostics> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::domain(format!("tail_diagnostics requires q > 0, got {q}")));
    }
    let grid = f.grid();
    let step = StepRearrangement::from_function(f);
    let weak = step.weak_norm(q);
    let threshold = thresholds.ratio * weak;
    let window = 10f64.powf(thresholds.window_decades);
    let ppd = thresholds.points_per_decade.max(1);

    if step.is_empty() {
        return Ok(TailDiagnostics {
            q,
            weak_norm: 0.0,
            threshold: 0.0,
            small_t_tail: vec![],
            large_t_tail: vec![],
            lambda_form_small: vec![],
            lambda_form_large: vec![],
            cross_check_ratio: 1.0,
            verdict: Verdict::Member,
        });
    }

    let t_lo = grid.cell_measure();
    let t_hi = grid.box_measure();
    let t_ladder = geometric_ladder(t_lo, t_hi, ppd);
    let product = |t: f64| (t, t.powf(1.0 / q) * step.value_at(t));
    let small_t_tail: Vec<_> =
        t_ladder.iter().copied().filter(|&t| t <= t_lo * window).map(product).collect();
    let large_t_tail: Vec<_> =
        t_ladder.iter().copied().filter(|&t| t >= t_hi / window).map(product).collect();

    let lam_lo = *step.levels().last().unwrap();
    let lam_hi = step.levels()[0];
    let lam_ladder = geometric_ladder(lam_lo, lam_hi, ppd);
    let lambda_form = |lam: f64| (lam, lam.powf(q) * step.distribution(lam));
    let lambda_form_small: Vec<_> =
        lam_ladder.iter().copied().filter(|&l| l >= lam_hi / window).map(lambda_form).collect();
    let lambda_form_large: Vec<_> =
        lam_ladder.iter().copied().filter(|&l| l <= lam_lo * window).map(lambda_form).collect();

    // The probe just below the lowest level sees the full support.
    let lambda_sup = lam_ladder
        .iter()
        .map(|&l| {
            let below = l * (1.0 - 1e-12);
            below * step.distribution(below).powf(1.0 / q)
        })
        .fold(0.0, f64::max);
    let cross_check_ratio = lambda_sup / weak;

    // Small-t values approach the end as t decreases; large-t as t increases.
    let small_end = small_t_tail.first().map_or(0.0, |p| p.1);
    let large_end = large_t_tail.last().map_or(0.0, |p| p.1);
    let small_monotone = nonincreasing(small_t_tail.iter().rev().map(|p| p.1));
    let large_monotone = nonincreasing(large_t_tail.iter().map(|p| p.1));

    let cross_ok = cross_check_ratio >= 1.0 - thresholds.cross_check_tolerance
        && cross_check_ratio <= 1.0 + 1e-9;
    let verdict = if !cross_ok {
        Verdict::Inconclusive
    } else if small_end >= threshold {
        Verdict::NonmemberSmallT
    } else if large_end >= threshold {
        Verdict::NonmemberLargeT
    } else if small_monotone && large_monotone {
        Verdict::Member
    } else {
        Verdict::Inconclusive
    };

    Ok(TailDiagnostics {
        q,
        weak_norm: weak,
        threshold,
        small_t_tail,
        large_t_tail,
        lambda_form_small,
        lambda_form_large,
        cross_check_ratio,
        verdict,
    })
}

/// `C = (q/s)(1 - 2^{-s/q})`, the constant in the tail estimate
/// `C (f*(T) T^{1/q})^s ≤ ∫_{T_ε}^T f*(t)^s t^{s/q-1} dt` valid for `T ≥ 2 T_ε`.
pub fn inclusion_constant(q: f64, s: f64) -> f64 {
    (q / s) * (1.0 - 2f64.powf(-s / q))
}

/// Quantities in the chain showing that finite `‖f‖_{q,s}` forces
/// `t^{1/q} f*(t) → 0` as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub constant: f64,
    /// Truncation point: the Lorentz tail beyond it is at most `eps`.
    pub t_eps: f64,
    /// `∫_{T_ε}^∞ f*(t)^s t^{s/q-1} dt`.
    pub tail_integral: f64,
    /// `f*(T) T^{1/q}`.
    pub product: f64,
    /// `(eps / C)^{1/s}`: the certified bound on `product`. (The exponent is
    /// `+1/s`; that is what the inequality chain yields.)
    pub bound: f64,
    /// `C · product^s − tail_integral`; nonpositive when the chain holds.
    pub margin: f64,
}

pub fn inclusion_check(f: &SampledFunction, q: f64, s: f64, t: f64, eps: f64) -> Result<InclusionCheck> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::domain(format!("inclusion check requires q > 0, got {q}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain(format!("inclusion check requires 0 < s < ∞, got {s}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(format!("inclusion check requires eps > 0, got {eps}")));
    }
    let step = StepRearrangement::from_function(f);
    let t_eps = step.truncation_point(q, s, eps);
    if !(t > 0.0) || t < 2.0 * t_eps {
        return Err(Error::domain(format!(
            "T = {t} must be positive and at least 2·T_eps = {}",
            2.0 * t_eps
        )));
    }
    let constant = inclusion_constant(q, s);
    let tail_integral = step.lorentz_tail(q, s, t_eps);
    let product = step.value_at(t) * t.powf(1.0 / q);
    Ok(InclusionCheck {
        constant,
        t_eps,
        tail_integral,
        product,
        bound: (eps / constant).powf(1.0 / s),
        margin: constant * product.powf(s) - tail_integral,
    })
}

pub fn inclusion_margin(f: &SampledFunction, q: f64, s: f64, t: f64, eps: f64) -> Result<f64> {
    inclusion_check(f, q, s, t, eps).map(|c| c.margin)
}
