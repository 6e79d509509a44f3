//! δ-diameters, tightness of sequences, and the explicit constants of the
//! concentration lemma for near-maximizers.
//!
//! For `‖f‖_p = 1` the δ-diameter along a unit vector `v` is the width of the
//! narrowest slab `{a < x·v < b}` holding at least `1 − δ` of `∫|f|^p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentTriple;
use crate::grid::SampledFunction;
use crate::rearrange::geometric_ladder;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterQuery {
    pub delta: f64,
    pub direction: [f64; 2],
    pub p: f64,
}

impl DiameterQuery {
    pub fn new(delta: f64, direction: [f64; 2], p: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
        }
        let len = (direction[0] * direction[0] + direction[1] * direction[1]).sqrt();
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("direction must be a unit vector, has length {len}")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::domain(format!("p must be finite and at least 1, got {p}")));
        }
        Ok(DiameterQuery { delta, direction, p })
    }

    /// Angle `θ` in the plane, `(cos θ, sin θ)`.
    pub fn at_angle(delta: f64, theta: f64, p: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        Self::new(delta, [c, s], p)
    }
}

/// Narrowest slab holding `1 − δ` of the `|f|^p` mass, by a two-pointer sweep
/// over cells sorted by their projection onto the direction. Slab edges sit
/// at cell boundaries, so the result is exact at cell resolution.
///
/// The target is absolute: `f` is expected to satisfy `‖f‖_p = 1`, and mass
/// missing from the grid counts as lost.
pub fn delta_diameter(f: &SampledFunction, query: &DiameterQuery) -> Result<f64> {
    let grid = f.grid();
    let [vx, vy] = query.direction;
    if grid.dim() == 1 && vy != 0.0 {
        return Err(Error::domain("1-D diameters take the directions ±1"));
    }
    let cell = grid.cell_measure();
    let mut items: Vec<(f64, f64)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| {
            let [x, y] = grid.center(i);
            (x * vx + y * vy, v.abs().powf(query.p) * cell)
        })
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Cells with equal projection enter and leave the slab together.
    let mut groups: Vec<(f64, f64)> = Vec::with_capacity(items.len());
    for (s, m) in items {
        match groups.last_mut() {
            Some(last) if last.0 == s => last.1 += m,
            _ => groups.push((s, m)),
        }
    }
    let target = 1.0 - query.delta;
    let total: f64 = groups.iter().map(|g| g.1).sum();
    if total < target * (1.0 - 1e-12) {
        return Err(Error::infeasible(format!(
            "the grid holds only {total:.6} of the mass, below 1 - delta = {target}"
        )));
    }
    let extent = grid.cell_width() * (vx.abs() + vy.abs());
    let mut best = f64::INFINITY;
    let mut mass = 0.0;
    let mut j = 0;
    for i in 0..groups.len() {
        while j < groups.len() && mass < target * (1.0 - 1e-12) {
            mass += groups[j].1;
            j += 1;
        }
        if mass < target * (1.0 - 1e-12) {
            break;
        }
        best = best.min(groups[j - 1].0 - groups[i].0 + extent);
        mass -= groups[i].1;
    }
    Ok(best)
}

/// Constants of the concentration lemma for an `ε₁`-maximizer of an operator
/// with norm `N` whose kernel core is supported in `|x| ≤ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub eps1: f64,
    pub eps2: f64,
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

pub fn lemma_constants(eps1: f64, trip: &ExponentTriple, r: f64, n: f64) -> Result<LemmaConstants> {
    if !(eps1 > 0.0 && eps1 < 1.0 / 3.0) {
        return Err(Error::domain(format!("eps1 must lie in (0, 1/3), got {eps1}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("support radius R must be positive, got {r}")));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::domain(format!("operator norm N must be positive, got {n}")));
    }
    let ratio = trip.r() / trip.p();
    if !(ratio > 1.0) {
        return Err(Error::domain("the lemma needs r/p > 1"));
    }
    Ok(LemmaConstants {
        eps1,
        eps2: 3.0 * eps1 / (1.0 + eps1),
        delta: 6.0 * eps1 / (1.0 - 2f64.powf(1.0 - ratio)),
        l: 8.0 * r * eps1.powf(-1.0 / ratio),
        r,
        n,
    })
}

/// Directions sampled for the supremum over unit vectors: `±1` in 1-D,
/// `count` evenly spaced angles in `[0, π)` in 2-D.
pub fn sample_directions(dim: usize, count: usize) -> Result<Vec<[f64; 2]>> {
    if dim == 1 {
        return Ok(vec![[1.0, 0.0], [-1.0, 0.0]]);
    }
    if count == 0 {
        return Err(Error::domain("at least one direction is required"));
    }
    Ok((0..count)
        .map(|k| {
            let (s, c) = (std::f64::consts::PI * k as f64 / count as f64).sin_cos();
            [c, s]
        })
        .collect())
}

/// Largest δ-diameter over the sampled directions.
pub fn max_diameter(f: &SampledFunction, delta: f64, p: f64, directions: &[[f64; 2]]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &d in directions {
        worst = worst.max(delta_diameter(f, &DiameterQuery::new(delta, d, p)?)?);
    }
    Ok(worst)
}

/// True iff every sampled direction has `D^p_{δ,v}(f) ≤ L`. When the lemma's
/// `δ` is at least 1 the statement is vacuous and this returns true.
pub fn check_diameter_bound(
    f: &SampledFunction,
    constants: &LemmaConstants,
    trip: &ExponentTriple,
    directions: usize,
) -> Result<bool> {
    if constants.delta >= 1.0 {
        return Ok(true);
    }
    let dirs = sample_directions(f.grid().dim(), directions)?;
    Ok(max_diameter(f, constants.delta, trip.p(), &dirs)? <= constants.l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaDiameter {
    pub delta: f64,
    /// `None` when some element lost more than `δ` of its mass off the grid.
    pub diameter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    /// Sorted by increasing `delta`.
    pub per_delta: Vec<DeltaDiameter>,
    pub escaped: bool,
}

/// Supremum over the sequence and the axis directions of the δ-diameter, per
/// δ. An infeasible query marks the sequence as escaped.
pub fn tightness_report(sequence: &[SampledFunction], p: f64, deltas: &[f64]) -> Result<TightnessReport> {
    let mut deltas = deltas.to_vec();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let mut escaped = false;
    let mut per_delta = Vec::with_capacity(deltas.len());
    for &delta in &deltas {
        let mut sup: Option<f64> = Some(0.0);
        for f in sequence {
            let axes: &[[f64; 2]] = if f.grid().dim() == 1 { &[[1.0, 0.0]] } else { &[[1.0, 0.0], [0.0, 1.0]] };
            for &axis in axes {
                match delta_diameter(f, &DiameterQuery::new(delta, axis, p)?) {
                    Ok(d) => sup = sup.map(|s| s.max(d)),
                    Err(Error::Infeasible(_)) => {
                        sup = None;
                        escaped = true;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        per_delta.push(DeltaDiameter { delta, diameter: sup });
    }
    Ok(TightnessReport { per_delta, escaped })
}

/// Tightness in `L_r` with centered cubes: the smallest side on a geometric
/// ladder for which every element keeps less than `eps` of its `|g|^r` mass
/// outside the cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubeTightness {
    pub eps: f64,
    /// `None` if no cube inside the grid box works.
    pub side: Option<f64>,
    /// `sup_j ∫_{outside} |g_j|^r` at `side` (or at the full box).
    pub sup_outside_mass: f64,
}

/// `∫_{outside the centered cube of the given side} |g|^r`.
pub fn mass_outside_cube(g: &SampledFunction, r: f64, side: f64) -> f64 {
    let grid = g.grid();
    let half = side / 2.0;
    g.values()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let [x, y] = grid.center(*i);
            x.abs().max(y.abs()) > half
        })
        .map(|(_, v)| v.abs().powf(r))
        .sum::<f64>()
        * grid.cell_measure()
}

pub fn cube_tightness(sequence: &[SampledFunction], r: f64, eps: f64) -> Result<CubeTightness> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    let Some(first) = sequence.first() else {
        return Ok(CubeTightness { eps, side: Some(0.0), sup_outside_mass: 0.0 });
    };
    let grid = first.grid();
    let sup_at = |side: f64| sequence.iter().map(|g| mass_outside_cube(g, r, side)).fold(0.0, f64::max);
    for side in geometric_ladder(grid.cell_width(), 2.0 * grid.half_width(), 64) {
        let m = sup_at(side);
        if m < eps {
            return Ok(CubeTightness { eps, side: Some(side), sup_outside_mass: m });
        }
    }
    Ok(CubeTightness { eps, side: None, sup_outside_mass: sup_at(2.0 * grid.half_width()) })
}
