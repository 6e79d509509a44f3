//! ε-truncation of a kernel: `k = u + w + z + core`, with `core` bounded and
//! compactly supported and the other three parts small in the norms that
//! control their convolution operators.
//!
//! * `u = k·1{|k| > M}`, cut so that `‖u‖_{q,∞} < eps`.
//! * `v = k − u`; `w = v·1{0 < |v| < δ}`, cut so that `‖w‖_{q,∞} < eps`.
//! * `y = v − w`; `z = y·1{|x| > R}`, cut so that `‖z‖_q < eps`.
//! * `core = y − z = k − (u + w + z)`.
//!
//! With `‖K_g‖ ≤ C ‖g‖_{q,∞}` for the weak-type parts and Young's inequality
//! for `z`, `‖K_{k−core}‖ ≤ (2C + 1)·eps`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentTriple;
use crate::grid::{lp_norm, SampledFunction};
use crate::rearrange::{geometric_ladder, weak_norm};

const LADDER_POINTS_PER_DECADE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Configured,
    DefaultFormula,
}

/// Constant of the weak-type convolution bound `‖k * f‖_r ≤ C ‖k‖_{q,∞} ‖f‖_p`.
/// No sharp value is assumed; the default is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HlsConstant {
    value: f64,
    provenance: Provenance,
}

impl HlsConstant {
    pub fn configured(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::domain(format!("HLS constant must be positive and finite, got {value}")));
        }
        Ok(HlsConstant { value, provenance: Provenance::Configured })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

impl Default for HlsConstant {
    fn default() -> Self {
        HlsConstant { value: 1.0, provenance: Provenance::DefaultFormula }
    }
}

/// `k` where `|k| > M`, zero elsewhere.
pub fn level_cut_above(k: &SampledFunction, m: f64) -> SampledFunction {
    k.map(|v| if v.abs() > m { v } else { 0.0 }).expect("subset of finite values")
}

/// `v` where `0 < |v| < delta_level`, zero elsewhere.
pub fn level_cut_below(v: &SampledFunction, delta_level: f64) -> SampledFunction {
    v.map(|x| if x.abs() < delta_level { x } else { 0.0 }).expect("subset of finite values")
}

/// Thresholds chosen by [`choose_thresholds`]. `r_cells_squared` is the
/// exact squared radius in cell units; `radius` is the same in length units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub m: f64,
    pub delta_level: f64,
    pub radius: f64,
    pub r_cells_squared: i64,
}

/// Magnitudes sorted descending, zeros dropped.
fn sorted_magnitudes(f: &SampledFunction) -> Vec<f64> {
    let mut m: Vec<f64> = f.values().iter().map(|v| v.abs()).filter(|&v| v > 0.0).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    m
}

/// Weak norm of the step function whose cells carry `mags` (descending).
fn weak_of_sorted(mags: &[f64], q: f64, cell: f64) -> f64 {
    mags.iter()
        .enumerate()
        .map(|(i, v)| v * ((i + 1) as f64 * cell).powf(1.0 / q))
        .fold(0.0, f64::max)
}

/// Picks `M`, `δ` and `R` for the split (see the module docs).
///
/// `M` is the smallest level on a geometric ladder (64 per decade over the
/// magnitude range of `k`) with `‖u_M‖_{q,∞} < eps`; `δ` is the largest
/// ladder level not above `M` with `‖w_δ‖_{q,∞} < eps`; `R` is the smallest
/// cell-center radius with `Σ_{|x|>R} |y|^q · cell < eps^q`.
///
/// Infeasible when a single cell at the peak already carries weak norm
/// `≥ eps`: the kernel's small-`t` tail is not resolved at this grid scale.
pub fn choose_thresholds(k: &SampledFunction, trip: &ExponentTriple, eps: f64) -> Result<Thresholds> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    let q = trip.q();
    let grid = *k.grid();
    let cell = grid.cell_measure();
    let mags = sorted_magnitudes(k);
    if mags.is_empty() {
        return Ok(Thresholds { m: 0.0, delta_level: 0.0, radius: 0.0, r_cells_squared: 0 });
    }
    let peak = mags[0];
    if peak.powf(q) * cell >= eps.powf(q) {
        return Err(Error::infeasible(format!(
            "peak cell has weak norm {:.6} >= eps = {eps}; the kernel is not resolved in L_{{q,∞,0}} at this grid scale",
            peak * cell.powf(1.0 / q)
        )));
    }

    // Prefix maxima of mag_i · ((i+1)·cell)^{1/q} give ‖u_M‖_{q,∞} exactly.
    let mut prefix = Vec::with_capacity(mags.len());
    let mut run = 0.0_f64;
    for (i, v) in mags.iter().enumerate() {
        run = run.max(v * ((i + 1) as f64 * cell).powf(1.0 / q));
        prefix.push(run);
    }
    let weak_above = |m: f64| {
        let n = mags.partition_point(|&v| v > m);
        if n == 0 { 0.0 } else { prefix[n - 1] }
    };
    let ladder = geometric_ladder(*mags.last().unwrap(), peak, LADDER_POINTS_PER_DECADE);
    let m = *ladder.iter().find(|&&l| weak_above(l) < eps).expect("the ladder ends at the peak");

    let v_mags: Vec<f64> = mags[mags.partition_point(|&v| v > m)..].to_vec();
    let delta_level = match v_mags.last() {
        None => m,
        Some(&lo) => {
            let weak_below = |d: f64| {
                let start = v_mags.partition_point(|&v| v >= d);
                weak_of_sorted(&v_mags[start..], q, cell)
            };
            let ladder = geometric_ladder(lo, m, LADDER_POINTS_PER_DECADE);
            // weak_below is nondecreasing along the ladder and zero at its foot.
            let n = ladder.partition_point(|&d| weak_below(d) < eps);
            ladder[n.max(1) - 1]
        }
    };

    // Tail of |y|^q beyond each distinct radius, accumulated from outside in.
    let mut cells: Vec<(i64, f64)> = k
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let a = x.abs();
            (a <= m && a >= delta_level && a > 0.0).then(|| (grid.radius_squared_cells(i), a.powf(q) * cell))
        })
        .collect();
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let budget = eps.powf(q);
    let mut r_cells_squared = 0;
    let mut tail = 0.0;
    let mut idx = cells.len();
    while idx > 0 {
        let r2 = cells[idx - 1].0;
        let group_start = cells[..idx].partition_point(|c| c.0 < r2);
        // `tail` is the mass strictly outside r2.
        if tail >= budget {
            break;
        }
        r_cells_squared = r2;
        tail += cells[group_start..idx].iter().map(|c| c.1).sum::<f64>();
        idx = group_start;
    }
    if idx == 0 && tail < budget {
        r_cells_squared = 0;
    }
    let radius = (r_cells_squared as f64).sqrt() * grid.cell_width();
    Ok(Thresholds { m, delta_level, radius, r_cells_squared })
}

/// The four parts of the split plus their certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub u: SampledFunction,
    pub w: SampledFunction,
    pub z: SampledFunction,
    pub core: SampledFunction,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "M")]
    pub m: f64,
    pub delta_level: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub eps: f64,
    pub hls_constant: HlsConstant,
    pub bound_u: f64,
    pub bound_w: f64,
    pub bound_z: f64,
    pub bound_total: f64,
    /// Measured `‖u‖_{q,∞}`, `‖w‖_{q,∞}` and `‖z‖_q`; each is below `eps`.
    pub weak_norm_u: f64,
    pub weak_norm_w: f64,
    pub lq_norm_z: f64,
}

pub fn decompose(k: &SampledFunction, trip: &ExponentTriple, eps: f64, c: &HlsConstant) -> Result<Decomposition> {
    let th = choose_thresholds(k, trip, eps)?;
    let grid = *k.grid();
    let q = trip.q();
    let u = level_cut_above(k, th.m);
    let v = k.sub(&u)?;
    let w = level_cut_below(&v, th.delta_level);
    let y = v.sub(&w)?;
    let z_values: Vec<f64> = y
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| if grid.radius_squared_cells(i) > th.r_cells_squared { x } else { 0.0 })
        .collect();
    let z = SampledFunction::new(grid, z_values)?;
    // Each cell of k lands in exactly one part, so this is exact.
    let core = y.sub(&z)?;

    let certificate = Certificate {
        m: th.m,
        delta_level: th.delta_level,
        radius: th.radius,
        eps,
        hls_constant: *c,
        bound_u: c.value() * eps,
        bound_w: c.value() * eps,
        bound_z: eps,
        bound_total: (2.0 * c.value() + 1.0) * eps,
        weak_norm_u: weak_norm(&u, q),
        weak_norm_w: weak_norm(&w, q),
        lq_norm_z: lp_norm(&z, q)?,
    };
    Ok(Decomposition { u, w, z, core, certificate })
}

impl Decomposition {
    /// `u + w + z`, the part the certificate bounds.
    pub fn remainder(&self) -> SampledFunction {
        self.u.add(&self.w).and_then(|s| s.add(&self.z)).expect("parts share a grid")
    }

    pub fn reconstruct(&self) -> SampledFunction {
        self.remainder().add(&self.core).expect("parts share a grid")
    }
}

/// True iff `max|core| ≤ M + δ` and `core` vanishes at every cell whose
/// center lies outside `|x| ≤ R`.
pub fn verify_core(core: &SampledFunction, m: f64, delta_level: f64, radius: f64) -> bool {
    let grid = core.grid();
    let bounded = core.max_abs() <= m + delta_level;
    let supported = core
        .values()
        .iter()
        .enumerate()
        .all(|(i, &v)| v == 0.0 || grid.center_radius(i) <= radius * (1.0 + 1e-12));
    bounded && supported
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::kernel::{materialize, KernelSpec, Sampling};

    fn trip() -> ExponentTriple {
        ExponentTriple::new(2.0, 4.0).unwrap()
    }

    fn kernel(spec: &str, g: &Grid) -> SampledFunction {
        materialize(&spec.parse().unwrap(), g, Sampling::CellCenter).unwrap()
    }

    #[test]
    fn cut_above_examples() {
        let g = Grid::one_d(8.0, 1024).unwrap();
        let capped = kernel("power_capped:q=2,cap=10", &g);
        assert!(level_cut_above(&capped, 10.0).is_zero());
        let power = kernel("power:q=2", &g);
        let u = level_cut_above(&power, 1.0);
        for i in 0..g.len() {
            let inside = g.center_radius(i) < 1.0;
            assert_eq!(u.values()[i] != 0.0, inside, "x = {}", g.center(i)[0]);
        }
        assert!(level_cut_above(&power, power.max_abs()).is_zero());
    }

    #[test]
    fn cut_below_examples() {
        let g = Grid::one_d(8.0, 1024).unwrap();
        let ind = kernel("indicator:radius=1", &g);
        assert!(level_cut_below(&ind, 0.5).is_zero());
        let gauss = kernel("gauss:sigma=1", &g);
        let w = level_cut_below(&gauss, (-2.0f64).exp());
        for i in 0..g.len() {
            let x = g.center(i)[0];
            if (x * x - 4.0).abs() > 1e-9 {
                assert_eq!(w.values()[i] != 0.0, x * x > 4.0);
            }
        }
        assert_eq!(level_cut_below(&gauss, 2.0), gauss);
    }

    #[test]
    fn indicator_core_is_kernel() {
        // eps^q lies between one and two cell measures, so neither the peak
        // cell nor the two outermost cells can be split off.
        let g = Grid::one_d(4.0, 1024).unwrap();
        let k = kernel("indicator:radius=1", &g);
        let d = decompose(&k, &trip(), 0.035, &HlsConstant::default()).unwrap();
        assert!(d.u.is_zero() && d.w.is_zero() && d.z.is_zero());
        assert_eq!(d.core, k);
        assert!((d.certificate.radius - 1.0).abs() <= g.cell_width());
        assert!((d.certificate.bound_total - 0.105).abs() < 1e-15);
    }

    #[test]
    fn gaussian_split_is_exact_and_certified() {
        let g = Grid::one_d(8.0, 1024).unwrap();
        let k = kernel("gauss:sigma=1", &g);
        for eps in [0.2, 0.1, 0.05] {
            let d = decompose(&k, &trip(), eps, &HlsConstant::default()).unwrap();
            let back = d.reconstruct();
            for (a, b) in back.values().iter().zip(k.values()) {
                assert!((a - b).abs() <= 1e-12);
            }
            let c = &d.certificate;
            assert!(verify_core(&d.core, c.m, c.delta_level, c.radius));
            assert!(c.weak_norm_u < eps && c.weak_norm_w < eps && c.lq_norm_z < eps);
            assert!(d.u.values().iter().zip(d.w.values()).all(|(a, b)| a * b == 0.0));
        }
    }

    #[test]
    fn thresholds_monotone_in_eps() {
        let g = Grid::one_d(8.0, 2048).unwrap();
        let k = kernel("gauss:sigma=1", &g);
        let a = choose_thresholds(&k, &trip(), 0.05).unwrap();
        let b = choose_thresholds(&k, &trip(), 0.2).unwrap();
        assert!(a.m >= b.m && a.radius >= b.radius && a.delta_level <= b.delta_level);
    }

    #[test]
    fn power_kernel_is_infeasible_below_threshold() {
        let g = Grid::one_d(16.0, 1 << 12).unwrap();
        let t = trip();
        let k = materialize(&KernelSpec::Power { q: t.q() }, &g, Sampling::CellCenter).unwrap();
        let edge = 2f64.powf(1.0 / t.q());
        for eps in [0.1, 0.5, 0.99 * edge] {
            assert!(matches!(choose_thresholds(&k, &t, eps), Err(Error::Infeasible(_))));
        }
    }

    #[test]
    fn verify_core_rejects() {
        let g = Grid::one_d(4.0, 256).unwrap();
        let k = kernel("gauss:sigma=0.5", &g);
        let d = decompose(&k, &trip(), 0.1, &HlsConstant::default()).unwrap();
        let c = &d.certificate;
        assert!(verify_core(&d.core, c.m, c.delta_level, c.radius));
        let mut far = d.core.values().to_vec();
        let idx = g.index_of_offsets([((2.0 * c.radius / g.cell_width()).ceil() as i64).min(127), 0]).unwrap();
        far[idx] = 1e-3;
        assert!(!verify_core(&SampledFunction::new(g, far).unwrap(), c.m, c.delta_level, c.radius));
        let doubled = d.core.scaled(2.0);
        assert_eq!(
            verify_core(&doubled, c.m, c.delta_level, c.radius),
            doubled.max_abs() <= c.m + c.delta_level
        );
        assert!(!verify_core(&d.core.scaled(10.0), c.m, c.delta_level, c.radius));
    }

    #[test]
    fn hls_constant_validation() {
        assert!(HlsConstant::configured(0.0).is_err());
        assert_eq!(HlsConstant::configured(2.5).unwrap().provenance(), Provenance::Configured);
        assert_eq!(HlsConstant::default().value(), 1.0);
    }
}
