//! Uniform centered grids on `[-h, h]^n` and functions sampled on them.
//!
//! Cells are node-centered: along each axis the centers sit at
//! `(i - N/2) * w` for `i = 0..N`, with `w = 2h / N`, so there is always a
//! cell whose center is the origin. The box covered by the cells is
//! `[-h - w/2, h - w/2)` per axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::domain(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::domain(format!("half_width must be positive, got {half_width}")));
        }
        if points_per_axis < 8 {
            return Err(Error::domain(format!(
                "points_per_axis must be at least 8, got {points_per_axis}"
            )));
        }
        if !points_per_axis.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "points_per_axis must be even, got {points_per_axis}"
            )));
        }
        Ok(Grid { dim, half_width, points_per_axis })
    }

    pub fn one_d(half_width: f64, points: usize) -> Result<Self> {
        Grid::new(1, half_width, points)
    }

    pub fn two_d(half_width: f64, points_per_axis: usize) -> Result<Self> {
        Grid::new(2, half_width, points_per_axis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Total number of cells, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell side length `w = 2h / N`.
    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    /// `(2h / N)^n`.
    pub fn cell_measure(&self) -> f64 {
        self.cell_width().powi(self.dim as i32)
    }

    /// Measure of the whole box, `N^n` cells.
    pub fn box_measure(&self) -> f64 {
        self.len() as f64 * self.cell_measure()
    }

    /// Signed integer offset of axis index `i` from the origin cell.
    pub fn axis_offset(&self, i: usize) -> i64 {
        i as i64 - (self.points_per_axis / 2) as i64
    }

    pub fn axis_coordinate(&self, i: usize) -> f64 {
        self.axis_offset(i) as f64 * self.cell_width()
    }

    /// Per-axis integer offsets of a flat cell index. For `n = 2` the flat
    /// index is `i * N + j` with `i` along the first coordinate.
    pub fn offsets(&self, index: usize) -> [i64; 2] {
        let n = self.points_per_axis;
        match self.dim {
            1 => [self.axis_offset(index), 0],
            _ => [self.axis_offset(index / n), self.axis_offset(index % n)],
        }
    }

    /// Cell-center coordinates (second entry is zero in 1-D).
    pub fn center(&self, index: usize) -> [f64; 2] {
        let [a, b] = self.offsets(index);
        let w = self.cell_width();
        [a as f64 * w, b as f64 * w]
    }

    /// Squared center radius in units of cells; exact integer.
    pub fn radius_squared_cells(&self, index: usize) -> i64 {
        let [a, b] = self.offsets(index);
        a * a + b * b
    }

    pub fn center_radius(&self, index: usize) -> f64 {
        (self.radius_squared_cells(index) as f64).sqrt() * self.cell_width()
    }

    /// Flat index of the cell centered at the origin.
    pub fn origin_index(&self) -> usize {
        let half = self.points_per_axis / 2;
        match self.dim {
            1 => half,
            _ => half * self.points_per_axis + half,
        }
    }

    /// Flat index of the cell at the given per-axis offsets, if on the grid.
    pub fn index_of_offsets(&self, offsets: [i64; 2]) -> Option<usize> {
        let n = self.points_per_axis as i64;
        let half = n / 2;
        let to_axis = |o: i64| {
            let i = o + half;
            (0..n).contains(&i).then_some(i as usize)
        };
        match self.dim {
            1 => to_axis(offsets[0]),
            _ => Some(to_axis(offsets[0])? * self.points_per_axis + to_axis(offsets[1])?),
        }
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Values on a [`Grid`], one per cell, representing an element of `L_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("value at cell {i} is not finite")));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction { grid, values: vec![0.0; grid.len()] }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        SampledFunction::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        SampledFunction::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        SampledFunction { grid: self.grid, values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &SampledFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        SampledFunction::new(self.grid, values)
    }

    /// Shifts by whole cells; values moved off the grid are dropped and
    /// vacated cells become zero.
    pub fn translated(&self, shift: [i64; 2]) -> Self {
        let mut out = vec![0.0; self.values.len()];
        for (i, &v) in self.values.iter().enumerate() {
            let [a, b] = self.grid.offsets(i);
            if let Some(j) = self.grid.index_of_offsets([a + shift[0], b + shift[1]]) {
                out[j] = v;
            }
        }
        SampledFunction { grid: self.grid, values: out }
    }

    /// Returns `f / ||f||_p`.
    pub fn normalized(&self, p: f64) -> Result<Self> {
        let norm = lp_norm(self, p)?;
        if norm == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero function".into()));
        }
        Ok(self.scaled(1.0 / norm))
    }
}

/// `(Σ |v|^p · cell_measure)^{1/p}`.
pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("lp_norm requires finite p >= 1, got {p}")));
    }
    Ok(lp_norm_unchecked(f.values(), p, f.grid().cell_measure()))
}

/// Same quadrature without the `p >= 1` check, for internal use with
/// exponents already validated elsewhere.
pub(crate) fn lp_norm_unchecked(values: &[f64], p: f64, cell_measure: f64) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    // Scaling by the max keeps |v|^p away from overflow/underflow.
    let sum: f64 = values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    scale * (sum * cell_measure).powf(1.0 / p)
}

/// `∫ |f|^p` over the grid (the `p`-th power of [`lp_norm`]).
pub fn lp_mass(f: &SampledFunction, p: f64) -> f64 {
    let w = f.grid().cell_measure();
    f.values().iter().map(|v| v.abs().powf(p) * w).sum()
}
