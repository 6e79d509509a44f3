//! FFT-backed discrete convolution on a [`Grid`].
//!
//! With [`Boundary::ZeroPadded`] each axis is padded to `2N` before
//! transforming, which makes the circular convolution coincide with the
//! linear one on every output cell of the grid: kernel offsets span
//! `[-N+1, N-1]`, and those residues are distinct modulo `2N`. The result is
//! `(k * f)(x_m) ≈ w^n Σ_j k(x_m - x_j) f(x_j)`, truncated back to the box.
//!
//! [`Boundary::Periodic`] convolves on the discrete torus instead. It only
//! exists for the `L_2 -> L_2` Fourier-symbol diagnostic, where the operator
//! norm is exactly the largest modulus of the symbol.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid, SampledFunction};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    ZeroPadded,
    Periodic,
}

struct Transform {
    dim: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transform {
    fn new(dim: usize, len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Transform {
            dim,
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    fn run(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        // rustfft processes consecutive chunks of `len` in one call.
        fft.process(data);
        if self.dim == 2 {
            transpose(data, self.len);
            fft.process(data);
            transpose(data, self.len);
        }
    }

    fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse.
    fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Convolution with a fixed kernel, with its spectrum cached so that the
/// forward map and its adjoint each cost one transform pair.
pub struct ConvolutionOperator {
    grid: Grid,
    boundary: Boundary,
    transform: Transform,
    spectrum: Vec<Complex64>,
    /// Padded-buffer position of each grid cell.
    positions: Vec<usize>,
}

impl ConvolutionOperator {
    pub fn new(kernel: &SampledFunction, boundary: Boundary) -> Self {
        let grid = *kernel.grid();
        let n = grid.points_per_axis();
        let padded = match boundary {
            Boundary::ZeroPadded => 2 * n,
            Boundary::Periodic => n,
        };
        let wrap = |o: i64| o.rem_euclid(padded as i64) as usize;
        let positions = (0..grid.len())
            .map(|i| {
                let [a, b] = grid.offsets(i);
                match grid.dim() {
                    1 => wrap(a),
                    _ => wrap(a) * padded + wrap(b),
                }
            })
            .collect();
        let transform = Transform::new(grid.dim(), padded);
        let mut op = ConvolutionOperator { grid, boundary, transform, spectrum: Vec::new(), positions };
        let mut spectrum = op.place(kernel.values());
        op.transform.forward(&mut spectrum);
        op.spectrum = spectrum;
        op
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    fn buffer_len(&self) -> usize {
        self.transform.len.pow(self.grid.dim() as u32)
    }

    fn place(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.buffer_len()];
        for (&pos, &v) in self.positions.iter().zip(values) {
            buf[pos] = Complex64::new(v, 0.0);
        }
        buf
    }

    fn multiply(&self, values: &[f64], conjugate: bool) -> Vec<f64> {
        let mut buf = self.place(values);
        self.transform.forward(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.spectrum) {
            *b *= if conjugate { k.conj() } else { *k };
        }
        self.transform.inverse(&mut buf);
        let scale = self.grid.cell_measure() / self.buffer_len() as f64;
        self.positions.iter().map(|&pos| buf[pos].re * scale).collect()
    }

    /// `k * f` on the grid.
    pub fn apply_values(&self, values: &[f64]) -> Vec<f64> {
        self.multiply(values, false)
    }

    /// Adjoint with respect to the cell-measure inner product; for the
    /// zero-padded boundary this is convolution with `k(-x)` truncated to
    /// the box.
    pub fn adjoint_values(&self, values: &[f64]) -> Vec<f64> {
        self.multiply(values, true)
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.grid.ensure_same(f.grid())?;
        SampledFunction::new(self.grid, self.apply_values(f.values()))
    }

    pub fn adjoint(&self, g: &SampledFunction) -> Result<SampledFunction> {
        self.grid.ensure_same(g.grid())?;
        SampledFunction::new(self.grid, self.adjoint_values(g.values()))
    }

    /// `w^n · max_ξ |k̂(ξ)|` over the transform frequencies. For the periodic
    /// boundary this is exactly the `L_2 -> L_2` operator norm; for the
    /// zero-padded boundary it is an upper bound.
    pub fn symbol_max(&self) -> f64 {
        let peak = self.spectrum.iter().map(|c| c.norm()).fold(0.0, f64::max);
        peak * self.grid.cell_measure()
    }
}

/// Zero-padded linear convolution of `k` and `f`.
pub fn convolve(k: &SampledFunction, f: &SampledFunction) -> Result<SampledFunction> {
    k.grid().ensure_same(f.grid())?;
    ConvolutionOperator::new(k, Boundary::ZeroPadded).apply(f)
}
