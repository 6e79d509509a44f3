//! Exponent triples tied together by the Young condition
//! `1/p + 1/q = 1 + 1/r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the Young condition residual.
pub const YOUNG_TOLERANCE: f64 = 1e-12;

/// A validated `(p, q, r)` with `1 < p < r < ∞` satisfying the Young condition.
///
/// The operator acts `L_p -> L_r` and the kernel lives in (weak) `L_q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    p: f64,
    q: f64,
    r: f64,
}

impl ExponentTriple {
    /// Builds the triple from the operator exponents, solving for `q`.
    pub fn new(p: f64, r: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::domain(format!("p must satisfy 1 < p < ∞, got p = {p}")));
        }
        if r.is_infinite() {
            return Err(Error::domain("r must be finite"));
        }
        if !r.is_finite() || p >= r {
            return Err(Error::domain(format!("exponents must satisfy p < r, got p = {p}, r = {r}")));
        }
        let q = 1.0 / (1.0 + 1.0 / r - 1.0 / p);
        let triple = ExponentTriple { p, q, r };
        triple.check()?;
        Ok(triple)
    }

    /// The `p = r = 2` triple (so `q = 1`) used by the Fourier-multiplier
    /// diagnostic. It deliberately bypasses the `p < r` requirement and must
    /// only be used with the periodic diagnostic operator.
    pub fn diagnostic_l2() -> Self {
        ExponentTriple { p: 2.0, q: 1.0, r: 2.0 }
    }

    fn check(&self) -> Result<()> {
        let residual = self.young_residual();
        if residual.abs() > YOUNG_TOLERANCE {
            return Err(Error::domain(format!(
                "Young condition violated by {residual:e} for (p, q, r) = ({}, {}, {})",
                self.p, self.q, self.r
            )));
        }
        if self.q <= 1.0 {
            return Err(Error::domain(format!("derived q = {} is not > 1", self.q)));
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Hölder conjugate of `p`.
    pub fn p_dual(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// Hölder conjugate of `r`.
    pub fn r_dual(&self) -> f64 {
        self.r / (self.r - 1.0)
    }

    /// `1/p + 1/q - 1 - 1/r`.
    pub fn young_residual(&self) -> f64 {
        1.0 / self.p + 1.0 / self.q - 1.0 - 1.0 / self.r
    }

    pub fn is_diagnostic(&self) -> bool {
        self.p == self.r
    }
}
