//! Lorentz-space norms, kernel decompositions and maximizer search for
//! convolution operators `f ↦ k * f` from `L_p` to `L_r` on grids in one and
//! two dimensions.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convolution;
pub mod decompose;
pub mod diagnostics;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod kernel;
pub mod operator;
pub mod rearrange;

pub use convolution::{convolve, Boundary, ConvolutionOperator};
pub use decompose::{
    choose_thresholds, decompose, level_cut_above, level_cut_below, verify_core, Certificate, Decomposition,
    HlsConstant, Provenance, Thresholds,
};
pub use diagnostics::{
    check_diameter_bound, cube_tightness, delta_diameter, lemma_constants, tightness_report, CubeTightness,
    DeltaDiameter, DiameterQuery, LemmaConstants, TightnessReport,
};
pub use error::{Error, Result};
pub use exponents::ExponentTriple;
pub use grid::{lp_norm, Grid, SampledFunction};
pub use kernel::{materialize, KernelSpec, Sampling};
pub use operator::{
    certify_eps1, power_iterate, start_function, weak_bound, young_bound, MaximizerResult, OperatorNormEstimate,
    PowerIterationOptions, StartProfile,
};
pub use rearrange::{
    decreasing_rearrangement, distribution_function, inclusion_check, inclusion_constant, inclusion_margin,
    lorentz_norm, symmetric_decreasing, tail_diagnostics, weak_norm, TailDiagnostics, TailThresholds, Verdict,
};
