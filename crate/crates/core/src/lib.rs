//! Harmonic analysis for the hyper-Bessel operator
//! `B_r = z^{1-r} prod_i (z d/dz + r gamma_i + 1) d/dz` on truncated r-even
//! power series.
//!
//! Series are stored in the normalized basis `z^{rn} / alpha_{rn}(gamma)`,
//! in which `B_r` is a backward shift. Coefficients are either exact complex
//! rationals or `Complex64`; see [`scalar::Scalar`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier_pw;
pub mod identities;
pub mod index_core;
pub mod io;
pub mod linear_dynamics;
pub mod lstsq;
pub mod quadrature;
pub mod scalar;
pub mod series_engine;
pub mod special_functions;
pub mod translation_convolution;

pub use error::{HbError, Result};
pub use fourier_pw::{
    density_residual, exp_type_fit, fourier, inverse_fourier, pa_norm_estimate, pair,
    MomentFunctional,
};
pub use index_core::{AlphaTable, BrCoefficients, VectorIndex};
pub use linear_dynamics::{
    certify, gs_scan, periodic_point_find, transitivity_witness, verify_periodic,
    ChaosCertificate, CertifyConfig, CertifyOutcome, ConvolutionOperator, PolarGrid,
    WitnessConfig,
};
pub use scalar::{ExactComplex, Scalar};
pub use series_engine::{
    CertificateSource, ExactSeries, ExpTypeCertificate, FloatSeries, REvenSeries,
    DEFAULT_TRUNCATION,
};
pub use special_functions::{g_eval, g_eval_bounded, j_eval, j_series};
pub use translation_convolution::{
    addition_power, addition_power_hypergeometric, convolve, moment_convolution,
    translate_addition, translate_delsarte,
};

/// Version string echoed into every CLI report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
