//! Wave propagation through purely time-modulated step media.
//!
//! The scalar field obeys `E'' + (κ² + ω_p²(t)) E = 0`, where `ω_p²` equals
//! `C·δ^{-h}` on `N` short steps of width `δ` and vanishes elsewhere. The
//! crate provides
//!
//! * [`oracle`]: exact transfer-matrix solution, the ground truth;
//! * [`foldy_lax`]: the `N×N` Foldy–Lax system and a Nyström refinement;
//! * [`effective`]: the closed-form field of the equivalent slab and the
//!   wall/well regime classifier;
//! * [`experiments`]: table reproduction, trace comparisons, convergence
//!   sweeps and CSV/SVG output.

// `!(x < y)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effective;
pub mod error;
pub mod experiments;
pub mod foldy_lax;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod trace;

pub use effective::{
    classify, coefficients, lambda_of, Behavior, Coefficients, EffectiveSolution, RegimeClass,
    RegimeKind,
};
pub use error::{Error, Result};
pub use foldy_lax::{FoldyLaxSolution, FoldyLaxSystem, NystromSolution, Prefactor};
pub use model::{
    build_profile, scalar_reduction, RegimeParams, SpacingRule, StepProfile, WaveVectorSetup,
};
pub use oracle::{solve_scattering, ExactSolution, Medium, ScatteringCoeffs};
pub use trace::{uniform_grid, FieldTrace, TraceLabel};
