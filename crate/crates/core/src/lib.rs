//! # advdiv
//!
//! Adversarial divergences computed exactly on finite metric spaces.
//!
//! An adversarial divergence has the form
//!
//! ```text
//! τ(μ‖ν) = sup_{f ∈ F} E_{μ⊗ν}[f]
//! ```
//!
//! for some family `F` of bounded functions on `X × X`. Most GAN objectives
//! fit this shape; which family is used decides both what the minimizers of
//! `τ(μ*‖·)` look like and how strong convergence in `τ` is.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`measures`] | finite metric spaces, discrete measures, test sequences |
//! | [`generators`] | f-divergence generators with conjugates |
//! | [`solvers`] | concave ascent, dense LP, transport simplex, Sinkhorn |
//! | [`divergences`] | one engine per objective family, uniform [`evaluate`] |
//! | [`momentmatch`] | restricted discriminators and moment matching |
//! | [`convergence`] | traces, convergence verdicts, strength hierarchy |
//!
//! Everything is immutable after construction and safe to share across
//! threads.

// `!(x > 0.0)` is used on purpose so NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod divergences;
mod error;
pub mod generators;
pub mod measures;
pub mod momentmatch;
pub mod rng;
pub mod solvers;

pub use divergences::{evaluate, Certificate, DivergenceReport, DivergenceSpec, FeatureMap};
pub use error::{Error, Result};
pub use generators::{ExtendedReal, FGenerator, GeneratorKind};
pub use measures::{DiscreteMeasure, FiniteMetricSpace, MeasureSequence, Metric, SequenceKind};
pub use solvers::{SolveStatus, SolveStatusKind, SolverConfig};
