//! Analytic distillation of Calabi-Yau metric data on the Dwork quintic family.
//!
//! The crate is organized as a pipeline:
//!
//! 1. [`geometry`] — the Dwork quintic, point sampling, Fubini-Study pullbacks,
//!    holomorphic volume-form densities, and gauge-invariant features.
//! 2. [`donaldson`] — algebraic "teacher" metrics: degree-k monomial sections,
//!    Hermitian H-matrix, Monge-Ampère loss, Adam training, Ricci-flatness
//!    indicator σ(η).
//! 3. [`dataset`] — regression rows pairing features with the log-determinant
//!    target, train/test splitting.
//! 4. [`symreg`] — genetic-programming symbolic regression with Pareto
//!    selection and multi-seed ensembles.
//! 5. [`formula`] — the five-term scaffold: evaluation, weighted least-squares
//!    fits, ablations, polynomial baseline.
//! 6. [`moduli`] — cross-moduli scans, coefficient trajectories, bootstrap
//!    confidence intervals, modulation classification.
//! 7. [`physics`] — volume-integral benchmark and the Fermat-point Yukawa
//!    sanity check.
//! 8. [`stats`] — permutation tests, leave-one-seed-out cross-validation,
//!    residual diagnostics.
//!
//! All randomness flows from explicit seeds through [`rng::derive_rng`], so
//! every stage is reproducible in isolation and independent of thread count.

pub mod dataset;
pub mod donaldson;
pub mod error;
pub mod formula;
pub mod geometry;
pub mod linalg;
pub mod moduli;
pub mod physics;
pub mod rng;
pub mod stats;
pub mod symreg;
pub mod weighted;

pub use error::{Error, Result};
