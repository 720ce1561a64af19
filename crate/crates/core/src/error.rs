//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A vector that must be a probability distribution is not one.
    #[error("level {level}: weights sum to {sum}, expected 1 within {tol}")]
    NotAProbability { level: usize, sum: f64, tol: f64 },

    /// A weight function has a non-positive or degenerately small entry.
    #[error("level {level}, entry {index}: weight {value} must be positive (rejected below {floor})")]
    NonPositiveWeight {
        level: usize,
        index: usize,
        value: f64,
        floor: f64,
    },

    /// A kernel row is not a probability distribution.
    #[error("kernel {kernel}, row {row}: entries sum to {sum} (negative entry: {negative})")]
    NotStochastic {
        kernel: usize,
        row: usize,
        sum: f64,
        negative: bool,
    },

    /// Normalizer `mu(g)` is not strictly positive.
    #[error("level {level}: normalizer mu(g) = {value} is not positive")]
    Normalization { level: usize, value: f64 },

    /// Propagator or projection called with levels out of order.
    #[error("level order violated: j = {j} must not exceed k = {k}")]
    LevelOrder { j: usize, k: usize },

    /// A function or measure lives on a different level than required.
    #[error("level mismatch: expected {expected}, got {got}")]
    LevelMismatch { expected: usize, got: usize },

    /// Inconsistent dimensions between bound-assembly inputs.
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// Negative value passed where a nonnegative one is required.
    #[error("negative input for {what}: {value}")]
    NegativeInput { what: &'static str, value: f64 },

    /// Non-finite entry (NaN or infinity) where a finite one is required.
    #[error("non-finite entry at level {level}, index {index}")]
    NonFinite { level: usize, index: usize },

    /// Exact enumeration would exceed the work budget.
    #[error("enumeration infeasible: estimated work {estimated:.3e} exceeds budget {budget:.3e}")]
    Feasibility { estimated: f64, budget: f64 },

    /// Parameter outside the domain of a closed form.
    #[error("domain error: {0}")]
    Domain(String),

    /// Proposal fails to dominate the target.
    #[error("absolute continuity violated at point {point}: target mass {target_mass} but proposal mass 0")]
    AbsoluteContinuity { point: usize, target_mass: f64 },

    /// A partition block carries no mass.
    #[error("zero mass: level {level}, block {block}")]
    ZeroMass { level: usize, block: usize },

    /// No finite mixing constant exists (degenerate input).
    #[error("no finite local-mixing constant for level {level}, block {block}")]
    NotMixing { level: usize, block: usize },

    /// The stability chain's applicability condition fails.
    #[error("stability chain inapplicable: alpha * gamma^{exponent} = {product} >= 1 (alpha = {alpha}, gamma = {gamma})")]
    Inapplicable {
        alpha: f64,
        gamma: f64,
        exponent: u32,
        product: f64,
    },

    /// Hyperboundedness certification only runs on small blocks.
    #[error("block of {size} states exceeds the {limit}-state limit for operator-norm certification")]
    BlockTooLarge { size: usize, limit: usize },

    /// Structural defect in a tree description.
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    /// Structural defect in a partition hierarchy or local model.
    #[error("invalid local model: {0}")]
    InvalidLocal(String),

    /// Malformed input file.
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
}
