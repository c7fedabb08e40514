use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two values that must live in the same group do not.
    #[error("mismatched group parameters: (n={expected_n}, r={expected_r}) vs (n={got_n}, r={got_r})")]
    ParamMismatch {
        expected_n: usize,
        expected_r: u32,
        got_n: usize,
        got_r: u32,
    },

    /// An element or color index fell outside its range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Malformed text or JSON input.
    #[error("parse error: {0}")]
    Parse(String),

    /// A constructor contract was violated (duplicate image, bad color, ...).
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// An enumeration would visit more elements than allowed.
    #[error("budget exceeded: {work} element visits exceed budget {budget}")]
    BudgetExceeded { work: u128, budget: u128 },

    /// A class violates a no-short-cycle precondition.
    #[error("class {label} has a cycle of length <= {bound}")]
    ShortCycles { label: String, bound: usize },

    /// Statistic degree too large for the requested moment formula.
    #[error("degree bound {bound} * moment order {k} must be < n = {n}")]
    DegreeTooLarge { bound: usize, k: usize, n: usize },

    /// Term growth guardrail hit while expanding a product of statistics.
    #[error("term budget exceeded: {terms} terms (limit {limit})")]
    TermBudget { terms: usize, limit: usize },

    /// Operation on the zero polynomial that requires a nonzero one.
    #[error("zero polynomial")]
    ZeroPolynomial,

    /// A distribution with zero variance cannot be standardized.
    #[error("degenerate distribution (zero variance)")]
    DegenerateDistribution,

    /// An exact divisibility assertion failed; this signals a bug, not bad data.
    #[error("exact division by {factor} left a nonzero remainder")]
    DivisibilityFailure { factor: String },

    /// Name not among the built-in statistics.
    #[error("unknown statistic: {0}")]
    UnknownStatistic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
