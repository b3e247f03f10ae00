//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("mantissa precision must be at least 53 bits, got {bits}")]
    PrecisionTooLow { bits: usize },

    #[error("guard values must be positive (zero_guard {zero_guard}, agreement_tol {agreement_tol})")]
    InvalidGuards { zero_guard: f64, agreement_tol: f64 },

    #[error("circle radius must be positive, got {r}")]
    NonPositiveRadius { r: f64 },

    #[error("circle grid needs at least one sample point")]
    EmptyGrid,

    #[error("sup norm of an empty value list is undefined")]
    EmptyValues,

    #[error("non-finite value encountered in {place}")]
    NonFinite { place: &'static str },

    #[error("q must be positive, got {q}")]
    NonPositiveQ { q: f64 },

    #[error("beta must lie in ({lo}, {hi}], got {beta}")]
    BetaOutOfRange { beta: f64, lo: f64, hi: f64 },

    #[error("n must be a positive integer")]
    ZeroN,

    #[error("q-binomial index out of range: k = {k}, n = {n}")]
    BinomialIndex { n: u32, k: i64 },

    #[error("the Jackson q-derivative requires q != 1; use the closed-form derivative instead")]
    QDerivativeAtOne,

    #[error("ray evaluation requires x >= 0, got {x}")]
    NegativeRayPoint { x: f64 },

    #[error("point with |z| = {modulus:.6} lies outside the analyticity disk of radius {radius}")]
    OutsideDisk { modulus: f64, radius: f64 },

    #[error("series argument x = {x} is at or beyond the coefficient envelope radius 1/B = {envelope_radius}; the weighted sum diverges")]
    DivergentSeries { x: f64, envelope_radius: f64 },

    #[error("denominator (1 + a_n z)^n is singular: |1 + a_n z| = {modulus:.3e} <= zero guard {guard:.3e}")]
    SingularDenominator { modulus: f64, guard: f64 },

    #[error("function '{name}' is unbounded on [0, +inf) and violates the theorem hypothesis")]
    UnboundedFunction { name: String },

    #[error("hypothesis violated: {detail}")]
    HypothesisViolation { detail: String },

    #[error("Voronovskaja case {case} requires {requirement}, got beta = {beta}")]
    CaseMismatch { case: &'static str, requirement: &'static str, beta: f64 },

    #[error("rate estimation needs at least 3 values of n, got {got}")]
    TooFewRatePoints { got: usize },

    #[error("function '{name}' is degenerate for this rate case: {detail}")]
    DegenerateFunction { name: String, detail: String },

    #[error("unknown function name '{name}' (expected exp_neg, sin, inv_shift:<c>, e_<m> or poly:<c0,c1,...>)")]
    UnknownFunction { name: String },

    #[error("invalid configuration: {detail}")]
    InvalidConfig { detail: String },

    #[error("invalid function specification: {detail}")]
    InvalidFunctionSpec { detail: String },

    #[error("precision check failed: {detail}")]
    PrecisionDisagreement { detail: String },

    #[error("could not parse decimal number '{text}'")]
    BadDecimal { text: String },
}

pub type Result<T> = std::result::Result<T, Error>;
