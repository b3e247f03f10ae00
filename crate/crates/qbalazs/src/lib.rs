//! High-precision evaluation of the q-Balazs-Szabados rational operators
//! `R_{n,q}` (real and complex form, q >= 1), their connection to the
//! complex q-Bernstein polynomials, and numerical verification machinery
//! for the operators' quantitative convergence statements: an explicit
//! upper bound, first-order (Voronovskaja-type) residual bounds, and
//! exact-order estimation. For q > 1 the error decays geometrically in n,
//! against the 1/n-type rates of the classical q = 1 operator.
//!
//! Structure:
//! - [`kernel`]: precision-configurable real/complex arithmetic, circle
//!   grids, sup norms, and the precision-doubling agreement check.
//! - [`qcore`]: q-integers, q-factorials, Gaussian binomials, the Jackson
//!   q-derivative, and the operator's node and scale sequences.
//! - [`funcspace`]: the catalog of admissible test functions with
//!   coefficient streams and closed-form evaluators on ray and disk.
//! - [`operators`]: the operator evaluators and the connection transform.
//! - [`theory`]: hypothesis-gated checkers for the quantitative bounds
//!   and the empirical rate estimator.
//! - [`cli`]: the experiment runner behind the `qbalazs` binary.
//!
//! Most entry points are demonstrated by the runnable examples in
//! `examples/`; the acceptance suite in `tests/acceptance.rs` pins the
//! verification matrix.

pub mod cli;
pub mod error;
pub mod funcspace;
pub mod kernel;
pub mod operators;
pub mod qcore;
pub mod theory;

pub use error::{Error, Result};
pub use funcspace::FunctionSpec;
pub use kernel::{Complex, NumericContext, Real};
pub use qcore::QParams;
