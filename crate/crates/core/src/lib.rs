//! Braided multiplicative unitaries on finite-dimensional Hilbert spaces.
//!
//! Operators carry ordered lists of legs. Multi-indices put the first leg in
//! the most significant position, so `tensor` agrees with the usual Kronecker
//! product and matrices serialize row-major without ambiguity.

pub mod braidings;
pub mod error;
pub mod examples_io;
pub mod legdsl;
pub mod linalg;
pub mod mult_unitary;
pub mod semidirect;
pub mod solver;
pub mod spans;
pub mod tensor_core;
pub mod yd;

pub use braidings::{Braiding, BraidingKind};
pub use error::{Error, Result};
pub use mult_unitary::MultUnitary;
pub use spans::OperatorSpan;
pub use tensor_core::{LegOperator, Route, Space};

/// Default tolerance shared by the certificate checks.
pub const DEFAULT_TOL: f64 = 1e-9;
