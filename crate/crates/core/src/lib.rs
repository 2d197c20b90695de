//! Deterministic finite automata with output over base-k digit strings:
//! evaluation and a bit-exact text format, structure-preserving transforms
//! (idempotent base-power lifts, products, minimization, reading-direction
//! reversal, shifts), exact density decisions (almost-everywhere constancy,
//! equality, periodicity, ultimate periodicity), a witness-producing
//! cross-base periodicity pipeline, the least-nonzero-digit-of-n! stream
//! with its base-9 comparison sequence, and window-based subshift tools.
//!
//! All counting is arbitrary-precision and all densities are exact
//! rationals; nothing here samples or approximates unless an operation says
//! "empirical" in its name.

pub mod cobham;
pub mod dfao;
pub mod error;
pub mod factorial;
pub mod format;
pub mod report;
pub mod samples;
pub mod structure;
pub mod subshift;
pub mod transforms;

pub use dfao::{digits, Dfao, Diagnostic, Diagnostics, DigitWord, Symbol};
pub use error::{Error, Result};
pub use format::{parse_dfao, serialize_dfao};
