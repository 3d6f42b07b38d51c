//! Velocity induced by a circular vortex arc: direct Biot–Savart quadrature, the exact
//! elliptic-integral form, and the asymptotic generalized local induction form.

// Negated comparisons are used on purpose so that NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod induction;
pub mod karp_sitnik;
pub mod oracle;
pub mod quad;
pub mod vector;

pub use error::{Error, Result};
