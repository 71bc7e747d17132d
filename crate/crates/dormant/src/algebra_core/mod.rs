//! Exact arithmetic substrate: finite fields, polynomials, truncated series,
//! rational functions with poles at 0 and 1, dense matrices and base-p combinatorics.

pub mod combinat;
pub mod field;
pub mod localized;
pub mod matrix;
pub mod poly;
pub mod series;

pub use combinat::{binom_signed, lucas_binom, q_decomp, QDecomp};
pub use field::{Field, FieldElem, FieldError};
pub use localized::{LocalizedMatrix, LocalizedPoly};
pub use matrix::{simultaneous_eigendecomp, EigenError, Matrix};
pub use poly::Poly;
pub use series::TruncSeries;
