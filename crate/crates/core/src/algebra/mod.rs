//! Exact arithmetic: Gaussian rationals, polynomials and ħ-series.

mod monomial;
mod poly;
mod scalar;
mod series;

pub use monomial::{multinomial_splits, Monomial, MAX_DIM};
pub use poly::Poly;
pub use scalar::Scalar;
pub(crate) use scalar::format_rational;
pub use series::{same_order, HbarSeries, MulPayload, Payload};
