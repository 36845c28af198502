//! Deformation quantization of polynomial Poisson structures on R^d.
//!
//! Exact algebra (polynomials over Gaussian rationals, polydifferential operators,
//! polyvector fields, the Weyl algebra) is combined with Kontsevich's graph expansion,
//! whose weights come from closed forms or Monte-Carlo integration over configuration spaces.

pub mod algebra;
pub mod error;
pub mod graphs;
pub mod hochschild;
pub mod oracle;
pub mod polyvector;
pub mod star;
pub mod suite;
pub mod weights;
pub mod weyl;

pub use error::{Error, Result};
