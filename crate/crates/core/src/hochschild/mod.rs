//! The shifted Hochschild complex of polydifferential operators as a DGLA.

mod complex;
mod koszul;
mod maurer_cartan;
mod multidiff;

pub use complex::{gerstenhaber_bracket, gerstenhaber_product, hochschild_delta, modified_d};
pub use koszul::{decalage_sign, koszul_sign_ext, koszul_sign_sym, permutation_sign, permutations, shuffles};
pub use maurer_cartan::{
    associator, bch, gauge_act, mc_residual, series_bracket, series_insert, with_mu, GaugeElement, OpSeries,
};
pub use multidiff::MultiDiffOp;

/// The multiplication μ(f, g) = fg on R^d.
pub fn mu(dim: usize) -> MultiDiffOp {
    MultiDiffOp::mu(dim)
}
