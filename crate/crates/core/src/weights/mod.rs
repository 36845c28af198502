//! Weights W_Γ: angle maps, Monte-Carlo integration, closed-form families and weight tables.

mod analytic;
mod angle;
mod montecarlo;
mod table;

pub use analytic::analytic_weight;
pub use angle::{euclidean_angle, euclidean_angle_gradient, phi, phi_gradient};
pub use montecarlo::{mc_weight, mc_weight_with_gauge, vanishing_check, Gauge, WeightEstimate};
pub use table::{estimate_table, WeightRow, WeightTable};
