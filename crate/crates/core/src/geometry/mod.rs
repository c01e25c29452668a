//! The Dwork quintic family and its pointwise geometry.
//!
//! A point lives in projective space P^4 on the hypersurface
//! Q_psi(z) = sum_i z_i^5 - 5 psi z_0 z_1 z_2 z_3 z_4 = 0, with homogeneous
//! coordinates normalized to sum |z_i|^2 = 1. Charts fix one coordinate to 1
//! (the affine index `a`) and eliminate a second (the dependent index `b`)
//! through the defining equation; the remaining three coordinates are the
//! local holomorphic coordinates in which metric determinants and volume-form
//! densities are expressed.

mod charts;
mod dwork;
mod features;
mod sample;

pub use charts::{
    fs_pullback_det, fs_pullback_det_in_chart, omega_density, omega_density_in_chart,
    CHART_GRAD_MIN,
};
pub(crate) use charts::{
    build_chart, default_chart_indices, fs_metric_chart, pullback_det, pullback_matrix, Chart,
};
pub use dwork::{quintic_eval, quintic_grad, quintic_monomials, ModulusPsi, QUINTIC_TOL};
pub use features::{features, newton_elementary, FeatureVector};
pub use sample::{read_points, sample_quintic, write_points, QuinticPoint};
