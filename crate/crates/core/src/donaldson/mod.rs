//! The algebraic "teacher" metric: degree-k monomial sections with a
//! Hermitian H-matrix, trained by minimizing the Monge-Ampère variance
//! objective with Adam, and scored by the Ricci-flatness indicator
//! sigma(eta).

mod basis;
mod io;
mod metric;
mod train;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use basis::{basis_size, MonomialBasis};
pub use io::{load_teacher, save_teacher};
pub use metric::{
    algebraic_metric_det, det_ratio, log_det_ratio, ma_loss, ma_loss_with_grad, ricci_sigma,
};
pub(crate) use metric::{batch_loss_and_grad_h, Objective};
pub use train::{train_balanced_metric, TrainingConfig};

use crate::error::{Error, Result};
use crate::geometry::ModulusPsi;
use crate::linalg::{is_positive_definite, max_hermitian_defect};

/// A balanced-metric teacher: basis, Hermitian positive-definite H, modulus,
/// and the Ricci-flatness score (with its per-iteration history when the
/// model came out of training).
#[derive(Debug, Clone)]
pub struct TeacherModel {
    pub basis: MonomialBasis,
    pub h: DMatrix<Complex64>,
    pub psi: ModulusPsi,
    /// sigma(eta) on the training validation set; None for reference models
    /// that were never scored.
    pub sigma: Option<f64>,
    pub sigma_history: Vec<f64>,
}

impl TeacherModel {
    /// Build a model from an explicit H, validating Hermiticity and positive
    /// definiteness.
    pub fn from_h(basis: MonomialBasis, h: DMatrix<Complex64>, psi: ModulusPsi) -> Result<Self> {
        if h.nrows() != basis.len() || h.ncols() != basis.len() {
            return Err(Error::Validation(format!(
                "H must be {n} x {n} for the degree-{k} basis",
                n = basis.len(),
                k = basis.k
            )));
        }
        if max_hermitian_defect(&h) > 1e-12 * h.norm().max(1.0) {
            return Err(Error::Validation("H must be Hermitian".into()));
        }
        if !is_positive_definite(&h) {
            return Err(Error::Validation("H must be positive definite".into()));
        }
        Ok(TeacherModel {
            basis,
            h,
            psi,
            sigma: None,
            sigma_history: Vec::new(),
        })
    }

    /// The identity H-matrix on the normalized sections. Because the sections
    /// carry sqrt-multinomial weights, this reproduces the Fubini-Study
    /// potential exactly — but only while the monomial basis is complete,
    /// i.e. k <= 4 (from k = 5 the quintic relations remove monomials and the
    /// multinomial identity no longer closes).
    pub fn fubini_study(k: usize, psi: ModulusPsi) -> Result<Self> {
        if k > 4 {
            return Err(Error::Validation(format!(
                "identity sections reproduce Fubini-Study only for k <= 4, got k = {k}"
            )));
        }
        let basis = MonomialBasis::new(k);
        let n = basis.len();
        Ok(TeacherModel {
            basis,
            h: DMatrix::identity(n, n),
            psi,
            sigma: None,
            sigma_history: Vec::new(),
        })
    }
}
