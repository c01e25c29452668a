//! Gradient-descent training of the balanced-metric teacher.
//!
//! H is parameterized as L†L + eps I with eps = 1e-10 tr(L†L)/N, so every
//! iterate is Hermitian positive definite by construction; Adam acts on the
//! real and imaginary parts of L. Fresh point batches are drawn per gradient
//! step from streams keyed by (seed, global batch index), and the
//! Ricci-flatness indicator is recorded on a fixed validation set before
//! training and after every iteration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::MonomialBasis;
use super::metric::{batch_loss_and_grad_h, ricci_sigma, Objective};
use super::TeacherModel;
use crate::error::{Error, Result};
use crate::geometry::{sample_quintic, ModulusPsi};
use crate::linalg::hermitian_part;
use crate::rng::derive_seed;

/// Hyperparameters of the teacher optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub iterations: usize,
    pub batches_per_iteration: usize,
    pub batch_size: usize,
    /// Initial Adam learning rate.
    pub lr0: f64,
    /// Multiplicative decay applied every `lr_decay_every` iterations.
    pub lr_decay: f64,
    pub lr_decay_every: usize,
    pub beta1: f64,
    pub beta2: f64,
    /// Size of the fixed validation set used for the sigma history.
    pub validation_points: usize,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            iterations: 15,
            batches_per_iteration: 50,
            batch_size: 1000,
            lr0: 0.01,
            lr_decay: 0.5,
            lr_decay_every: 5,
            beta1: 0.9,
            beta2: 0.999,
            validation_points: 2000,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.batches_per_iteration == 0 || self.batch_size == 0 {
            return Err(Error::Validation(
                "iteration, batch and batch-size counts must be at least 1".into(),
            ));
        }
        if !(self.lr0 > 0.0) {
            return Err(Error::Validation("lr0 must be positive".into()));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::Validation("lr_decay must lie in (0, 1]".into()));
        }
        if self.lr_decay_every == 0 {
            return Err(Error::Validation("lr_decay_every must be at least 1".into()));
        }
        if self.validation_points < 100 {
            return Err(Error::Validation(
                "validation set needs at least 100 points".into(),
            ));
        }
        Ok(())
    }
}

fn h_from_factor(l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = l.nrows();
    let mut h = l.adjoint() * l;
    let eps = 1e-10 * h.trace().re / n as f64;
    for i in 0..n {
        h[(i, i)] += Complex64::new(eps, 0.0);
    }
    hermitian_part(&h)
}

/// Train a degree-k teacher at modulus psi by minimizing the weighted
/// variance of log eta over fresh Monte Carlo batches.
pub fn train_balanced_metric(
    psi: ModulusPsi,
    k: usize,
    cfg: &TrainingConfig,
) -> Result<TeacherModel> {
    cfg.validate()?;
    let basis = MonomialBasis::new(k);
    let n = basis.len();
    let mut l = DMatrix::<Complex64>::identity(n, n);
    let mut m1 = vec![0.0f64; 2 * n * n];
    let mut m2 = vec![0.0f64; 2 * n * n];
    let mut step = 0u64;

    let val_points = sample_quintic(
        psi,
        cfg.validation_points,
        derive_seed(cfg.seed, "teacher-val", 0),
    )?;

    let mut history = Vec::with_capacity(cfg.iterations + 1);
    let initial = TeacherModel {
        basis: basis.clone(),
        h: h_from_factor(&l),
        psi,
        sigma: None,
        sigma_history: Vec::new(),
    };
    history.push(ricci_sigma(&initial, &val_points)?);

    let eps_adam = 1e-8;
    for iter in 0..cfg.iterations {
        let lr = cfg.lr0 * cfg.lr_decay.powi((iter / cfg.lr_decay_every) as i32);
        for batch in 0..cfg.batches_per_iteration {
            let global = (iter * cfg.batches_per_iteration + batch) as u64;
            let points = sample_quintic(
                psi,
                cfg.batch_size,
                derive_seed(cfg.seed, "teacher-batch", global),
            )?;
            let h = h_from_factor(&l);
            let out = batch_loss_and_grad_h(&basis, &h, psi, &points, Objective::LogEta)
                .map_err(|e| match e {
                    Error::Numerical(msg) => Error::Numerical(format!(
                        "training diverged at iteration {iter}, batch {batch}: {msg}"
                    )),
                    other => other,
                })?;
            // gradient with respect to L: d loss = 2 Re tr(conj(Z) dL) with
            // Z = L conj(grad_H); real/imag parts of Z are the partials.
            let z = &l * out.grad_h.conjugate();
            step += 1;
            let bc1 = 1.0 - cfg.beta1.powi(step as i32);
            let bc2 = 1.0 - cfg.beta2.powi(step as i32);
            let mut diverged = false;
            for idx in 0..(n * n) {
                let (r, c) = (idx % n, idx / n);
                let g = z[(r, c)];
                for (part, gval) in [(0usize, 2.0 * g.re), (1usize, 2.0 * g.im)] {
                    let slot = 2 * idx + part;
                    if !gval.is_finite() {
                        diverged = true;
                        break;
                    }
                    m1[slot] = cfg.beta1 * m1[slot] + (1.0 - cfg.beta1) * gval;
                    m2[slot] = cfg.beta2 * m2[slot] + (1.0 - cfg.beta2) * gval * gval;
                    let mh = m1[slot] / bc1;
                    let vh = m2[slot] / bc2;
                    let delta = lr * mh / (vh.sqrt() + eps_adam);
                    let entry = &mut l[(r, c)];
                    *entry -= if part == 0 {
                        Complex64::new(delta, 0.0)
                    } else {
                        Complex64::new(0.0, delta)
                    };
                }
            }
            if diverged {
                return Err(Error::Numerical(format!(
                    "non-finite gradient at iteration {iter}, batch {batch}"
                )));
            }
        }
        let model = TeacherModel {
            basis: basis.clone(),
            h: h_from_factor(&l),
            psi,
            sigma: None,
            sigma_history: Vec::new(),
        };
        let sigma = ricci_sigma(&model, &val_points)?;
        if !sigma.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite sigma after iteration {iter}"
            )));
        }
        history.push(sigma);
    }

    let h = h_from_factor(&l);
    if !crate::linalg::is_positive_definite(&h) {
        return Err(Error::Numerical(
            "trained H lost positive definiteness".into(),
        ));
    }
    let sigma = *history.last().unwrap();
    Ok(TeacherModel {
        basis,
        h,
        psi,
        sigma: Some(sigma),
        sigma_history: history,
    })
}
