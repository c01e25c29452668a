//! The five-term scaffold
//!
//!   y = c0 + c1/p2^2 + c2 sigma3/p2^3 + c3 p2 + c4 sigma3
//!
//! and its fits: the scaffold is linear in the coefficients, so fitting is
//! weighted linear least squares (QR route, cross-checked against the normal
//! equations), alongside the p2-only ablation and the bivariate polynomial
//! baseline.

use crate::dataset::{Dataset, RegressionRow};
use crate::error::{Error, Result};
use crate::linalg::{wls_normal, wls_qr};
use crate::weighted;

pub const FIVE_TERM_COLUMNS: [&str; 5] = ["1", "1/p2^2", "sigma3/p2^3", "p2", "sigma3"];

/// Fitted five-term coefficients with fit statistics and optional per-
/// coefficient 95% confidence intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct FiveTermCoefficients {
    pub c: [f64; 5],
    pub psi: f64,
    pub r_squared: Option<f64>,
    pub rmse: f64,
    pub ci: Option<[(f64, f64); 5]>,
}

impl FiveTermCoefficients {
    pub fn from_values(c: [f64; 5], psi: f64) -> Self {
        FiveTermCoefficients {
            c,
            psi,
            r_squared: None,
            rmse: 0.0,
            ci: None,
        }
    }

    pub fn eval(&self, p2: f64, sigma3: f64) -> f64 {
        eval_five_term(self, p2, sigma3)
    }
}

/// Summary of one fitted model for the accuracy-versus-complexity comparison.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub model: String,
    pub parameters: usize,
    pub r_squared: Option<f64>,
    pub rmse: f64,
    pub residual_mean: f64,
    pub residual_std: f64,
    pub coefficients: Vec<f64>,
}

pub fn eval_five_term(c: &FiveTermCoefficients, p2: f64, sigma3: f64) -> f64 {
    let p2_2 = p2 * p2;
    let p2_3 = p2_2 * p2;
    c.c[0] + c.c[1] / p2_2 + c.c[2] * sigma3 / p2_3 + c.c[3] * p2 + c.c[4] * sigma3
}

fn five_term_design(r: &RegressionRow) -> Vec<f64> {
    let p2_2 = r.p2 * r.p2;
    let p2_3 = p2_2 * r.p2;
    vec![1.0, 1.0 / p2_2, r.sigma3 / p2_3, r.p2, r.sigma3]
}

fn design_matrix(ds: &Dataset, builder: impl Fn(&RegressionRow) -> Vec<f64>) -> Vec<Vec<f64>> {
    ds.rows.iter().map(builder).collect()
}

/// Weighted R^2 = 1 - SS_res/SS_tot; `None` when the truth has no variance.
pub fn r_squared(pred: &[f64], truth: &[f64], weights: &[f64]) -> Option<f64> {
    assert!(pred.len() == truth.len() && truth.len() == weights.len());
    assert!(truth.len() >= 2, "r_squared needs at least 2 observations");
    let mean = weighted::mean(truth, weights);
    let ss_tot: f64 = truth
        .iter()
        .zip(weights)
        .map(|(t, w)| w * (t - mean) * (t - mean))
        .sum();
    if ss_tot == 0.0 {
        return None;
    }
    let ss_res: f64 = pred
        .iter()
        .zip(truth)
        .zip(weights)
        .map(|((p, t), w)| w * (p - t) * (p - t))
        .sum();
    Some(1.0 - ss_res / ss_tot)
}

fn fit_stats(
    design: &[Vec<f64>],
    coefs: &[f64],
    y: &[f64],
    w: &[f64],
) -> (Option<f64>, f64, f64, f64) {
    let pred: Vec<f64> = design
        .iter()
        .map(|row| row.iter().zip(coefs).map(|(x, c)| x * c).sum())
        .collect();
    let r2 = r_squared(&pred, y, w);
    let rmse = weighted::rmse(&pred, y, w);
    let resid: Vec<f64> = pred.iter().zip(y).map(|(p, t)| t - p).collect();
    let mean = weighted::mean(&resid, w);
    let std = weighted::std_dev(&resid, w);
    (r2, rmse, mean, std)
}

/// Weighted least-squares fit of the five-term scaffold via QR.
pub fn fit_five_term(ds: &Dataset) -> Result<FiveTermCoefficients> {
    if ds.len() < 10 {
        return Err(Error::Validation(format!(
            "five-term fit needs at least 10 rows, got {}",
            ds.len()
        )));
    }
    let design = design_matrix(ds, five_term_design);
    let y = ds.targets();
    let w = ds.weights();
    let coefs = wls_qr(&design, &y, &w).map_err(|e| name_columns(e, &FIVE_TERM_COLUMNS))?;
    let (r2, rmse, _, _) = fit_stats(&design, &coefs, &y, &w);
    Ok(FiveTermCoefficients {
        c: [coefs[0], coefs[1], coefs[2], coefs[3], coefs[4]],
        psi: ds.psi,
        r_squared: r2,
        rmse,
        ci: None,
    })
}

/// Map collinear column indices in solver errors to column names.
fn name_columns(e: Error, names: &[&str]) -> Error {
    match e {
        Error::Numerical(msg) if msg.contains("collinear") => {
            let named: Vec<&str> = names
                .iter()
                .enumerate()
                .filter(|(i, _)| msg.contains(&format!("{i}")))
                .map(|(_, n)| *n)
                .collect();
            Error::Numerical(format!("{msg}; columns {named:?}"))
        }
        other => other,
    }
}

/// Ablation fit on the p2-only basis {1, 1/p2^2, p2}.
pub fn fit_p2_only(ds: &Dataset) -> Result<FitReport> {
    let names = ["1", "1/p2^2", "p2"];
    let design = design_matrix(ds, |r| {
        let p2_2 = r.p2 * r.p2;
        vec![1.0, 1.0 / p2_2, r.p2]
    });
    let y = ds.targets();
    let w = ds.weights();
    let coefs = wls_qr(&design, &y, &w).map_err(|e| name_columns(e, &names))?;
    let (r2, rmse, rm, rs) = fit_stats(&design, &coefs, &y, &w);
    Ok(FitReport {
        model: "p2-only {1, 1/p2^2, p2}".into(),
        parameters: coefs.len(),
        r_squared: r2,
        rmse,
        residual_mean: rm,
        residual_std: rs,
        coefficients: coefs,
    })
}

/// Bivariate polynomial baseline: all monomials p2^a sigma3^b with
/// a + b <= degree (degree 3 gives the 10-parameter reference model).
pub fn fit_polynomial_baseline(ds: &Dataset, degree: usize) -> Result<FitReport> {
    if degree < 1 {
        return Err(Error::Validation("polynomial degree must be >= 1".into()));
    }
    let mut powers = Vec::new();
    for a in 0..=degree {
        for b in 0..=(degree - a) {
            powers.push((a, b));
        }
    }
    let names: Vec<String> = powers
        .iter()
        .map(|&(a, b)| format!("p2^{a} sigma3^{b}"))
        .collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let design = design_matrix(ds, |r| {
        powers
            .iter()
            .map(|&(a, b)| r.p2.powi(a as i32) * r.sigma3.powi(b as i32))
            .collect()
    });
    let y = ds.targets();
    let w = ds.weights();
    let coefs = wls_qr(&design, &y, &w).map_err(|e| name_columns(e, &name_refs))?;
    let (r2, rmse, rm, rs) = fit_stats(&design, &coefs, &y, &w);
    Ok(FitReport {
        model: format!("polynomial degree {degree} in (p2, sigma3)"),
        parameters: coefs.len(),
        r_squared: r2,
        rmse,
        residual_mean: rm,
        residual_std: rs,
        coefficients: coefs,
    })
}

/// Cross-check solver used by the invariants: fit via the normal equations.
pub fn fit_five_term_normal_equations(ds: &Dataset) -> Result<[f64; 5]> {
    let design = design_matrix(ds, five_term_design);
    let coefs = wls_normal(&design, &ds.targets(), &ds.weights())?;
    Ok([coefs[0], coefs[1], coefs[2], coefs[3], coefs[4]])
}

/// Predictions of a coefficient set over a dataset.
pub fn predict_five_term(c: &FiveTermCoefficients, ds: &Dataset) -> Vec<f64> {
    ds.rows
        .iter()
        .map(|r| eval_five_term(c, r.p2, r.sigma3))
        .collect()
}
