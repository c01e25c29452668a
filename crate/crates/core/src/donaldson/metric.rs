//! Pointwise evaluation of the algebraic metric and its H-derivative.
//!
//! The Kähler potential is K = (1/k) log(s† H s) with s the normalized
//! monomial section vector in the point's affine chart. Writing B for the
//! N x 5 matrix whose columns are (s, ds/dw_1, ..., ds/dw_4) and
//! M = B† H B, the chart metric is
//!
//!   G[i][j] = (1/k) ( M[1+j][1+i]/S - M[0][1+i] M[1+j][0]/S^2 ),  S = M[0][0],
//!
//! which the hypersurface Jacobian pulls back to a 3x3 Hermitian matrix P.
//! The H-gradient of log det P follows the same chain in reverse:
//! d log det P = tr(P^-1 dP) collapses to a 5x5 coefficient matrix against
//! dM, and dM = B† dH B turns that into D = conj(B) C5 B^T, the Hermitian
//! gradient with respect to the entries of H.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::MonomialBasis;
use super::TeacherModel;
use crate::error::{Error, Result};
use crate::geometry::{
    build_chart, fs_metric_chart, pullback_det, pullback_matrix, Chart, ModulusPsi, QuinticPoint,
};
use crate::linalg::{det3, hermitian_part, inv3};
use crate::weighted;

type C64 = Complex64;

/// Section matrix B: column 0 is s(w), columns 1..=4 the derivatives with
/// respect to the chart coordinates, rows indexed by basis monomials.
pub(crate) fn section_matrix(basis: &MonomialBasis, chart: &Chart) -> DMatrix<C64> {
    let n = basis.len();
    let k = basis.k;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    // power table pw[i][e] = w_i^e
    let mut pw = vec![[one; 11]; 5];
    for i in 0..5 {
        for e in 1..=k {
            pw[i][e] = pw[i][e - 1] * chart.w[i];
        }
    }
    let mut b = DMatrix::zeros(n, 5);
    for (row, (alpha, norm)) in basis.exponents.iter().zip(&basis.norms).enumerate() {
        // prefix/suffix products of pw[i][alpha_i] avoid dividing by
        // coordinates that may vanish
        let mut pre = [one; 6];
        for i in 0..5 {
            pre[i + 1] = pre[i] * pw[i][alpha[i] as usize];
        }
        let mut suf = [one; 6];
        for i in (0..5).rev() {
            suf[i] = suf[i + 1] * pw[i][alpha[i] as usize];
        }
        let c = C64::new(*norm, 0.0);
        b[(row, 0)] = c * pre[5];
        for (col, &d) in chart.coords.iter().enumerate() {
            let e = alpha[d] as usize;
            b[(row, col + 1)] = if e == 0 {
                zero
            } else {
                c * (e as f64) * pre[d] * suf[d + 1] * pw[d][e - 1]
            };
        }
    }
    b
}

pub(crate) struct MetricEval {
    pub m: [[C64; 5]; 5],
    pub s: f64,
    pub p: [[C64; 3]; 3],
    pub det: f64,
}

pub(crate) fn eval_metric(
    k: usize,
    h: &DMatrix<C64>,
    chart: &Chart,
    b_mat: &DMatrix<C64>,
) -> Result<MetricEval> {
    let hb = h * b_mat;
    let m_dm = b_mat.adjoint() * hb;
    let mut m = [[C64::new(0.0, 0.0); 5]; 5];
    for r in 0..5 {
        for c in 0..5 {
            m[r][c] = m_dm[(r, c)];
        }
    }
    let s = m[0][0].re;
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Numerical(format!(
            "section norm s†Hs = {s:e} not positive; H invalid or point degenerate"
        )));
    }
    let inv_k = 1.0 / k as f64;
    let mut g = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = (m[1 + j][1 + i] / s - m[0][1 + i] * m[1 + j][0] / (s * s)) * inv_k;
        }
    }
    let p = pullback_matrix(chart, &g);
    let d = det3(&p);
    if !d.re.is_finite() || d.re <= 0.0 || d.im.abs() > 1e-8 * d.re.abs().max(1e-300) {
        return Err(Error::Numerical(format!(
            "algebraic metric determinant not positive real: {d}; H invalid"
        )));
    }
    Ok(MetricEval { m, s, p, det: d.re })
}

/// det of the 3x3 pullback of the metric from K = (1/k) log(s† H s) in the
/// point's stored chart.
pub fn algebraic_metric_det(point: &QuinticPoint, model: &TeacherModel) -> Result<f64> {
    let chart = build_chart(
        &point.z,
        model.psi,
        point.chart_affine,
        point.chart_dependent,
    )?;
    let b_mat = section_matrix(&model.basis, &chart);
    Ok(eval_metric(model.basis.k, &model.h, &chart, &b_mat)?.det)
}

/// Ratio det(g_alg)/det(g_FS) at one point; both determinants are taken in
/// the same chart so all coordinate factors cancel.
pub fn det_ratio(point: &QuinticPoint, model: &TeacherModel) -> Result<f64> {
    let chart = build_chart(
        &point.z,
        model.psi,
        point.chart_affine,
        point.chart_dependent,
    )?;
    let b_mat = section_matrix(&model.basis, &chart);
    let det_alg = eval_metric(model.basis.k, &model.h, &chart, &b_mat)?.det;
    let det_fs = pullback_det(&chart, &fs_metric_chart(&chart))?;
    Ok(det_alg / det_fs)
}

/// The regression target y = log(det g_alg / det g_FS).
pub fn log_det_ratio(point: &QuinticPoint, model: &TeacherModel) -> Result<f64> {
    Ok(det_ratio(point, model)?.ln())
}

/// Monge-Ampère loss over a batch: weighted variance of the log-ratio
/// y = log(det g_alg / det g_FS). Zero iff the log-ratio is constant.
pub fn ma_loss(points: &[QuinticPoint], model: &TeacherModel) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Validation("ma_loss needs a nonempty batch".into()));
    }
    let mut vals = Vec::with_capacity(points.len());
    let mut ws = Vec::with_capacity(points.len());
    for p in points {
        vals.push(log_det_ratio(p, model)?);
        ws.push(p.weight);
    }
    Ok(weighted::variance(&vals, &ws))
}

/// Per-point centering for the two variance objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Objective {
    /// v = log(det g_alg / det g_FS): the ma_loss target.
    LogRatioFs,
    /// v = log(det g_alg / |Omega|^2): the Monge-Ampère measure-matching
    /// objective minimized during training (zero variance iff eta constant).
    LogEta,
}

pub(crate) struct BatchGrad {
    pub loss: f64,
    pub grad_h: DMatrix<C64>,
    pub values: Vec<f64>,
}

struct PointGrad {
    v: f64,
    w: f64,
    b_mat: DMatrix<C64>,
    c5: DMatrix<C64>,
}

fn point_grad(
    basis: &MonomialBasis,
    h: &DMatrix<C64>,
    psi: ModulusPsi,
    point: &QuinticPoint,
    objective: Objective,
) -> Result<PointGrad> {
    let chart = build_chart(&point.z, psi, point.chart_affine, point.chart_dependent)?;
    let b_mat = section_matrix(basis, &chart);
    let me = eval_metric(basis.k, h, &chart, &b_mat)?;
    let offset = match objective {
        Objective::LogRatioFs => pullback_det(&chart, &fs_metric_chart(&chart))?.ln(),
        Objective::LogEta => (1.0 / chart.dq_w[chart.b].norm_sqr()).ln(),
    };
    let v = me.det.ln() - offset;

    let pinv = inv3(&me.p)
        .ok_or_else(|| Error::Numerical("singular pullback metric in gradient".into()))?;
    // K[i][j] with dy = sum_ij K[i][j] dG[i][j]
    let mut kk = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..3 {
                for c in 0..3 {
                    acc += pinv[r][c] * chart.jac[i][c] * chart.jac[j][r].conj();
                }
            }
            kk[i][j] = acc;
        }
    }
    // collapse to the 5x5 coefficient matrix against dM
    let s = me.s;
    let s2 = s * s;
    let s3 = s2 * s;
    let inv_k = 1.0 / basis.k as f64;
    let mut c5 = DMatrix::zeros(5, 5);
    for i in 0..4 {
        for j in 0..4 {
            let kap = kk[i][j] * inv_k;
            let m0i = me.m[0][1 + i];
            let mj0 = me.m[1 + j][0];
            c5[(1 + j, 1 + i)] += kap / s;
            c5[(0, 0)] += kap * (-me.m[1 + j][1 + i] / s2 + 2.0 * m0i * mj0 / s3);
            c5[(0, 1 + i)] += -kap * mj0 / s2;
            c5[(1 + j, 0)] += -kap * m0i / s2;
        }
    }
    Ok(PointGrad {
        v,
        w: point.weight,
        b_mat,
        c5,
    })
}

/// Weighted-variance objective and its Hermitian gradient with respect to H.
/// Deterministic for fixed input order: per-point work runs in parallel but
/// the reduction walks fixed-size chunks in order.
pub(crate) fn batch_loss_and_grad_h(
    basis: &MonomialBasis,
    h: &DMatrix<C64>,
    psi: ModulusPsi,
    points: &[QuinticPoint],
    objective: Objective,
) -> Result<BatchGrad> {
    if points.is_empty() {
        return Err(Error::Validation("empty batch".into()));
    }
    let evals: Vec<PointGrad> = points
        .par_iter()
        .map(|p| point_grad(basis, h, psi, p, objective))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = evals.iter().map(|e| e.v).collect();
    let ws: Vec<f64> = evals.iter().map(|e| e.w).collect();
    let wsum: f64 = ws.iter().sum();
    let mean = weighted::mean(&values, &ws);
    let loss = weighted::variance(&values, &ws);
    if !loss.is_finite() {
        return Err(Error::Numerical("non-finite Monge-Ampère loss".into()));
    }
    const CHUNK: usize = 64;
    let n = basis.len();
    let partials: Vec<DMatrix<C64>> = evals
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = DMatrix::zeros(n, n);
            for e in chunk {
                let coef = 2.0 * e.w * (e.v - mean) / wsum;
                if coef == 0.0 {
                    continue;
                }
                let right = (&e.c5 * C64::new(coef, 0.0)) * e.b_mat.transpose();
                acc += e.b_mat.conjugate() * right;
            }
            acc
        })
        .collect();
    let mut grad = DMatrix::zeros(n, n);
    for p in partials {
        grad += p;
    }
    let grad_h = hermitian_part(&grad);
    Ok(BatchGrad {
        loss,
        grad_h,
        values,
    })
}

/// ma_loss together with its analytic gradient with respect to the entries of
/// H (the pairing is d loss = sum_ab grad[a][b] dH[a][b] for Hermitian dH).
pub fn ma_loss_with_grad(
    points: &[QuinticPoint],
    model: &TeacherModel,
) -> Result<(f64, DMatrix<C64>)> {
    let out = batch_loss_and_grad_h(
        &model.basis,
        &model.h,
        model.psi,
        points,
        Objective::LogRatioFs,
    )?;
    Ok((out.loss, out.grad_h))
}

/// Ricci-flatness indicator: weighted standard deviation of
/// eta = det(g_alg) / |Omega|^2 after normalizing eta to weighted mean 1.
pub fn ricci_sigma(model: &TeacherModel, points: &[QuinticPoint]) -> Result<f64> {
    if points.len() < 100 {
        return Err(Error::Validation(format!(
            "ricci_sigma needs at least 100 points, got {}",
            points.len()
        )));
    }
    let etas: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let chart = build_chart(&p.z, model.psi, p.chart_affine, p.chart_dependent)?;
            let b_mat = section_matrix(&model.basis, &chart);
            let det_alg = eval_metric(model.basis.k, &model.h, &chart, &b_mat)?.det;
            let omega = 1.0 / chart.dq_w[chart.b].norm_sqr();
            Ok(det_alg / omega)
        })
        .collect::<Result<_>>()?;
    let ws: Vec<f64> = points.iter().map(|p| p.weight).collect();
    let mean = weighted::mean(&etas, &ws);
    let scaled: Vec<f64> = etas.iter().map(|e| e / mean).collect();
    Ok(weighted::std_dev(&scaled, &ws))
}
