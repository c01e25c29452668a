//! Charts on the hypersurface and pullback quantities.
//!
//! In the affine chart `a` the coordinates are w = z / z_a (so w_a = 1); on
//! the hypersurface one further coordinate `b` is dependent through Q(w) = 0,
//! leaving three local holomorphic coordinates. The implicit-function Jacobian
//! dw_b/du_r = -Q_r/Q_b pulls ambient (1,1)-forms back to these local
//! coordinates, so metric determinants and the |Omega|^2 density below are
//! densities with respect to the same local coordinate volume and their ratio
//! is chart-invariant.

use num_complex::Complex64;

use super::dwork::{quintic_grad, ModulusPsi};
use super::sample::QuinticPoint;
use crate::error::{Error, Result};
use crate::linalg::det3;

/// Threshold on |dQ/dz_b| below which a chart counts as near-singular.
pub const CHART_GRAD_MIN: f64 = 1e-8;

pub(crate) struct Chart {
    pub a: usize,
    pub b: usize,
    /// Affine coordinates w = z / z_a, with w[a] = 1.
    pub w: [Complex64; 5],
    /// The four chart coordinates (indices != a), ascending.
    pub coords: [usize; 4],
    /// The three local coordinates (indices != a, b), ascending.
    pub locals: [usize; 3],
    /// Jacobian J[row][col] = dw_{coords[row]} / du_{locals[col]} on the
    /// hypersurface.
    pub jac: [[Complex64; 3]; 4],
    /// S = sum_j |w_j|^2 (including w_a = 1); the Fubini-Study potential is
    /// log S.
    pub s_fs: f64,
    /// Affine gradient dQ/dw_i at w.
    pub dq_w: [Complex64; 5],
}

pub(crate) fn default_chart_indices(z: &[Complex64; 5], psi: ModulusPsi) -> (usize, usize) {
    let a = (0..5)
        .max_by(|&i, &j| z[i].norm().total_cmp(&z[j].norm()))
        .unwrap();
    let grad = quintic_grad(z, psi);
    let b = (0..5)
        .filter(|&i| i != a)
        .max_by(|&i, &j| grad[i].norm().total_cmp(&grad[j].norm()))
        .unwrap();
    (a, b)
}

pub(crate) fn build_chart(
    z: &[Complex64; 5],
    psi: ModulusPsi,
    a: usize,
    b: usize,
) -> Result<Chart> {
    assert!(a < 5 && b < 5 && a != b, "invalid chart indices");
    let grad = quintic_grad(z, psi);
    if grad[b].norm() < CHART_GRAD_MIN {
        return Err(Error::Chart {
            index: b,
            grad_norm: grad[b].norm(),
        });
    }
    let za = z[a];
    let w: [Complex64; 5] = std::array::from_fn(|i| z[i] / za);
    // dQ/dw_i at w = z/z_a equals dQ/dz_i(z) / z_a^4 by degree-4 homogeneity.
    let za2 = za * za;
    let za4 = za2 * za2;
    let dq_w: [Complex64; 5] = std::array::from_fn(|i| grad[i] / za4);

    let mut coords = [0usize; 4];
    let mut locals = [0usize; 3];
    let (mut ci, mut li) = (0, 0);
    for i in 0..5 {
        if i == a {
            continue;
        }
        coords[ci] = i;
        ci += 1;
        if i != b {
            locals[li] = i;
            li += 1;
        }
    }

    let mut jac = [[Complex64::new(0.0, 0.0); 3]; 4];
    for (row, &k) in coords.iter().enumerate() {
        for (col, &u) in locals.iter().enumerate() {
            jac[row][col] = if k == b {
                -dq_w[u] / dq_w[b]
            } else if k == u {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
    }

    let s_fs: f64 = w.iter().map(|wi| wi.norm_sqr()).sum();
    Ok(Chart {
        a,
        b,
        w,
        coords,
        locals,
        jac,
        s_fs,
        dq_w,
    })
}

/// Fubini-Study metric in the chart coordinates: for K = log S,
/// g[r][c] = d^2 K / dw_{coords[r]} dwbar_{coords[c]}
///         = delta_{rc}/S - conj(w_r) w_c / S^2.
pub(crate) fn fs_metric_chart(chart: &Chart) -> [[Complex64; 4]; 4] {
    let s = chart.s_fs;
    let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let wr = chart.w[chart.coords[r]];
            let wc = chart.w[chart.coords[c]];
            let mut v = -wr.conj() * wc / (s * s);
            if r == c {
                v += Complex64::new(1.0 / s, 0.0);
            }
            g[r][c] = v;
        }
    }
    g
}

/// Pull a chart-coordinate Hermitian metric back to the three local
/// coordinates and return its determinant. Checks that the result is a
/// positive real up to roundoff.
pub(crate) fn pullback_det(chart: &Chart, g: &[[Complex64; 4]; 4]) -> Result<f64> {
    let p = pullback_matrix(chart, g);
    let d = det3(&p);
    if !d.re.is_finite() || d.re <= 0.0 || d.im.abs() > 1e-8 * d.re.abs().max(1e-300) {
        return Err(Error::Numerical(format!(
            "pullback determinant not positive real: {d}"
        )));
    }
    Ok(d.re)
}

pub(crate) fn pullback_matrix(chart: &Chart, g: &[[Complex64; 4]; 4]) -> [[Complex64; 3]; 3] {
    let j = &chart.jac;
    let mut p = [[Complex64::new(0.0, 0.0); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                if j[i][r].norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..4 {
                    acc += j[i][r] * j[k][c].conj() * g[i][k];
                }
            }
            p[r][c] = acc;
        }
    }
    p
}

/// Determinant of the Fubini-Study pullback in the point's stored chart.
pub fn fs_pullback_det(point: &QuinticPoint, psi: ModulusPsi) -> Result<f64> {
    fs_pullback_det_in_chart(&point.z, psi, point.chart_affine, point.chart_dependent)
}

/// Same, with explicit chart indices (used by the chart-independence checks).
pub fn fs_pullback_det_in_chart(
    z: &[Complex64; 5],
    psi: ModulusPsi,
    a: usize,
    b: usize,
) -> Result<f64> {
    let chart = build_chart(z, psi, a, b)?;
    let g = fs_metric_chart(&chart);
    pullback_det(&chart, &g)
}

/// Density of Omega wedge conj(Omega) relative to the chart coordinate
/// volume, via the residue formula: |Omega|^2 = 1 / |dQ/dw_b|^2.
pub fn omega_density(point: &QuinticPoint, psi: ModulusPsi) -> Result<f64> {
    omega_density_in_chart(&point.z, psi, point.chart_affine, point.chart_dependent)
}

pub fn omega_density_in_chart(
    z: &[Complex64; 5],
    psi: ModulusPsi,
    a: usize,
    b: usize,
) -> Result<f64> {
    let chart = build_chart(z, psi, a, b)?;
    Ok(1.0 / chart.dq_w[b].norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_quintic;

    fn sample_points() -> Vec<QuinticPoint> {
        sample_quintic(ModulusPsi::fermat(), 40, 2024).unwrap()
    }

    #[test]
    fn dets_positive_and_phase_invariant() {
        let psi = ModulusPsi::fermat();
        for p in sample_points() {
            let det = fs_pullback_det(&p, psi).unwrap();
            assert!(det > 0.0);
            let om = omega_density(&p, psi).unwrap();
            assert!(om > 0.0);
            // global phase leaves w and hence every density unchanged
            let phase = Complex64::from_polar(1.0, 1.234);
            let rotated: [Complex64; 5] = std::array::from_fn(|i| p.z[i] * phase);
            let det2 =
                fs_pullback_det_in_chart(&rotated, psi, p.chart_affine, p.chart_dependent)
                    .unwrap();
            let om2 =
                omega_density_in_chart(&rotated, psi, p.chart_affine, p.chart_dependent).unwrap();
            assert!((det - det2).abs() <= 1e-12 * det);
            assert!((om - om2).abs() <= 1e-12 * om);
        }
    }

    /// Chart-independence oracle: switching the dependent coordinate b -> b'
    /// rescales local volumes by |det(du/du')|^2 = |Q_b / Q_b'|^2, and both
    /// the FS pullback determinant and the Omega density must transform with
    /// exactly that factor, leaving their ratio invariant.
    #[test]
    fn chart_change_transforms_by_jacobian() {
        let psi = ModulusPsi::new(0.4).unwrap();
        let points = sample_quintic(psi, 40, 77).unwrap();
        for p in points {
            let a = p.chart_affine;
            let b = p.chart_dependent;
            let chart = build_chart(&p.z, psi, a, b).unwrap();
            // pick an alternative dependent index with a healthy gradient
            let b2 = (0..5)
                .filter(|&i| i != a && i != b && chart.dq_w[i].norm() > 1e-6)
                .max_by(|&i, &j| chart.dq_w[i].norm().total_cmp(&chart.dq_w[j].norm()));
            let Some(b2) = b2 else { continue };
            let factor = (chart.dq_w[b] / chart.dq_w[b2]).norm_sqr();

            let det_b = fs_pullback_det_in_chart(&p.z, psi, a, b).unwrap();
            let det_b2 = fs_pullback_det_in_chart(&p.z, psi, a, b2).unwrap();
            assert!(
                (det_b2 - det_b * factor).abs() <= 1e-8 * det_b2,
                "fs det mismatch: {det_b2} vs {}",
                det_b * factor
            );

            let om_b = omega_density_in_chart(&p.z, psi, a, b).unwrap();
            let om_b2 = omega_density_in_chart(&p.z, psi, a, b2).unwrap();
            assert!((om_b2 - om_b * factor).abs() <= 1e-8 * om_b2);

            // the eta-ratio is chart-invariant, including across affine charts
            let ratio_b = det_b / om_b;
            let ratio_b2 = det_b2 / om_b2;
            assert!((ratio_b - ratio_b2).abs() <= 1e-8 * ratio_b.abs());
            let a2 = (0..5).filter(|&i| i != a).max_by(|&i, &j| {
                p.z[i].norm().total_cmp(&p.z[j].norm())
            });
            if let Some(a2) = a2 {
                if a2 != b && p.z[a2].norm() > 0.2 {
                    let det_c = fs_pullback_det_in_chart(&p.z, psi, a2, b).unwrap();
                    let om_c = omega_density_in_chart(&p.z, psi, a2, b).unwrap();
                    let ratio_c = det_c / om_c;
                    assert!(
                        (ratio_b - ratio_c).abs() <= 1e-8 * ratio_b.abs(),
                        "eta ratio not chart-invariant across affine charts"
                    );
                }
            }
        }
    }

    #[test]
    fn hermitian_intermediate() {
        let psi = ModulusPsi::fermat();
        for p in sample_points().into_iter().take(10) {
            let chart = build_chart(&p.z, psi, p.chart_affine, p.chart_dependent).unwrap();
            let g = fs_metric_chart(&chart);
            for r in 0..4 {
                for c in 0..4 {
                    assert!((g[r][c] - g[c][r].conj()).norm() < 1e-12);
                }
            }
            let pm = pullback_matrix(&chart, &g);
            for r in 0..3 {
                for c in 0..3 {
                    assert!((pm[r][c] - pm[c][r].conj()).norm() < 1e-12);
                }
            }
        }
    }
}
