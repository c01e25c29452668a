//! Monte Carlo point sampling on the quintic.
//!
//! Points are the intersections of random projective lines p + t q (p, q drawn
//! from the unitarily invariant Gaussian measure on C^5) with the hypersurface:
//! a degree-5 polynomial in t solved through the companion matrix. Intersection
//! points of uniformly random lines are distributed by the Fubini-Study volume
//! of the hypersurface, so each point carries the weight
//! |Omega|^2 / det(g_FS-pullback) that converts sample averages into integrals
//! against the Omega wedge conj(Omega) measure. Weights are rescaled to mean 1
//! per batch.
//!
//! Each line has its own RNG stream keyed by (seed, line index), so the result
//! is bit-identical for a given (psi, n, seed) regardless of thread count.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::charts::{build_chart, default_chart_indices, fs_metric_chart, pullback_det};
use super::dwork::{quintic_eval, ModulusPsi, QUINTIC_TOL};
use crate::error::{Error, Result};
use crate::linalg::quintic_roots;
use crate::rng::derive_rng;

/// A sampled point on the hypersurface: normalized homogeneous coordinates,
/// the chart it was validated in, and its Monte Carlo weight for the
/// Omega wedge conj(Omega) measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuinticPoint {
    pub z: [Complex64; 5],
    pub chart_affine: usize,
    pub chart_dependent: usize,
    pub weight: f64,
}

const ROOTS_PER_LINE: usize = 5;
const MAX_LINE_RETRIES: usize = 100;

/// Draw `n` points on Q_psi = 0, deterministic in (psi, n, seed).
pub fn sample_quintic(psi: ModulusPsi, n: usize, seed: u64) -> Result<Vec<QuinticPoint>> {
    if n == 0 {
        return Err(Error::Validation("sample size must be at least 1".into()));
    }
    let n_lines = n.div_ceil(ROOTS_PER_LINE);
    let per_line: Vec<Result<Vec<QuinticPoint>>> = (0..n_lines as u64)
        .into_par_iter()
        .map(|line| {
            let mut rng = derive_rng(seed, "line", line);
            line_points(psi, &mut rng)
        })
        .collect();
    let mut points = Vec::with_capacity(n_lines * ROOTS_PER_LINE);
    for res in per_line {
        points.extend(res?);
    }
    points.truncate(n);
    let mean_w: f64 = points.iter().map(|p| p.weight).sum::<f64>() / points.len() as f64;
    for p in &mut points {
        p.weight /= mean_w;
    }
    Ok(points)
}

fn gaussian_c5(rng: &mut ChaCha8Rng) -> [Complex64; 5] {
    std::array::from_fn(|_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// All five intersection points of one random line, retrying the whole line
/// on any degeneracy so that every line contributes exactly five points.
fn line_points(psi: ModulusPsi, rng: &mut ChaCha8Rng) -> Result<Vec<QuinticPoint>> {
    'retry: for _ in 0..MAX_LINE_RETRIES {
        let p = gaussian_c5(rng);
        let q = gaussian_c5(rng);
        let coeffs = line_coefficients(&p, &q, psi);
        let Some(mut roots) = quintic_roots(&coeffs) else {
            continue 'retry;
        };
        roots.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
        let mut pts = Vec::with_capacity(ROOTS_PER_LINE);
        for t in roots {
            if !t.re.is_finite() || !t.im.is_finite() {
                continue 'retry;
            }
            let mut z: [Complex64; 5] = std::array::from_fn(|i| p[i] + t * q[i]);
            let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue 'retry;
            }
            for v in z.iter_mut() {
                *v /= norm;
            }
            if quintic_eval(&z, psi).norm() > QUINTIC_TOL {
                continue 'retry;
            }
            let (a, b) = default_chart_indices(&z, psi);
            let Ok(chart) = build_chart(&z, psi, a, b) else {
                continue 'retry;
            };
            let g = fs_metric_chart(&chart);
            let Ok(det_fs) = pullback_det(&chart, &g) else {
                continue 'retry;
            };
            let omega = 1.0 / chart.dq_w[b].norm_sqr();
            pts.push(QuinticPoint {
                z,
                chart_affine: a,
                chart_dependent: b,
                weight: omega / det_fs,
            });
        }
        return Ok(pts);
    }
    Err(Error::Numerical(format!(
        "line sampling failed {MAX_LINE_RETRIES} consecutive times"
    )))
}

/// Coefficients of Q_psi(p + t q) as a polynomial in t.
fn line_coefficients(p: &[Complex64; 5], q: &[Complex64; 5], psi: ModulusPsi) -> [Complex64; 6] {
    let zero = Complex64::new(0.0, 0.0);
    let mut c = [zero; 6];
    // sum_i (p_i + t q_i)^5 via the binomial expansion
    const BINOM5: [f64; 6] = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
    for i in 0..5 {
        let mut p_pow = [Complex64::new(1.0, 0.0); 6];
        let mut q_pow = [Complex64::new(1.0, 0.0); 6];
        for m in 1..6 {
            p_pow[m] = p_pow[m - 1] * p[i];
            q_pow[m] = q_pow[m - 1] * q[i];
        }
        for m in 0..6 {
            c[m] += p_pow[5 - m] * q_pow[m] * BINOM5[m];
        }
    }
    // -5 psi prod_i (p_i + t q_i) by convolving the linear factors
    let mut prod = [zero; 6];
    prod[0] = Complex64::new(1.0, 0.0);
    let mut deg = 0;
    for i in 0..5 {
        let mut next = [zero; 6];
        for m in 0..=deg {
            next[m] += prod[m] * p[i];
            next[m + 1] += prod[m] * q[i];
        }
        prod = next;
        deg += 1;
    }
    let factor = Complex64::new(5.0 * psi.value(), 0.0);
    for m in 0..6 {
        c[m] -= factor * prod[m];
    }
    c
}

// ─── point file format ───────────────────────────────────────────────────

/// Write points as columnar text. Extra header lines (provenance metadata)
/// are emitted verbatim after the format header; every line starting with '#'
/// is a comment.
pub fn write_points(
    path: &Path,
    points: &[QuinticPoint],
    extra_header: &[String],
) -> Result<()> {
    let mut out = String::new();
    out.push_str("# quintic point set v1\n");
    out.push_str("# columns: re0 im0 re1 im1 re2 im2 re3 im3 re4 im4 chart_affine chart_dependent weight\n");
    for line in extra_header {
        out.push_str(&format!("# {line}\n"));
    }
    for p in points {
        let mut fields = Vec::with_capacity(13);
        for zi in &p.z {
            fields.push(format!("{}", zi.re));
            fields.push(format!("{}", zi.im));
        }
        fields.push(p.chart_affine.to_string());
        fields.push(p.chart_dependent.to_string());
        fields.push(format!("{}", p.weight));
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_points(path: &Path) -> Result<Vec<QuinticPoint>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut points = Vec::new();
    for (ln, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 13 {
            return Err(Error::parse(path, format!("line {}: expected 13 columns", ln + 1)));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(path, format!("line {}: bad float '{s}'", ln + 1)))
        };
        let mut z = [Complex64::new(0.0, 0.0); 5];
        for i in 0..5 {
            z[i] = Complex64::new(num(fields[2 * i])?, num(fields[2 * i + 1])?);
        }
        let idx = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(path, format!("line {}: bad index '{s}'", ln + 1)))
        };
        points.push(QuinticPoint {
            z,
            chart_affine: idx(fields[10])?,
            chart_dependent: idx(fields[11])?,
            weight: num(fields[12])?,
        });
    }
    Ok(points)
}
