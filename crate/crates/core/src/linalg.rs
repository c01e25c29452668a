//! Small dense linear algebra used by the geometry and fitting layers:
//! complex 3x3 determinants/inverses, a degree-5 polynomial root solver
//! (companion matrix + shifted complex QR + Newton polish), Hermitian matrix
//! utilities, and weighted least squares by two independent routes (QR and
//! normal equations).

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

// ─── small complex matrices ──────────────────────────────────────────────

pub fn det3(m: &[[C64; 3]; 3]) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn inv3(m: &[[C64; 3]; 3]) -> Option<[[C64; 3]; 3]> {
    let d = det3(m);
    if d.norm() == 0.0 {
        return None;
    }
    let inv_d = C64::new(1.0, 0.0) / d;
    let cof = |r1: usize, c1: usize, r2: usize, c2: usize| m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    out[0][0] = cof(1, 1, 2, 2) * inv_d;
    out[0][1] = -cof(0, 1, 2, 2) * inv_d;
    out[0][2] = cof(0, 1, 1, 2) * inv_d;
    out[1][0] = -cof(1, 0, 2, 2) * inv_d;
    out[1][1] = cof(0, 0, 2, 2) * inv_d;
    out[1][2] = -cof(0, 0, 1, 2) * inv_d;
    out[2][0] = cof(1, 0, 2, 1) * inv_d;
    out[2][1] = -cof(0, 0, 2, 1) * inv_d;
    out[2][2] = cof(0, 0, 1, 1) * inv_d;
    Some(out)
}

// ─── degree-5 complex polynomial roots ───────────────────────────────────

/// Roots of `c[0] + c[1] t + ... + c[5] t^5`.
///
/// Returns `None` when the leading coefficient is negligible relative to the
/// rest (a degenerate line in the sampling application) or when the QR
/// iteration fails to converge. Roots are polished with Newton steps on the
/// monic polynomial.
pub fn quintic_roots(c: &[C64; 6]) -> Option<Vec<C64>> {
    let max_mag = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 || c[5].norm() < 1e-12 * max_mag {
        return None;
    }
    // monic coefficients a[j] of t^j, j = 0..4
    let mut a = [C64::new(0.0, 0.0); 5];
    for j in 0..5 {
        a[j] = c[j] / c[5];
    }
    let mut h = [[C64::new(0.0, 0.0); 5]; 5];
    for k in 1..5 {
        h[k][k - 1] = C64::new(1.0, 0.0);
    }
    for j in 0..5 {
        h[j][4] = -a[j];
    }
    let mut roots = hessenberg_eigenvalues(h)?;
    for r in roots.iter_mut() {
        *r = newton_polish(*r, &a);
    }
    Some(roots)
}

fn poly_and_deriv(t: C64, a: &[C64; 5]) -> (C64, C64) {
    // monic: p(t) = t^5 + a4 t^4 + ... + a0
    let mut p = C64::new(1.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for j in (0..5).rev() {
        dp = dp * t + p;
        p = p * t + a[j];
    }
    (p, dp)
}

fn newton_polish(mut t: C64, a: &[C64; 5]) -> C64 {
    for _ in 0..3 {
        let (p, dp) = poly_and_deriv(t, a);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        t -= step;
        if step.norm() < 1e-15 * (1.0 + t.norm()) {
            break;
        }
    }
    t
}

/// Complex Givens rotation zeroing the second component of (a, b):
/// returns (c, s) with c real so that [c s; -conj(s) c] * [a; b] = [r; 0].
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let d = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if a.norm() == 0.0 {
        return (0.0, b.conj() / d);
    }
    let phase = a / a.norm();
    (a.norm() / d, phase * b.conj() / d)
}

/// Eigenvalues of an upper-Hessenberg complex matrix by the explicitly
/// shifted QR iteration with Wilkinson shifts; matrix size fixed at 5.
fn hessenberg_eigenvalues(mut h: [[C64; 5]; 5]) -> Option<Vec<C64>> {
    const N: usize = 5;
    let mut eigs = Vec::with_capacity(N);
    let mut hi = N - 1; // active trailing index
    let mut iters = 0usize;
    let mut stall = 0usize; // iterations since the active block last shrank
    let mut last_hi = hi;
    while iters < 400 {
        iters += 1;
        // deflate tiny subdiagonals
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let scale = h[k - 1][k - 1].norm() + h[k][k].norm();
            if h[k][k - 1].norm() <= 1e-15 * scale.max(1e-300) {
                h[k][k - 1] = C64::new(0.0, 0.0);
            }
        }
        while hi > 0 && h[hi][hi - 1].norm() == 0.0 {
            eigs.push(h[hi][hi]);
            hi -= 1;
        }
        if hi == 0 {
            eigs.push(h[0][0]);
            return Some(eigs);
        }
        for k in (1..=hi).rev() {
            if h[k][k - 1].norm() == 0.0 {
                lo = k;
                break;
            }
        }
        if hi - lo == 1 && h[hi][hi - 1].norm() != 0.0 {
            // solve the trailing unreduced 2x2 directly
            let (e1, e2) = eig2(h[lo][lo], h[lo][hi], h[hi][lo], h[hi][hi]);
            eigs.push(e1);
            eigs.push(e2);
            if lo == 0 {
                return Some(eigs);
            }
            hi = lo - 1;
            continue;
        }
        if hi != last_hi {
            stall = 0;
            last_hi = hi;
        }
        stall += 1;
        // Wilkinson shift from the trailing 2x2 of the active block; an
        // exceptional shift breaks the symmetric stall cases (e.g. companion
        // matrices of t^5 - c, whose eigenvalues share one modulus).
        let shift = if stall % 12 == 0 {
            h[hi][hi]
                + C64::new(0.7521, 0.3113)
                    * (h[hi][hi - 1].norm() + if hi >= 2 { h[hi - 1][hi - 2].norm() } else { 0.0 })
        } else {
            let (e1, e2) = eig2(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi]);
            if (e1 - h[hi][hi]).norm() <= (e2 - h[hi][hi]).norm() {
                e1
            } else {
                e2
            }
        };
        for d in lo..=hi {
            h[d][d] -= shift;
        }
        // QR by Givens on the Hessenberg band, then RQ
        let mut rot = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            rot.push((c, s));
            for j in k..=hi {
                let (x, y) = (h[k][j], h[k + 1][j]);
                h[k][j] = c * x + s * y;
                h[k + 1][j] = -s.conj() * x + c * y;
            }
        }
        for (k, (c, s)) in rot.iter().enumerate() {
            let k = lo + k;
            for i in lo..=(k + 1).min(hi) {
                let (x, y) = (h[i][k], h[i][k + 1]);
                h[i][k] = c * x + s.conj() * y;
                h[i][k + 1] = -s * x + c * y;
            }
        }
        for d in lo..=hi {
            h[d][d] += shift;
        }
    }
    None
}

/// Eigenvalues of [[a, b], [c, d]].
fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

// ─── Hermitian utilities ─────────────────────────────────────────────────

pub fn max_hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Positive-definiteness via Cholesky.
pub fn is_positive_definite(m: &DMatrix<C64>) -> bool {
    Cholesky::new(m.clone()).is_some()
}

/// Project onto the Hermitian positive-definite cone: symmetrize, then clamp
/// eigenvalues from below at `floor`. Idempotent for already-projected input.
pub fn project_hermitian_pd(m: &DMatrix<C64>, floor: f64) -> DMatrix<C64> {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k].max(floor);
        let v = eig.eigenvectors.column(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += v[i] * v[j].conj() * C64::new(lam, 0.0);
            }
        }
    }
    hermitian_part(&out)
}

// ─── weighted least squares ──────────────────────────────────────────────

/// WLS via Householder QR on the sqrt-weight-scaled design matrix.
///
/// `design` is row-major (n rows, p columns). On rank deficiency the indices
/// of the offending columns are returned in the error.
pub fn wls_qr(design: &[Vec<f64>], y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let n = design.len();
    let p = design[0].len();
    if n < p {
        return Err(Error::Validation(format!(
            "least squares needs at least {p} rows, got {n}"
        )));
    }
    let mut a = DMatrix::zeros(n, p);
    let mut b = DVector::zeros(n);
    for i in 0..n {
        let sw = w[i].sqrt();
        for j in 0..p {
            a[(i, j)] = design[i][j] * sw;
        }
        b[i] = y[i] * sw;
    }
    let qr = a.qr();
    let r = qr.r();
    let rmax = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    let bad: Vec<usize> = (0..p)
        .filter(|&j| r[(j, j)].abs() < 1e-10 * rmax.max(1e-300))
        .collect();
    if !bad.is_empty() || rmax == 0.0 {
        return Err(Error::Numerical(format!(
            "rank-deficient design matrix; collinear column indices {bad:?}"
        )));
    }
    let qtb = qr.q().transpose() * b;
    let mut x = DVector::zeros(p);
    for j in (0..p).rev() {
        let mut s = qtb[j];
        for k in (j + 1)..p {
            s -= r[(j, k)] * x[k];
        }
        x[j] = s / r[(j, j)];
    }
    Ok(x.iter().copied().collect())
}

/// WLS via the normal equations X^T W X c = X^T W y with a Cholesky solve.
/// Independent route used to cross-check [`wls_qr`].
pub fn wls_normal(design: &[Vec<f64>], y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let n = design.len();
    let p = design[0].len();
    let mut xtx = DMatrix::zeros(p, p);
    let mut xty = DVector::zeros(p);
    for i in 0..n {
        let wi = w[i];
        for j in 0..p {
            let xij = design[i][j];
            xty[j] += wi * xij * y[i];
            for k in j..p {
                xtx[(j, k)] += wi * xij * design[i][k];
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            xtx[(j, k)] = xtx[(k, j)];
        }
    }
    let chol = Cholesky::new(xtx)
        .ok_or_else(|| Error::Numerical("normal equations not positive definite".into()))?;
    let x = chol.solve(&xty);
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn poly_from_roots(roots: &[C64; 5]) -> [C64; 6] {
        let mut c = vec![C64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (j, &cj) in c.iter().enumerate() {
                next[j + 1] += cj;
                next[j] -= cj * r;
            }
            c = next;
        }
        let mut out = [C64::new(0.0, 0.0); 6];
        out.copy_from_slice(&c);
        out
    }

    fn sort_key(v: &C64) -> (f64, f64) {
        (v.re, v.im)
    }

    #[test]
    fn roots_of_unity() {
        let c = [
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let mut roots = quintic_roots(&c).unwrap();
        roots.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());
        let mut expect: Vec<C64> = (0..5)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0))
            .collect();
        expect.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());
        for (r, e) in roots.iter().zip(&expect) {
            assert!((r - e).norm() < 1e-10, "{r} vs {e}");
        }
    }

    #[test]
    fn random_roots_recovered() {
        let mut rng = crate::rng::derive_rng(11, "linalg-test", 0);
        for _ in 0..200 {
            let roots: [C64; 5] = std::array::from_fn(|_| {
                C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
            });
            let c = poly_from_roots(&roots);
            let mut got = quintic_roots(&c).unwrap();
            got.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());
            let mut expect = roots.to_vec();
            expect.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).unwrap());
            for (r, e) in got.iter().zip(&expect) {
                assert!((r - e).norm() < 1e-7, "{r} vs {e}");
            }
        }
    }

    #[test]
    fn degenerate_leading_coefficient_rejected() {
        let mut c = [C64::new(1.0, 0.0); 6];
        c[5] = C64::new(1e-30, 0.0);
        assert!(quintic_roots(&c).is_none());
    }

    #[test]
    fn projection_is_idempotent_and_pd() {
        let mut rng = crate::rng::derive_rng(3, "linalg-test", 1);
        let n = 6;
        let m = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let floor = 1e-10;
        let p1 = project_hermitian_pd(&m, floor);
        let p2 = project_hermitian_pd(&p1, floor);
        assert!(max_hermitian_defect(&p1) < 1e-12);
        assert!(
            is_positive_definite(&p1)
                || p1
                    .clone()
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .all(|&e| e >= floor * 0.5)
        );
        assert!((&p1 - &p2).norm() < 1e-10 * p1.norm().max(1.0));
    }

    #[test]
    fn wls_routes_agree() {
        let mut rng = crate::rng::derive_rng(5, "linalg-test", 2);
        let n = 200;
        let design: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let x = rng.gen_range(0.2..1.0);
                vec![1.0, x, x * x]
            })
            .collect();
        let y: Vec<f64> = design
            .iter()
            .map(|r| 0.3 - 1.2 * r[1] + 0.7 * r[2] + 0.01 * rng.gen_range(-1.0..1.0))
            .collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let a = wls_qr(&design, &y, &w).unwrap();
        let b = wls_normal(&design, &y, &w).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn wls_reports_collinear_columns() {
        let design: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let x = i as f64;
                vec![1.0, x, 2.0 * x]
            })
            .collect();
        let y = vec![1.0; 20];
        let w = vec![1.0; 20];
        let err = wls_qr(&design, &y, &w).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
        assert!(err.to_string().contains('2'));
    }
}
