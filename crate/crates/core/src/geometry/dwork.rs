//! The Dwork quintic polynomial and its modulus.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Residual tolerance |Q(z)| for points accepted as lying on the hypersurface.
pub const QUINTIC_TOL: f64 = 1e-10;

/// Complex-structure modulus of the Dwork family, restricted to real values
/// in [0, 1). Values at or beyond 1 hit the conifold locus and are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusPsi(f64);

impl ModulusPsi {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..1.0).contains(&value) {
            return Err(Error::Validation(format!(
                "psi must lie in [0, 1), got {value}"
            )));
        }
        Ok(ModulusPsi(value))
    }

    /// The Fermat point psi = 0.
    pub fn fermat() -> Self {
        ModulusPsi(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Q_psi(z) = sum_i z_i^5 - 5 psi prod_i z_i. Homogeneous of degree 5.
pub fn quintic_eval(z: &[Complex64; 5], psi: ModulusPsi) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    for zi in z {
        let z2 = zi * zi;
        sum += z2 * z2 * zi;
        prod *= zi;
    }
    sum - prod * Complex64::new(5.0 * psi.value(), 0.0)
}

/// Gradient dQ/dz_i = 5 z_i^4 - 5 psi prod_{j != i} z_j, computed with
/// prefix/suffix products so zero coordinates cost no special-casing.
pub fn quintic_grad(z: &[Complex64; 5], psi: ModulusPsi) -> [Complex64; 5] {
    let one = Complex64::new(1.0, 0.0);
    let mut prefix = [one; 6];
    let mut suffix = [one; 6];
    for i in 0..5 {
        prefix[i + 1] = prefix[i] * z[i];
        suffix[4 - i] = suffix[5 - i] * z[4 - i];
    }
    let c = Complex64::new(5.0 * psi.value(), 0.0);
    std::array::from_fn(|i| {
        let z2 = z[i] * z[i];
        z2 * z2 * 5.0 - c * prefix[i] * suffix[i + 1]
    })
}

/// Exponent table of Q_psi as a list of (coefficient, exponents). Used by the
/// Yukawa degree check; the monomial with coefficient -5 psi drops out at the
/// Fermat point.
pub fn quintic_monomials(psi: ModulusPsi) -> Vec<(f64, [u8; 5])> {
    let mut out = Vec::with_capacity(6);
    for i in 0..5 {
        let mut e = [0u8; 5];
        e[i] = 5;
        out.push((1.0, e));
    }
    if psi.value() != 0.0 {
        out.push((-5.0 * psi.value(), [1, 1, 1, 1, 1]));
    }
    out
}
