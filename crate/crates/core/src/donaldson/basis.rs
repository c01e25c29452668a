//! Degree-k monomial section bases on the quintic.
//!
//! For k <= 4 every degree-k monomial in the five homogeneous coordinates is
//! independent on the hypersurface; from k = 5 on, multiples of the defining
//! polynomial must be quotiented out. With the quintic's leading term z_0^5
//! under lexicographic order, the standard monomials are exactly those with
//! exponent of z_0 at most 4, giving N_k = C(k+4,4) - C(k-1,4).
//!
//! Sections carry square-root multinomial normalizations, s_alpha =
//! sqrt(k!/alpha!) w^alpha, so that the identity H-matrix reproduces the
//! Fubini-Study potential exactly whenever the basis is complete (k <= 4):
//! sum_alpha (k!/alpha!) |w^alpha|^2 = (sum_i |w_i|^2)^k.

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Number of independent degree-k sections: C(k+4,4) for k <= 4,
/// C(k+4,4) - C(k-1,4) once quintic relations appear.
pub fn basis_size(k: usize) -> usize {
    assert!(k >= 1, "degree must be at least 1");
    let all = binomial(k as u64 + 4, 4);
    let relations = if k >= 5 { binomial(k as u64 - 1, 4) } else { 0 };
    (all - relations) as usize
}

/// Monomial basis of degree k: exponent tuples in lexicographic order with
/// their normalization constants sqrt(k!/alpha!).
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    pub k: usize,
    pub exponents: Vec<[u8; 5]>,
    pub norms: Vec<f64>,
}

impl MonomialBasis {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "degree must be at least 1");
        let mut exponents = Vec::new();
        let e0_max = if k >= 5 { 4 } else { k };
        for e0 in (0..=e0_max).rev() {
            for e1 in (0..=(k - e0)).rev() {
                for e2 in (0..=(k - e0 - e1)).rev() {
                    for e3 in (0..=(k - e0 - e1 - e2)).rev() {
                        let e4 = k - e0 - e1 - e2 - e3;
                        exponents.push([e0 as u8, e1 as u8, e2 as u8, e3 as u8, e4 as u8]);
                    }
                }
            }
        }
        let norms = exponents
            .iter()
            .map(|e| {
                let mut m: f64 = 1.0;
                // k!/prod(e_i!) accumulated incrementally to stay in range
                let mut used = 0u64;
                for &ei in e {
                    for j in 1..=ei as u64 {
                        used += 1;
                        m *= used as f64 / j as f64;
                    }
                }
                m.sqrt()
            })
            .collect();
        MonomialBasis {
            k,
            exponents,
            norms,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}
