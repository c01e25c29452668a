//! Gauge-invariant features: power sums of |z_i|^2 and the symmetric
//! polynomial combinations obtained from Newton's identities under the
//! normalization e_1 = sum |z_i|^2 = 1.

use super::sample::QuinticPoint;

/// Feature triple (p2, p3, sigma3) of a normalized point.
///
/// With x_i = |z_i|^2 and sum x_i = 1:
///   p2 = sum x_i^2 in [1/5, 1],
///   p3 = sum x_i^3 in [1/25, 1],
///   sigma3 = e3 = (1 - 3 p2 + 2 p3) / 6 in [0, 0.08].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub p2: f64,
    pub p3: f64,
    pub sigma3: f64,
}

impl FeatureVector {
    pub fn from_abs_squares(x: &[f64; 5]) -> Self {
        let p2: f64 = x.iter().map(|v| v * v).sum();
        let p3: f64 = x.iter().map(|v| v * v * v).sum();
        FeatureVector {
            p2,
            p3,
            sigma3: (1.0 - 3.0 * p2 + 2.0 * p3) / 6.0,
        }
    }
}

pub fn features(point: &QuinticPoint) -> FeatureVector {
    let x: [f64; 5] = std::array::from_fn(|i| point.z[i].norm_sqr());
    FeatureVector::from_abs_squares(&x)
}

/// Elementary symmetric polynomials from the power sums:
/// e2 = (1 - p2)/2, e3 = (1 - 3 p2 + 2 p3)/6.
pub fn newton_elementary(p2: f64, p3: f64) -> (f64, f64) {
    ((1.0 - p2) / 2.0, (1.0 - 3.0 * p2 + 2.0 * p3) / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn direct_e2_e3(x: &[f64; 5]) -> (f64, f64) {
        let mut e2 = 0.0;
        let mut e3 = 0.0;
        for i in 0..5 {
            for j in (i + 1)..5 {
                e2 += x[i] * x[j];
                for k in (j + 1)..5 {
                    e3 += x[i] * x[j] * x[k];
                }
            }
        }
        (e2, e3)
    }

    #[test]
    fn equal_coordinates_hit_the_extremes() {
        let f = FeatureVector::from_abs_squares(&[0.2; 5]);
        assert_relative_eq!(f.p2, 0.2, epsilon = 1e-15);
        assert_relative_eq!(f.p3, 0.04, epsilon = 1e-15);
        assert_relative_eq!(f.sigma3, 0.08, epsilon = 1e-15);
    }

    #[test]
    fn single_coordinate() {
        let f = FeatureVector::from_abs_squares(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!((f.p2, f.p3, f.sigma3), (1.0, 1.0, 0.0));
        assert_eq!(newton_elementary(1.0, 1.0), (0.0, 0.0));
    }

    #[test]
    fn two_equal_coordinates() {
        let f = FeatureVector::from_abs_squares(&[0.5, 0.5, 0.0, 0.0, 0.0]);
        assert_relative_eq!(f.p2, 0.5, epsilon = 1e-15);
        assert_relative_eq!(f.p3, 0.25, epsilon = 1e-15);
        assert_relative_eq!(f.sigma3, 0.0, epsilon = 1e-15);
        let (e2, e3) = newton_elementary(0.5, 0.25);
        assert_relative_eq!(e2, 0.25, epsilon = 1e-15);
        assert_relative_eq!(e3, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn newton_identity_example() {
        let (e2, e3) = newton_elementary(0.2, 0.04);
        assert_relative_eq!(e2, 0.4, epsilon = 1e-15);
        assert_relative_eq!(e3, 0.08, epsilon = 1e-15);
    }

    #[test]
    fn identities_on_random_simplex_tuples() {
        let mut rng = crate::rng::derive_rng(19, "features-test", 0);
        for _ in 0..10_000 {
            let raw: [f64; 5] = std::array::from_fn(|_| -f64::ln(rng.gen_range(1e-12..1.0)));
            let total: f64 = raw.iter().sum();
            let x: [f64; 5] = std::array::from_fn(|i| raw[i] / total);
            let f = FeatureVector::from_abs_squares(&x);
            let (e2, e3) = direct_e2_e3(&x);
            assert!((f.sigma3 - e3).abs() <= 1e-12);
            assert!((newton_elementary(f.p2, f.p3).0 - e2).abs() <= 1e-12);
            assert!(f.p2 >= 0.2 - 1e-12 && f.p2 <= 1.0 + 1e-12);
            assert!(f.sigma3 >= -1e-12 && f.sigma3 <= 0.08 + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn sigma3_nonnegative_and_bounded(raw in proptest::array::uniform5(1e-9..1.0f64)) {
            let total: f64 = raw.iter().sum();
            let x: [f64; 5] = std::array::from_fn(|i| raw[i] / total);
            let f = FeatureVector::from_abs_squares(&x);
            prop_assert!(f.sigma3 >= -1e-12);
            prop_assert!(f.sigma3 <= 0.08 + 1e-12);
            prop_assert!(f.p2 >= 0.2 - 1e-12);
        }
    }
}
