//! Weighted statistics helpers shared across the pipeline.
//!
//! All variances here are population-style (divide by the total weight), which
//! is what the Monge-Ampère loss and the Ricci-flatness indicator use.

/// Weighted mean. Panics on empty input or non-positive total weight.
pub fn mean(values: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(values.len(), weights.len());
    let wsum: f64 = weights.iter().sum();
    assert!(wsum > 0.0, "total weight must be positive");
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| v * w)
        .sum::<f64>()
        / wsum
}

/// Weighted population variance, two-pass.
pub fn variance(values: &[f64], weights: &[f64]) -> f64 {
    let m = mean(values, weights);
    let wsum: f64 = weights.iter().sum();
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v - m) * (v - m))
        .sum::<f64>()
        / wsum
}

pub fn std_dev(values: &[f64], weights: &[f64]) -> f64 {
    variance(values, weights).sqrt()
}

/// Weighted root-mean-square error between predictions and truth.
pub fn rmse(pred: &[f64], truth: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    let wsum: f64 = weights.iter().sum();
    let ss: f64 = pred
        .iter()
        .zip(truth)
        .zip(weights)
        .map(|((p, t), w)| w * (p - t) * (p - t))
        .sum();
    (ss / wsum).sqrt()
}

/// Weighted central moments up to order 4, returned as (mean, m2, m3, m4).
pub fn central_moments(values: &[f64], weights: &[f64]) -> (f64, f64, f64, f64) {
    let m = mean(values, weights);
    let wsum: f64 = weights.iter().sum();
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for (v, w) in values.iter().zip(weights) {
        let d = v - m;
        let d2 = d * d;
        m2 += w * d2;
        m3 += w * d2 * d;
        m4 += w * d2 * d2;
    }
    (m, m2 / wsum, m3 / wsum, m4 / wsum)
}

/// Weighted quantile with the midpoint-cumulative convention: sorted values get
/// positions (cum(w) - w/2)/W and the quantile interpolates linearly between
/// neighbors, clamping at the extremes.
pub fn quantile(values: &[f64], weights: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    assert!((0.0..=1.0).contains(&q));
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let wsum: f64 = weights.iter().sum();
    let mut cum = 0.0;
    let mut pos = Vec::with_capacity(values.len());
    for &i in &idx {
        pos.push((cum + weights[i] / 2.0) / wsum);
        cum += weights[i];
    }
    if q <= pos[0] {
        return values[idx[0]];
    }
    if q >= *pos.last().unwrap() {
        return values[*idx.last().unwrap()];
    }
    let j = pos.partition_point(|&p| p < q);
    let (p0, p1) = (pos[j - 1], pos[j]);
    let (v0, v1) = (values[idx[j - 1]], values[idx[j]]);
    if p1 == p0 {
        v1
    } else {
        v0 + (v1 - v0) * (q - p0) / (p1 - p0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_weights_reduce_to_plain_stats() {
        let v = [1.0, 2.0, 3.0, 4.0];
        let w = [1.0; 4];
        assert_relative_eq!(mean(&v, &w), 2.5);
        assert_relative_eq!(variance(&v, &w), 1.25);
    }

    #[test]
    fn weights_scale_invariant() {
        let v = [0.5, 1.5, 9.0];
        let w1 = [1.0, 2.0, 0.5];
        let w2 = [10.0, 20.0, 5.0];
        assert_relative_eq!(variance(&v, &w1), variance(&v, &w2), epsilon = 1e-14);
    }

    #[test]
    fn quantile_median_of_uniform() {
        let v: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let w = vec![1.0; v.len()];
        assert_relative_eq!(quantile(&v, &w, 0.5), 50.0, epsilon = 1e-12);
    }
}
