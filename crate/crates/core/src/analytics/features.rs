use std::collections::BTreeMap;

use crate::factory::ScenarioConfig;

use super::AnalyticsError;

pub const FEATURE_NAMES: [&str; 5] = [
    "skewness",
    "excess_kurtosis",
    "linear_trend_r",
    "permutation_entropy",
    "lempel_ziv_complexity",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub linear_trend_r: f64,
    pub permutation_entropy: f64,
    pub lempel_ziv_complexity: f64,
    pub source_scenario: Option<ScenarioConfig>,
}

impl FeatureVector {
    /// Values in `FEATURE_NAMES` order.
    pub fn values(&self) -> [f64; 5] {
        [
            self.skewness,
            self.excess_kurtosis,
            self.linear_trend_r,
            self.permutation_entropy,
            self.lempel_ziv_complexity,
        ]
    }
}

pub fn extract_features(
    x: &[f64],
    source_scenario: Option<ScenarioConfig>,
) -> Result<FeatureVector, AnalyticsError> {
    Ok(FeatureVector {
        skewness: skewness(x)?,
        excess_kurtosis: excess_kurtosis(x)?,
        linear_trend_r: linear_trend_r(x)?,
        permutation_entropy: permutation_entropy(x, 3, 1)?,
        lempel_ziv_complexity: lempel_ziv_complexity(x)?,
        source_scenario,
    })
}

fn check_len(x: &[f64], min: usize, what: &str) -> Result<(), AnalyticsError> {
    if x.len() < min {
        return Err(AnalyticsError::Contract(format!(
            "{what} needs at least {min} values, got {}",
            x.len()
        )));
    }
    Ok(())
}

fn check_variance(x: &[f64]) -> Result<(), AnalyticsError> {
    if x.iter().all(|&v| v == x[0]) {
        return Err(AnalyticsError::Degenerate(
            "series has zero variance".into(),
        ));
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Central moments m2, m3, m4 with divisor n.
fn central_moments(x: &[f64]) -> (f64, f64, f64) {
    let mu = mean(x);
    let n = x.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

pub fn skewness(x: &[f64]) -> Result<f64, AnalyticsError> {
    check_len(x, 3, "skewness")?;
    check_variance(x)?;
    let (m2, m3, _) = central_moments(x);
    Ok(m3 / m2.powf(1.5))
}

pub fn excess_kurtosis(x: &[f64]) -> Result<f64, AnalyticsError> {
    check_len(x, 4, "kurtosis")?;
    check_variance(x)?;
    let (m2, _, m4) = central_moments(x);
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Pearson correlation between the sample index and the values.
pub fn linear_trend_r(x: &[f64]) -> Result<f64, AnalyticsError> {
    check_len(x, 2, "linear trend")?;
    check_variance(x)?;
    let n = x.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let x_mean = mean(x);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let dt = i as f64 - t_mean;
        let dx = v - x_mean;
        sxy += dt * dx;
        sxx += dt * dt;
        syy += dx * dx;
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Normalized permutation entropy. Equal values are ranked by position.
pub fn permutation_entropy(x: &[f64], order: usize, delay: usize) -> Result<f64, AnalyticsError> {
    if order < 2 || delay < 1 {
        return Err(AnalyticsError::Contract(
            "order must be ≥ 2 and delay ≥ 1".into(),
        ));
    }
    let span = (order - 1) * delay + 1;
    check_len(x, span + 1, "permutation entropy")?;

    let windows = x.len() - span + 1;
    let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    let mut idx: Vec<u8> = Vec::with_capacity(order);
    for start in 0..windows {
        idx.clear();
        idx.extend(0..order as u8);
        idx.sort_by(|&a, &b| {
            x[start + a as usize * delay].total_cmp(&x[start + b as usize * delay])
        });
        *counts.entry(idx.clone()).or_insert(0) += 1;
    }

    let total = windows as f64;
    let h: f64 = counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum();
    let max: f64 = (2..=order).map(|k| (k as f64).ln()).sum();
    Ok((h / max).clamp(0.0, 1.0))
}

pub fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// LZ76 phrase count (Kaspar and Schuster scan).
pub fn lz76_phrase_count(s: &[bool]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    if n == 1 {
        return 1;
    }
    let (mut i, mut k, mut l) = (0usize, 1usize, 1usize);
    let mut k_max = 1usize;
    let mut c = 1usize;
    loop {
        if s[i + k - 1] == s[l + k - 1] {
            k += 1;
            if l + k > n {
                c += 1;
                break;
            }
        } else {
            k_max = k_max.max(k);
            i += 1;
            if i == l {
                c += 1;
                l += k_max;
                if l + 1 > n {
                    break;
                }
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    c
}

/// Phrase count of the median-binarized series divided by its length.
pub fn lempel_ziv_complexity(x: &[f64]) -> Result<f64, AnalyticsError> {
    check_len(x, 1, "Lempel-Ziv complexity")?;
    let m = median(x);
    let bits: Vec<bool> = x.iter().map(|&v| v > m).collect();
    Ok(lz76_phrase_count(&bits) as f64 / x.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn skewness_examples() {
        assert!(close(skewness(&[1.0, 2.0, 3.0]).unwrap(), 0.0));
        // mean 2, deviations -1, -1, -1, 3
        let m2 = (3.0 + 9.0) / 4.0;
        let m3 = (-3.0 + 27.0) / 4.0;
        assert!(close(
            skewness(&[1.0, 1.0, 1.0, 5.0]).unwrap(),
            m3 / f64::powf(m2, 1.5)
        ));
        assert!(matches!(
            skewness(&[7.0, 7.0, 7.0]),
            Err(AnalyticsError::Degenerate(_))
        ));
    }

    #[test]
    fn kurtosis_examples() {
        assert!(close(
            excess_kurtosis(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap(),
            -1.3
        ));
        assert!(close(excess_kurtosis(&[0.0, 0.0, 1.0, 1.0]).unwrap(), -2.0));
        assert!(excess_kurtosis(&[2.0; 6]).is_err());
    }

    #[test]
    fn trend_examples() {
        assert!(close(linear_trend_r(&[0.0, 1.0, 2.0, 3.0]).unwrap(), 1.0));
        assert!(close(linear_trend_r(&[3.0, 2.0, 1.0, 0.0]).unwrap(), -1.0));
        assert!(close(
            linear_trend_r(&[0.0, 1.0, 0.0, 1.0]).unwrap(),
            1.0 / 5f64.sqrt()
        ));
    }

    #[test]
    fn permutation_entropy_examples() {
        let inc: Vec<f64> = (0..20).map(f64::from).collect();
        assert_eq!(permutation_entropy(&inc, 3, 1).unwrap(), 0.0);
        let alt = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        assert!(close(
            permutation_entropy(&alt, 3, 1).unwrap(),
            2f64.ln() / 6f64.ln()
        ));
        assert!(matches!(
            permutation_entropy(&[1.0, 2.0], 3, 1),
            Err(AnalyticsError::Contract(_))
        ));
    }

    #[test]
    fn lz_examples() {
        assert_eq!(lempel_ziv_complexity(&[4.0]).unwrap(), 1.0);
        assert_eq!(lempel_ziv_complexity(&[3.0; 8]).unwrap(), 2.0 / 8.0);
        let alt = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        assert_eq!(lempel_ziv_complexity(&alt).unwrap(), 3.0 / 8.0);
    }
}
