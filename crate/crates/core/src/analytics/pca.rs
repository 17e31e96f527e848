use nalgebra::{DMatrix, SymmetricEigen};

use super::AnalyticsError;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub feature_names: Vec<String>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Unit directions, one column per component.
    pub components: DMatrix<f64>,
    /// `components` scaled column-wise by `sqrt(eigenvalue)`.
    pub loadings: DMatrix<f64>,
    /// Standardized observations projected onto the components.
    pub scores: DMatrix<f64>,
    /// Correlation matrix of the input columns.
    pub correlation: DMatrix<f64>,
}

impl PcaResult {
    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        let total: f64 = self.eigenvalues.iter().sum();
        self.eigenvalues.iter().map(|l| l / total).collect()
    }
}

/// Largest-magnitude entry of a component; near-ties (within 1e-9
/// relative) resolve to the earliest feature.
pub(crate) fn sign_pivot(v: &[f64]) -> f64 {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    v.iter()
        .copied()
        .find(|x| x.abs() >= max * (1.0 - 1e-9))
        .unwrap_or(0.0)
}

/// Correlation-matrix PCA of an observations × features matrix.
pub fn pca_on_features(
    data: &DMatrix<f64>,
    feature_names: &[String],
) -> Result<PcaResult, AnalyticsError> {
    let (n, p) = data.shape();
    if n < 2 || p < 2 {
        return Err(AnalyticsError::Contract(format!(
            "need at least 2 observations and 2 features, got {n}x{p}"
        )));
    }
    if feature_names.len() != p {
        return Err(AnalyticsError::Contract(format!(
            "{} feature names for {p} columns",
            feature_names.len()
        )));
    }

    let mut z = data.clone();
    for (j, name) in feature_names.iter().enumerate() {
        let mut col = z.column_mut(j);
        let first = col[0];
        if col.iter().all(|&v| v == first) {
            return Err(AnalyticsError::Degenerate(format!(
                "feature column {name:?} is constant"
            )));
        }
        let mean = col.sum() / n as f64;
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / n as f64).sqrt();
        col /= sd;
    }

    let mut corr = z.transpose() * &z / n as f64;
    corr = (&corr + corr.transpose()) * 0.5;

    let eig = SymmetricEigen::new(corr.clone());
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut components = DMatrix::zeros(p, p);
    let mut eigenvalues = Vec::with_capacity(p);
    for (k, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).clone_owned();
        if sign_pivot(v.as_slice()) < 0.0 {
            v.neg_mut();
        }
        components.set_column(k, &v);
        eigenvalues.push(eig.eigenvalues[src]);
    }

    let mut loadings = components.clone();
    for (k, &l) in eigenvalues.iter().enumerate() {
        loadings.column_mut(k).scale_mut(l.max(0.0).sqrt());
    }
    let scores = &z * &components;

    Ok(PcaResult {
        feature_names: feature_names.to_vec(),
        eigenvalues,
        components,
        loadings,
        scores,
        correlation: corr,
    })
}
