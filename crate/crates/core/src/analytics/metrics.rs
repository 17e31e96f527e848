use super::AnalyticsError;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mse: f64,
    /// `None` when the actual series is constant.
    pub r2: Option<f64>,
    pub mfe: f64,
    /// Fraction, `None` when every actual value is zero.
    pub mape: Option<f64>,
    pub n: usize,
    pub n_nonzero_actuals: usize,
}

pub fn evaluate_forecast(
    actual: &[f64],
    predicted: &[f64],
) -> Result<MetricReport, AnalyticsError> {
    if actual.len() != predicted.len() {
        return Err(AnalyticsError::Contract(format!(
            "length mismatch: {} actual vs {} predicted",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(AnalyticsError::Contract("empty series".into()));
    }
    let n = actual.len();
    let nf = n as f64;
    let mean_actual = actual.iter().sum::<f64>() / nf;

    let (mut ss_res, mut ss_tot, mut err_sum, mut ape_sum) = (0.0, 0.0, 0.0, 0.0);
    let mut nonzero = 0usize;
    for (&a, &p) in actual.iter().zip(predicted) {
        let e = a - p;
        ss_res += e * e;
        err_sum += e;
        let d = a - mean_actual;
        ss_tot += d * d;
        if a != 0.0 {
            ape_sum += e.abs() / a.abs();
            nonzero += 1;
        }
    }

    let constant = actual.iter().all(|&a| a == actual[0]);
    Ok(MetricReport {
        mse: ss_res / nf,
        r2: (!constant).then(|| 1.0 - ss_res / ss_tot),
        mfe: err_sum / nf,
        mape: (nonzero > 0).then(|| ape_sum / nonzero as f64),
        n,
        n_nonzero_actuals: nonzero,
    })
}
