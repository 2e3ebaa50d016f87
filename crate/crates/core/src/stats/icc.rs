use crate::error::{Error, Result};

/// Two-way, consistency, single-measure intraclass correlation, ICC(C,1),
/// for two raters.
///
/// `(MS_rows - MS_error) / (MS_rows + (k - 1) MS_error)` with `k = 2`.
pub fn icc_consistency(pairs: &[(f64, f64)]) -> Result<f64> {
    let n = pairs.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let k = 2.0;
    let nf = n as f64;
    let grand = pairs.iter().map(|(a, b)| a + b).sum::<f64>() / (nf * k);
    let col_mean = [
        pairs.iter().map(|p| p.0).sum::<f64>() / nf,
        pairs.iter().map(|p| p.1).sum::<f64>() / nf,
    ];
    let mut ss_rows = 0.0;
    let mut ss_total = 0.0;
    for &(a, b) in pairs {
        let row_mean = (a + b) / k;
        ss_rows += k * (row_mean - grand).powi(2);
        ss_total += (a - grand).powi(2) + (b - grand).powi(2);
    }
    let ss_cols: f64 = col_mean.iter().map(|m| nf * (m - grand).powi(2)).sum();
    let ss_err = (ss_total - ss_rows - ss_cols).max(0.0);
    let ms_rows = ss_rows / (nf - 1.0);
    let ms_err = ss_err / ((nf - 1.0) * (k - 1.0));
    if ms_rows == 0.0 {
        return Err(Error::ZeroVariance("between-subject".into()));
    }
    Ok((ms_rows - ms_err) / (ms_rows + (k - 1.0) * ms_err))
}
