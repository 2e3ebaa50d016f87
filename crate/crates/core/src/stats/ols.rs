//! Ordinary least squares with classical standard errors.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::student_t_sf;
use crate::error::{Error, Result};

/// Relative singular-value cutoff below which the design is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Centered when the design carries a constant column, uncentered otherwise.
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    pub df_resid: usize,
}

/// Fits `y = X b + e`. `rows` holds one design row per observation; include a
/// column of ones for an intercept.
pub fn ols(rows: &[Vec<f64>], y: &[f64]) -> Result<RegressionFit> {
    let n = rows.len();
    if n != y.len() {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    let k = rows.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::invalid("design", "no columns"));
    }
    if rows.iter().any(|r| r.len() != k) {
        return Err(Error::invalid("design", "ragged rows"));
    }
    if n <= k {
        return Err(Error::InsufficientData {
            needed: k + 1,
            got: n,
        });
    }

    let x = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);
    let svd = x.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    if s_max == 0.0 || svd.singular_values.min() <= RANK_TOL * s_max * (n.max(k) as f64) {
        return Err(Error::RankDeficient);
    }
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let inv_s = svd.singular_values.map(|s| 1.0 / s);
    // b = V S^-1 U' y
    let uty = u.transpose() * &yv;
    let beta = v_t.transpose()
        * DVector::from_iterator(k, uty.iter().zip(inv_s.iter()).map(|(a, b)| a * b));
    let fitted = &x * &beta;
    let resid = &yv - &fitted;
    let rss = resid.norm_squared();
    let df = n - k;
    let sigma2 = rss / df as f64;
    // (X'X)^-1 = V S^-2 V'
    let v = v_t.transpose();
    let scaled = DMatrix::from_fn(k, k, |i, j| v[(i, j)] * inv_s[j] * inv_s[j]);
    let xtx_inv = &scaled * v_t;

    let mut std_errors = Vec::with_capacity(k);
    let mut t_stats = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for j in 0..k {
        let se = (sigma2 * xtx_inv[(j, j)]).max(0.0).sqrt();
        let b = beta[j];
        let (t, p) = if se > 0.0 {
            let t = b / se;
            (t, (2.0 * student_t_sf(t.abs(), df as f64)).min(1.0))
        } else if b == 0.0 {
            (0.0, 1.0)
        } else {
            (b.signum() * f64::INFINITY, 0.0)
        };
        std_errors.push(se);
        t_stats.push(t);
        p_values.push(p);
    }

    let has_const = (0..k).any(|j| {
        let c0 = rows[0][j];
        c0 != 0.0 && rows.iter().all(|r| r[j] == c0)
    });
    let tss = if has_const {
        let m = yv.mean();
        yv.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    } else {
        yv.norm_squared()
    };
    let r_squared = if tss == 0.0 {
        if rss == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    };

    Ok(RegressionFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        t_stats,
        p_values,
        r_squared,
        residuals: resid.iter().copied().collect(),
        df_resid: df,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn proportional_fit() {
        let rows: Vec<Vec<f64>> = (1..=6).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (1..=6).map(|i| 2.0 * i as f64).collect();
        let fit = ols(&rows, &y).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn three_regressor_recovery() {
        let truth = [0.7, -1.3, 2.2];
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let t = i as f64;
                vec![1.0, t.sin(), (0.3 * t).cos() * t]
            })
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(truth).map(|(a, b)| a * b).sum())
            .collect();
        let fit = ols(&rows, &y).unwrap();
        for (b, t) in fit.coefficients.iter().zip(truth) {
            assert_abs_diff_eq!(*b, t, epsilon = 1e-9);
        }
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, i as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| i as f64).collect();
        assert!(matches!(ols(&rows, &y), Err(Error::RankDeficient)));
    }

    #[test]
    fn standard_errors_match_closed_form_simple_regression() {
        // y = a + b x + e; se(b) = sqrt(s^2 / Sxx)
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [1.1, 2.3, 2.8, 4.2, 4.9, 6.3];
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
        let fit = ols(&rows, &y).unwrap();
        let mx = 3.5;
        let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
        let s2 = fit.residuals.iter().map(|r| r * r).sum::<f64>() / 4.0;
        assert_abs_diff_eq!(fit.std_errors[1], (s2 / sxx).sqrt(), epsilon = 1e-12);
        assert!(fit.p_values[1] < 1e-4);
    }

    proptest! {
        #[test]
        fn residuals_orthogonal_to_columns(
            data in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 8..40)
        ) {
            let rows: Vec<Vec<f64>> = data.iter().map(|&(a, b, _)| vec![1.0, a, b, a * b]).collect();
            let y: Vec<f64> = data.iter().map(|&(_, _, c)| c).collect();
            let Ok(fit) = ols(&rows, &y) else { return Ok(()); };
            for j in 0..4 {
                let dot: f64 = rows.iter().zip(&fit.residuals).map(|(r, e)| r[j] * e).sum();
                prop_assert!(dot.abs() <= 1e-9, "column {} dot {}", j, dot);
            }
            prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        }
    }
}
