use serde::Serialize;

use super::describe::mean;
use super::student_t_sf;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    /// Upper-tail p for H1: mean(a) > mean(b).
    pub p: f64,
}

fn sample_var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

/// Welch's unequal-variance t-test, one-tailed in the direction `a > b`.
pub fn welch_t_one_tailed(a: &[f64], b: &[f64]) -> Result<TTest> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: s.len(),
            });
        }
    }
    let (va, vb) = (sample_var(a), sample_var(b));
    if va == 0.0 && vb == 0.0 {
        return Err(Error::ZeroVariance("both samples".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok(TTest {
        t,
        df,
        p: student_t_sf(t, df),
    })
}
