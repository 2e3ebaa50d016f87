//! Shapiro-Wilk W test with Royston's coefficient and p-value approximations
//! (algorithm AS R94).

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p: f64,
    pub n: usize,
}

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Antisymmetric half of the coefficient vector: `a[i]` weights
/// `x_(n-i) - x_(i+1)` for `i < n/2`.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let std_normal = Normal::standard();
    let an = n as f64;
    let m: Vec<f64> = (1..=half)
        .map(|i| std_normal.inverse_cdf((i as f64 - 0.375) / (an + 0.25)))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    a
}

fn p_value(w: f64, n: usize) -> f64 {
    if n == 3 {
        let six_over_pi = 6.0 / std::f64::consts::PI;
        let p = six_over_pi * (w.sqrt().asin() - std::f64::consts::FRAC_PI_3);
        return p.clamp(0.0, 1.0);
    }
    let an = n as f64;
    let mut w1 = (1.0 - w).ln();
    let (mean, sd) = if n <= 11 {
        let gamma = poly(&G, an);
        if w1 >= gamma {
            return 1e-99;
        }
        w1 = -(gamma - w1).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    let z = (w1 - mean) / sd;
    // Upper tail via symmetry.
    Normal::standard().cdf(-z)
}

pub fn shapiro_wilk(sample: &[f64]) -> Result<ShapiroWilk> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if n > 5000 {
        return Err(Error::invalid("n", format!("{n} exceeds 5000")));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::Undefined("non-finite sample value".into()));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range <= 0.0 {
        return Err(Error::ZeroVariance("Shapiro-Wilk sample".into()));
    }
    // Scale by the range, as the reference algorithm does, to limit cancellation.
    for v in &mut x {
        *v /= range;
    }
    let a = coefficients(n);
    let mean = x.iter().sum::<f64>() / n as f64;
    let ssq: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let num: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * (x[n - 1 - i] - x[i]))
        .sum();
    let w = (num * num / ssq).min(1.0);
    let w = if n == 3 { w.max(0.75) } else { w };
    Ok(ShapiroWilk {
        w,
        p: p_value(w, n),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn n3_exact_value() {
        // x = [1, 2, 4]: a = 1/sqrt2, W = (3/sqrt2)^2 / (14/3) = 0.9642857
        let r = shapiro_wilk(&[1.0, 2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(r.w, 4.5 / (14.0 / 3.0), epsilon = 1e-12);
        assert!(r.p > 0.5 && r.p < 0.7);
    }

    #[test]
    fn coefficients_are_unit_norm() {
        for n in [4usize, 5, 6, 10, 50, 155, 500] {
            let a = coefficients(n);
            let norm2: f64 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert_abs_diff_eq!(norm2, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_degenerate_samples() {
        assert!(shapiro_wilk(&[1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(shapiro_wilk(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn scale_and_shift_invariant() {
        let x = [0.3, 1.7, -0.4, 2.2, 0.9, 1.1, -1.3, 0.0, 0.6, 3.4];
        let y: Vec<f64> = x.iter().map(|v| 5.0 * v - 2.0).collect();
        let (a, b) = (shapiro_wilk(&x).unwrap(), shapiro_wilk(&y).unwrap());
        assert_abs_diff_eq!(a.w, b.w, epsilon = 1e-12);
    }
}
