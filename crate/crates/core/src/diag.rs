//! Shared diagnostics: one-sided limit schedules, Richardson extrapolation
//! and convergence records attached to delicate evaluations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Record of an epsilon-schedule limit evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub eps: Vec<f64>,
    pub values_re: Vec<f64>,
    pub values_im: Vec<f64>,
    pub estimate_re: f64,
    pub estimate_im: f64,
    /// |last Richardson correction|, an a-posteriori error estimate.
    pub error_estimate: f64,
    /// Whether |value - estimate| decreased monotonically over the schedule.
    pub monotone: bool,
}

impl ConvergenceRecord {
    pub fn estimate(&self) -> Complex64 {
        Complex64::new(self.estimate_re, self.estimate_im)
    }
}

/// Check that a schedule is strictly decreasing, positive and long enough.
pub fn check_schedule(eps: &[f64], min_len: usize) -> Result<()> {
    if eps.len() < min_len {
        return Err(Error::Config(format!(
            "epsilon schedule needs at least {min_len} entries, got {}",
            eps.len()
        )));
    }
    for w in eps.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Config(
                "epsilon schedule must be strictly decreasing".into(),
            ));
        }
    }
    if eps.iter().any(|&e| e <= 0.0) {
        return Err(Error::Config("epsilon schedule must be positive".into()));
    }
    Ok(())
}

/// Polynomial (Richardson) extrapolation of f(eps) to eps -> 0 using the
/// Neville tableau on the sample points of the schedule.
pub fn richardson(eps: &[f64], values: &[Complex64]) -> (Complex64, f64) {
    assert_eq!(eps.len(), values.len());
    let n = eps.len();
    let mut tab: Vec<Complex64> = values.to_vec();
    let mut last = tab[n - 1];
    for level in 1..n {
        for i in (level..n).rev() {
            let num = eps[i - level] - eps[i];
            let t = eps[i] / num;
            tab[i] = tab[i] + (tab[i] - tab[i - 1]) * Complex64::new(t, 0.0);
        }
        last = tab[n - 1];
    }
    let err = (last - tab[n - 2]).norm();
    (last, err)
}

/// Evaluate f over the schedule and extrapolate; records the trend.
pub fn extrapolate_schedule<F>(eps: &[f64], mut f: F) -> Result<ConvergenceRecord>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    check_schedule(eps, 3)?;
    let values: Vec<Complex64> = eps.iter().map(|&e| f(e)).collect::<Result<_>>()?;
    let (estimate, error_estimate) = richardson(eps, &values);
    let mut monotone = true;
    let dists: Vec<f64> = values.iter().map(|v| (v - estimate).norm()).collect();
    for w in dists.windows(2) {
        if w[1] > w[0] * (1.0 + 1e-9) && w[0] > 1e-13 * estimate.norm().max(1.0) {
            monotone = false;
        }
    }
    Ok(ConvergenceRecord {
        eps: eps.to_vec(),
        values_re: values.iter().map(|v| v.re).collect(),
        values_im: values.iter().map(|v| v.im).collect(),
        estimate_re: estimate.re,
        estimate_im: estimate.im,
        error_estimate,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_kills_linear_and_quadratic_terms() {
        let eps = [0.08, 0.04, 0.02];
        let f = |e: f64| Complex64::new(1.0 + 3.0 * e - 2.0 * e * e, -0.5 + e);
        let values: Vec<_> = eps.iter().map(|&e| f(e)).collect();
        let (est, _) = richardson(&eps, &values);
        assert!((est - Complex64::new(1.0, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn schedule_validation() {
        assert!(check_schedule(&[0.1, 0.2], 2).is_err());
        assert!(check_schedule(&[0.2, 0.1], 3).is_err());
        assert!(check_schedule(&[0.4, 0.2, 0.1], 3).is_ok());
    }
}
