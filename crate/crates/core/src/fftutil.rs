//! Thin wrapper around rustfft for the angular transforms used on boundary
//! and volume grids, plus mode-index helpers for the FFT bin ordering.

use ndarray::Array1;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn rustfft::Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn rustfft::Fft<f64>> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Forward DFT: out[m] = sum_j v[j] e^{-2 pi i j m / n} (unnormalized).
pub fn fft(v: &Array1<Complex64>) -> Array1<Complex64> {
    let mut buf: Vec<Complex64> = v.to_vec();
    plan(buf.len(), false).process(&mut buf);
    Array1::from_vec(buf)
}

/// Inverse DFT with 1/n normalization.
pub fn ifft(v: &Array1<Complex64>) -> Array1<Complex64> {
    let n = v.len();
    let mut buf: Vec<Complex64> = v.to_vec();
    plan(n, true).process(&mut buf);
    let s = 1.0 / n as f64;
    Array1::from_vec(buf.into_iter().map(|z| z * s).collect())
}

pub fn fft_slice(v: &mut [Complex64]) {
    plan(v.len(), false).process(v);
}

pub fn ifft_slice(v: &mut [Complex64]) {
    let n = v.len();
    plan(n, true).process(v);
    let s = 1.0 / n as f64;
    for z in v.iter_mut() {
        *z *= s;
    }
}

/// Signed angular mode for FFT bin `i` of an n-point transform.
#[inline]
pub fn mode_of_bin(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
