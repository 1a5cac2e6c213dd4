//! FFT helpers on the unit torus grid `x_i = i/N`, `y_j = j/N`.
//!
//! Grid arrays are row-major with `x` as the slow index: `values[i * N + j]`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Signed frequency of FFT bin `k` on an `n`-point grid.
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Forward (`inverse = false`) or unnormalised inverse 2-D FFT in place.
pub fn fft2(values: &mut [Complex64], n: usize, inverse: bool) {
    assert_eq!(values.len(), n * n);
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in values.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = values[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            values[i * n + j] = col[i];
        }
    }
}

/// Fourier coefficients `f̂(p, q)` of samples on the grid, so that
/// `f(x, y) = Σ f̂(p, q) e^{2πi(px + qy)}`.
pub fn coefficients(values: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = values.to_vec();
    fft2(&mut out, n, false);
    let norm = 1.0 / (n * n) as f64;
    out.iter_mut().for_each(|c| *c *= norm);
    out
}

/// Spectral partial derivatives `(∂x f, ∂y f)` of periodic grid samples.
/// The Nyquist bin is dropped so that real data stays real.
pub fn gradient(values: &[Complex64], n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let hat = coefficients(values, n);
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let mut dx = vec![Complex64::new(0.0, 0.0); n * n];
    let mut dy = dx.clone();
    for i in 0..n {
        for j in 0..n {
            let (p, q) = (signed_mode(i, n), signed_mode(j, n));
            let nyq = n.is_multiple_of(2) && (i == n / 2 || j == n / 2);
            if nyq {
                continue;
            }
            dx[i * n + j] = hat[i * n + j] * two_pi_i * p as f64;
            dy[i * n + j] = hat[i * n + j] * two_pi_i * q as f64;
        }
    }
    fft2(&mut dx, n, true);
    fft2(&mut dy, n, true);
    (dx, dy)
}

/// Spectral derivative of a periodic 1-D sequence sampled on `[0, period)`.
pub fn derivative_1d(values: &[Complex64], period: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = values.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let w = 2.0 * std::f64::consts::PI / period;
    for (k, c) in buf.iter_mut().enumerate() {
        if n.is_multiple_of(2) && k == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, w * signed_mode(k, n) as f64) / n as f64;
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}
