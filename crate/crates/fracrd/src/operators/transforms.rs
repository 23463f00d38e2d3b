//! Fast orthogonal transforms between nodal and eigenbasis representations.
//!
//! Dirichlet uses DST-I on the endpoint-excluding grid `x_j = j h`,
//! `h = L/(n+1)`; Neumann uses DCT-II/III on the half-offset grid
//! `x_j = (j + 1/2) h`, `h = L/n`. On these grids the discrete transforms
//! are exactly orthogonal under the trapezoid/midpoint quadrature weight
//! `h`, which is what makes analyze/synthesize an exact inverse pair.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// DST-I: `y_k = sum_{j=1..n} x_j sin(pi j k / (n+1))`, embedded in a
/// complex FFT of length `2(n+1)` via the odd extension.
pub(crate) struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * (n + 1));
        Self { n, fft }
    }

    pub fn apply(&self, input: &[f64], output: &mut [f64]) {
        assert_eq!(input.len(), self.n);
        assert_eq!(output.len(), self.n);
        let m = 2 * (self.n + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for (j, &x) in input.iter().enumerate() {
            buf[j + 1].re = x;
            buf[m - 1 - j].re = -x;
        }
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(&mut buf, &mut scratch);
        for k in 1..=self.n {
            output[k - 1] = -0.5 * buf[k].im;
        }
    }
}

/// DCT-II and its inverse DCT-III through a complex FFT of length `2n`.
pub(crate) struct CosineTransform {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl CosineTransform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(2 * n);
        let inverse = planner.plan_fft_inverse(2 * n);
        Self {
            n,
            forward,
            inverse,
        }
    }

    /// `c_k = sum_{j=0..n-1} x_j cos(pi k (j + 1/2) / n)`, k = 0..n-1.
    pub fn dct2(&self, input: &[f64], output: &mut [f64]) {
        assert_eq!(input.len(), self.n);
        assert_eq!(output.len(), self.n);
        let m = 2 * self.n;
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for (j, &x) in input.iter().enumerate() {
            buf[j].re = x;
            buf[m - 1 - j].re = x;
        }
        let mut scratch = vec![Complex::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        self.forward.process_with_scratch(&mut buf, &mut scratch);
        let phase = std::f64::consts::PI / (2.0 * self.n as f64);
        for k in 0..self.n {
            let rot = Complex::from_polar(1.0, -phase * k as f64);
            output[k] = 0.5 * (buf[k] * rot).re;
        }
    }

    /// `y_j = sum_{k=0..n-1} a_k cos(pi k (j + 1/2) / n)`, j = 0..n-1.
    pub fn dct3(&self, input: &[f64], output: &mut [f64]) {
        assert_eq!(input.len(), self.n);
        assert_eq!(output.len(), self.n);
        let m = 2 * self.n;
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        let phase = std::f64::consts::PI / (2.0 * self.n as f64);
        for (k, &a) in input.iter().enumerate() {
            buf[k] = Complex::from_polar(1.0, phase * k as f64) * a;
        }
        let mut scratch = vec![Complex::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        self.inverse.process_with_scratch(&mut buf, &mut scratch);
        for j in 0..self.n {
            output[j] = buf[j].re;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dst1_naive(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (1..=n)
            .map(|k| {
                (1..=n)
                    .map(|j| {
                        x[j - 1] * (std::f64::consts::PI * (j * k) as f64 / (n + 1) as f64).sin()
                    })
                    .sum()
            })
            .collect()
    }

    fn dct2_naive(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        x[j] * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos()
                    })
                    .sum()
            })
            .collect()
    }

    fn pseudo_random(n: usize, seed: u64) -> Vec<f64> {
        // xorshift; good enough for transform exercises
        let mut s = seed.max(1);
        (0..n)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s % 10_000) as f64 / 5_000.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn dst_matches_naive() {
        for n in [4, 7, 16, 33] {
            let x = pseudo_random(n, 42);
            let mut y = vec![0.0; n];
            SineTransform::new(n).apply(&x, &mut y);
            let want = dst1_naive(&x);
            for k in 0..n {
                assert!((y[k] - want[k]).abs() < 1e-11, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn dct2_matches_naive() {
        for n in [4, 9, 32] {
            let x = pseudo_random(n, 7);
            let mut y = vec![0.0; n];
            CosineTransform::new(n).dct2(&x, &mut y);
            let want = dct2_naive(&x);
            for k in 0..n {
                assert!((y[k] - want[k]).abs() < 1e-11, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn dst_is_self_inverse_up_to_scale() {
        // DST-I . DST-I = (n+1)/2 * Id
        let n = 24;
        let x = pseudo_random(n, 3);
        let t = SineTransform::new(n);
        let mut y = vec![0.0; n];
        let mut back = vec![0.0; n];
        t.apply(&x, &mut y);
        t.apply(&y, &mut back);
        let scale = (n + 1) as f64 / 2.0;
        for j in 0..n {
            assert!((back[j] / scale - x[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn dct3_inverts_dct2() {
        // DCT3(DCT2 x with a_0 halved) = (n/2) x
        let n = 20;
        let x = pseudo_random(n, 11);
        let t = CosineTransform::new(n);
        let mut c = vec![0.0; n];
        t.dct2(&x, &mut c);
        c[0] *= 0.5;
        let mut back = vec![0.0; n];
        t.dct3(&c, &mut back);
        for j in 0..n {
            assert!((back[j] * 2.0 / n as f64 - x[j]).abs() < 1e-12);
        }
    }
}
