//! Pseudo-spectral differentiation along a full-period uniform axis.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Fourier differentiation plans for one periodic axis.
pub struct FourierDiff {
    pub n: usize,
    pub period: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Signed angular wavenumbers 2*pi*k/P in FFT storage order.
    pub wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for FourierDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierDiff")
            .field("n", &self.n)
            .field("period", &self.period)
            .finish()
    }
}

impl FourierDiff {
    pub fn new(n: usize, period: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let wavenumbers = (0..n)
            .map(|k| {
                let signed = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                2.0 * std::f64::consts::PI * signed as f64 / period
            })
            .collect();
        FourierDiff {
            n,
            period,
            fwd,
            inv,
            wavenumbers,
        }
    }

    /// `order`-th derivative of one real pencil. The Nyquist mode is
    /// dropped for odd orders (its derivative has no real representative
    /// on the grid).
    pub fn derivative(&self, src: &[f64], dst: &mut [f64], order: usize) {
        debug_assert_eq!(src.len(), self.n);
        let mut buf: Vec<Complex<f64>> = src.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let nyquist = if self.n % 2 == 0 { Some(self.n / 2) } else { None };
        for (k, c) in buf.iter_mut().enumerate() {
            if order % 2 == 1 && Some(k) == nyquist {
                *c = Complex::new(0.0, 0.0);
                continue;
            }
            let ik = Complex::new(0.0, self.wavenumbers[k]);
            *c *= ik.powu(order as u32);
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (d, c) in dst.iter_mut().zip(buf.iter()) {
            *d = c.re * scale;
        }
    }

    /// Forward transform of a real pencil (unnormalized, FFT order).
    pub fn forward(&self, src: &[f64], out: &mut [Complex<f64>]) {
        for (o, &v) in out.iter_mut().zip(src.iter()) {
            *o = Complex::new(v, 0.0);
        }
        self.fwd.process(out);
    }

    /// Inverse transform; writes the real part scaled by 1/n.
    pub fn inverse(&self, buf: &mut [Complex<f64>], dst: &mut [f64]) {
        self.inv.process(buf);
        let scale = 1.0 / self.n as f64;
        for (d, c) in dst.iter_mut().zip(buf.iter()) {
            *d = c.re * scale;
        }
    }

    /// In-place unnormalized complex transform (for operators assembled
    /// mode by mode).
    pub fn process_forward(&self, buf: &mut [Complex<f64>]) {
        self.fwd.process(buf);
    }

    /// In-place unnormalized inverse complex transform; the caller owns
    /// the 1/n normalization.
    pub fn process_inverse(&self, buf: &mut [Complex<f64>]) {
        self.inv.process(buf);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_on_resolved_trig_modes() {
        let n = 24;
        let p = 2.0;
        let fd = FourierDiff::new(n, p);
        let src: Vec<f64> = (0..n)
            .map(|i| {
                let x = i as f64 * p / n as f64;
                (2.0 * std::f64::consts::PI * 3.0 * x / p).sin()
            })
            .collect();
        let mut dst = vec![0.0; n];
        fd.derivative(&src, &mut dst, 1);
        for (i, d) in dst.iter().enumerate() {
            let x = i as f64 * p / n as f64;
            let k = 2.0 * std::f64::consts::PI * 3.0 / p;
            assert_relative_eq!(*d, k * (k * x).cos(), epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn odd_order_drops_nyquist() {
        let n = 8;
        let fd = FourierDiff::new(n, 1.0);
        // Pure Nyquist sawtooth.
        let src: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let mut dst = vec![0.0; n];
        fd.derivative(&src, &mut dst, 1);
        for d in &dst {
            assert!(d.abs() < 1e-12);
        }
        // Even order keeps it.
        fd.derivative(&src, &mut dst, 2);
        let k = std::f64::consts::PI * n as f64;
        for (s, d) in src.iter().zip(&dst) {
            assert_relative_eq!(*d, -k * k * s, epsilon = 1e-6, max_relative = 1e-12);
        }
    }
}
