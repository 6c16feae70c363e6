//! Unitary two-dimensional FFTs over the transverse plane.
//!
//! Both directions carry a `1/sqrt(nx ny)` normalization so that transforms
//! conserve `sum |c|^2` exactly (Parseval); Wigner intensities can therefore
//! be read off in either domain without bookkeeping factors.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    transpose: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd_x = planner.plan_fft_forward(nx);
        let inv_x = planner.plan_fft_inverse(nx);
        let fwd_y = planner.plan_fft_forward(ny);
        let inv_y = planner.plan_fft_inverse(ny);
        let scratch_len = fwd_x
            .get_inplace_scratch_len()
            .max(inv_x.get_inplace_scratch_len())
            .max(fwd_y.get_inplace_scratch_len())
            .max(inv_y.get_inplace_scratch_len());
        Self {
            nx,
            ny,
            fwd_x,
            inv_x,
            fwd_y,
            inv_y,
            scratch: vec![Complex64::ZERO; scratch_len],
            transpose: vec![Complex64::ZERO; nx * ny],
        }
    }

    /// Direct space -> wavevector space on one row-major `[ny][nx]` plane.
    pub fn forward(&mut self, plane: &mut [Complex64]) {
        self.transform(plane, true);
    }

    /// Wavevector space -> direct space.
    pub fn inverse(&mut self, plane: &mut [Complex64]) {
        self.transform(plane, false);
    }

    fn transform(&mut self, plane: &mut [Complex64], forward: bool) {
        assert_eq!(plane.len(), self.nx * self.ny, "plane size mismatch");
        let (fx, fy) = if forward {
            (&self.fwd_x, &self.fwd_y)
        } else {
            (&self.inv_x, &self.inv_y)
        };
        // Rows are contiguous: one batched call handles all ny transforms.
        fx.process_with_scratch(plane, &mut self.scratch);
        for y in 0..self.ny {
            for x in 0..self.nx {
                self.transpose[x * self.ny + y] = plane[y * self.nx + x];
            }
        }
        fy.process_with_scratch(&mut self.transpose, &mut self.scratch);
        let norm = 1.0 / ((self.nx * self.ny) as f64).sqrt();
        for y in 0..self.ny {
            for x in 0..self.nx {
                plane[y * self.nx + x] = self.transpose[x * self.ny + y] * norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn roundtrip_and_parseval() {
        let (nx, ny) = (16, 8);
        let mut fft = Fft2::new(nx, ny);
        let mut plane: Vec<Complex64> = (0..nx * ny)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let original = plane.clone();
        let power: f64 = plane.iter().map(|c| c.norm_sqr()).sum();
        fft.forward(&mut plane);
        let spectral_power: f64 = plane.iter().map(|c| c.norm_sqr()).sum();
        assert_relative_eq!(power, spectral_power, max_relative = 1e-12);
        fft.inverse(&mut plane);
        for (a, b) in plane.iter().zip(&original) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_transforms_to_flat_spectrum() {
        let (nx, ny) = (8, 8);
        let mut fft = Fft2::new(nx, ny);
        let mut plane = vec![Complex64::ZERO; nx * ny];
        plane[0] = Complex64::new((nx as f64 * ny as f64).sqrt(), 0.0);
        fft.forward(&mut plane);
        for c in &plane {
            assert_relative_eq!(c.re, 1.0, epsilon = 1e-12);
            assert_relative_eq!(c.im, 0.0, epsilon = 1e-12);
        }
    }
}
