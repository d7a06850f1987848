//! Discrete sine transform (DST-I) via the odd-extension FFT identity.
//!
//! With N = n, the transform maps coefficients c_1..c_{n-1} to
//! S(x) = Σ_j c_j sin(πjx/n) for x = 1..n-1. Embedding the coefficients as
//! an odd sequence of length 2n and taking a forward FFT gives
//! Y[k] = −2i·S(k), hence S(k) = −Im(Y[k])/2. DST-I is its own inverse up to
//! the factor n/2.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Reusable DST-I plan for transforms of logical size `n` (n−1 data points).
/// Immutable and shareable; callers bring their own scratch.
pub struct DstPlan {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl DstPlan {
    pub fn new(n: usize) -> DstPlan {
        assert!(n >= 2);
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * n);
        DstPlan { n, fft }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Scratch buffer sized for one transform.
    pub fn make_scratch(&self) -> Vec<Complex<f64>> {
        vec![Complex::default(); 2 * self.n + self.fft.get_inplace_scratch_len()]
    }

    /// In-place DST-I of `data` (length n−1) using `scratch` from
    /// [`DstPlan::make_scratch`].
    pub fn transform(&self, data: &mut [f64], scratch: &mut [Complex<f64>]) {
        let n = self.n;
        assert_eq!(data.len(), n - 1);
        let (buf, fft_scratch) = scratch.split_at_mut(2 * n);
        buf[0] = Complex::default();
        buf[n] = Complex::default();
        for j in 1..n {
            let c = data[j - 1];
            buf[j] = Complex::new(c, 0.0);
            buf[2 * n - j] = Complex::new(-c, 0.0);
        }
        self.fft.process_with_scratch(buf, fft_scratch);
        for k in 1..n {
            data[k - 1] = -0.5 * buf[k].im;
        }
    }

    /// 2D DST-I of a row-major (n−1)×(n−1) array: transform every row, then
    /// every column.
    pub fn transform_2d(&self, data: &mut [f64], scratch: &mut [Complex<f64>]) {
        let m = self.n - 1;
        assert_eq!(data.len(), m * m);
        let mut line = vec![0.0; m];
        for row in 0..m {
            line.copy_from_slice(&data[row * m..(row + 1) * m]);
            self.transform(&mut line, scratch);
            data[row * m..(row + 1) * m].copy_from_slice(&line);
        }
        for col in 0..m {
            for (row, slot) in line.iter_mut().enumerate() {
                *slot = data[row * m + col];
            }
            self.transform(&mut line, scratch);
            for (row, &value) in line.iter().enumerate() {
                data[row * m + col] = value;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dst(n: usize, data: &[f64]) -> Vec<f64> {
        let m = n - 1;
        (1..=m)
            .map(|x| {
                (1..=m)
                    .map(|j| data[j - 1] * (std::f64::consts::PI * (j * x) as f64 / n as f64).sin())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_transform() {
        for n in [2usize, 3, 5, 8, 17] {
            let plan = DstPlan::new(n);
            let mut scratch = plan.make_scratch();
            let mut data: Vec<f64> = (0..n - 1).map(|i| (i as f64 * 0.7).sin() + 0.3).collect();
            let expected = naive_dst(n, &data);
            plan.transform(&mut data, &mut scratch);
            for (got, want) in data.iter().zip(&expected) {
                assert!((got - want).abs() < 1e-12, "n={n}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn inverse_up_to_factor() {
        let n = 16usize;
        let plan = DstPlan::new(n);
        let mut scratch = plan.make_scratch();
        let original: Vec<f64> = (0..n - 1).map(|i| (i as f64).cos()).collect();
        let mut data = original.clone();
        plan.transform(&mut data, &mut scratch);
        plan.transform(&mut data, &mut scratch);
        // DST-I ∘ DST-I = (n/2)·id
        for (twice, orig) in data.iter().zip(&original) {
            assert!((twice - orig * n as f64 / 2.0).abs() < 1e-10);
        }
    }
}
