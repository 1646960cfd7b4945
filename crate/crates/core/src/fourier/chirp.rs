use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Prime-length DFT `X_k = Σ_n x_n e^{2πi nk/p}` by chirp embedding into a
/// power-of-two cyclic convolution.
///
/// With `c_n = e^{πi n²/p}` we have `e^{2πi nk/p} = c_n c_k conj(c_{k−n})`, so
/// `X = c · ((x·c) ⊛ conj(c))` where the convolution runs over a length `M ≥ 2p − 1`.
pub struct ChirpTransform {
    len: usize,
    chirp: Vec<Complex64>,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl ChirpTransform {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1);
        let m = (2 * len - 1).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);

        let two_len = 2 * len as u64;
        // phase reduced as an integer so large n² loses no precision
        let chirp: Vec<Complex64> = (0..len as u64)
            .map(|n| {
                let k = (n * n) % two_len;
                Complex64::from_polar(1.0, PI * k as f64 / len as f64)
            })
            .collect();

        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for n in 1..len {
            kernel[n] = chirp[n].conj();
            kernel[m - n] = chirp[n].conj();
        }
        forward.process(&mut kernel);
        let scale = 1.0 / m as f64;
        for k in kernel.iter_mut() {
            *k *= scale;
        }

        Self {
            len,
            chirp,
            kernel_hat: kernel,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn inner_len(&self) -> usize {
        self.kernel_hat.len()
    }

    /// Scratch buffer sized for [`ChirpTransform::process`].
    pub fn make_scratch(&self) -> Vec<Complex64> {
        vec![
            Complex64::new(0.0, 0.0);
            self.inner_len()
                + self
                    .forward
                    .get_inplace_scratch_len()
                    .max(self.inverse.get_inplace_scratch_len())
        ]
    }

    /// Transforms `line` (length `p`) in place.
    pub fn process(&self, line: &mut [Complex64], scratch: &mut [Complex64]) {
        debug_assert_eq!(line.len(), self.len);
        let m = self.inner_len();
        let (buf, fft_scratch) = scratch.split_at_mut(m);
        for (b, (x, c)) in buf.iter_mut().zip(line.iter().zip(&self.chirp)) {
            *b = x * c;
        }
        for b in buf[self.len..].iter_mut() {
            *b = Complex64::new(0.0, 0.0);
        }
        self.forward.process_with_scratch(buf, fft_scratch);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process_with_scratch(buf, fft_scratch);
        for (x, (b, c)) in line.iter_mut().zip(buf.iter().zip(&self.chirp)) {
            *x = b * c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let p = x.len();
        (0..p)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(n, &v)| {
                        v * Complex64::from_polar(1.0, 2.0 * PI * ((n * k) % p) as f64 / p as f64)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_primes() {
        for p in [3usize, 5, 7, 11, 13, 31, 101] {
            let t = ChirpTransform::new(p);
            let x: Vec<Complex64> = (0..p)
                .map(|i| Complex64::new((i * i % 7) as f64, (i % 3) as f64 - 1.0))
                .collect();
            let mut y = x.clone();
            let mut scratch = t.make_scratch();
            t.process(&mut y, &mut scratch);
            for (a, b) in y.iter().zip(naive(&x)) {
                assert!((a - b).norm() < 1e-9, "p={p}");
            }
        }
    }

    #[test]
    fn delta_transforms_to_ones() {
        let t = ChirpTransform::new(7);
        let mut x = vec![Complex64::new(0.0, 0.0); 7];
        x[0] = Complex64::new(1.0, 0.0);
        t.process(&mut x, &mut t.make_scratch());
        assert!(x
            .iter()
            .all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-12));
    }
}
