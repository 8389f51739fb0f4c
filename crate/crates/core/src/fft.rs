//! Iterative radix-2 FFT.
//!
//! Grids are restricted to power-of-two sizes, so a plain Cooley-Tukey
//! transform is all the spectral machinery needs. Forward uses `e^{-i}`,
//! inverse uses `e^{+i}` and divides by `n`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    twiddles: Vec<C64>,
}

impl FftPlan {
    /// Panics unless `n` is a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT size must be a power of two");
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / n as f64;
                C64::new(angle.cos(), angle.sin())
            })
            .collect();
        FftPlan { n, twiddles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, false);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, true);
        let scale = 1.0 / self.n as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(&self, data: &mut [C64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n, "FFT buffer length mismatch");
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}
