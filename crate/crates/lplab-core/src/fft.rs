//! Iterative radix-2 complex FFT for power-of-two sizes, plus the
//! separable multi-dimensional transform over row-major arrays.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Σ_x f(x) e^{-iξ·x}, unnormalised.
    Forward,
    /// Σ_ξ c(ξ) e^{iξ·x}, unnormalised.
    Inverse,
}

/// Precomputed twiddles and bit-reversal table for one length.
#[derive(Debug, Clone)]
pub struct Fft1 {
    n: usize,
    twiddle: Vec<Complex64>,
    rev: Vec<u32>,
}

impl Fft1 {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length must be a power of two");
        let bits = n.trailing_zeros();
        let twiddle = (0..n / 2)
            .map(|k| {
                let a = -2.0 * PI * (k as f64) / (n as f64);
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let rev = (0..n as u32)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (32 - bits)
                }
            })
            .collect();
        Fft1 { n, twiddle, rev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, buf: &mut [Complex64], dir: Direction) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n);
        for i in 0..n {
            let j = self.rev[i] as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let inverse = dir == Direction::Inverse;
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddle[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// In-place transform of an `n^d` row-major array along every axis.
pub fn fft_nd(data: &mut [Complex64], n: usize, d: usize, dir: Direction) {
    assert_eq!(data.len(), n.pow(d as u32));
    let plan = Fft1::new(n);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_mut(n) {
                plan.process(chunk, dir);
            }
            continue;
        }
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                plan.process(&mut line, dir);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}
