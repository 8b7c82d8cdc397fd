//! Fourier multipliers on the periodic grid `xi_j = -L + 2 L j / N`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// FFT plans and wavenumbers for one grid.
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    half_length: f64,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("n", &self.n)
            .field("half_length", &self.half_length)
            .finish()
    }
}

impl Spectral {
    pub fn new(n: usize, half_length: f64) -> Result<Spectral> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "box half-length must be positive, got {half_length}"
            )));
        }
        let mut planner = FftPlanner::new();
        let dk = PI / half_length;
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 {
                    j as f64
                } else {
                    j as f64 - n as f64
                };
                m * dk
            })
            .collect();
        Ok(Spectral {
            n,
            half_length,
            k,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn xi(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    /// Angular wavenumber of FFT bin `j`; the Nyquist bin carries `-N/2`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.k[j]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Unnormalised forward transform of real samples.
    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        assert_eq!(u.len(), self.n);
        let mut buf: Vec<Complex64> = u.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Applies the multipliers `ma`, `mb` to a spectrum and returns the two
    /// real inverse transforms. Both multipliers must map real signals to
    /// real signals; the Nyquist bin is dropped.
    pub fn apply_pair(
        &self,
        spec: &[Complex64],
        ma: impl Fn(f64) -> Complex64,
        mb: impl Fn(f64) -> Complex64,
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let i = Complex64::new(0.0, 1.0);
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| {
                if j == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    let k = self.k[j];
                    spec[j] * ma(k) + i * spec[j] * mb(k)
                }
            })
            .collect();
        self.inverse.process(&mut buf);
        let s = 1.0 / n as f64;
        (
            buf.iter().map(|z| z.re * s).collect(),
            buf.iter().map(|z| z.im * s).collect(),
        )
    }

    /// Real multiplier applied to every bin, the Nyquist bin included
    /// (with its own factor `nyquist`).
    pub fn apply_real(&self, u: &[f64], m: impl Fn(f64) -> f64, nyquist: f64) -> Vec<f64> {
        let n = self.n;
        let mut buf = self.forward(u);
        for (j, z) in buf.iter_mut().enumerate() {
            *z *= if j == n / 2 { nyquist } else { m(self.k[j]) };
        }
        self.inverse.process(&mut buf);
        buf.iter().map(|z| z.re / n as f64).collect()
    }

    pub fn apply(&self, u: &[f64], m: impl Fn(f64) -> Complex64) -> Vec<f64> {
        self.apply_pair(&self.forward(u), m, |_| Complex64::new(0.0, 0.0))
            .0
    }

    /// Hilbert transform with symbol `-i sgn(k)`, so `H[cos] = sin`.
    pub fn hilbert(&self, u: &[f64]) -> Vec<f64> {
        self.apply(u, hilbert_symbol)
    }

    pub fn derivative(&self, u: &[f64]) -> Vec<f64> {
        self.apply(u, |k| Complex64::new(0.0, k))
    }

    /// Cosine coefficients `c_m`, `m = 0 .. N/2 - 1`, of an even signal,
    /// `u(xi) = c_0 + 2 sum_m c_m cos(m pi xi / L)`.
    pub fn cosine_coefficients(&self, u: &[f64]) -> Vec<f64> {
        let spec = self.forward(u);
        let s = 1.0 / self.n as f64;
        (0..self.n / 2)
            .map(|m| {
                let phase = if m % 2 == 0 { 1.0 } else { -1.0 };
                spec[m].re * s * phase
            })
            .collect()
    }
}

pub fn hilbert_symbol(k: f64) -> Complex64 {
    if k > 0.0 {
        Complex64::new(0.0, -1.0)
    } else if k < 0.0 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}
