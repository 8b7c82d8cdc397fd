//! Steady Bernoulli residual in conformal variables and its linearisation.
//!
//! The surface is `x(xi) = xi + H[y](xi)`, `y = y(xi)`. With
//! `J = x_xi^2 + y_xi^2` and curvature `kappa = (x_xi y_xixi - y_xi x_xixi) / J^{3/2}`
//! the dynamic condition reads `R = (c^2/2)(1/J - 1) + g y - sigma kappa = 0`.

use num_complex::Complex64;

use super::spectral::{hilbert_symbol, Spectral};
use crate::error::{Error, Result};

const MIN_JACOBIAN: f64 = 1e-10;

/// Derivatives of the conformal surface map on the grid.
#[derive(Clone, Debug)]
pub struct SurfaceState {
    pub y: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    /// `X = x - xi = H[y]`.
    pub big_x: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub jac: Vec<f64>,
}

/// Returns `(d/dxi u, d2/dxi2 u, H[u], d/dxi H[u], d2/dxi2 H[u])`.
fn derivatives(sp: &Spectral, u: &[f64]) -> [Vec<f64>; 5] {
    let spec = sp.forward(u);
    let ik = |k: f64| Complex64::new(0.0, k);
    let (d1, d2) = sp.apply_pair(&spec, ik, |k| Complex64::new(-k * k, 0.0));
    let (h1, h2) = sp.apply_pair(
        &spec,
        |k| Complex64::new(k.abs(), 0.0),
        |k| Complex64::new(0.0, k * k.abs()),
    );
    let (h0, _) = sp.apply_pair(&spec, hilbert_symbol, |_| Complex64::new(0.0, 0.0));
    [d1, d2, h0, h1, h2]
}

impl SurfaceState {
    pub fn new(sp: &Spectral, y: &[f64]) -> Result<SurfaceState> {
        let [y1, y2, big_x, h1, x2] = derivatives(sp, y);
        let x1: Vec<f64> = h1.iter().map(|v| 1.0 + v).collect();
        let jac: Vec<f64> = x1.iter().zip(&y1).map(|(a, b)| a * a + b * b).collect();
        // A vanishing Jacobian marks a cusp; anything past it folds over.
        if let Some(j) = jac.iter().position(|v| !(*v > MIN_JACOBIAN)) {
            return Err(Error::SelfIntersection(j));
        }
        Ok(SurfaceState {
            y: y.to_vec(),
            y1,
            y2,
            big_x,
            x1,
            x2,
            jac,
        })
    }

    pub fn curvature(&self) -> Vec<f64> {
        (0..self.y.len())
            .map(|j| (self.x1[j] * self.y2[j] - self.y1[j] * self.x2[j]) / self.jac[j].powf(1.5))
            .collect()
    }

    pub fn residual(&self, c: f64, g: f64, sigma: f64) -> Vec<f64> {
        let kappa = self.curvature();
        (0..self.y.len())
            .map(|j| 0.5 * c * c * (1.0 / self.jac[j] - 1.0) + g * self.y[j] - sigma * kappa[j])
            .collect()
    }

    /// Directional derivative of the residual along `dy`.
    pub fn jvp(&self, sp: &Spectral, dy: &[f64], c: f64, g: f64, sigma: f64) -> Vec<f64> {
        let [dy1, dy2, _, dx1, dx2] = derivatives(sp, dy);
        (0..self.y.len())
            .map(|j| {
                let jac = self.jac[j];
                let d_jac = 2.0 * (self.x1[j] * dx1[j] + self.y1[j] * dy1[j]);
                let num = self.x1[j] * self.y2[j] - self.y1[j] * self.x2[j];
                let d_num = dx1[j] * self.y2[j] + self.x1[j] * dy2[j]
                    - dy1[j] * self.x2[j]
                    - self.y1[j] * dx2[j];
                let j15 = jac.powf(1.5);
                let kappa = num / j15;
                let d_kappa = d_num / j15 - 1.5 * kappa * d_jac / jac;
                -0.5 * c * c * d_jac / (jac * jac) + g * dy[j] - sigma * d_kappa
            })
            .collect()
    }
}

/// `R(xi)` for surface samples `y`.
pub fn bernoulli_residual(
    sp: &Spectral,
    y: &[f64],
    c: f64,
    g: f64,
    sigma: f64,
) -> Result<Vec<f64>> {
    Ok(SurfaceState::new(sp, y)?.residual(c, g, sigma))
}

/// Symbol `g + sigma k^2 - c^2 |k|` of the residual linearised about the
/// flat state.
pub fn flat_symbol(k: f64, c: f64, g: f64, sigma: f64) -> f64 {
    g + sigma * k * k - c * c * k.abs()
}

/// Measures the linearised residual at the flat state on the mode
/// `cos(k xi)` by a centred difference, returning the projected symbol.
pub fn measured_flat_symbol(sp: &Spectral, k: f64, c: f64, g: f64, sigma: f64) -> Result<f64> {
    let n = sp.len();
    let mode: Vec<f64> = (0..n).map(|j| (k * sp.xi(j)).cos()).collect();
    let eps = 1e-6;
    let plus: Vec<f64> = mode.iter().map(|v| eps * v).collect();
    let minus: Vec<f64> = mode.iter().map(|v| -eps * v).collect();
    let rp = bernoulli_residual(sp, &plus, c, g, sigma)?;
    let rm = bernoulli_residual(sp, &minus, c, g, sigma)?;
    let num: f64 = (0..n)
        .map(|j| (rp[j] - rm[j]) / (2.0 * eps) * mode[j])
        .sum();
    let den: f64 = mode.iter().map(|v| v * v).sum();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_state_solves() {
        let sp = Spectral::new(64, 10.0).unwrap();
        let r = bernoulli_residual(&sp, &vec![0.0; 64], 1.3, 1.0, 1.0).unwrap();
        assert!(r.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn jvp_matches_finite_difference() {
        let sp = Spectral::new(128, 8.0).unwrap();
        let y: Vec<f64> = (0..128)
            .map(|j| -0.2 / (0.5 * sp.xi(j)).cosh() * sp.xi(j).cos())
            .collect();
        let dy: Vec<f64> = (0..128)
            .map(|j| (-(sp.xi(j) * sp.xi(j)) / 4.0).exp())
            .collect();
        let st = SurfaceState::new(&sp, &y).unwrap();
        let jv = st.jvp(&sp, &dy, 1.3, 1.0, 1.0);
        let e = 1e-6;
        let yp: Vec<f64> = y.iter().zip(&dy).map(|(a, b)| a + e * b).collect();
        let ym: Vec<f64> = y.iter().zip(&dy).map(|(a, b)| a - e * b).collect();
        let rp = bernoulli_residual(&sp, &yp, 1.3, 1.0, 1.0).unwrap();
        let rm = bernoulli_residual(&sp, &ym, 1.3, 1.0, 1.0).unwrap();
        for j in 0..128 {
            assert!((jv[j] - (rp[j] - rm[j]) / (2.0 * e)).abs() < 1e-7, "j={j}");
        }
    }

    #[test]
    fn measured_symbol_matches_closed_form() {
        let sp = Spectral::new(256, 8.0 * PI).unwrap();
        for k in [0.25, 1.0, 2.5] {
            let m = measured_flat_symbol(&sp, k, 1.2, 1.0, 1.0).unwrap();
            assert!((m - flat_symbol(k, 1.2, 1.0, 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn folded_surface_is_rejected() {
        let sp = Spectral::new(64, PI).unwrap();
        let y: Vec<f64> = (0..64).map(|j| -0.25 * (4.0 * sp.xi(j)).cos()).collect();
        assert_eq!(
            bernoulli_residual(&sp, &y, 1.0, 1.0, 1.0)
                .unwrap_err()
                .code(),
            "E_SELF_INTERSECTION"
        );
    }
}
