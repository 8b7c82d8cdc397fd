//! Physical parameters and the closed-form constants of the kinetic-energy
//! and angular-momentum identities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Validated physical constants. The fluid occupies `{y < eta(x')}` with `y`
/// the last coordinate; `c` is the (horizontal) wave velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveParams {
    g: f64,
    sigma: f64,
    c: Vector,
    eps: f64,
}

/// Raw, unvalidated parameter record as it appears in config files.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RawParams {
    pub g: f64,
    pub sigma: f64,
    pub c: Vec<f64>,
    pub n: usize,
    pub eps: f64,
}

pub fn make_params(g: f64, sigma: f64, c: &[f64], n: usize, eps: f64) -> Result<WaveParams> {
    if !(g > 0.0) {
        return Err(Error::NonPositiveGravity(g));
    }
    if !(sigma >= 0.0) {
        return Err(Error::NegativeSurfaceTension(sigma));
    }
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let c = Vector::from_slice(c);
    if c.vertical_part() != 0.0 {
        return Err(Error::VerticalWaveSpeed(c.vertical_part()));
    }
    if !(c.horizontal().norm() > 0.0) {
        return Err(Error::ZeroWaveSpeed);
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DecayExponentOutOfRange(eps));
    }
    Ok(WaveParams { g, sigma, c, eps })
}

impl WaveParams {
    pub fn from_raw(raw: &RawParams) -> Result<Self> {
        make_params(raw.g, raw.sigma, &raw.c, raw.n, raw.eps)
    }

    /// Two-dimensional parameters with speed `c` along `+x`.
    pub fn planar(g: f64, sigma: f64, c: f64, eps: f64) -> Result<Self> {
        make_params(g, sigma, &[c, 0.0], 2, eps)
    }

    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn c(&self) -> Vector {
        self.c
    }
    pub fn n(&self) -> usize {
        self.c.dim()
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn speed(&self) -> f64 {
        self.c.norm()
    }
    /// `|c|^2 / g`, the factor multiplying the "dynamic" terms of the
    /// divergence vector fields.
    pub fn froude_factor(&self) -> f64 {
        self.c.norm_sq() / self.g
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            g: self.g,
            sigma: self.sigma,
            c: self.c.as_slice().to_vec(),
            n: self.n(),
            eps: self.eps,
        }
    }
}

/// `Gamma(k / 2)` for a positive integer `k`, by the half-integer recursion.
fn gamma_half(k: usize) -> f64 {
    assert!(k > 0);
    let (mut value, mut arg) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while arg < target {
        value *= arg;
        arg += 1.0;
    }
    value
}

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// `pi^{n/2} / (2 Gamma(n/2))`: kinetic energy equals minus this times `c.a`.
pub fn kinetic_constant(n: usize) -> Result<f64> {
    check_dim(n)?;
    Ok(PI.powf(n as f64 / 2.0) / (2.0 * gamma_half(n)))
}

/// `pi^{(n-1)/2} / Gamma((n+1)/2)`: the shell limit of `x x grad(phi)` is
/// this times `a x e_y`.
pub fn angular_constant(n: usize) -> Result<f64> {
    check_dim(n)?;
    Ok(PI.powf((n as f64 - 1.0) / 2.0) / gamma_half(n + 1))
}

/// Minimum linear phase speed `(4 g sigma)^{1/4}`.
pub fn c_min(g: f64, sigma: f64) -> f64 {
    (4.0 * g * sigma).powf(0.25)
}
