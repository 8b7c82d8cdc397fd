//! Integral identities between the kinetic energy, the dipole moment and
//! the wave speed, in executable form.
//!
//! `A = (-k phi_y + c.x + phi) grad phi + k (|grad phi|^2/2 - c.grad phi) e_y
//!      + (k phi_y - phi) c` with `k = |c|^2/g` has `div A = |grad phi|^2`
//! for harmonic `phi`. Dropping the terms without the factor `k` leaves the
//! divergence-free field `C`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::dipole::{DipoleEstimate, Method};
use crate::error::{Error, Result};
use crate::fit::weighted_lstsq;
use crate::images::tail_mass_correction;
use crate::oracle::{fd_divergence, HarmonicField};
use crate::params::{kinetic_constant, WaveParams};
use crate::quadrature::{compensated_sum, gauss_legendre, Rule};
use crate::surface::Surface;
use crate::vector::{Point, Vector};

pub fn field_a(phi: f64, grad: &Vector, x: &Point, params: &WaveParams) -> Vector {
    let c = params.c();
    let k = params.froude_factor();
    let n = params.n();
    let phi_y = grad.vertical_part();
    let first = *grad * (-k * phi_y + c.dot(x) + phi);
    let second = Vector::vertical(n) * (k * (0.5 * grad.norm_sq() - c.dot(grad)));
    let third = c * (k * phi_y - phi);
    first + second + third
}

pub fn field_c(grad: &Vector, _x: &Point, params: &WaveParams) -> Vector {
    let c = params.c();
    let k = params.froude_factor();
    let n = params.n();
    let phi_y = grad.vertical_part();
    *grad * (-k * phi_y)
        + Vector::vertical(n) * (k * (0.5 * grad.norm_sq() - c.dot(grad)))
        + c * (k * phi_y)
}

/// `|div A - |grad phi|^2|` at `x` with centred differences of step `h`.
pub fn divergence_residual_a(
    f: &dyn HarmonicField,
    x: &Point,
    h: f64,
    params: &WaveParams,
) -> Result<f64> {
    check_stencil(f, x, h)?;
    let a = |p: &Point| -> Result<Vector> { Ok(field_a(f.value(p)?, &f.gradient(p)?, p, params)) };
    let div = fd_divergence(&a, x, h)?;
    Ok((div - f.gradient(x)?.norm_sq()).abs())
}

/// `|div C|` at `x` with centred differences of step `h`.
pub fn divergence_residual_c(
    f: &dyn HarmonicField,
    x: &Point,
    h: f64,
    params: &WaveParams,
) -> Result<f64> {
    check_stencil(f, x, h)?;
    let cf = |p: &Point| -> Result<Vector> { Ok(field_c(&f.gradient(p)?, p, params)) };
    Ok(fd_divergence(&cf, x, h)?.abs())
}

fn check_stencil(f: &dyn HarmonicField, x: &Point, h: f64) -> Result<()> {
    x.check_dim(f.dim())?;
    if f.singularities()
        .iter()
        .any(|s| (*x - *s).max_abs() <= 1.5 * h)
    {
        return Err(Error::StencilHitsSingularity);
    }
    Ok(())
}

/// Nodes and weights on the lower unit half-sphere `{|x| = 1, y < 0}`.
fn lower_hemisphere(n: usize, order: usize) -> Result<Vec<(Point, f64)>> {
    match n {
        2 => {
            let r = Rule::gauss(order, -PI, 0.0);
            Ok(r.nodes
                .iter()
                .zip(&r.weights)
                .map(|(t, w)| (Vector::new2(t.cos(), t.sin()), *w))
                .collect())
        }
        3 => {
            let pol = Rule::gauss(order, 0.0, PI / 2.0);
            let naz = 2 * order;
            let mut out = Vec::with_capacity(order * naz);
            for (b, wb) in pol.nodes.iter().zip(&pol.weights) {
                for j in 0..naz {
                    let psi = 2.0 * PI * j as f64 / naz as f64;
                    let p = Vector::new3(b.sin() * psi.cos(), b.sin() * psi.sin(), -b.cos());
                    out.push((p, wb * b.sin() * 2.0 * PI / naz as f64));
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// `int (c.x)(a.x) dS` over the lower unit half-sphere.
pub fn hemisphere_quadratic_integral(
    c: &Vector,
    a: &Vector,
    n: usize,
    order: usize,
) -> Result<f64> {
    c.check_dim(n)?;
    a.check_dim(n)?;
    let nodes = lower_hemisphere(n, order.max(4))?;
    Ok(compensated_sum(
        nodes.iter().map(|(x, w)| w * c.dot(x) * a.dot(x)),
    ))
}

/// `int x dS` over the lower unit half-sphere.
pub fn hemisphere_position_integral(n: usize, order: usize) -> Result<Vector> {
    let nodes = lower_hemisphere(n, order.max(4))?;
    let mut out = Vector::zeros(n);
    for i in 0..n {
        out[i] = compensated_sum(nodes.iter().map(|(x, w)| w * x[i]));
    }
    Ok(out)
}

/// Panels in the depth below the surface, refined near it.
fn depth_rule(depth: f64, order: usize) -> Rule {
    let mut edges = vec![0.0];
    let mut e = 0.25;
    while e < depth {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(depth);
    let (x, w) = gauss_legendre(order);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        for (t, wt) in x.iter().zip(&w) {
            nodes.push(a + 0.5 * (b - a) * (t + 1.0));
            weights.push(0.5 * (b - a) * wt);
        }
    }
    Rule { nodes, weights }
}

/// Resolution of the volume and shell quadratures.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub order: usize,
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            order: 8,
            panels: 96,
        }
    }
}

/// Horizontal nodes over the disc `|x'| < r` (an interval in the plane),
/// with the substitution `rho = r sin u` absorbing the edge singularity.
fn horizontal_rule(n: usize, r: f64, q: QuadratureSpec) -> Result<Vec<(Vector, f64)>> {
    match n {
        2 => {
            let rule = Rule::composite(q.order, q.panels, -PI / 2.0, PI / 2.0);
            Ok(rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(u, w)| (Vector::from_slice(&[r * u.sin()]), w * r * u.cos()))
                .collect())
        }
        3 => {
            let rule = Rule::composite(q.order, q.panels / 2, 0.0, PI / 2.0);
            let naz = 4 * q.order;
            let mut out = Vec::new();
            for (u, w) in rule.nodes.iter().zip(&rule.weights) {
                let rho = r * u.sin();
                for j in 0..naz {
                    let psi = 2.0 * PI * j as f64 / naz as f64;
                    let xh = Vector::new2(rho * psi.cos(), rho * psi.sin());
                    out.push((xh, w * r * u.cos() * rho * 2.0 * PI / naz as f64));
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// `1/2 int_{B_r cap fluid} |grad phi|^2`, column by column under the graph.
pub fn kinetic_energy_volume(
    grad: &(dyn Fn(&Point) -> Result<Vector> + Sync),
    eta: &dyn Surface,
    r: f64,
    params: &WaveParams,
    q: QuadratureSpec,
) -> Result<f64> {
    let n = params.n();
    if eta.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eta.dim(),
        });
    }
    if r > eta.extent() {
        return Err(Error::RadiusBeyondData {
            radius: r,
            extent: eta.extent(),
        });
    }
    let columns = horizontal_rule(n, r, q)?;
    let parts: Vec<f64> = columns
        .par_iter()
        .map(|(xh, wh)| {
            let half = (r * r - xh.norm_sq()).max(0.0).sqrt();
            let top = eta.eta(xh)?.min(half);
            let depth = top + half;
            if depth <= 0.0 {
                return Ok(0.0);
            }
            let rule = depth_rule(depth, q.order);
            let mut acc = Vec::with_capacity(rule.len());
            for (d, w) in rule.nodes.iter().zip(&rule.weights) {
                let p = Vector::from_horizontal(xh, top - d);
                acc.push(w * grad(&p)?.norm_sq());
            }
            Ok(wh * compensated_sum(acc))
        })
        .collect::<Result<_>>()?;
    Ok(0.5 * compensated_sum(parts))
}

/// Surface form of the kinetic energy, `1/2 int_S phi (c.n) dS`, over the
/// window `|x'| < w`.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceEnergy {
    pub value: f64,
    /// Raised when the integrand at the window edge is not negligible.
    pub truncation_warning: bool,
}

pub fn kinetic_energy_surface(
    phi_on_surface: &(dyn Fn(&Vector) -> Result<f64> + Sync),
    eta: &dyn Surface,
    params: &WaveParams,
    w: f64,
    q: QuadratureSpec,
) -> Result<SurfaceEnergy> {
    let n = params.n();
    if w > eta.extent() {
        return Err(Error::WindowOutsideData {
            lo: 0.0,
            hi: w,
            extent: eta.extent(),
        });
    }
    let c = params.c().horizontal();
    // (c.n) dS = -c'.grad(eta) dx'
    let integrand =
        |xh: &Vector| -> Result<f64> { Ok(phi_on_surface(xh)? * -c.dot(&eta.grad(xh)?)) };
    let nodes: Vec<(Vector, f64)> = match n {
        2 => {
            let r = Rule::composite(q.order, q.panels, -w, w);
            r.nodes
                .iter()
                .zip(&r.weights)
                .map(|(x, wt)| (Vector::from_slice(&[*x]), *wt))
                .collect()
        }
        3 => {
            let rr = Rule::composite(q.order, q.panels / 2, 0.0, w);
            let naz = 4 * q.order;
            let mut out = Vec::new();
            for (rho, wt) in rr.nodes.iter().zip(&rr.weights) {
                for j in 0..naz {
                    let psi = 2.0 * PI * j as f64 / naz as f64;
                    out.push((
                        Vector::new2(rho * psi.cos(), rho * psi.sin()),
                        wt * rho * 2.0 * PI / naz as f64,
                    ));
                }
            }
            out
        }
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|(x, wt)| Ok(wt * integrand(x)?))
        .collect::<Result<_>>()?;
    let value = 0.5 * compensated_sum(vals);
    let edge = Vector::unit(n - 1, 0) * w;
    let edge_size = 0.5 * integrand(&edge)?.abs() * w.powi(n as i32 - 1);
    Ok(SurfaceEnergy {
        value,
        truncation_warning: edge_size > 1e-3 * value.abs().max(1e-300),
    })
}

/// How the elevation is continued beyond the integration window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailModel {
    None,
    /// `eta ~ coef / x^2` (planar), optionally periodised with period `P`.
    InverseSquare {
        coef: f64,
        period: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct MassEstimate {
    pub window_integral: f64,
    pub remainder: f64,
    pub total: f64,
}

/// `int eta dx'` as a window integral over `|x'| < w` plus the analytic
/// remainder of the tail model.
pub fn excess_mass(
    eta: &dyn Surface,
    w: f64,
    tail: TailModel,
    q: QuadratureSpec,
) -> Result<MassEstimate> {
    if w > eta.extent() {
        return Err(Error::WindowOutsideData {
            lo: 0.0,
            hi: w,
            extent: eta.extent(),
        });
    }
    let n = eta.dim();
    let window_integral = match n {
        2 => {
            let r = Rule::composite(q.order, q.panels, -w, w);
            let v: Vec<f64> = r
                .nodes
                .par_iter()
                .zip(&r.weights)
                .map(|(x, wt)| Ok(wt * eta.eta(&Vector::from_slice(&[*x]))?))
                .collect::<Result<_>>()?;
            compensated_sum(v)
        }
        3 => {
            let rr = Rule::composite(q.order, q.panels / 2, 0.0, w);
            let naz = 4 * q.order;
            let mut v = Vec::new();
            for (rho, wt) in rr.nodes.iter().zip(&rr.weights) {
                for j in 0..naz {
                    let psi = 2.0 * PI * j as f64 / naz as f64;
                    let xh = Vector::new2(rho * psi.cos(), rho * psi.sin());
                    v.push(wt * rho * 2.0 * PI / naz as f64 * eta.eta(&xh)?);
                }
            }
            compensated_sum(v)
        }
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let remainder = match tail {
        TailModel::None => 0.0,
        TailModel::InverseSquare { coef, period } => {
            if n != 2 {
                return Err(Error::UnsupportedDimension(n));
            }
            tail_mass_correction(coef, w, period)
        }
    };
    Ok(MassEstimate {
        window_integral,
        remainder,
        total: window_integral + remainder,
    })
}

/// Horizontal position where the radius-`r` circle in the direction `dir`
/// meets the surface: solves `rho^2 + eta(rho dir)^2 = r^2`.
fn crossing(eta: &dyn Surface, dir: &Vector, r: f64) -> Result<(f64, f64)> {
    let mut rho = r;
    for _ in 0..100 {
        let e = eta.eta(&(*dir * rho))?;
        let next = (r * r - e * e).max(0.0).sqrt();
        if (next - rho).abs() <= 1e-14 * r {
            return Ok((next, eta.eta(&(*dir * next))?));
        }
        rho = next;
    }
    Err(Error::NoConvergence {
        what: "shell-surface crossing",
        iterations: 100,
    })
}

/// The two surface boundary integrals over `dB_r cap S`:
/// `I1 = int (|c|^2 sigma / g) n.nu ds` and `I2 = int eta (c.x)(c.nu) ds`,
/// with `nu` the outward normal of the projected curve in `R^{n-1}`.
pub fn surface_boundary_flux(eta: &dyn Surface, params: &WaveParams, r: f64) -> Result<(f64, f64)> {
    let n = params.n();
    if r > eta.extent() {
        return Err(Error::RadiusBeyondData {
            radius: r,
            extent: eta.extent(),
        });
    }
    let k_sigma = params.froude_factor() * params.sigma();
    let c = params.c();
    match n {
        2 => {
            let mut i1 = 0.0;
            let mut i2 = 0.0;
            for s in [1.0, -1.0] {
                let dir = Vector::from_slice(&[s]);
                let (rho, e) = crossing(eta, &dir, r)?;
                let xh = dir * rho;
                let normal = eta.normal(&xh)?;
                i1 += k_sigma * normal[0] * s;
                let x = Vector::from_horizontal(&xh, e);
                i2 += e * c.dot(&x) * c[0] * s;
            }
            Ok((i1, i2))
        }
        3 => {
            let m = 256;
            let h = 2.0 * PI / m as f64;
            let rho_at = |psi: f64| -> Result<f64> {
                Ok(crossing(eta, &Vector::new2(psi.cos(), psi.sin()), r)?.0)
            };
            let mut t1 = Vec::with_capacity(m);
            let mut t2 = Vec::with_capacity(m);
            for j in 0..m {
                let psi = j as f64 * h;
                let er = Vector::new2(psi.cos(), psi.sin());
                let ep = Vector::new2(-psi.sin(), psi.cos());
                let rho = rho_at(psi)?;
                let drho = (rho_at(psi + 1e-5)? - rho_at(psi - 1e-5)?) / 2e-5;
                // nu ds = (rho e_r - rho' e_psi) dpsi
                let nu_ds = er * rho - ep * drho;
                let xh = er * rho;
                let e = eta.eta(&xh)?;
                let normal = eta.normal(&xh)?;
                t1.push(k_sigma * normal.horizontal().dot(&nu_ds) * h);
                let x = Vector::from_horizontal(&xh, e);
                t2.push(e * c.dot(&x) * c.horizontal().dot(&nu_ds) * h);
            }
            Ok((compensated_sum(t1), compensated_sum(t2)))
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// Nodes on `dB_r cap fluid` with outward weights `dS`.
fn shell_nodes(
    eta: &dyn Surface,
    r: f64,
    n: usize,
    q: QuadratureSpec,
) -> Result<Vec<(Point, f64)>> {
    match n {
        2 => {
            let (xr, er) = crossing(eta, &Vector::from_slice(&[1.0]), r)?;
            let (xl, el) = crossing(eta, &Vector::from_slice(&[-1.0]), r)?;
            let hi = er.atan2(xr);
            let mut lo = el.atan2(-xl);
            if lo > 0.0 {
                lo -= 2.0 * PI;
            }
            let rule = Rule::composite(q.order, q.panels / 2, lo, hi);
            Ok(rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(t, w)| (Vector::new2(r * t.cos(), r * t.sin()), w * r))
                .collect())
        }
        3 => {
            let naz = 4 * q.order;
            let mut out = Vec::new();
            for j in 0..naz {
                let psi = 2.0 * PI * j as f64 / naz as f64;
                let dir = Vector::new2(psi.cos(), psi.sin());
                let (rho, e) = crossing(eta, &dir, r)?;
                // polar angle from the downward axis to the crossing
                let top = rho.atan2(-e);
                let rule = Rule::composite(q.order, q.panels / 8, 0.0, top);
                for (b, w) in rule.nodes.iter().zip(&rule.weights) {
                    let p = Vector::new3(r * b.sin() * dir[0], r * b.sin() * dir[1], -r * b.cos());
                    out.push((p, w * r * r * b.sin() * 2.0 * PI / naz as f64));
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// `int_{dB_r cap fluid} A.n dS` with `n = x/r`.
pub fn shell_flux_a(
    f: &dyn HarmonicField,
    eta: &dyn Surface,
    r: f64,
    params: &WaveParams,
    q: QuadratureSpec,
) -> Result<f64> {
    let n = params.n();
    let nodes = shell_nodes(eta, r, n, q)?;
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|(x, w)| {
            let a = field_a(f.value(x)?, &f.gradient(x)?, x, params);
            Ok(w * a.dot(x) / r)
        })
        .collect::<Result<_>>()?;
    Ok(compensated_sum(vals))
}

/// `int_{dB_r cap {y<0}} x cross grad phi dS`. In the plane the cross
/// product is the scalar `x_1 v_2 - x_2 v_1`, returned as a 1-vector.
pub fn angular_momentum_shell(
    grad: &(dyn Fn(&Point) -> Result<Vector> + Sync),
    r: f64,
    n: usize,
    q: QuadratureSpec,
) -> Result<Vector> {
    let nodes: Vec<(Point, f64)> = lower_hemisphere(n, q.order * q.panels / 4)?
        .into_iter()
        .map(|(x, w)| (x * r, w * r.powi(n as i32 - 1)))
        .collect();
    let vals: Vec<Vector> = nodes
        .par_iter()
        .map(|(x, w)| {
            let g = grad(x)?;
            Ok(match n {
                2 => Vector::from_slice(&[x.cross2(&g) * w]),
                _ => x.cross(&g) * *w,
            })
        })
        .collect::<Result<_>>()?;
    let d = if n == 2 { 1 } else { 3 };
    let mut out = Vector::zeros(d);
    for i in 0..d {
        out[i] = compensated_sum(vals.iter().map(|v| v[i]));
    }
    Ok(out)
}

/// `a x e_y`: the planar scalar `a_1` (same convention as
/// [`Vector::cross2`]) or the spatial cross product.
pub fn moment_cross_vertical(a: &Vector) -> Vector {
    match a.dim() {
        2 => Vector::from_slice(&[a.cross2(&Vector::vertical(2))]),
        _ => a.cross(&Vector::vertical(3)),
    }
}

/// Values of a shell integral over increasing radii, with an extrapolated
/// limit.
#[derive(Clone, Debug)]
pub struct ShellSeries {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub limit_estimate: f64,
    /// Largest pairwise difference among the values at the three largest radii.
    pub spread: f64,
}

impl ShellSeries {
    /// Fits `L + sum_{j=1}^{terms} b_j r^{-j}` by least squares. With
    /// `terms = 0` the limit is the mean of the last three values.
    pub fn new(radii: Vec<f64>, values: Vec<f64>, terms: usize) -> Result<ShellSeries> {
        if radii.len() != values.len() || radii.is_empty() {
            return Err(Error::InvalidConfig(
                "shell series needs matching, non-empty radii and values".into(),
            ));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "shell radii must increase strictly".into(),
            ));
        }
        let tail = &values[values.len().saturating_sub(3)..];
        let spread = tail
            .iter()
            .flat_map(|a| tail.iter().map(move |b| (a - b).abs()))
            .fold(0.0, f64::max);
        let limit_estimate = if terms == 0 || radii.len() <= terms {
            tail.iter().sum::<f64>() / tail.len() as f64
        } else {
            let rows: Vec<Vec<f64>> = radii
                .iter()
                .map(|r| (0..=terms).map(|j| r.powi(-(j as i32))).collect())
                .collect();
            weighted_lstsq(&rows, &values, &vec![1.0; values.len()])?.coef[0]
        };
        Ok(ShellSeries {
            radii,
            values,
            limit_estimate,
            spread,
        })
    }

    pub fn relative_spread(&self) -> f64 {
        self.spread / self.limit_estimate.abs().max(1e-300)
    }
}

/// `|KE + K_n (c.a)| / max(KE, floor)`.
pub fn verify_kinetic_identity(ke: f64, a: &Vector, c: &Vector, n: usize) -> Result<f64> {
    let k = kinetic_constant(n)?;
    let floor = 1e-14 * (c.norm() * a.norm()).max(1.0).powi(2);
    Ok((ke + k * c.dot(a)).abs() / ke.max(floor))
}

/// The dipole component along `c` implied by the kinetic energy.
pub fn dipole_from_kinetic(ke: f64, c: &Vector, n: usize) -> Result<DipoleEstimate> {
    let k = kinetic_constant(n)?;
    let speed = c.norm();
    if speed == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    let along = -ke / (k * speed);
    let mut est = DipoleEstimate::new(*c * (along / speed), Method::Energy, 0.0);
    est.transverse_known = n == 2;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Constant, Dipole, Linear, SquaredNorm};
    use crate::params::{angular_constant, make_params};
    use crate::surface::FlatSurface;

    fn p2() -> WaveParams {
        make_params(1.0, 1.0, &[1.0, 0.0], 2, 0.5).unwrap()
    }

    #[test]
    fn field_a_examples() {
        let p = p2();
        let x = Vector::new2(0.0, 0.0);
        assert_eq!(field_a(0.0, &Vector::new2(0.0, 0.0), &x, &p).norm(), 0.0);
        let a = field_a(2.5, &Vector::new2(0.0, 0.0), &Vector::new2(0.3, -0.4), &p);
        assert_eq!(a.as_slice(), &[-2.5, 0.0]);
        // hand evaluation: (-1)(0,1) + (1/2)(0,1) + (1)(1,0)
        let a = field_a(0.0, &Vector::new2(0.0, 1.0), &x, &p);
        assert_eq!(a.as_slice(), &[1.0, -0.5]);
    }

    #[test]
    fn field_c_examples() {
        let p = p2();
        let x = Vector::new2(1.0, -1.0);
        assert_eq!(field_c(&Vector::new2(0.0, 0.0), &x, &p).norm(), 0.0);
        let g = Vector::new2(0.3, -0.2);
        assert_eq!(
            field_c(&g, &x, &p),
            field_c(&g, &Vector::new2(5.0, -2.0), &p)
        );
    }

    #[test]
    fn divergence_identities() {
        let p = p2();
        let d = Dipole::new(Vector::new2(1.0, 0.0));
        let x = Vector::new2(1.0, -1.0);
        assert!(divergence_residual_a(&d, &x, 1e-3, &p).unwrap() < 1e-5);
        let lin = Linear {
            slope: p.c(),
            offset: 0.0,
        };
        assert!(divergence_residual_a(&lin, &x, 1e-3, &p).unwrap() < 1e-9);
        let sq = SquaredNorm { dim: 2 };
        assert!(divergence_residual_a(&sq, &x, 1e-3, &p).unwrap() > 0.1);
        let p3 = make_params(1.0, 1.0, &[1.0, 0.0, 0.0], 3, 0.5).unwrap();
        let d3 = Dipole::new(Vector::new3(0.5, -1.0, 0.0));
        let x3 = Vector::new3(1.0, 1.0, -1.0);
        let r1 = divergence_residual_c(&d3, &x3, 1e-2, &p3).unwrap();
        let r2 = divergence_residual_c(&d3, &x3, 1e-3, &p3).unwrap();
        assert!(r1 / r2 > 80.0 && r1 / r2 < 120.0);
        let cst = Linear {
            slope: Vector::new3(0.2, 0.1, -0.3),
            offset: 1.0,
        };
        assert_eq!(divergence_residual_c(&cst, &x3, 1e-3, &p3).unwrap(), 0.0);
        assert!(divergence_residual_c(&SquaredNorm { dim: 3 }, &x3, 1e-3, &p3).unwrap() > 0.1);
    }

    #[test]
    fn hemisphere_constants() {
        let e1 = Vector::new2(1.0, 0.0);
        assert!((hemisphere_quadratic_integral(&e1, &e1, 2, 32).unwrap() - PI / 2.0).abs() < 1e-12);
        let f1 = Vector::new3(1.0, 0.0, 0.0);
        let f2 = Vector::new3(0.0, 1.0, 0.0);
        assert!(
            (hemisphere_quadratic_integral(&f1, &f1, 3, 32).unwrap() - 2.0 * PI / 3.0).abs()
                < 1e-10
        );
        assert!(
            hemisphere_quadratic_integral(&f1, &f2, 3, 32)
                .unwrap()
                .abs()
                < 1e-12
        );
        let v = hemisphere_position_integral(2, 32).unwrap();
        assert!((v[1] + angular_constant(2).unwrap()).abs() < 1e-12 && v[0].abs() < 1e-12);
        let v = hemisphere_position_integral(3, 32).unwrap();
        assert!((v[2] + angular_constant(3).unwrap()).abs() < 1e-10);
        assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
        // K_n equals n times the quadratic integral over two.
        for n in [2, 3] {
            let e = Vector::unit(n, 0);
            let h = hemisphere_quadratic_integral(&e, &e, n, 32).unwrap();
            assert!((kinetic_constant(n).unwrap() - n as f64 * h / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn volume_energy_of_dipole_above_flat_surface() {
        // |grad phi|^2 = |a|^2 / |x - x0|^4 in the plane; over the lower
        // half-plane with x0 at height 1 this integrates to pi/4.
        let p = p2();
        let d = Dipole::at(Vector::new2(1.0, 0.0), Vector::new2(0.0, 1.0));
        let grad = |x: &Point| d.gradient(x);
        let flat = FlatSurface { dim: 2 };
        let ke = kinetic_energy_volume(&grad, &flat, 100.0, &p, QuadratureSpec::default()).unwrap();
        let exact = 0.5 * PI / 4.0;
        assert!((ke / exact - 1.0).abs() < 1e-3, "{ke} vs {exact}");
        let twice = |x: &Point| Ok(d.gradient(x)? * 2.0);
        let ke2 =
            kinetic_energy_volume(&twice, &flat, 100.0, &p, QuadratureSpec::default()).unwrap();
        assert!((ke2 / ke - 4.0).abs() < 1e-12);
        let zero = |_: &Point| Ok(Vector::zeros(2));
        assert_eq!(
            kinetic_energy_volume(&zero, &flat, 10.0, &p, QuadratureSpec::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn surface_energy_flat() {
        let p = p2();
        let flat = FlatSurface { dim: 2 };
        let phi = |x: &Vector| Ok(1.0 + x[0]);
        let e = kinetic_energy_surface(&phi, &flat, &p, 10.0, QuadratureSpec::default()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn mass_examples() {
        let q = QuadratureSpec::default();
        let flat = FlatSurface { dim: 2 };
        assert_eq!(
            excess_mass(&flat, 5.0, TailModel::None, q).unwrap().total,
            0.0
        );
        let odd = crate::surface::AnalyticSurface::new(2, |x| {
            let t = x[0];
            (
                t * (-t * t).exp(),
                Vector::from_slice(&[(1.0 - 2.0 * t * t) * (-t * t).exp()]),
            )
        });
        assert!(
            excess_mass(&odd, 5.0, TailModel::None, q)
                .unwrap()
                .total
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn boundary_flux_flat_is_zero() {
        let flat = FlatSurface { dim: 2 };
        assert_eq!(
            surface_boundary_flux(&flat, &p2(), 10.0).unwrap(),
            (0.0, 0.0)
        );
        let p3 = make_params(1.0, 1.0, &[1.0, 0.0, 0.0], 3, 0.5).unwrap();
        let (a, b) = surface_boundary_flux(&FlatSurface { dim: 3 }, &p3, 10.0).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn shell_flux_zero_field() {
        let z = Constant { value: 0.0, dim: 2 };
        let s = shell_flux_a(
            &z,
            &FlatSurface { dim: 2 },
            7.0,
            &p2(),
            QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn angular_shell_of_planar_dipole() {
        let a = Vector::new2(1.0, 0.0);
        let d = Dipole::new(a);
        let grad = |x: &Point| d.gradient(x);
        let q = QuadratureSpec::default();
        let target = moment_cross_vertical(&a)[0] * angular_constant(2).unwrap();
        for r in [1.0, 7.0] {
            let v = angular_momentum_shell(&grad, r, 2, q).unwrap();
            assert!((v[0] - target).abs() < 1e-12, "{}", v[0]);
        }
    }

    #[test]
    fn kinetic_identity_examples() {
        let c = Vector::new2(1.0, 0.0);
        assert!(
            verify_kinetic_identity(PI / 2.0, &Vector::new2(-1.0, 0.0), &c, 2).unwrap() < 1e-15
        );
        assert!(verify_kinetic_identity(0.3, &Vector::new2(0.2, 0.0), &c, 2).unwrap() >= 1.0);
        let e = dipole_from_kinetic(PI / 2.0, &c, 2).unwrap();
        assert!((e.a[0] + 1.0).abs() < 1e-15);
        assert_eq!(dipole_from_kinetic(0.0, &c, 2).unwrap().a[0], 0.0);
        let e = dipole_from_kinetic(PI, &Vector::new3(1.0, 0.0, 0.0), 3).unwrap();
        assert!((e.a[0] + 1.0).abs() < 1e-15 && !e.transverse_known);
    }

    #[test]
    fn shell_series_limit() {
        let radii = vec![10.0, 20.0, 30.0, 40.0, 50.0];
        let values: Vec<f64> = radii
            .iter()
            .map(|r| 3.0 + 2.0 / r - 5.0 / (r * r))
            .collect();
        let s = ShellSeries::new(radii, values, 2).unwrap();
        assert!((s.limit_estimate - 3.0).abs() < 1e-10);
        assert!(s.spread > 0.0);
    }
}
