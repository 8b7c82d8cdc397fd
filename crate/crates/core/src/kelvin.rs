//! Inversion in the unit sphere and the Kelvin transform of potentials,
//! surfaces, normals and the kinematic boundary condition.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dipole::{DipoleEstimate, Method};
use crate::error::{Error, Result};
use crate::fit::weighted_lstsq;
use crate::images::{PeriodicDipole, PeriodicQuadrupole};
use crate::oracle::{HarmonicField, HarmonicQuadratic};
use crate::params::WaveParams;
use crate::surface::Surface;
use crate::vector::{Point, Vector};

/// `T(x) = x / |x|^2`.
pub fn kelvin_point(x: &Point) -> Result<Point> {
    let r2 = x.norm_sq();
    if r2 == 0.0 || !r2.is_finite() {
        return Err(Error::Singularity);
    }
    Ok(*x * (1.0 / r2))
}

/// `|xc|^{-(n-2)} phi(T xc)`.
#[derive(Clone)]
pub struct KelvinPotential<F> {
    inner: F,
}

pub fn kelvin_potential<F: HarmonicField>(f: F) -> KelvinPotential<F> {
    KelvinPotential { inner: f }
}

impl<F: HarmonicField> KelvinPotential<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: HarmonicField> HarmonicField for KelvinPotential<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, xc: &Point) -> Result<f64> {
        let n = self.dim() as i32;
        let x = kelvin_point(xc)?;
        let phi = self.inner.value(&x)?;
        Ok(phi * xc.norm().powi(2 - n))
    }

    fn gradient(&self, xc: &Point) -> Result<Vector> {
        let n = self.dim() as i32;
        let x = kelvin_point(xc)?;
        let phi = self.inner.value(&x)?;
        let g = self.inner.gradient(&x)?;
        let r2 = xc.norm_sq();
        let rn = r2.sqrt().powi(-n);
        let reflected = g - *xc * (2.0 * xc.dot(&g) / r2);
        Ok(*xc * ((2 - n) as f64 * rn * phi) + reflected * rn)
    }

    fn singularities(&self) -> Vec<Point> {
        let mut s = vec![Vector::zeros(self.dim())];
        for p in self.inner.singularities() {
            if let Ok(q) = kelvin_point(&p) {
                s.push(q);
            }
        }
        s
    }
}

/// `n - 2 (n . x) x / |x|^2`, a reflection of the unit normal `n`.
pub fn transformed_normal(x: &Point, normal: &Vector) -> Result<Vector> {
    let len = normal.norm();
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitNormal(len));
    }
    let r2 = x.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(*normal - *x * (2.0 * normal.dot(x) / r2))
}

/// Robin coefficients `(alpha, h) = (-(n-2) x . n, |x|^n c . n)` at the
/// physical point `x` with unit normal `n`.
pub fn robin_coefficients(x: &Point, normal: &Vector, params: &WaveParams) -> Result<(f64, f64)> {
    let n = params.n();
    x.check_dim(n)?;
    normal.check_dim(n)?;
    let len = normal.norm();
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitNormal(len));
    }
    let alpha = -((n - 2) as f64) * x.dot(normal);
    let h = x.norm().powi(n as i32) * params.c().dot(normal);
    Ok((alpha, h))
}

const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_ITERS: usize = 100;

/// The image `T(S)` of a free surface near the origin, as a graph
/// `yc = f(xc')` over the disc `|xc'| < delta`.
#[derive(Clone)]
pub struct TransformedSurface {
    surface: Arc<dyn Surface>,
    delta: f64,
}

/// Builds the transformed patch and checks that the inversion converges on
/// its rim where the surface data allow it.
pub fn transformed_surface(eta: Arc<dyn Surface>, delta: f64) -> Result<TransformedSurface> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "patch radius must lie in (0, 1), got {delta}"
        )));
    }
    let ts = TransformedSurface {
        surface: eta,
        delta,
    };
    let m = ts.horizontal_dim();
    for i in 0..m {
        for sgn in [-1.0, 1.0] {
            let xh = Vector::unit(m, i) * (sgn * 0.999 * delta);
            match ts.preimage(&xh) {
                Ok(_) | Err(Error::RadiusBeyondData { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ts)
}

impl TransformedSurface {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn surface(&self) -> &Arc<dyn Surface> {
        &self.surface
    }

    fn horizontal_dim(&self) -> usize {
        self.surface.dim() - 1
    }

    /// Solves `xc' = xb' / (1 + |xb'|^2 eta^2(xb'/|xb'|^2))` for the
    /// intermediate variable `xb'` by fixed-point iteration. Returns
    /// `(xb', eta at the physical preimage)`.
    pub fn preimage(&self, xh: &Vector) -> Result<(Vector, f64)> {
        xh.check_dim(self.horizontal_dim())?;
        let r = xh.norm();
        if r >= self.delta {
            return Err(Error::OffPatch);
        }
        if r == 0.0 {
            return Ok((*xh, 0.0));
        }
        let mut xb = *xh;
        for _ in 0..FIXED_POINT_ITERS {
            let b2 = xb.norm_sq();
            let eta = self.surface.eta(&(xb * (1.0 / b2)))?;
            let next = *xh * (1.0 + b2 * eta * eta);
            let step = (next - xb).norm();
            xb = next;
            if step <= FIXED_POINT_TOL * r {
                let b2 = xb.norm_sq();
                let eta = self.surface.eta(&(xb * (1.0 / b2)))?;
                return Ok((xb, eta));
            }
        }
        Err(Error::NoConvergence {
            what: "surface inversion (reduce the patch radius)",
            iterations: FIXED_POINT_ITERS,
        })
    }

    /// `f(xc')`.
    pub fn f(&self, xh: &Vector) -> Result<f64> {
        let (xb, eta) = self.preimage(xh)?;
        let b2 = xb.norm_sq();
        Ok(b2 * eta / (1.0 + b2 * eta * eta))
    }

    /// The point `(xc', f(xc'))` of the transformed surface.
    pub fn point(&self, xh: &Vector) -> Result<Point> {
        Ok(Vector::from_horizontal(xh, self.f(xh)?))
    }

    /// Physical point `T(xc)` on `S` together with its upward unit normal.
    pub fn physical(&self, xh: &Vector) -> Result<(Point, Vector)> {
        let (xb, _) = self.preimage(xh)?;
        if xb.norm_sq() == 0.0 {
            return Err(Error::Singularity);
        }
        let xp = xb * (1.0 / xb.norm_sq());
        Ok((self.surface.point(&xp)?, self.surface.normal(&xp)?))
    }

    fn on_patch(&self, xc: &Point) -> Result<Vector> {
        let xh = xc.horizontal();
        if xh.norm() >= self.delta {
            return Err(Error::OffPatch);
        }
        let f = self.f(&xh)?;
        if (xc.vertical_part() - f).abs() > 1e-9 * xc.norm().max(1e-3) {
            return Err(Error::OffPatch);
        }
        Ok(xh)
    }
}

/// Coefficients of the transformed kinematic condition on a patch, with the
/// orientation sign fixed so that the reflected normal is taken outward.
#[derive(Clone)]
pub struct RobinData {
    params: WaveParams,
    /// `+1` when `n - 2 (n.x) x/|x|^2` points out of the transformed fluid.
    pub sign: f64,
}

impl RobinData {
    /// Determines the orientation by an interior-point test at a point of
    /// the patch rim.
    pub fn new(surf: &TransformedSurface, params: &WaveParams) -> Result<RobinData> {
        if params.n() != surf.surface.dim() {
            return Err(Error::DimensionMismatch {
                expected: params.n(),
                found: surf.surface.dim(),
            });
        }
        let m = surf.horizontal_dim();
        let mut probe = None;
        for frac in [0.5, 0.25, 0.9] {
            let xh = Vector::unit(m, 0) * (frac * surf.delta);
            if let Ok(p) = surf.point(&xh) {
                probe = Some(p);
                break;
            }
        }
        let xc = probe.ok_or(Error::OffPatch)?;
        let (x, normal) = surf.physical(&xc.horizontal())?;
        let nc = transformed_normal(&x, &normal)?;
        let t = 1e-6 * xc.norm();
        let back = kelvin_point(&(xc + nc * t))?;
        let inside = surf.surface.contains(&back)?;
        Ok(RobinData {
            params: *params,
            sign: if inside { -1.0 } else { 1.0 },
        })
    }

    /// `alpha` at the patch point over `xc'`; zero at the origin.
    pub fn alpha(&self, surf: &TransformedSurface, xh: &Vector) -> Result<f64> {
        if xh.norm() == 0.0 {
            return Ok(0.0);
        }
        let (x, normal) = surf.physical(xh)?;
        Ok(robin_coefficients(&x, &normal, &self.params)?.0)
    }

    /// `h` at the patch point over `xc'`; zero at the origin.
    pub fn source(&self, surf: &TransformedSurface, xh: &Vector) -> Result<f64> {
        if xh.norm() == 0.0 {
            return Ok(0.0);
        }
        let (x, normal) = surf.physical(xh)?;
        Ok(robin_coefficients(&x, &normal, &self.params)?.1)
    }
}

/// `|d phi_c / d n_out + s (alpha phi_c - h)|` at a point `xc` of the patch.
pub fn robin_residual(
    phi_check: &dyn HarmonicField,
    surf: &TransformedSurface,
    data: &RobinData,
    xc: &Point,
) -> Result<f64> {
    let xh = surf.on_patch(xc)?;
    if xc.norm() == 0.0 {
        return Err(Error::Singularity);
    }
    let (x, normal) = surf.physical(&xh)?;
    let nc = transformed_normal(&x, &normal)?;
    let (alpha, h) = robin_coefficients(&x, &normal, &data.params)?;
    let outward = data.sign * phi_check.gradient(xc)?.dot(&nc);
    let value = if alpha == 0.0 {
        0.0
    } else {
        phi_check.value(xc)?
    };
    Ok((outward + data.sign * (alpha * value - h)).abs())
}

/// Nuisance terms fitted next to the linear part of the transformed
/// potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KelvinBasis {
    /// `b . xc` only.
    Linear,
    /// `b . xc` plus all harmonic quadratics.
    Quadratic,
    /// Planar fields of a periodic row of dipoles and quadrupoles, pulled
    /// back through the inversion; the constant is fitted as well.
    Periodic { period: f64 },
}

/// Least-squares extraction of `grad phi_c(0)`.
#[derive(Clone, Debug)]
pub struct KelvinFit {
    pub radii: Vec<f64>,
    /// Samples per radius (per ring in three dimensions).
    pub angles: usize,
    /// Angular margin kept away from the horizontal plane.
    pub margin: f64,
    /// Restrict samples to the lower half-space (the fluid side).
    pub lower_only: bool,
    pub basis: KelvinBasis,
}

impl KelvinFit {
    pub fn new(radii: Vec<f64>) -> Self {
        KelvinFit {
            radii,
            angles: 15,
            margin: 0.05,
            lower_only: true,
            basis: KelvinBasis::Quadratic,
        }
    }

    fn samples(&self, n: usize) -> Vec<Point> {
        let mut pts = Vec::new();
        let (lo, hi) = if self.lower_only {
            (-PI + self.margin, -self.margin)
        } else {
            (-PI, PI)
        };
        let m = self.angles.max(2);
        for &r in &self.radii {
            if n == 2 {
                for j in 0..m {
                    let th = if self.lower_only {
                        lo + (hi - lo) * j as f64 / (m - 1) as f64
                    } else {
                        lo + (hi - lo) * (j as f64 + 0.5) / m as f64
                    };
                    pts.push(Vector::new2(r * th.cos(), r * th.sin()));
                }
            } else {
                // Rings of constant polar angle measured from the downward axis.
                let top = if self.lower_only {
                    PI / 2.0 - self.margin
                } else {
                    PI - self.margin
                };
                for i in 0..m {
                    let pol = self.margin + (top - self.margin) * i as f64 / (m - 1) as f64;
                    let count = m.max(4);
                    for j in 0..count {
                        let az = 2.0 * PI * (j as f64 + 0.5 * (i % 2) as f64) / count as f64;
                        pts.push(Vector::new3(
                            r * pol.sin() * az.cos(),
                            r * pol.sin() * az.sin(),
                            -r * pol.cos(),
                        ));
                    }
                }
            }
        }
        pts
    }

    fn basis_row(&self, xc: &Point) -> Result<Vec<f64>> {
        let n = xc.dim();
        let mut row: Vec<f64> = Vec::new();
        match self.basis {
            KelvinBasis::Linear => row.extend_from_slice(xc.as_slice()),
            KelvinBasis::Quadratic => {
                row.extend_from_slice(xc.as_slice());
                for q in HarmonicQuadratic::basis(n) {
                    row.push(q.value(xc)?);
                }
            }
            KelvinBasis::Periodic { period } => {
                if n != 2 {
                    return Err(Error::UnsupportedDimension(n));
                }
                let x = kelvin_point(xc)?;
                for a in [Vector::new2(1.0, 0.0), Vector::new2(0.0, 1.0)] {
                    row.push(PeriodicDipole { moment: a, period }.value(&x)?);
                }
                for b in [Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)] {
                    row.push(
                        PeriodicQuadrupole {
                            b,
                            period: Some(period),
                        }
                        .value(&x)?,
                    );
                }
                row.push(1.0);
            }
        }
        Ok(row)
    }

    /// Fits `phi_c` and reports its gradient at the origin.
    pub fn fit(&self, phi_check: &dyn HarmonicField) -> Result<DipoleEstimate> {
        use rayon::prelude::*;
        let n = phi_check.dim();
        let pts = self.samples(n);
        let evaluated: Vec<(Vec<f64>, f64, f64)> = pts
            .par_iter()
            .map(|p| Ok((self.basis_row(p)?, phi_check.value(p)?, 1.0 / p.norm())))
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<f64>> = evaluated.iter().map(|e| e.0.clone()).collect();
        let rhs: Vec<f64> = evaluated.iter().map(|e| e.1).collect();
        let w: Vec<f64> = evaluated.iter().map(|e| e.2).collect();
        if rhs.iter().all(|v| *v == 0.0) {
            return Ok(DipoleEstimate::new(Vector::zeros(n), Method::Kelvin, 0.0));
        }
        let fit = weighted_lstsq(&rows, &rhs, &w)?;
        let a = Vector::from_slice(&fit.coef[..n]);
        Ok(DipoleEstimate::new(a, Method::Kelvin, fit.rms))
    }
}

/// Linear fit of `phi_c` near the origin over samples at `fit_radii`.
pub fn extract_dipole_kelvin(
    phi_check: &dyn HarmonicField,
    fit_radii: &[f64],
) -> Result<DipoleEstimate> {
    KelvinFit::new(fit_radii.to_vec()).fit(phi_check)
}
