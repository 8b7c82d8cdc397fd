//! Analytic harmonic fields with exact gradients, and the finite-difference
//! probes used to test them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vector::{Point, Vector};

/// Distance below which a point is treated as sitting on a singularity.
const SINGULAR_RADIUS: f64 = 1e-300;

/// A scalar potential that can be evaluated with its gradient.
pub trait HarmonicField: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Point) -> Result<f64>;
    fn gradient(&self, x: &Point) -> Result<Vector>;
    /// Points where evaluation is forbidden.
    fn singularities(&self) -> Vec<Point> {
        Vec::new()
    }
}

impl<T: HarmonicField + ?Sized> HarmonicField for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &Point) -> Result<f64> {
        (**self).value(x)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        (**self).gradient(x)
    }
    fn singularities(&self) -> Vec<Point> {
        (**self).singularities()
    }
}

impl<T: HarmonicField + ?Sized> HarmonicField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &Point) -> Result<f64> {
        (**self).value(x)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        (**self).gradient(x)
    }
    fn singularities(&self) -> Vec<Point> {
        (**self).singularities()
    }
}

/// `a . x / |x|^n`.
pub fn dipole_value(a: &Vector, x: &Point, n: usize) -> Result<f64> {
    x.check_dim(n)?;
    a.check_dim(n)?;
    let r2 = x.norm_sq();
    if r2.sqrt() <= SINGULAR_RADIUS {
        return Err(Error::Singularity);
    }
    Ok(a.dot(x) / r2.powf(n as f64 / 2.0))
}

/// `a / |x|^n - n (a . x) x / |x|^{n+2}`.
pub fn dipole_gradient(a: &Vector, x: &Point, n: usize) -> Result<Vector> {
    x.check_dim(n)?;
    a.check_dim(n)?;
    let r2 = x.norm_sq();
    if r2.sqrt() <= SINGULAR_RADIUS {
        return Err(Error::Singularity);
    }
    let rn = r2.powf(n as f64 / 2.0);
    Ok(*a * (1.0 / rn) - *x * (n as f64 * a.dot(x) / (rn * r2)))
}

/// Dipole of moment `a` centred at `center`.
#[derive(Clone, Debug)]
pub struct Dipole {
    pub moment: Vector,
    pub center: Point,
}

impl Dipole {
    pub fn new(moment: Vector) -> Self {
        let center = Vector::zeros(moment.dim());
        Dipole { moment, center }
    }

    pub fn at(moment: Vector, center: Point) -> Self {
        assert_eq!(moment.dim(), center.dim());
        Dipole { moment, center }
    }
}

impl HarmonicField for Dipole {
    fn dim(&self) -> usize {
        self.moment.dim()
    }
    fn value(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim())?;
        dipole_value(&self.moment, &(*x - self.center), self.dim())
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        x.check_dim(self.dim())?;
        dipole_gradient(&self.moment, &(*x - self.center), self.dim())
    }
    fn singularities(&self) -> Vec<Point> {
        vec![self.center]
    }
}

/// Horizontal dipole at the origin, restricted to `{y < 0}`. Its vertical
/// derivative vanishes on `{y = 0}` away from the origin.
pub fn boundary_compatible_field(a: &Vector, n: usize) -> Result<Dipole> {
    a.check_dim(n)?;
    if a.vertical_part() != 0.0 {
        return Err(Error::VerticalMoment(a.vertical_part()));
    }
    Ok(Dipole::new(*a))
}

/// Point source `|x - x0|^{2-n}` (`-log|x - x0|` in the plane).
#[derive(Clone, Debug)]
pub struct Source {
    pub strength: f64,
    pub center: Point,
}

impl HarmonicField for Source {
    fn dim(&self) -> usize {
        self.center.dim()
    }
    fn value(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim())?;
        let r = (*x - self.center).norm();
        if r <= SINGULAR_RADIUS {
            return Err(Error::Singularity);
        }
        Ok(match self.dim() {
            2 => -self.strength * r.ln(),
            _ => self.strength / r.powi(self.dim() as i32 - 2),
        })
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        x.check_dim(self.dim())?;
        let d = *x - self.center;
        let r = d.norm();
        if r <= SINGULAR_RADIUS {
            return Err(Error::Singularity);
        }
        let n = self.dim() as i32;
        let k = if n == 2 { -1.0 } else { -(n as f64 - 2.0) };
        Ok(d * (self.strength * k / r.powi(n)))
    }
    fn singularities(&self) -> Vec<Point> {
        vec![self.center]
    }
}

/// Harmonic quadratic `x^T Q x` with a symmetric trace-free `Q`.
#[derive(Clone, Debug)]
pub struct HarmonicQuadratic {
    q: [[f64; 3]; 3],
    dim: usize,
}

impl HarmonicQuadratic {
    /// Builds from a symmetric matrix after removing its trace.
    pub fn new(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let mut q = [[0.0; 3]; 3];
        for i in 0..dim {
            for j in 0..dim {
                q[i][j] = 0.5 * (entries[i * dim + j] + entries[j * dim + i]);
            }
        }
        let tr = (0..dim).map(|i| q[i][i]).sum::<f64>() / dim as f64;
        for (i, row) in q.iter_mut().enumerate().take(dim) {
            row[i] -= tr;
        }
        HarmonicQuadratic { q, dim }
    }

    /// A basis of the harmonic quadratics in `dim` variables.
    pub fn basis(dim: usize) -> Vec<HarmonicQuadratic> {
        let mut out = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let mut e = vec![0.0; dim * dim];
                e[i * dim + j] = 1.0;
                e[j * dim + i] = 1.0;
                out.push(HarmonicQuadratic::new(dim, &e));
            }
        }
        for i in 0..dim - 1 {
            let mut e = vec![0.0; dim * dim];
            e[i * dim + i] = 1.0;
            e[(dim - 1) * dim + dim - 1] = -1.0;
            out.push(HarmonicQuadratic::new(dim, &e));
        }
        out
    }
}

impl HarmonicField for HarmonicQuadratic {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim)?;
        let g = self.gradient(x)?;
        Ok(0.5 * g.dot(x))
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        x.check_dim(self.dim)?;
        let mut g = Vector::zeros(self.dim);
        for i in 0..self.dim {
            g[i] = 2.0 * (0..self.dim).map(|j| self.q[i][j] * x[j]).sum::<f64>();
        }
        Ok(g)
    }
}

/// `b . x + b0`.
#[derive(Clone, Debug)]
pub struct Linear {
    pub slope: Vector,
    pub offset: f64,
}

impl HarmonicField for Linear {
    fn dim(&self) -> usize {
        self.slope.dim()
    }
    fn value(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(self.slope.dot(x) + self.offset)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.slope)
    }
}

/// Constant field.
#[derive(Clone, Debug)]
pub struct Constant {
    pub value: f64,
    pub dim: usize,
}

impl HarmonicField for Constant {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok(self.value)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        x.check_dim(self.dim)?;
        Ok(Vector::zeros(self.dim))
    }
}

/// `|x|^2`, which is not harmonic. Used as a negative control.
#[derive(Clone, Debug)]
pub struct SquaredNorm {
    pub dim: usize,
}

impl HarmonicField for SquaredNorm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok(x.norm_sq())
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        x.check_dim(self.dim)?;
        Ok(*x * 2.0)
    }
}

/// Weighted sum of fields.
#[derive(Clone)]
pub struct Superposition {
    terms: Vec<(f64, Arc<dyn HarmonicField>)>,
    dim: usize,
}

pub fn superpose(fields: Vec<(f64, Arc<dyn HarmonicField>)>) -> Result<Superposition> {
    let dim = fields.first().ok_or(Error::EmptySuperposition)?.1.dim();
    for (_, f) in &fields {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
    }
    Ok(Superposition { terms: fields, dim })
}

impl HarmonicField for Superposition {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Point) -> Result<f64> {
        let mut v = 0.0;
        for (w, f) in &self.terms {
            v += w * f.value(x)?;
        }
        Ok(v)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        let mut g = Vector::zeros(self.dim);
        for (w, f) in &self.terms {
            g += f.gradient(x)? * *w;
        }
        Ok(g)
    }
    fn singularities(&self) -> Vec<Point> {
        self.terms
            .iter()
            .flat_map(|(_, f)| f.singularities())
            .collect()
    }
}

fn check_stencil(f: &dyn HarmonicField, x: &Point, h: f64) -> Result<()> {
    x.check_dim(f.dim())?;
    let reach = 1.5 * h;
    if f.singularities()
        .iter()
        .any(|s| (*x - *s).max_abs() <= reach)
    {
        return Err(Error::StencilHitsSingularity);
    }
    Ok(())
}

/// Centred second-order Laplacian of `f.value` with step `h`.
pub fn laplacian_residual(f: &dyn HarmonicField, x: &Point, h: f64) -> Result<f64> {
    check_stencil(f, x, h)?;
    let n = f.dim();
    let centre = f.value(x)?;
    let mut acc = 0.0;
    for i in 0..n {
        let e = Vector::unit(n, i) * h;
        acc += f.value(&(*x + e))? - 2.0 * centre + f.value(&(*x - e))?;
    }
    Ok(acc / (h * h))
}

/// Centred finite-difference gradient of `f.value`.
pub fn fd_gradient(f: &dyn HarmonicField, x: &Point, h: f64) -> Result<Vector> {
    check_stencil(f, x, h)?;
    let n = f.dim();
    let mut g = Vector::zeros(n);
    for i in 0..n {
        let e = Vector::unit(n, i) * h;
        g[i] = (f.value(&(*x + e))? - f.value(&(*x - e))?) / (2.0 * h);
    }
    Ok(g)
}

/// Centred finite-difference divergence of a vector field.
pub fn fd_divergence(v: &dyn Fn(&Point) -> Result<Vector>, x: &Point, h: f64) -> Result<f64> {
    let n = x.dim();
    let mut acc = 0.0;
    for i in 0..n {
        let e = Vector::unit(n, i) * h;
        acc += (v(&(*x + e))?[i] - v(&(*x - e))?[i]) / (2.0 * h);
    }
    Ok(acc)
}

/// Planar curl `d v_2/dx_1 - d v_1/dx_2` of a vector field by centred differences.
pub fn fd_curl2(v: &dyn Fn(&Point) -> Result<Vector>, x: &Point, h: f64) -> Result<f64> {
    let ex = Vector::unit(2, 0) * h;
    let ey = Vector::unit(2, 1) * h;
    let dv2 = (v(&(*x + ex))?[1] - v(&(*x - ex))?[1]) / (2.0 * h);
    let dv1 = (v(&(*x + ey))?[0] - v(&(*x - ey))?[0]) / (2.0 * h);
    Ok(dv2 - dv1)
}
