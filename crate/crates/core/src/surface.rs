//! Free-surface graphs `y = eta(x')`, analytic or sampled.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vector::{Point, Vector};

/// A free surface given as a graph over the horizontal coordinates.
pub trait Surface: Send + Sync {
    /// Ambient dimension `n`; the graph is over `n - 1` variables.
    fn dim(&self) -> usize;
    fn eta(&self, xh: &Vector) -> Result<f64>;
    fn grad(&self, xh: &Vector) -> Result<Vector>;
    /// Horizontal radius inside which the surface is known.
    fn extent(&self) -> f64 {
        f64::INFINITY
    }
    /// Horizontal period for surfaces that come from a periodic box.
    fn period(&self) -> Option<f64> {
        None
    }

    /// Upward unit normal `(-grad eta, 1) / sqrt(1 + |grad eta|^2)`.
    fn normal(&self, xh: &Vector) -> Result<Vector> {
        let g = self.grad(xh)?;
        let s = (1.0 + g.norm_sq()).sqrt();
        Ok(Vector::from_horizontal(&(g * (-1.0 / s)), 1.0 / s))
    }

    /// Area element `sqrt(1 + |grad eta|^2)`.
    fn area_factor(&self, xh: &Vector) -> Result<f64> {
        Ok((1.0 + self.grad(xh)?.norm_sq()).sqrt())
    }

    fn point(&self, xh: &Vector) -> Result<Point> {
        Ok(Vector::from_horizontal(xh, self.eta(xh)?))
    }

    /// True when `x` lies strictly inside the fluid `{y < eta(x')}`.
    fn contains(&self, x: &Point) -> Result<bool> {
        Ok(x.vertical_part() < self.eta(&x.horizontal())?)
    }
}

impl<T: Surface + ?Sized> Surface for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eta(&self, xh: &Vector) -> Result<f64> {
        (**self).eta(xh)
    }
    fn grad(&self, xh: &Vector) -> Result<Vector> {
        (**self).grad(xh)
    }
    fn extent(&self) -> f64 {
        (**self).extent()
    }
    fn period(&self) -> Option<f64> {
        (**self).period()
    }
}

impl<T: Surface + ?Sized> Surface for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eta(&self, xh: &Vector) -> Result<f64> {
        (**self).eta(xh)
    }
    fn grad(&self, xh: &Vector) -> Result<Vector> {
        (**self).grad(xh)
    }
    fn extent(&self) -> f64 {
        (**self).extent()
    }
    fn period(&self) -> Option<f64> {
        (**self).period()
    }
}

/// The undisturbed surface `eta = 0`.
#[derive(Clone, Copy, Debug)]
pub struct FlatSurface {
    pub dim: usize,
}

impl Surface for FlatSurface {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eta(&self, xh: &Vector) -> Result<f64> {
        xh.check_dim(self.dim - 1)?;
        Ok(0.0)
    }
    fn grad(&self, xh: &Vector) -> Result<Vector> {
        xh.check_dim(self.dim - 1)?;
        Ok(Vector::zeros(self.dim - 1))
    }
}

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radially symmetric analytic surface `eta = f(|x'|)` with `f'` given.
#[derive(Clone)]
pub struct RadialSurface {
    dim: usize,
    f: RadialFn,
    df: RadialFn,
}

impl RadialSurface {
    pub fn new(
        dim: usize,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        RadialSurface {
            dim,
            f: Arc::new(f),
            df: Arc::new(df),
        }
    }

    /// `eta = amp / (1 + |x'|^2)^{p/2}`, decaying like `|x'|^{-p}`.
    pub fn algebraic(dim: usize, amp: f64, p: f64) -> Self {
        RadialSurface::new(
            dim,
            move |r| amp * (1.0 + r * r).powf(-p / 2.0),
            move |r| -amp * p * r * (1.0 + r * r).powf(-p / 2.0 - 1.0),
        )
    }
}

impl Surface for RadialSurface {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eta(&self, xh: &Vector) -> Result<f64> {
        xh.check_dim(self.dim - 1)?;
        Ok((self.f)(xh.norm()))
    }
    fn grad(&self, xh: &Vector) -> Result<Vector> {
        xh.check_dim(self.dim - 1)?;
        let r = xh.norm();
        if r == 0.0 {
            return Ok(Vector::zeros(self.dim - 1));
        }
        Ok(*xh * ((self.df)(r) / r))
    }
}

type GraphFn = Arc<dyn Fn(&Vector) -> (f64, Vector) + Send + Sync>;

/// General analytic surface from a closure returning `(eta, grad eta)`.
#[derive(Clone)]
pub struct AnalyticSurface {
    dim: usize,
    f: GraphFn,
}

impl AnalyticSurface {
    pub fn new(dim: usize, f: impl Fn(&Vector) -> (f64, Vector) + Send + Sync + 'static) -> Self {
        AnalyticSurface {
            dim,
            f: Arc::new(f),
        }
    }
}

impl Surface for AnalyticSurface {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eta(&self, xh: &Vector) -> Result<f64> {
        xh.check_dim(self.dim - 1)?;
        Ok((self.f)(xh).0)
    }
    fn grad(&self, xh: &Vector) -> Result<Vector> {
        xh.check_dim(self.dim - 1)?;
        Ok((self.f)(xh).1)
    }
}

/// A planar surface (`n = 2`) sampled on a uniform grid with first and
/// second derivatives. Between nodes it is evaluated by cubic Hermite
/// interpolation of value and slope.
#[derive(Clone, Debug)]
pub struct SurfaceGraph {
    x0: f64,
    dx: f64,
    eta: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    period: Option<f64>,
}

impl SurfaceGraph {
    /// Samples `f(x) = (eta, eta', eta'')` at `count` nodes on `[lo, hi]`.
    pub fn sample(
        lo: f64,
        hi: f64,
        count: usize,
        f: impl Fn(f64) -> Result<(f64, f64, f64)> + Sync,
    ) -> Result<SurfaceGraph> {
        use rayon::prelude::*;
        if count < 4 || !(hi > lo) {
            return Err(Error::InvalidConfig(
                "surface sampling needs hi > lo and at least 4 nodes".into(),
            ));
        }
        let dx = (hi - lo) / (count - 1) as f64;
        let vals: Vec<(f64, f64, f64)> = (0..count)
            .into_par_iter()
            .map(|i| f(lo + i as f64 * dx))
            .collect::<Result<_>>()?;
        let mut g = SurfaceGraph {
            x0: lo,
            dx,
            eta: Vec::with_capacity(count),
            d1: Vec::with_capacity(count),
            d2: Vec::with_capacity(count),
            period: None,
        };
        for (e, d, dd) in vals {
            if !(e.is_finite() && d.is_finite() && dd.is_finite()) {
                return Err(Error::InvalidConfig("non-finite surface sample".into()));
            }
            g.eta.push(e);
            g.d1.push(d);
            g.d2.push(dd);
        }
        Ok(g)
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn without_period(mut self) -> Self {
        self.period = None;
        self
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    pub fn lo(&self) -> f64 {
        self.x0
    }

    pub fn hi(&self) -> f64 {
        self.x0 + self.dx * (self.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn values(&self) -> &[f64] {
        &self.eta
    }

    pub fn slopes(&self) -> &[f64] {
        &self.d1
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.d2
    }

    /// Nodes with `lo <= |x| <= hi`, as `(x, eta)` pairs.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
        let extent = self.extent();
        if hi > extent || lo < 0.0 || !(hi > lo) {
            return Err(Error::WindowOutsideData { lo, hi, extent });
        }
        Ok((0..self.len())
            .map(|i| (self.node(i), self.eta[i]))
            .filter(|(x, _)| x.abs() >= lo && x.abs() <= hi)
            .collect())
    }

    /// Largest mismatch between the stored derivatives and centred
    /// differences of the neighbouring samples, scaled by `dx^2`.
    pub fn derivative_consistency(&self) -> f64 {
        let h = self.dx;
        let mut worst: f64 = 0.0;
        for i in 1..self.len() - 1 {
            let fd1 = (self.eta[i + 1] - self.eta[i - 1]) / (2.0 * h);
            let fd2 = (self.d1[i + 1] - self.d1[i - 1]) / (2.0 * h);
            worst = worst
                .max((fd1 - self.d1[i]).abs())
                .max((fd2 - self.d2[i]).abs());
        }
        worst / (h * h)
    }

    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let t = (x - self.x0) / self.dx;
        let last = self.len() - 1;
        if !(t >= -1e-9 && t <= last as f64 + 1e-9) {
            return Err(Error::RadiusBeyondData {
                radius: x.abs(),
                extent: self.extent(),
            });
        }
        let i = (t.floor() as isize).clamp(0, last as isize - 1) as usize;
        Ok((i, t - i as f64))
    }

    /// Hermite value and slope at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let (i, t) = self.locate(x)?;
        let h = self.dx;
        let (p0, p1, m0, m1) = (
            self.eta[i],
            self.eta[i + 1],
            self.d1[i] * h,
            self.d1[i + 1] * h,
        );
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        let d = (6.0 * t2 - 6.0 * t) * p0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * p1
            + (3.0 * t2 - 2.0 * t) * m1;
        Ok((v, d / h))
    }
}

impl Surface for SurfaceGraph {
    fn dim(&self) -> usize {
        2
    }
    fn eta(&self, xh: &Vector) -> Result<f64> {
        xh.check_dim(1)?;
        Ok(self.eval(xh[0])?.0)
    }
    fn grad(&self, xh: &Vector) -> Result<Vector> {
        xh.check_dim(1)?;
        Ok(Vector::from_slice(&[self.eval(xh[0])?.1]))
    }
    fn extent(&self) -> f64 {
        self.x0.abs().min(self.hi().abs())
    }
    fn period(&self) -> Option<f64> {
        self.period
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_normal_is_vertical() {
        let s = FlatSurface { dim: 3 };
        let n = s.normal(&Vector::new2(1.0, 2.0)).unwrap();
        assert_eq!(n.as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn normal_is_unit_and_upward() {
        let s = RadialSurface::algebraic(3, 0.7, 2.0);
        let xh = Vector::new2(0.4, -0.9);
        let n = s.normal(&xh).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-15);
        assert!(n[2] > 0.0);
    }

    #[test]
    fn hermite_interpolation_is_fourth_order() {
        let f = |x: f64| {
            Ok((
                (0.3 * x).sin(),
                0.3 * (0.3 * x).cos(),
                -0.09 * (0.3 * x).sin(),
            ))
        };
        let g1 = SurfaceGraph::sample(-10.0, 10.0, 101, f).unwrap();
        let g2 = SurfaceGraph::sample(-10.0, 10.0, 201, f).unwrap();
        let err = |g: &SurfaceGraph| {
            (0..57)
                .map(|i| -9.9 + 0.347 * i as f64)
                .fold(0.0f64, |m, x| {
                    m.max((g.eval(x).unwrap().0 - (0.3 * x).sin()).abs())
                })
        };
        let ratio = err(&g1) / err(&g2);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
        assert!(g1.derivative_consistency() < 0.1);
    }

    #[test]
    fn window_and_extent() {
        let g = SurfaceGraph::sample(-5.0, 5.0, 11, |x| Ok((x, 1.0, 0.0))).unwrap();
        assert_eq!(g.extent(), 5.0);
        let w = g.window(2.0, 4.0).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(g.window(2.0, 6.0).unwrap_err().code(), "E_WINDOW");
        assert_eq!(g.eval(7.0).unwrap_err().code(), "E_RADIUS");
    }
}
