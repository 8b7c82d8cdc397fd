//! Far-field decay of the elevation and dipole moments read off from it.
//!
//! Away from the core `eta ~ (c.a - n (c.x')(a.x')/|x'|^2) / (g |x'|^n)`,
//! so a planar tail is `C/x^2` with `C = -c a_1 / g`.

use std::f64::consts::PI;

use crate::dipole::{DipoleEstimate, Method};
use crate::error::{Error, Result};
use crate::fit::weighted_lstsq;
use crate::images::{inverse_square_images, lattice_sum};
use crate::oracle::{dipole_gradient, dipole_value};
use crate::params::WaveParams;
use crate::surface::{Surface, SurfaceGraph};
use crate::vector::{Point, Vector};

/// Far-field elevation at horizontal position `xh` for the moment `a`.
pub fn eta_tail_model(xh: &Vector, a: &Vector, params: &WaveParams) -> Result<f64> {
    let n = params.n();
    xh.check_dim(n - 1)?;
    a.check_dim(n)?;
    let r2 = xh.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Singularity);
    }
    let c = params.c().horizontal();
    let ah = a.horizontal();
    let r = r2.sqrt();
    let ca = c.dot(&ah);
    Ok((ca - n as f64 * c.dot(xh) * ah.dot(xh) / r2) / (params.g() * r.powi(n as i32)))
}

/// Far-field potential `a.x/|x|^n` and its gradient.
pub fn phi_farfield_model(x: &Point, a: &Vector) -> Result<(f64, Vector)> {
    Ok((
        dipole_value(a, x, a.dim())?,
        dipole_gradient(a, x, a.dim())?,
    ))
}

/// Power-law fit `eta ~ coefficient / |x|^exponent` over `lo <= |x| <= hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub window: (f64, f64),
    /// RMS misfit of `log|eta|`.
    pub log_rms: f64,
    pub samples: usize,
    /// Whether the periodic images were part of the model.
    pub images: bool,
}

fn window_samples(eta: &SurfaceGraph, window: (f64, f64)) -> Result<(Vec<(f64, f64)>, f64)> {
    let pts = eta.window(window.0, window.1)?;
    if pts.len() < 4 {
        return Err(Error::DegenerateFit);
    }
    let sign = pts[0].1.signum();
    if let Some((x, _)) = pts.iter().find(|(_, v)| *v == 0.0 || v.signum() != sign) {
        return Err(Error::SignChange(*x));
    }
    Ok((pts, sign))
}

/// Misfit of `log|eta| = b + log S(x)` after eliminating `b`.
fn log_misfit(pts: &[(f64, f64)], kernel: impl Fn(f64) -> f64) -> (f64, f64) {
    let d: Vec<f64> = pts
        .iter()
        .map(|(x, v)| v.abs().ln() - kernel(*x).ln())
        .collect();
    let b = d.iter().sum::<f64>() / d.len() as f64;
    let rms = (d.iter().map(|v| (v - b).powi(2)).sum::<f64>() / d.len() as f64).sqrt();
    (b, rms)
}

/// Fits the decay exponent over the window. A graph with a period is fitted
/// against the lattice sum of `|x|^{-p}` over its images, otherwise a
/// straight line in log-log coordinates.
pub fn fit_decay_exponent(eta: &SurfaceGraph, window: (f64, f64)) -> Result<TailFit> {
    let (pts, sign) = window_samples(eta, window)?;
    let period = Surface::period(eta);
    let (exponent, b, rms) = match period {
        None => {
            let rows: Vec<Vec<f64>> = pts.iter().map(|(x, _)| vec![1.0, -x.abs().ln()]).collect();
            let rhs: Vec<f64> = pts.iter().map(|(_, v)| v.abs().ln()).collect();
            let fit = weighted_lstsq(&rows, &rhs, &vec![1.0; rows.len()])?;
            let p = fit.coef[1];
            let (b, rms) = log_misfit(&pts, |x| x.abs().powf(-p));
            (p, b, rms)
        }
        Some(per) => {
            let obj = |p: f64| log_misfit(&pts, |x| lattice_sum(p, x, per)).1;
            let p = golden_min(obj, 0.5, 6.0, 1e-10);
            let (b, rms) = log_misfit(&pts, |x| lattice_sum(p, x, per));
            (p, b, rms)
        }
    };
    Ok(TailFit {
        exponent,
        coefficient: sign * b.exp(),
        window,
        log_rms: rms,
        samples: pts.len(),
        images: period.is_some(),
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Least-squares coefficient `C` of `eta ~ C / x^2` (or its periodic sum)
/// over the window, with its standard error.
pub fn fit_inverse_square(eta: &SurfaceGraph, window: (f64, f64)) -> Result<(f64, f64)> {
    let pts = eta.window(window.0, window.1)?;
    if pts.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    let period = Surface::period(eta);
    let kern = |x: f64| match period {
        Some(p) => inverse_square_images(x, p),
        None => 1.0 / (x * x),
    };
    let kk: f64 = pts.iter().map(|(x, _)| kern(*x).powi(2)).sum();
    let ke: f64 = pts.iter().map(|(x, v)| kern(*x) * v).sum();
    let c = ke / kk;
    let ss: f64 = pts.iter().map(|(x, v)| (v - c * kern(*x)).powi(2)).sum();
    let dof = (pts.len() - 1).max(1) as f64;
    Ok((c, (ss / dof / kk).sqrt()))
}

/// Planar dipole moment from the tail coefficient, `a_1 = -g C / c_1`.
pub fn extract_dipole_tail(
    eta: &SurfaceGraph,
    params: &WaveParams,
    window: (f64, f64),
) -> Result<DipoleEstimate> {
    if params.n() != 2 {
        return Err(Error::UnsupportedDimension(params.n()));
    }
    let (coef, err) = fit_inverse_square(eta, window)?;
    let c1 = params.c()[0];
    let scale = params.g() / c1.abs();
    Ok(DipoleEstimate::new(
        Vector::new2(-params.g() * coef / c1, 0.0),
        Method::Tail,
        err * scale,
    ))
}

/// Horizontal dipole moment from a spatial tail: linear least squares for
/// `a'` in `g |x'|^3 eta = c.a - 3 (c.x^)(a.x^)` over `rings` circles in
/// the annulus.
pub fn extract_dipole_tail_3d(
    eta: &dyn Surface,
    params: &WaveParams,
    window: (f64, f64),
    rings: usize,
) -> Result<DipoleEstimate> {
    if params.n() != 3 {
        return Err(Error::UnsupportedDimension(params.n()));
    }
    if window.1 > eta.extent() || !(window.1 > window.0) || window.0 <= 0.0 {
        return Err(Error::WindowOutsideData {
            lo: window.0,
            hi: window.1,
            extent: eta.extent(),
        });
    }
    let c = params.c().horizontal();
    let per_ring = 32;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..rings.max(2) {
        let r = window.0 + (window.1 - window.0) * i as f64 / (rings.max(2) - 1) as f64;
        for j in 0..per_ring {
            let psi = 2.0 * PI * j as f64 / per_ring as f64;
            let u = Vector::new2(psi.cos(), psi.sin());
            let cu = c.dot(&u);
            rows.push(vec![c[0] - 3.0 * cu * u[0], c[1] - 3.0 * cu * u[1]]);
            rhs.push(params.g() * r.powi(3) * eta.eta(&(u * r))?);
        }
    }
    let fit = weighted_lstsq(&rows, &rhs, &vec![1.0; rows.len()])?;
    Ok(DipoleEstimate::new(
        Vector::new3(fit.coef[0], fit.coef[1], 0.0),
        Method::Tail,
        fit.rms,
    ))
}

/// Agreement between dipole estimates from different routes.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    /// Largest `|a_i - a_j| / max(|a_i|, |a_j|)` over all pairs, using only
    /// the component along `c` when either estimate lacks the transverse
    /// part.
    pub max_relative_deviation: f64,
    pub pairs: Vec<(Method, Method, f64)>,
    /// Every estimate has `c.a < 0`.
    pub drag_sign: bool,
    /// Every planar tail coefficient `-c.a/g` is positive.
    pub tail_positive: bool,
}

pub fn crosscheck_dipole(estimates: &[DipoleEstimate], c: &Vector) -> Result<CrossCheck> {
    if estimates.len() < 2 {
        return Err(Error::InvalidConfig(
            "cross-check needs at least two estimates".into(),
        ));
    }
    let n = c.dim();
    for e in estimates {
        e.a.check_dim(n)?;
    }
    let along = |a: &Vector| *c * (c.dot(a) / c.norm_sq());
    let mut pairs = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let (ei, ej) = (&estimates[i], &estimates[j]);
            let (ai, aj) = if ei.transverse_known && ej.transverse_known {
                (ei.a, ej.a)
            } else {
                (along(&ei.a), along(&ej.a))
            };
            let scale = ai.norm().max(aj.norm());
            let d = if scale == 0.0 {
                0.0
            } else {
                (ai - aj).norm() / scale
            };
            worst = worst.max(d);
            pairs.push((ei.method, ej.method, d));
        }
    }
    let drag_sign = estimates.iter().all(|e| c.dot(&e.a) < 0.0);
    Ok(CrossCheck {
        max_relative_deviation: worst,
        pairs,
        drag_sign,
        tail_positive: drag_sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;
    use crate::surface::AnalyticSurface;

    fn graph(f: impl Fn(f64) -> f64 + Sync, l: f64) -> SurfaceGraph {
        SurfaceGraph::sample(-l, l, 4001, |x| {
            let h = 1e-4;
            Ok((
                f(x),
                (f(x + h) - f(x - h)) / (2.0 * h),
                (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            ))
        })
        .unwrap()
    }

    #[test]
    fn planar_model_values() {
        let p = make_params(1.0, 1.0, &[1.0, 0.0], 2, 0.5).unwrap();
        let a = Vector::new2(-1.0, 0.0);
        let v = eta_tail_model(&Vector::from_slice(&[2.0]), &a, &p).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let v = eta_tail_model(&Vector::from_slice(&[-2.0]), &a, &p).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        assert!(eta_tail_model(&Vector::from_slice(&[0.0]), &a, &p).is_err());
    }

    #[test]
    fn spatial_angular_mean() {
        let p = make_params(1.0, 1.0, &[1.0, 0.0, 0.0], 3, 0.5).unwrap();
        let a = Vector::new3(-1.0, 0.0, 0.0);
        let m = 64;
        let r = 5.0;
        let mean: f64 = (0..m)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                eta_tail_model(&Vector::new2(r * t.cos(), r * t.sin()), &a, &p).unwrap()
            })
            .sum::<f64>()
            / m as f64;
        // (c.a - 3/2 c.a) / (g r^3)
        assert!((mean - 0.5 / r.powi(3)).abs() < 1e-15);
        // upstream and downstream are raised, the flanks depressed
        let up = eta_tail_model(&Vector::new2(r, 0.0), &a, &p).unwrap();
        let side = eta_tail_model(&Vector::new2(0.0, r), &a, &p).unwrap();
        assert!(up > 0.0 && side < 0.0);
    }

    #[test]
    fn exponent_of_power_laws() {
        for p in [2.0, 3.0] {
            let g = graph(|x| 1.0 / (1.0 + x * x).powf(p / 2.0), 100.0);
            let f = fit_decay_exponent(&g, (50.0, 100.0)).unwrap();
            assert!((f.exponent - p).abs() < 0.01, "{}", f.exponent);
            assert!(f.coefficient > 0.0);
        }
        let g = graph(|x| x.cos() / (1.0 + x * x), 100.0);
        assert!(matches!(
            fit_decay_exponent(&g, (50.0, 100.0)),
            Err(Error::SignChange(_))
        ));
    }

    #[test]
    fn exponent_with_images() {
        let per = 200.0;
        let g = graph(
            |x| {
                if x.abs() < 1.0 {
                    1.0
                } else {
                    0.3 * inverse_square_images(x, per)
                }
            },
            100.0,
        )
        .with_period(per);
        let f = fit_decay_exponent(&g, (30.0, 70.0)).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-6 && f.images);
        assert!((f.coefficient - 0.3).abs() < 1e-6);
    }

    #[test]
    fn planar_tail_dipole() {
        let p = make_params(1.0, 1.0, &[1.0, 0.0], 2, 0.5).unwrap();
        let g = graph(|x| 1.0 / (x * x + 1.0), 100.0);
        let e = extract_dipole_tail(&g, &p, (50.0, 100.0)).unwrap();
        assert!((e.a[0] + 1.0).abs() < 1e-3);
        assert_eq!(e.method, Method::Tail);
    }

    #[test]
    fn spatial_tail_dipole() {
        let p = make_params(1.0, 1.0, &[1.0, 0.0, 0.0], 3, 0.5).unwrap();
        let a = Vector::new3(-0.7, 0.2, 0.0);
        let pp = p;
        let s = AnalyticSurface::new(3, move |x| {
            (eta_tail_model(x, &a, &pp).unwrap(), Vector::zeros(2))
        });
        let e = extract_dipole_tail_3d(&s, &p, (10.0, 20.0), 4).unwrap();
        assert!((e.a - a).norm() < 1e-12);
    }

    #[test]
    fn crosscheck_examples() {
        let c = Vector::new2(1.0, 0.0);
        let mk = |v: f64, m| DipoleEstimate::new(Vector::new2(v, 0.0), m, 0.0);
        let r = crosscheck_dipole(
            &[
                mk(-1.0, Method::Kelvin),
                mk(-1.02, Method::Tail),
                mk(-0.99, Method::Energy),
            ],
            &c,
        )
        .unwrap();
        assert!((r.max_relative_deviation - 0.03 / 1.02).abs() < 1e-12);
        assert!(r.drag_sign && r.tail_positive);
        let r = crosscheck_dipole(&[mk(1.0, Method::Kelvin), mk(1.0, Method::Tail)], &c).unwrap();
        assert!(!r.drag_sign && r.max_relative_deviation == 0.0);
    }
}
