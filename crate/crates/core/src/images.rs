//! Far-field models summed over the periodic images of a box of period `P`.
//!
//! A planar wave computed on a periodic box is a row of copies of the
//! isolated wave. Its tail is therefore the lattice sum of the isolated
//! far-field, which these closed forms provide.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oracle::HarmonicField;
use crate::vector::{Point, Vector};

/// Bernoulli numbers `B_2 .. B_16`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `sum_{k >= 0} (q + k)^{-s}` for `s > 1`, `q > 0`, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta needs s > 1 and q > 0");
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + N as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * a^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut apow = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        if j > 0 {
            let m = 2.0 * j as f64;
            rising *= (s + m - 1.0) * (s + m);
            fact *= (m + 1.0) * (m + 2.0);
            apow /= a * a;
        }
        sum += b / fact * rising * apow;
    }
    sum
}

/// `sum_k |x - k P|^{-p}` for `0 < |x| < P`.
pub fn lattice_sum(p: f64, x: f64, period: f64) -> f64 {
    let t = (x.abs() / period).rem_euclid(1.0);
    period.powf(-p) * (hurwitz_zeta(p, t) + hurwitz_zeta(p, 1.0 - t))
}

/// `sum_k (x - k P)^{-2} = (pi/P)^2 / sin^2(pi x / P)`.
pub fn inverse_square_images(x: f64, period: f64) -> f64 {
    let k = PI / period;
    k * k / (k * x).sin().powi(2)
}

/// Mass to add to a window integral over `|x| < W` to account for a `C/x^2`
/// tail. Isolated wave: `2C/W`. In a periodic box the window also holds the
/// tails of the neighbouring images, which are removed as well, leaving
/// `2 C (pi/P) cot(pi W / P)`.
pub fn tail_mass_correction(coef: f64, w: f64, period: Option<f64>) -> f64 {
    match period {
        None => 2.0 * coef / w,
        Some(p) => 2.0 * coef * (PI / p) / (PI * w / p).tan(),
    }
}

/// Ratio of the periodic to the isolated planar dipole shell flux at radius
/// `r`: `(pi r / P) cot(pi r / P)`.
pub fn dipole_shell_factor(r: f64, period: Option<f64>) -> f64 {
    match period {
        None => 1.0,
        Some(p) => {
            let t = PI * r / p;
            t / t.tan()
        }
    }
}

fn complex_of(x: &Point) -> Result<Complex64> {
    x.check_dim(2)?;
    Ok(Complex64::new(x[0], x[1]))
}

/// Planar dipole of moment `a` together with all its images `a` at `k P`:
/// `Re((a_1 + i a_2) (pi/P) cot(pi z / P))`.
#[derive(Clone, Debug)]
pub struct PeriodicDipole {
    pub moment: Vector,
    pub period: f64,
}

impl HarmonicField for PeriodicDipole {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Point) -> Result<f64> {
        let z = complex_of(x)?;
        let w = z * (PI / self.period);
        if w.sin().norm() < 1e-300 {
            return Err(Error::Singularity);
        }
        let alpha = Complex64::new(self.moment[0], self.moment[1]);
        Ok((alpha * (PI / self.period) * w.cos() / w.sin()).re)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        let z = complex_of(x)?;
        let k = PI / self.period;
        let s = (z * k).sin();
        if s.norm() < 1e-300 {
            return Err(Error::Singularity);
        }
        let alpha = Complex64::new(self.moment[0], self.moment[1]);
        let d = -alpha * k * k / (s * s);
        Ok(Vector::new2(d.re, -d.im))
    }
    fn singularities(&self) -> Vec<Point> {
        vec![Vector::new2(0.0, 0.0)]
    }
}

/// Planar quadrupole `Re(b / z^2)` summed over images:
/// `Re(b (pi/P)^2 / sin^2(pi z / P))`, with `b = b_1 - i b_2`.
#[derive(Clone, Debug)]
pub struct PeriodicQuadrupole {
    pub b: Complex64,
    pub period: Option<f64>,
}

impl PeriodicQuadrupole {
    fn kernel(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        match self.period {
            None => {
                if z.norm() < 1e-300 {
                    return Err(Error::Singularity);
                }
                let inv = z.inv();
                Ok((inv * inv, -2.0 * inv * inv * inv))
            }
            Some(p) => {
                let k = PI / p;
                let w = z * k;
                let s = w.sin();
                if s.norm() < 1e-300 {
                    return Err(Error::Singularity);
                }
                let f = k * k / (s * s);
                Ok((f, -2.0 * k * f * w.cos() / s))
            }
        }
    }
}

impl HarmonicField for PeriodicQuadrupole {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Point) -> Result<f64> {
        Ok((self.b * self.kernel(complex_of(x)?)?.0).re)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        let d = self.b * self.kernel(complex_of(x)?)?.1;
        Ok(Vector::new2(d.re, -d.im))
    }
    fn singularities(&self) -> Vec<Point> {
        vec![Vector::new2(0.0, 0.0)]
    }
}
