//! Planar solitary waves in conformal variables and the flow they carry.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::newton::{linear_strategy, newton, EvenProblem};
use super::residual::{bernoulli_residual, SurfaceState};
use super::spectral::Spectral;
use crate::error::{Error, Result};
use crate::oracle::HarmonicField;
use crate::params::{c_min, WaveParams};
use crate::quadrature::compensated_sum;
use crate::surface::{Surface, SurfaceGraph};
use crate::vector::{Point, Vector};

/// Decay exponent recorded with waves read back from disk.
pub const DEFAULT_EPS: f64 = 0.5;

/// `c(k) = sqrt(g/k + sigma k)`.
pub fn dispersion_speed(k: f64, g: f64, sigma: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    Ok((g / k + sigma * k).sqrt())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Grid size (a power of two).
    pub grid: usize,
    /// Box half-length `L`.
    pub half_length: f64,
    /// Newton tolerance on the max-norm of the residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of speeds visited between `0.999 c_min` and the target.
    pub continuation_steps: usize,
    /// Linear solver name (see [`super::newton::STRATEGIES`]).
    pub strategy: String,
    /// Overrides the amplitude of the initial guess.
    pub guess_amplitude: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid: 2048,
            half_length: 200.0,
            tol: 1e-10,
            max_iter: 50,
            continuation_steps: 8,
            strategy: "auto".into(),
            guess_amplitude: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(
                "Newton tolerance must be positive".into(),
            ));
        }
        if self.max_iter == 0 || self.continuation_steps == 0 {
            return Err(Error::InvalidConfig(
                "iteration counts must be positive".into(),
            ));
        }
        if !self.grid.is_power_of_two() || self.grid < 8 {
            return Err(Error::NotPowerOfTwo(self.grid));
        }
        if !(self.half_length > 0.0) {
            return Err(Error::InvalidConfig(
                "box half-length must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Starting surface for Newton.
#[derive(Clone, Debug)]
pub enum InitialGuess {
    /// `y = 0`.
    Flat,
    /// `-A sech(mu xi) cos(k* xi)` with the small-amplitude scalings, followed
    /// by continuation in `c`.
    Depression,
    /// Explicit full-grid samples (even in `xi`).
    Samples(Vec<f64>),
}

/// A computed wave: even surface samples `y(xi_j)` on `[-L, L)`.
#[derive(Clone, Debug)]
pub struct ConformalWave {
    params: WaveParams,
    sp: Spectral,
    y: Vec<f64>,
    residual_max: f64,
    modes: Arc<Vec<f64>>,
    mode_count: usize,
}

impl ConformalWave {
    /// Wraps samples without solving. The residual is recomputed.
    pub fn from_samples(
        params: WaveParams,
        half_length: f64,
        y: Vec<f64>,
    ) -> Result<ConformalWave> {
        if params.n() != 2 {
            return Err(Error::UnsupportedDimension(params.n()));
        }
        let sp = Spectral::new(y.len(), half_length)?;
        let r = bernoulli_residual(&sp, &y, params.speed(), params.g(), params.sigma())?;
        let residual_max = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let modes = sp.cosine_coefficients(&y);
        let peak = modes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mode_count = modes
            .iter()
            .rposition(|v| v.abs() > 1e-18 * peak)
            .map_or(1, |p| p + 1);
        Ok(ConformalWave {
            params,
            sp,
            y,
            residual_max,
            modes: Arc::new(modes),
            mode_count,
        })
    }

    pub fn params(&self) -> &WaveParams {
        &self.params
    }
    pub fn c(&self) -> f64 {
        self.params.speed()
    }
    pub fn grid(&self) -> usize {
        self.sp.len()
    }
    pub fn half_length(&self) -> f64 {
        self.sp.half_length()
    }
    pub fn period(&self) -> f64 {
        2.0 * self.sp.half_length()
    }
    pub fn y(&self) -> &[f64] {
        &self.y
    }
    pub fn residual_max(&self) -> f64 {
        self.residual_max
    }
    pub fn spectral(&self) -> &Spectral {
        &self.sp
    }
    pub fn xi(&self, j: usize) -> f64 {
        self.sp.xi(j)
    }

    fn state(&self) -> Result<SurfaceState> {
        SurfaceState::new(&self.sp, &self.y)
    }

    pub fn bernoulli_residual(&self) -> Result<Vec<f64>> {
        bernoulli_residual(
            &self.sp,
            &self.y,
            self.c(),
            self.params.g(),
            self.params.sigma(),
        )
    }

    /// `x_xi = 1 + H[y_xi]`.
    pub fn surface_x_derivative(&self) -> Result<Vec<f64>> {
        Ok(self.state()?.x1)
    }

    /// Physical abscissae `x(xi_j) = xi_j + H[y]`.
    pub fn surface_x(&self) -> Result<Vec<f64>> {
        let st = self.state()?;
        Ok((0..self.grid()).map(|j| self.xi(j) + st.big_x[j]).collect())
    }

    /// Lab-frame potential on the surface, `c H[y]`.
    pub fn surface_potential(&self) -> Result<Vec<f64>> {
        let c = self.c();
        Ok(self.state()?.big_x.iter().map(|v| c * v).collect())
    }

    /// `KE = -(c^2/2) int H[y] y_xi dxi`.
    pub fn wave_energy(&self) -> Result<f64> {
        let st = self.state()?;
        let c = self.c();
        let dx = self.sp.spacing();
        let ke =
            -0.5 * c * c * dx * compensated_sum((0..self.grid()).map(|j| st.big_x[j] * st.y1[j]));
        let scale = 1e-12 * c * c * dx * compensated_sum(self.y.iter().map(|v| v * v)).max(1e-300);
        if ke < -scale {
            return Err(Error::ConventionBug(format!(
                "negative kinetic energy {ke}"
            )));
        }
        Ok(ke.max(0.0))
    }

    /// `int eta dx = int y x_xi dxi` over the box.
    pub fn wave_mass(&self) -> Result<f64> {
        let st = self.state()?;
        Ok(self.sp.spacing() * compensated_sum((0..self.grid()).map(|j| self.y[j] * st.x1[j])))
    }

    /// `int |eta| dx` over the box.
    pub fn wave_abs_mass(&self) -> Result<f64> {
        let st = self.state()?;
        Ok(self.sp.spacing()
            * compensated_sum((0..self.grid()).map(|j| self.y[j].abs() * st.x1[j])))
    }

    /// Cosine coefficients `c_m` with `y = c_0 + 2 sum c_m cos(m pi xi / L)`.
    pub fn modes(&self) -> &[f64] {
        &self.modes
    }

    /// `s(zeta) = (x - zeta) + i y` continued into `Im zeta < 0`, with its
    /// first two derivatives.
    pub fn extension(&self, zeta: Complex64) -> (Complex64, Complex64, Complex64) {
        let kap = PI / self.half_length();
        let i = Complex64::new(0.0, 1.0);
        let q = (-i * kap * zeta).exp();
        let mut qm = Complex64::new(1.0, 0.0);
        let (mut s, mut d1, mut d2) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let qabs = q.norm();
        let mut mag = 1.0;
        for (m, cm) in self.modes.iter().enumerate().take(self.mode_count).skip(1) {
            qm *= q;
            mag *= qabs;
            if mag < 1e-19 {
                break;
            }
            let mf = m as f64;
            let t = qm * *cm;
            s += t;
            d1 += t * mf;
            d2 += t * (mf * mf);
        }
        let s = i * self.modes[0] + 2.0 * i * s;
        let d1 = 2.0 * kap * d1;
        let d2 = -2.0 * i * kap * kap * d2;
        (s, d1, d2)
    }

    /// Finds `zeta` with `zeta + s(zeta) = z` and checks it is in the fluid.
    pub fn invert(&self, z: Complex64) -> Result<Complex64> {
        let l = self.half_length();
        if z.re.abs() > l {
            return Err(Error::RadiusBeyondData {
                radius: z.re.abs(),
                extent: l,
            });
        }
        if z.im > self.y.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) {
            return Err(Error::OutsideFluid);
        }
        let mut zeta = z - Complex64::new(0.0, self.modes[0]);
        zeta.im = zeta.im.min(1.0);
        let tol = 1e-14 * z.norm().max(1.0);
        for _ in 0..60 {
            let (s, d1, _) = self.extension(zeta);
            let f = zeta + s - z;
            if f.norm() <= tol {
                if zeta.im >= 0.0 {
                    return Err(Error::OutsideFluid);
                }
                return Ok(zeta);
            }
            let mut step = f / (Complex64::new(1.0, 0.0) + d1);
            // Keep the iterate inside the region where the series converges.
            for _ in 0..60 {
                if (zeta - step).im <= 1.0 {
                    break;
                }
                step *= 0.5;
            }
            zeta -= step;
        }
        Err(Error::NoConvergence {
            what: "conformal inversion (point too close to the surface)",
            iterations: 60,
        })
    }

    /// Lab-frame potential at a physical point inside the fluid.
    pub fn potential_at(&self, x: &Point) -> Result<f64> {
        x.check_dim(2)?;
        let zeta = self.invert(Complex64::new(x[0], x[1]))?;
        Ok(self.c() * self.extension(zeta).0.re)
    }

    /// Lab-frame velocity `grad phi` at a physical point inside the fluid.
    pub fn fluid_velocity(&self, x: &Point) -> Result<Vector> {
        x.check_dim(2)?;
        let zeta = self.invert(Complex64::new(x[0], x[1]))?;
        let (_, d1, _) = self.extension(zeta);
        let w = self.c() * d1 / (Complex64::new(1.0, 0.0) + d1);
        Ok(Vector::new2(w.re, -w.im))
    }

    /// `(eta, eta', eta'')` at physical abscissa `x`.
    pub fn surface_at(&self, x: f64) -> Result<(f64, f64, f64)> {
        let l = self.half_length();
        if x.abs() > l {
            return Err(Error::RadiusBeyondData {
                radius: x.abs(),
                extent: l,
            });
        }
        let mut xi = x;
        for _ in 0..60 {
            let (s, d1, d2) = self.extension(Complex64::new(xi, 0.0));
            let f = xi + s.re - x;
            let x1 = 1.0 + d1.re;
            if f.abs() <= 1e-14 * x.abs().max(1.0) {
                let (y1, x2, y2) = (d1.im, d2.re, d2.im);
                return Ok((s.im, y1 / x1, (y2 * x1 - y1 * x2) / x1.powi(3)));
            }
            xi -= f / x1;
        }
        Err(Error::NoConvergence {
            what: "surface abscissa inversion",
            iterations: 60,
        })
    }

    /// Lab-frame potential on the surface at physical abscissa `x`.
    pub fn surface_potential_at(&self, x: f64) -> Result<f64> {
        let l = self.half_length();
        if x.abs() > l {
            return Err(Error::RadiusBeyondData {
                radius: x.abs(),
                extent: l,
            });
        }
        let mut xi = x;
        for _ in 0..60 {
            let (s, d1, _) = self.extension(Complex64::new(xi, 0.0));
            let f = xi + s.re - x;
            if f.abs() <= 1e-14 * x.abs().max(1.0) {
                return Ok(self.c() * s.re);
            }
            xi -= f / (1.0 + d1.re);
        }
        Err(Error::NoConvergence {
            what: "surface abscissa inversion",
            iterations: 60,
        })
    }

    pub fn field(self: &Arc<Self>) -> WaveField {
        WaveField {
            wave: Arc::clone(self),
        }
    }

    pub fn surface(self: &Arc<Self>) -> WaveSurface {
        WaveSurface {
            wave: Arc::clone(self),
        }
    }

    /// Samples the surface on a uniform physical grid over `[-w, w]`.
    pub fn surface_graph(&self, w: f64, count: usize) -> Result<SurfaceGraph> {
        Ok(SurfaceGraph::sample(-w, w, count, |x| self.surface_at(x))?.with_period(self.period()))
    }
}

/// The wave potential as a [`HarmonicField`].
#[derive(Clone)]
pub struct WaveField {
    wave: Arc<ConformalWave>,
}

impl HarmonicField for WaveField {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &Point) -> Result<f64> {
        self.wave.potential_at(x)
    }
    fn gradient(&self, x: &Point) -> Result<Vector> {
        self.wave.fluid_velocity(x)
    }
}

/// The wave surface as a [`Surface`], evaluated through the spectral series.
#[derive(Clone)]
pub struct WaveSurface {
    wave: Arc<ConformalWave>,
}

impl Surface for WaveSurface {
    fn dim(&self) -> usize {
        2
    }
    fn eta(&self, xh: &Vector) -> Result<f64> {
        xh.check_dim(1)?;
        Ok(self.wave.surface_at(xh[0])?.0)
    }
    fn grad(&self, xh: &Vector) -> Result<Vector> {
        xh.check_dim(1)?;
        Ok(Vector::from_slice(&[self.wave.surface_at(xh[0])?.1]))
    }
    fn extent(&self) -> f64 {
        self.wave.half_length()
    }
    fn period(&self) -> Option<f64> {
        Some(self.wave.period())
    }
}

/// `-A sech(mu xi) cos(k* xi)` with `A = 2.43 sqrt(delta)`,
/// `mu = 2 k* sqrt(delta)` and `delta = 1 - c / c_min`.
pub fn depression_guess(sp: &Spectral, params: &WaveParams, amplitude: Option<f64>) -> Vec<f64> {
    let kstar = (params.g() / params.sigma()).sqrt();
    let delta = (1.0 - params.speed() / c_min(params.g(), params.sigma())).max(1e-6);
    let a = amplitude.unwrap_or(2.43 * delta.sqrt() / kstar);
    let mu = 2.0 * kstar * delta.sqrt();
    (0..sp.len())
        .map(|j| {
            let xi = sp.xi(j);
            -a / (mu * xi).cosh() * (kstar * xi).cos()
        })
        .collect()
}

/// Newton solve at speed `c` (scalar, along `+x`).
pub fn solve_wave(
    params: &WaveParams,
    config: &SolverConfig,
    guess: InitialGuess,
) -> Result<ConformalWave> {
    config.validate()?;
    if params.n() != 2 {
        return Err(Error::UnsupportedDimension(params.n()));
    }
    if params.sigma() <= 0.0 {
        return Err(Error::PureGravityUnsupported);
    }
    let cm = c_min(params.g(), params.sigma());
    let c = params.speed();
    if c >= cm {
        return Err(Error::OutsideSolitaryRange { c, c_min: cm });
    }
    let sp = Spectral::new(config.grid, config.half_length)?;
    let strategy = linear_strategy(&config.strategy, config.grid)?;
    let run = |speed: f64, h0: Vec<f64>| {
        let problem = EvenProblem {
            sp: &sp,
            c: speed,
            g: params.g(),
            sigma: params.sigma(),
        };
        newton(&problem, strategy.as_ref(), h0, config.tol, config.max_iter)
    };
    let half_of = |y: &[f64]| {
        EvenProblem {
            sp: &sp,
            c,
            g: params.g(),
            sigma: params.sigma(),
        }
        .half(y)
    };
    let full_of = |h: &[f64]| {
        EvenProblem {
            sp: &sp,
            c,
            g: params.g(),
            sigma: params.sigma(),
        }
        .full(h)
    };

    let h = match guess {
        InitialGuess::Flat => run(c, vec![0.0; config.grid / 2 + 1])?.h,
        InitialGuess::Samples(y) => {
            if y.len() != config.grid {
                return Err(Error::DimensionMismatch {
                    expected: config.grid,
                    found: y.len(),
                });
            }
            run(c, half_of(&y))?.h
        }
        InitialGuess::Depression => {
            let start = 0.999 * cm;
            let first = WaveParams::planar(params.g(), params.sigma(), start.max(c), params.eps())?;
            let mut h = run(
                start.max(c),
                half_of(&depression_guess(&sp, &first, config.guess_amplitude)),
            )?
            .h;
            let amplitude = |h: &[f64]| h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if amplitude(&h) < 1e-8 {
                return Err(Error::NewtonDiverged { residual: 0.0 });
            }
            // Speeds decrease from `start` to `c`. A step is halved when Newton
            // fails or falls onto the flat branch.
            let full_step = (start - c) / config.continuation_steps as f64;
            let mut step = full_step;
            let mut speed = start.max(c);
            while speed > c {
                let next = (speed - step).max(c);
                match run(next, h.clone()) {
                    Ok(rep) if amplitude(&rep.h) >= 0.5 * amplitude(&h) => {
                        h = rep.h;
                        speed = next;
                        step = (step * 1.5).min(full_step);
                    }
                    Ok(_)
                    | Err(Error::NewtonDiverged { .. })
                    | Err(Error::NoConvergence { .. }) => {
                        step *= 0.5;
                        if step < 1e-6 * cm {
                            return Err(Error::NoConvergence {
                                what: "speed continuation",
                                iterations: 0,
                            });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
            h
        }
    };
    ConformalWave::from_samples(*params, config.half_length, full_of(&h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_examples() {
        assert!((dispersion_speed(1.0, 1.0, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((dispersion_speed(4.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(dispersion_speed(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn flat_wave_quantities_vanish() {
        let p = WaveParams::planar(1.0, 1.0, 1.3, 0.5).unwrap();
        let cfg = SolverConfig {
            grid: 64,
            half_length: 20.0,
            ..Default::default()
        };
        let w = solve_wave(&p, &cfg, InitialGuess::Flat).unwrap();
        assert_eq!(w.wave_energy().unwrap(), 0.0);
        assert_eq!(w.wave_mass().unwrap(), 0.0);
        assert!(w.surface_potential().unwrap().iter().all(|v| *v == 0.0));
        assert!(w.surface_x_derivative().unwrap().iter().all(|v| *v == 1.0));
        let w = Arc::new(w);
        let v = w.fluid_velocity(&Vector::new2(1.0, -2.0)).unwrap();
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn speed_range_enforced() {
        let cfg = SolverConfig {
            grid: 64,
            half_length: 20.0,
            ..Default::default()
        };
        let p = WaveParams::planar(1.0, 1.0, 1.5, 0.5).unwrap();
        assert_eq!(
            solve_wave(&p, &cfg, InitialGuess::Depression)
                .unwrap_err()
                .code(),
            "E_RANGE"
        );
        let p = WaveParams::planar(1.0, 0.0, 0.5, 0.5).unwrap();
        assert_eq!(
            solve_wave(&p, &cfg, InitialGuess::Flat).unwrap_err().code(),
            "E_PURE_GRAVITY"
        );
    }
}
