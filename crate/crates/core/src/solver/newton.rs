//! Damped Newton iteration on the even half of the grid, with pluggable
//! linear solvers selected by name.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::residual::{flat_symbol, SurfaceState};
use super::spectral::Spectral;
use crate::error::{Error, Result};

/// The nonlinear system restricted to even surfaces. Unknowns are the
/// samples at `xi = 0, dxi, ..., L`.
pub struct EvenProblem<'a> {
    pub sp: &'a Spectral,
    pub c: f64,
    pub g: f64,
    pub sigma: f64,
}

impl EvenProblem<'_> {
    pub fn unknowns(&self) -> usize {
        self.sp.len() / 2 + 1
    }

    /// Even extension of half-grid samples to the full grid.
    pub fn full(&self, h: &[f64]) -> Vec<f64> {
        let n = self.sp.len();
        let half = n / 2;
        let mut y = vec![0.0; n];
        y[half..2 * half].copy_from_slice(&h[..half]);
        for m in 1..=half {
            y[half - m] = h[m];
        }
        y
    }

    pub fn half(&self, y: &[f64]) -> Vec<f64> {
        let n = self.sp.len();
        let mut h = y[n / 2..].to_vec();
        h.push(y[0]);
        h
    }

    pub fn state(&self, h: &[f64]) -> Result<SurfaceState> {
        SurfaceState::new(self.sp, &self.full(h))
    }

    pub fn residual(&self, h: &[f64]) -> Result<Vec<f64>> {
        Ok(self.half(&self.state(h)?.residual(self.c, self.g, self.sigma)))
    }

    pub fn jvp(&self, st: &SurfaceState, v: &[f64]) -> Vec<f64> {
        self.half(&st.jvp(self.sp, &self.full(v), self.c, self.g, self.sigma))
    }

    /// Inverse of the flat-state operator, used as a preconditioner. The
    /// Nyquist bin only sees the `g y` term of the residual.
    pub fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let (c, g, s) = (self.c, self.g, self.sigma);
        let out = self.sp.apply_real(
            &self.full(r),
            |k| {
                let sym = flat_symbol(k, c, g, s);
                if sym.abs() > 1e-12 {
                    1.0 / sym
                } else {
                    0.0
                }
            },
            1.0 / g,
        );
        self.half(&out)
    }
}

/// A way of solving the Newton correction `J dh = r`.
pub trait LinearStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(
        &self,
        problem: &EvenProblem,
        h: &[f64],
        st: &SurfaceState,
        r: &[f64],
    ) -> Result<Vec<f64>>;
}

/// Dense Jacobian from forward differences of the residual, solved by LU.
pub struct DenseFd;

impl LinearStrategy for DenseFd {
    fn name(&self) -> &'static str {
        "dense-fd"
    }

    fn solve(
        &self,
        problem: &EvenProblem,
        h: &[f64],
        _st: &SurfaceState,
        r: &[f64],
    ) -> Result<Vec<f64>> {
        let m = h.len();
        let step = 1e-7;
        let cols: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let mut hp = h.to_vec();
                hp[j] += step;
                let rp = problem.residual(&hp)?;
                Ok(rp.iter().zip(r).map(|(a, b)| (a - b) / step).collect())
            })
            .collect::<Result<_>>()?;
        let jac = DMatrix::from_fn(m, m, |i, j| cols[j][i]);
        let rhs = DVector::from_column_slice(r);
        let sol = jac.lu().solve(&rhs).ok_or(Error::NewtonDiverged {
            residual: max_abs(r),
        })?;
        Ok(sol.iter().copied().collect())
    }
}

/// Matrix-free GMRES on the exact linearisation, right-preconditioned by
/// the flat-state Fourier symbol.
pub struct NewtonKrylov {
    pub restart: usize,
    pub max_restarts: usize,
    pub rtol: f64,
}

impl Default for NewtonKrylov {
    fn default() -> Self {
        NewtonKrylov {
            restart: 80,
            max_restarts: 30,
            rtol: 1e-12,
        }
    }
}

impl LinearStrategy for NewtonKrylov {
    fn name(&self) -> &'static str {
        "newton-krylov"
    }

    fn solve(
        &self,
        problem: &EvenProblem,
        _h: &[f64],
        st: &SurfaceState,
        r: &[f64],
    ) -> Result<Vec<f64>> {
        let op = |v: &[f64]| problem.jvp(st, &problem.precondition(v));
        let z = gmres(&op, r, self.restart, self.max_restarts, self.rtol)?;
        Ok(problem.precondition(&z))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations.
pub fn gmres(
    op: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    restart: usize,
    max_restarts: usize,
    rtol: f64,
) -> Result<Vec<f64>> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    for _ in 0..max_restarts {
        let ax = op(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = norm(&r);
        if beta <= rtol * bnorm {
            return Ok(x);
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|t| t / beta).collect()];
        let mut hm = vec![vec![0.0; restart]; restart + 1];
        let (mut cs, mut sn) = (vec![0.0; restart], vec![0.0; restart]);
        let mut gvec = vec![0.0; restart + 1];
        gvec[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            let mut w = op(&v[k]);
            for (i, vi) in v.iter().enumerate() {
                let hik = dot(&w, vi);
                hm[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= hik * vj;
                }
            }
            let wn = norm(&w);
            hm[k + 1][k] = wn;
            for i in 0..k {
                let t = cs[i] * hm[i][k] + sn[i] * hm[i + 1][k];
                hm[i + 1][k] = -sn[i] * hm[i][k] + cs[i] * hm[i + 1][k];
                hm[i][k] = t;
            }
            let d = (hm[k][k] * hm[k][k] + hm[k + 1][k] * hm[k + 1][k]).sqrt();
            cs[k] = hm[k][k] / d;
            sn[k] = hm[k + 1][k] / d;
            hm[k][k] = d;
            hm[k + 1][k] = 0.0;
            gvec[k + 1] = -sn[k] * gvec[k];
            gvec[k] *= cs[k];
            k_used = k + 1;
            if gvec[k + 1].abs() <= rtol * bnorm || wn == 0.0 {
                break;
            }
            v.push(w.iter().map(|t| t / wn).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let s: f64 = (i + 1..k_used).map(|j| hm[i][j] * y[j]).sum();
            y[i] = (gvec[i] - s) / hm[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vi;
            }
        }
        if gvec[k_used].abs() <= rtol * bnorm {
            return Ok(x);
        }
    }
    let ax = op(&x);
    let res = norm(&b.iter().zip(&ax).map(|(p, q)| p - q).collect::<Vec<_>>());
    // A loose inner solve still yields a usable Newton direction.
    if res <= 1e-6 * bnorm {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            what: "GMRES",
            iterations: restart * max_restarts,
        })
    }
}

/// Registered linear-solver names. `auto` picks `dense-fd` up to 1024 grid
/// points and `newton-krylov` beyond.
pub const STRATEGIES: [&str; 3] = ["auto", "dense-fd", "newton-krylov"];

pub fn linear_strategy(name: &str, grid: usize) -> Result<Box<dyn LinearStrategy>> {
    match name {
        "auto" if grid <= 1024 => Ok(Box::new(DenseFd)),
        "auto" => Ok(Box::new(NewtonKrylov::default())),
        "dense-fd" => Ok(Box::new(DenseFd)),
        "newton-krylov" => Ok(Box::new(NewtonKrylov::default())),
        other => Err(Error::UnknownStrategy(other.to_string())),
    }
}

/// Outcome of one Newton solve.
#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub h: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton with backtracking on the max-norm of the residual.
pub fn newton(
    problem: &EvenProblem,
    strategy: &dyn LinearStrategy,
    h0: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonReport> {
    let mut h = h0;
    let mut st = problem.state(&h)?;
    let mut r = problem.half(&st.residual(problem.c, problem.g, problem.sigma));
    let mut nr = max_abs(&r);
    for it in 0..max_iter {
        if nr <= tol {
            return Ok(NewtonReport {
                h,
                residual: nr,
                iterations: it,
            });
        }
        let dh = strategy.solve(problem, &h, &st, &r)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = h.iter().zip(&dh).map(|(a, b)| a - t * b).collect();
            let accepted = match problem.state(&trial) {
                Ok(s2) => {
                    let r2 = problem.half(&s2.residual(problem.c, problem.g, problem.sigma));
                    let n2 = max_abs(&r2);
                    if n2 < nr {
                        h = trial;
                        st = s2;
                        r = r2;
                        nr = n2;
                        true
                    } else {
                        false
                    }
                }
                Err(Error::SelfIntersection(_)) => false,
                Err(e) => return Err(e),
            };
            if accepted {
                break;
            }
            t *= 0.5;
            if t < 1e-3 {
                return Err(Error::NewtonDiverged { residual: nr });
            }
        }
        if !nr.is_finite() {
            return Err(Error::NewtonDiverged { residual: nr });
        }
    }
    if nr <= tol {
        Ok(NewtonReport {
            h,
            residual: nr,
            iterations: max_iter,
        })
    } else {
        Err(Error::NewtonDiverged { residual: nr })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gmres_solves_small_system() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let op = |v: &[f64]| {
            (0..3)
                .map(|i| (0..3).map(|j| a[i][j] * v[j]).sum())
                .collect()
        };
        let b = [1.0, 2.0, 3.0];
        let x = gmres(&op, &b, 3, 5, 1e-14).unwrap();
        let ax: Vec<f64> = op(&x);
        for i in 0..3 {
            assert!((ax[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn even_extension_round_trip() {
        let sp = Spectral::new(16, 3.0).unwrap();
        let p = EvenProblem {
            sp: &sp,
            c: 1.0,
            g: 1.0,
            sigma: 1.0,
        };
        let h: Vec<f64> = (0..9).map(f64::from).collect();
        let y = p.full(&h);
        assert_eq!(p.half(&y), h);
        for j in 1..16 {
            assert_eq!(y[j], y[16 - j]);
        }
    }

    #[test]
    fn registry_names() {
        assert_eq!(linear_strategy("auto", 512).unwrap().name(), "dense-fd");
        assert_eq!(
            linear_strategy("auto", 2048).unwrap().name(),
            "newton-krylov"
        );
        assert_eq!(
            linear_strategy("lu", 64).err().unwrap().code(),
            "E_STRATEGY"
        );
    }
}
