//! Checks on analytic fields and surfaces in two and three dimensions; no
//! solver involved.

use std::f64::consts::PI;
use std::sync::Arc;

use deepwave_core::estimators::{all_estimators, FarField};
use deepwave_core::identities::{
    angular_momentum_shell, divergence_residual_a, divergence_residual_c,
    hemisphere_position_integral, hemisphere_quadratic_integral, kinetic_energy_volume,
    moment_cross_vertical, shell_flux_a, QuadratureSpec, ShellSeries,
};
use deepwave_core::kelvin::{
    kelvin_point, kelvin_potential, robin_residual, transformed_normal, transformed_surface,
    RobinData,
};
use deepwave_core::oracle::{
    boundary_compatible_field, superpose, Dipole, HarmonicQuadratic, Linear, Source, Superposition,
};
use deepwave_core::surface::{AnalyticSurface, FlatSurface, RadialSurface};
use deepwave_core::tail::eta_tail_model;
use deepwave_core::{
    angular_constant, kinetic_constant, make_params, HarmonicField, Point, Result, Surface, Vector,
    WaveParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::OracleConfig;
use crate::report::{Check, Report};
use crate::verify::{boundary_flux_series, log_log_slope};

fn params(n: usize) -> Result<WaveParams> {
    let c: &[f64] = if n == 2 {
        &[1.1, 0.0]
    } else {
        &[1.1, 0.3, 0.0]
    };
    make_params(1.0, 1.0, c, n, 0.5)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, s: f64) -> Vector {
    Vector::from_slice(&(0..n).map(|_| rng.gen_range(-s..s)).collect::<Vec<_>>())
}

fn random_horizontal(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    let mut v = random_vector(rng, n, 1.0);
    v[n - 1] = 0.0;
    v
}

/// Superposition of dipoles and a source above the surface, a harmonic
/// quadratic and a linear field, with random coefficients.
pub fn random_superposition(rng: &mut ChaCha8Rng, n: usize) -> Result<Superposition> {
    let above = |rng: &mut ChaCha8Rng| {
        let mut p = random_vector(rng, n, 1.0);
        p[n - 1] = 1.5 + rng.gen_range(0.0..1.0);
        p
    };
    let d1 = Dipole::at(random_vector(rng, n, 1.0), above(rng));
    let d2 = Dipole::at(random_vector(rng, n, 1.0), above(rng));
    let src = Source {
        strength: rng.gen_range(-1.0..1.0),
        center: above(rng),
    };
    let basis = HarmonicQuadratic::basis(n);
    let quad = basis[rng.gen_range(0..basis.len())].clone();
    let lin = Linear {
        slope: random_vector(rng, n, 1.0),
        offset: rng.gen_range(-1.0..1.0),
    };
    superpose(vec![
        (
            rng.gen_range(0.5..1.5),
            Arc::new(d1) as Arc<dyn HarmonicField>,
        ),
        (rng.gen_range(0.5..1.5), Arc::new(d2)),
        (1.0, Arc::new(src)),
        (rng.gen_range(-0.5..0.5), Arc::new(quad)),
        (1.0, Arc::new(lin)),
    ])
}

/// Worst deviation of the `h = 1e-2 : 1e-3` residual ratio from 100, over
/// the random battery. Points where both residuals are at rounding level
/// are skipped.
pub fn divergence_ratio_battery(n: usize, oc: &OracleConfig, seed: u64) -> Result<(f64, f64)> {
    let p = params(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
    let (mut worst_a, mut worst_c) = (0.0f64, 0.0f64);
    for _ in 0..oc.fields {
        let f = random_superposition(&mut rng, n)?;
        for _ in 0..oc.points {
            let mut x = random_vector(&mut rng, n, 1.0);
            x[n - 1] = -rng.gen_range(0.2..1.0);
            for (which, worst) in [(0, &mut worst_a), (1, &mut worst_c)] {
                let res = |h: f64| {
                    if which == 0 {
                        divergence_residual_a(&f, &x, h, &p)
                    } else {
                        divergence_residual_c(&f, &x, h, &p)
                    }
                };
                let (r1, r2) = (res(1e-2)?, res(1e-3)?);
                if r1 < 1e-9 {
                    continue;
                }
                *worst = worst.max((r1 / r2 - 100.0).abs());
            }
        }
    }
    Ok((worst_a, worst_c))
}

fn hemisphere_checks(r: &mut Report, n: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    let e = Vector::unit(n, 0);
    let exact = kinetic_constant(n)? * 2.0 / n as f64;
    let v = hemisphere_quadratic_integral(&e, &e, n, 32)?;
    r.push(Check::near(
        &format!("hemisphere_quadratic_n{n}"),
        v,
        exact,
        1e-8,
        0.0,
    ));
    let (c, a) = (random_horizontal(rng, n), random_horizontal(rng, n));
    let v = hemisphere_quadratic_integral(&c, &a, n, 32)?;
    r.push(Check::near(
        &format!("hemisphere_quadratic_random_n{n}"),
        v,
        exact * c.dot(&a),
        1e-8,
        0.0,
    ));
    let pos = hemisphere_position_integral(n, 32)?;
    let target = Vector::vertical(n) * -angular_constant(n)?;
    r.push(Check::near(
        &format!("hemisphere_position_n{n}"),
        (pos - target).max_abs(),
        0.0,
        1e-8,
        0.0,
    ));
    Ok(())
}

fn kelvin_checks(r: &mut Report, n: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut inv: f64 = 0.0;
    let mut lin: f64 = 0.0;
    let mut unit: f64 = 0.0;
    for _ in 0..50 {
        let x = random_vector(rng, n, 5.0);
        if x.norm() < 1e-2 {
            continue;
        }
        let back = kelvin_point(&kelvin_point(&x)?)?;
        inv = inv.max((back - x).norm() / x.norm());
        let a = random_vector(rng, n, 2.0);
        let xc = random_vector(rng, n, 0.3);
        if xc.norm() > 1e-3 {
            let v = kelvin_potential(Dipole::new(a)).value(&xc)?;
            lin = lin.max((v - a.dot(&xc)).abs() / (1.0 + a.norm()));
        }
        let m = random_vector(rng, n, 1.0);
        if m.norm() > 1e-2 {
            let t = transformed_normal(&x, &(m * (1.0 / m.norm())))?;
            unit = unit.max((t.norm() - 1.0).abs());
        }
    }
    r.push(Check::below(&format!("kelvin_involution_n{n}"), inv, 1e-13));
    r.push(Check::below(
        &format!("kelvin_dipole_linear_n{n}"),
        lin,
        1e-12,
    ));
    r.push(Check::below(
        &format!("kelvin_normal_unit_n{n}"),
        unit,
        1e-12,
    ));

    let p = params(n)?;
    let ts = transformed_surface(Arc::new(FlatSurface { dim: n }), 0.2)?;
    let data = RobinData::new(&ts, &p)?;
    let f = kelvin_potential(boundary_compatible_field(&Vector::unit(n, 0), n)?);
    let mut worst: f64 = 0.0;
    for t in [0.03, 0.07, 0.11, 0.15] {
        let xc = Vector::unit(n, 0) * t;
        worst = worst.max(robin_residual(&f, &ts, &data, &xc)?);
    }
    r.push(Check::below(
        &format!("robin_residual_flat_n{n}"),
        worst,
        1e-8,
    ));

    let s = RadialSurface::algebraic(n, 0.8, 2.0);
    let ts = transformed_surface(Arc::new(s.clone()), 0.2)?;
    let mut worst: f64 = 0.0;
    for t in [0.02, 0.06, 0.1, 0.15] {
        let xh = Vector::unit(n - 1, 0) * t;
        let (xb, _) = ts.preimage(&xh)?;
        let phys = s.point(&(xb * (1.0 / xb.norm_sq())))?;
        worst = worst.max((kelvin_point(&phys)? - ts.point(&xh)?).max_abs());
    }
    r.push(Check::below(
        &format!("transformed_surface_round_trip_n{n}"),
        worst,
        1e-10,
    ));
    Ok(())
}

fn shell_checks(r: &mut Report, n: usize) -> Result<()> {
    let p = params(n)?;
    let a = Vector::unit(n, 0) * -1.0;
    let d = Dipole::new(a);
    let q = QuadratureSpec::default();
    let grad = |x: &Point| d.gradient(x);
    let ang = angular_momentum_shell(&grad, 5.0, n, q)?;
    let target = moment_cross_vertical(&a) * angular_constant(n)?;
    r.push(Check::near(
        &format!("angular_shell_dipole_n{n}"),
        (ang - target).max_abs(),
        0.0,
        1e-10,
        0.0,
    ));
    let flat = FlatSurface { dim: n };
    let radii = vec![20.0, 30.0, 40.0, 50.0, 60.0];
    let vals = radii
        .iter()
        .map(|rad| shell_flux_a(&d, &flat, *rad, &p, q))
        .collect::<Result<Vec<_>>>()?;
    let s = ShellSeries::new(radii, vals, 2)?;
    let target = -2.0 * kinetic_constant(n)? * p.c().dot(&a);
    r.push(Check::near(
        &format!("shell_a_dipole_limit_n{n}"),
        s.limit_estimate,
        target,
        0.0,
        5e-3,
    ));
    if n == 2 {
        // Dipole at height 1 above a flat surface: the half-plane energy is pi/8.
        let above = Dipole::at(Vector::new2(1.0, 0.0), Vector::new2(0.0, 1.0));
        let g2 = |x: &Point| above.gradient(x);
        let ke = kinetic_energy_volume(&g2, &flat, 100.0, &p, q)?;
        r.push(Check::near("ke_volume_dipole_n2", ke, PI / 8.0, 0.0, 1e-3));
    }
    Ok(())
}

fn flux_checks(r: &mut Report, n: usize) -> Result<()> {
    let p = params(n)?;
    // 2D: (1 + x^2)^-2; 3D: (1 + r^2)^-3.
    let s = RadialSurface::algebraic(n, 0.5, if n == 2 { 4.0 } else { 6.0 });
    let radii = [20.0, 30.0, 40.0, 50.0, 60.0, 70.0];
    let (i1, i2) = boundary_flux_series(&s, &p, &radii)?;
    let bound = -(n as f64 + p.eps() / 2.0);
    r.push(Check::below(
        &format!("boundary_flux_i1_slope_synthetic_n{n}"),
        log_log_slope(&i1),
        bound,
    ));
    r.push(Check::below(
        &format!("boundary_flux_i2_slope_synthetic_n{n}"),
        log_log_slope(&i2),
        bound,
    ));
    Ok(())
}

fn tail_checks(r: &mut Report, rng: &mut ChaCha8Rng) -> Result<()> {
    let p = params(3)?;
    let a = Vector::new3(
        -0.5 + 0.1 * rng.gen_range(-1.0..1.0),
        0.1 * rng.gen_range(-1.0..1.0),
        0.0,
    );
    let rad = 4.0;
    let m = 128;
    let mean: f64 = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            eta_tail_model(&Vector::new2(rad * t.cos(), rad * t.sin()), &a, &p)
        })
        .sum::<Result<f64>>()?
        / m as f64;
    let target = -p.c().dot(&a) / (2.0 * p.g() * rad.powi(3));
    r.push(Check::near(
        "tail_angular_mean_n3",
        mean,
        target,
        1e-15,
        1e-12,
    ));
    let s = AnalyticSurface::new(3, move |x| {
        (eta_tail_model(x, &a, &p).unwrap_or(0.0), Vector::zeros(2))
    });
    let ke = -kinetic_constant(3)? * p.c().dot(&a);
    let data = FarField {
        params: p,
        field: Arc::new(Dipole::new(a)),
        surface: Arc::new(s),
        graph: None,
        kinetic_energy: ke,
        window: (10.0, 20.0),
    };
    for est in all_estimators() {
        let e = est.estimate(&data)?;
        // The energy route only sees the component along c.
        let err = if e.transverse_known {
            (e.a - a).norm()
        } else {
            let c = p.c();
            (c.dot(&e.a) - c.dot(&a)).abs() / c.norm()
        };
        r.push(Check::below(
            &format!("estimator_{}_n3", est.name()),
            err / a.norm(),
            1e-9,
        ));
    }
    Ok(())
}

pub fn oracle_suite(oc: &OracleConfig, seed: u64) -> Report {
    let mut report = Report::default();
    report.note("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [2, 3] {
        let run = |name: &str, r: &mut Report, f: &mut dyn FnMut(&mut Report) -> Result<()>| {
            if let Err(e) = f(r) {
                r.push(Check::error(name, e.code()));
                r.warnings.push(format!("{name}: {e}"));
            }
        };
        run(&format!("hemisphere_n{n}"), &mut report, &mut |r| {
            hemisphere_checks(r, n, &mut rng)
        });
        run(&format!("divergence_n{n}"), &mut report, &mut |r| {
            let (wa, wc) = divergence_ratio_battery(n, oc, seed)?;
            r.push(Check::below(
                &format!("divergence_a_ratio_dev_n{n}"),
                wa,
                20.0,
            ));
            r.push(Check::below(
                &format!("divergence_c_ratio_dev_n{n}"),
                wc,
                20.0,
            ));
            Ok(())
        });
        run(&format!("kelvin_n{n}"), &mut report, &mut |r| {
            kelvin_checks(r, n, &mut rng)
        });
        run(&format!("shell_n{n}"), &mut report, &mut |r| {
            shell_checks(r, n)
        });
        run(&format!("flux_n{n}"), &mut report, &mut |r| {
            flux_checks(r, n)
        });
    }
    if let Err(e) = tail_checks(&mut report, &mut rng) {
        report.push(Check::error("tail_n3", e.code()));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_is_seeded() {
        let oc = OracleConfig {
            fields: 2,
            points: 3,
        };
        assert_eq!(
            divergence_ratio_battery(2, &oc, 5).unwrap(),
            divergence_ratio_battery(2, &oc, 5).unwrap()
        );
    }
}
