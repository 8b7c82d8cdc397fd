//! Verification of a computed planar wave: three dipole estimates, the
//! kinetic identity, excess mass, tail exponent, shell series and the
//! surface boundary fluxes.

use std::f64::consts::PI;
use std::sync::Arc;

use deepwave_core::estimators::{estimator, FarField};
use deepwave_core::identities::{
    angular_momentum_shell, excess_mass, kinetic_energy_surface, kinetic_energy_volume,
    moment_cross_vertical, shell_flux_a, surface_boundary_flux, verify_kinetic_identity,
    QuadratureSpec, ShellSeries, TailModel,
};
use deepwave_core::images::{dipole_shell_factor, PeriodicDipole};
use deepwave_core::solver::ConformalWave;
use deepwave_core::tail::{crosscheck_dipole, fit_decay_exponent, fit_inverse_square};
use deepwave_core::{
    angular_constant, kinetic_constant, DipoleEstimate, HarmonicField, Point, Result, SurfaceGraph,
    Vector,
};

use crate::config::VerifyConfig;
use crate::report::{Check, Report, Series};

/// Least-squares slope of `log|v|` against `log r`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn quadrature(vc: &VerifyConfig) -> QuadratureSpec {
    QuadratureSpec {
        order: vc.quadrature_order,
        panels: vc.quadrature_panels,
    }
}

/// Samples the wave surface over `[-w, w]` at the configured spacing.
pub fn sample_surface(wave: &ConformalWave, w: f64, spacing: f64) -> Result<SurfaceGraph> {
    let count = (2.0 * w / spacing).round() as usize + 1;
    wave.surface_graph(w, count)
}

/// Runs `stage`; on failure records an error check under `name` instead.
fn stage(report: &mut Report, name: &str, f: impl FnOnce(&mut Report) -> Result<()>) {
    let mut local = Report::default();
    match f(&mut local) {
        Ok(()) => {
            report.checks.extend(local.checks);
            report.summary.extend(local.summary);
            report.series.extend(local.series);
            report.warnings.extend(local.warnings);
        }
        Err(e) => {
            report.push(Check::error(name, e.code()));
            report.warnings.push(format!("{name}: {e}"));
        }
    }
}

const CHECK_NAMES: [&str; 19] = [
    "ke_volume",
    "ke_surface",
    "dipole_pairwise_max_rel",
    "kinetic_identity_tail",
    "kinetic_identity_kelvin",
    "drag_sign_max_c_dot_a",
    "tail_exponent",
    "tail_coefficient",
    "farfield_remainder_slope",
    "excess_mass_rel",
    "angular_shell_max_rel",
    "angular_shell_spread_rel",
    "angular_shell_min_abs",
    "shell_a_limit",
    "divergence_balance_rel",
    "boundary_flux_i1_slope",
    "boundary_flux_i2_slope",
    "tail_exponent_loglog",
    "angular_shell_raw_max_rel",
];

/// The full identity pipeline on one wave.
pub fn verify_wave(wave: Arc<ConformalWave>, vc: &VerifyConfig) -> Result<Report> {
    vc.validate()?;
    let mut report = Report::default();
    let params = *wave.params();
    let tol = &vc.tolerances;
    let l = wave.half_length();
    report.note("c", wave.c());
    report.note("g", params.g());
    report.note("sigma", params.sigma());
    report.note("grid", wave.grid());
    report.note("half_length", l);
    report.push(Check::below(
        "newton_residual",
        wave.residual_max(),
        tol.residual,
    ));

    if wave.y().iter().all(|v| *v == 0.0) {
        // The flat state: every identity holds with zeros on both sides.
        for name in CHECK_NAMES {
            report.push(Check::near(name, 0.0, 0.0, 0.0, 0.0));
        }
        report.note("trivial", true);
        return Ok(report);
    }
    if vc.reach() > 0.35 * l {
        report.warnings.push(format!(
            "radii up to {} reach beyond 0.35 L = {}; box images dominate there",
            vc.reach(),
            0.35 * l
        ));
    }

    let q = quadrature(vc);
    let field = wave.field();
    let surf = wave.surface();
    let grad = |x: &Point| field.gradient(x);
    let c = params.c();
    let period = wave.period();
    let ke = wave.wave_energy()?;
    report.note("kinetic_energy", ke);
    report.note("mass_box", wave.wave_mass()?);
    let abs_mass = wave.wave_abs_mass()?;
    report.note("abs_mass", abs_mass);

    stage(&mut report, "ke_volume", |r| {
        let v = kinetic_energy_volume(&grad, &surf, vc.volume_radius, &params, q)?;
        r.push(Check::near("ke_volume", v, ke, 0.0, tol.ke_volume_rel));
        let phi_s = |x: &Vector| wave.surface_potential_at(x[0]);
        let s = kinetic_energy_surface(&phi_s, &surf, &params, vc.volume_radius, q)?;
        if s.truncation_warning {
            r.warnings
                .push("surface energy window truncates a non-negligible integrand".into());
        }
        r.push(Check::near(
            "ke_surface",
            s.value,
            ke,
            0.0,
            tol.ke_volume_rel,
        ));
        Ok(())
    });

    let graph_extent = vc.tail_window.1.max(vc.kelvin_window.1).min(l);
    let graph = sample_surface(&wave, graph_extent, vc.graph_spacing)?;
    let base = FarField {
        params,
        field: Arc::new(field.clone()),
        surface: Arc::new(surf.clone()),
        graph: Some(graph.clone()),
        kinetic_energy: ke,
        window: vc.tail_window,
    };
    let mut estimates: Vec<DipoleEstimate> = Vec::new();
    for name in ["energy", "tail", "kelvin"] {
        let data = if name == "kelvin" {
            FarField {
                window: vc.kelvin_window,
                ..base.clone()
            }
        } else {
            base.clone()
        };
        stage(&mut report, &format!("dipole_{name}"), |r| {
            let e = estimator(name)?.estimate(&data)?;
            r.push(Check::info(&format!("dipole_{name}_a1"), e.a[0]));
            r.note(&format!("dipole_{name}"), e.a.as_slice());
            r.note(&format!("dipole_{name}_uncertainty"), e.uncertainty);
            estimates.push(e);
            Ok(())
        });
    }
    let find = |m: &str| {
        estimates
            .iter()
            .find(|e| e.method.to_string() == m)
            .cloned()
    };
    let a_tail = find("tail");
    let a_kelvin = find("kelvin");

    stage(&mut report, "dipole_crosscheck", |r| {
        let cc = crosscheck_dipole(&estimates, &c)?;
        r.push(Check::below(
            "dipole_pairwise_max_rel",
            cc.max_relative_deviation,
            tol.dipole_pairwise_rel,
        ));
        for (name, est) in [
            ("kinetic_identity_tail", &a_tail),
            ("kinetic_identity_kelvin", &a_kelvin),
        ] {
            if let Some(e) = est {
                r.push(Check::below(
                    name,
                    verify_kinetic_identity(ke, &e.a, &c, 2)?,
                    tol.kinetic_identity,
                ));
            }
        }
        let worst = estimates
            .iter()
            .map(|e| c.dot(&e.a))
            .fold(f64::NEG_INFINITY, f64::max);
        r.push(Check::below("drag_sign_max_c_dot_a", worst, 0.0));
        Ok(())
    });

    stage(&mut report, "tail", |r| {
        let fit = fit_decay_exponent(&graph, vc.tail_window)?;
        r.push(Check::near(
            "tail_exponent",
            fit.exponent,
            2.0,
            0.0,
            tol.exponent_rel,
        ));
        let plain = fit_decay_exponent(&graph.clone().without_period(), vc.tail_window)?;
        r.push(Check::info("tail_exponent_loglog", plain.exponent));
        let (coef, err) = fit_inverse_square(&graph, vc.tail_window)?;
        r.push(Check::above("tail_coefficient", coef, 0.0));
        r.note("tail_coefficient_stderr", err);
        let pts = graph.window(vc.tail_window.0, vc.tail_window.1)?;
        let data: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 > 0.0).copied().collect();
        let model: Vec<(f64, f64)> = data
            .iter()
            .map(|(x, _)| {
                (
                    *x,
                    coef * deepwave_core::images::inverse_square_images(*x, period),
                )
            })
            .collect();
        r.series.push(Series {
            name: "tail_data".into(),
            points: data,
        });
        r.series.push(Series {
            name: "tail_model".into(),
            points: model,
        });
        Ok(())
    });

    if let Some(at) = &a_tail {
        let a = at.a;
        stage(&mut report, "farfield", |r| {
            let model = PeriodicDipole { moment: a, period };
            let radii: Vec<f64> = (0..9)
                .map(|i| vc.tail_window.0 + (vc.tail_window.1 - vc.tail_window.0) * i as f64 / 8.0)
                .collect();
            let mut rem = Vec::new();
            let mut full = Vec::new();
            for &rad in &radii {
                let m = 24;
                let (mut s, mut t) = (0.0, 0.0);
                for j in 0..m {
                    let th = -PI * (j as f64 + 0.5) / m as f64;
                    let x = Vector::new2(rad * th.cos(), rad * th.sin());
                    let g = field.gradient(&x)?;
                    s += (g - model.gradient(&x)?).norm_sq();
                    t += g.norm_sq();
                }
                rem.push((rad, (s / m as f64).sqrt()));
                full.push((rad, (t / m as f64).sqrt()));
            }
            r.push(Check::info("farfield_gradient_slope", log_log_slope(&full)));
            r.push(Check::below(
                "farfield_remainder_slope",
                log_log_slope(&rem),
                -2.0,
            ));
            r.series.push(Series {
                name: "farfield_gradient".into(),
                points: full,
            });
            r.series.push(Series {
                name: "farfield_remainder".into(),
                points: rem,
            });
            Ok(())
        });

        stage(&mut report, "excess_mass", |r| {
            let (coef, _) = fit_inverse_square(&graph, vc.tail_window)?;
            let m = excess_mass(
                &surf,
                vc.mass_window,
                TailModel::InverseSquare {
                    coef,
                    period: Some(period),
                },
                q,
            )?;
            r.note("mass_window_integral", m.window_integral);
            r.note("mass_tail_remainder", m.remainder);
            r.note("excess_mass", m.total);
            r.push(Check::below(
                "excess_mass_rel",
                m.total.abs() / abs_mass,
                tol.mass_rel,
            ));
            Ok(())
        });

        stage(&mut report, "angular_shell", |r| {
            let target = moment_cross_vertical(&a)[0] * angular_constant(2)?;
            let mut corrected = Vec::new();
            let mut raw = Vec::new();
            for &rad in &vc.shell_radii {
                let v = angular_momentum_shell(&grad, rad, 2, q)?[0];
                raw.push((rad, v));
                corrected.push((rad, v / dipole_shell_factor(rad, Some(period))));
            }
            let rel = |s: &[(f64, f64)]| {
                s.iter()
                    .map(|p| (p.1 / target - 1.0).abs())
                    .fold(0.0, f64::max)
            };
            let series = ShellSeries::new(
                corrected.iter().map(|p| p.0).collect(),
                corrected.iter().map(|p| p.1).collect(),
                0,
            )?;
            r.note("angular_shell_target", target);
            r.note("angular_shell_limit", series.limit_estimate);
            r.push(Check::below(
                "angular_shell_max_rel",
                rel(&corrected),
                tol.angular_rel,
            ));
            r.push(Check::below(
                "angular_shell_spread_rel",
                series.relative_spread(),
                tol.angular_spread_rel,
            ));
            let min_abs = corrected
                .iter()
                .map(|p| p.1.abs())
                .fold(f64::INFINITY, f64::min);
            r.push(Check::above("angular_shell_min_abs", min_abs, 0.0));
            r.push(Check::info("angular_shell_raw_max_rel", rel(&raw)));
            r.series.push(Series {
                name: "shell_angular".into(),
                points: corrected,
            });
            r.series.push(Series {
                name: "shell_angular_raw".into(),
                points: raw,
            });
            Ok(())
        });

        stage(&mut report, "shell_a", |r| {
            let mut vals = Vec::new();
            let mut worst: f64 = 0.0;
            for &rad in &vc.shell_radii {
                let s = shell_flux_a(&field, &surf, rad, &params, q)?;
                let (i1, i2) = surface_boundary_flux(&surf, &params, rad)?;
                let vol = kinetic_energy_volume(&grad, &surf, rad, &params, q)?;
                worst = worst.max((2.0 * vol - (s - i1 - i2)).abs() / (2.0 * ke));
                vals.push((rad, s));
            }
            let series = ShellSeries::new(
                vals.iter().map(|p| p.0).collect(),
                vals.iter().map(|p| p.1).collect(),
                2,
            )?;
            let target = -2.0 * kinetic_constant(2)? * c.dot(&a);
            r.push(Check::near(
                "shell_a_limit",
                series.limit_estimate,
                target,
                0.0,
                tol.shell_a_rel,
            ));
            r.push(Check::below(
                "divergence_balance_rel",
                worst,
                tol.balance_rel,
            ));
            r.series.push(Series {
                name: "shell_a".into(),
                points: vals,
            });
            Ok(())
        });
    }

    stage(&mut report, "boundary_flux", |r| {
        let (i1, i2) = boundary_flux_series(&surf, &params, &vc.flux_radii)?;
        let bound = -(2.0 + params.eps() / 2.0);
        r.push(Check::below(
            "boundary_flux_i1_slope",
            log_log_slope(&i1),
            bound,
        ));
        r.push(Check::below(
            "boundary_flux_i2_slope",
            log_log_slope(&i2),
            bound,
        ));
        r.series.push(Series {
            name: "boundary_flux_i1".into(),
            points: i1,
        });
        r.series.push(Series {
            name: "boundary_flux_i2".into(),
            points: i2,
        });
        Ok(())
    });

    Ok(report)
}

type FluxSeries = (Vec<(f64, f64)>, Vec<(f64, f64)>);

/// Both surface boundary terms over the given radii.
pub fn boundary_flux_series(
    surf: &dyn deepwave_core::Surface,
    params: &deepwave_core::WaveParams,
    radii: &[f64],
) -> Result<FluxSeries> {
    let mut i1 = Vec::new();
    let mut i2 = Vec::new();
    for &r in radii {
        let (a, b) = surface_boundary_flux(surf, params, r)?;
        i1.push((r, a));
        i2.push((r, b));
    }
    Ok((i1, i2))
}

/// Tail-only report: exponent, coefficient, dipole and positivity.
pub fn tail_report(wave: &ConformalWave, vc: &VerifyConfig, window: (f64, f64)) -> Result<Report> {
    let mut report = Report::default();
    let tol = &vc.tolerances;
    let graph = sample_surface(wave, window.1.min(wave.half_length()), vc.graph_spacing)?;
    let params = wave.params();
    // Outermost sign change of the elevation marks the edge of the core.
    let mut core = 0.0f64;
    for i in 1..graph.len() {
        let (a, b) = (graph.values()[i - 1], graph.values()[i]);
        if a * b <= 0.0 && (a != 0.0 || b != 0.0) {
            core = core.max(graph.node(i).abs().max(graph.node(i - 1).abs()));
        }
    }
    report.note("core_radius", core);
    let mut fit_window = window;
    if window.0 < core {
        report.warnings.push(format!(
            "window starts at {} inside the oscillatory core (last sign change at |x| = {core})",
            window.0
        ));
        fit_window.0 = core + graph.spacing();
    }
    report.note("window", window);
    report.note("exponent_window", fit_window);
    stage(&mut report, "tail_exponent", |r| {
        let fit = fit_decay_exponent(&graph, fit_window)?;
        r.push(Check::near(
            "tail_exponent",
            fit.exponent,
            2.0,
            0.0,
            tol.exponent_rel,
        ));
        r.note("tail_exponent_log_rms", fit.log_rms);
        let plain = fit_decay_exponent(&graph.clone().without_period(), fit_window)?;
        r.push(Check::info("tail_exponent_loglog", plain.exponent));
        Ok(())
    });
    stage(&mut report, "tail_coefficient", |r| {
        let (coef, err) = fit_inverse_square(&graph, window)?;
        r.push(Check::above("tail_coefficient", coef, 0.0));
        r.note("tail_coefficient_stderr", err);
        let a = deepwave_core::tail::extract_dipole_tail(&graph, params, window)?;
        r.push(Check::info("dipole_tail_a1", a.a[0]));
        Ok(())
    });
    Ok(report)
}
