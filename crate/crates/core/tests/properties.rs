use std::f64::consts::PI;
use std::sync::Arc;

use deepwave_core::identities::*;
use deepwave_core::kelvin::*;
use deepwave_core::oracle::*;
use deepwave_core::tail::eta_tail_model;
use deepwave_core::*;
use proptest::prelude::*;

fn vec_in(dim: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(lo..hi, dim).prop_map(|v| Vector::from_slice(&v))
}

fn horizontal(dim: usize) -> impl Strategy<Value = Vector> {
    vec_in(dim, -2.0, 2.0).prop_map(move |mut v| {
        v[dim - 1] = 0.0;
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inversion_is_an_involution(x in vec_in(3, -5.0, 5.0)) {
        prop_assume!(x.norm() > 1e-2);
        let back = kelvin_point(&kelvin_point(&x).unwrap()).unwrap();
        prop_assert!((back - x).norm() <= 1e-13 * x.norm());
    }

    #[test]
    fn dipole_transforms_to_linear(a in vec_in(3, -2.0, 2.0), xc in vec_in(3, -0.3, 0.3)) {
        prop_assume!(xc.norm() > 1e-3);
        let k = kelvin_potential(Dipole::new(a));
        let v = k.value(&xc).unwrap();
        prop_assert!((v - a.dot(&xc)).abs() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn transformed_normals_stay_unit(x in vec_in(3, -5.0, 5.0), m in vec_in(3, -1.0, 1.0)) {
        prop_assume!(x.norm() > 1e-2 && m.norm() > 1e-2);
        let n = m * (1.0 / m.norm());
        let t = transformed_normal(&x, &n).unwrap();
        prop_assert!((t.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hemisphere_integral_is_bilinear(dim in 2usize..4, c in horizontal(3), a in horizontal(3)) {
        let c = Vector::from_slice(&c.as_slice()[..dim]).horizontal();
        let a = Vector::from_slice(&a.as_slice()[..dim]).horizontal();
        let c = Vector::from_horizontal(&c, 0.0);
        let a = Vector::from_horizontal(&a, 0.0);
        let v = hemisphere_quadratic_integral(&c, &a, dim, 24).unwrap();
        let k = kinetic_constant(dim).unwrap() * 2.0 / dim as f64;
        prop_assert!((v - k * c.dot(&a)).abs() <= 1e-10 * (1.0 + c.norm() * a.norm()));
    }

    #[test]
    fn tail_model_is_homogeneous(dim in 2usize..4, a in horizontal(3), xh in vec_in(2, -3.0, 3.0), s in 0.5f64..4.0) {
        let p = make_params(1.3, 1.0, if dim == 2 { &[0.8, 0.0] } else { &[0.8, 0.3, 0.0] }, dim, 0.5).unwrap();
        let a = Vector::from_horizontal(&Vector::from_slice(&a.as_slice()[..dim - 1]), 0.0);
        let xh = Vector::from_slice(&xh.as_slice()[..dim - 1]);
        prop_assume!(xh.norm() > 0.1);
        let v1 = eta_tail_model(&xh, &a, &p).unwrap();
        let v2 = eta_tail_model(&(xh * s), &a, &p).unwrap();
        prop_assert!((v2 * s.powi(dim as i32) - v1).abs() <= 1e-12 * (1.0 + v1.abs()));
    }

    #[test]
    fn kinetic_identity_is_exact_on_its_own_prediction(dim in 2usize..4, a1 in -3.0f64..-0.01, speed in 0.1f64..3.0) {
        let mut c = Vector::zeros(dim);
        c[0] = speed;
        let mut a = Vector::zeros(dim);
        a[0] = a1;
        let ke = -kinetic_constant(dim).unwrap() * c.dot(&a);
        prop_assert!(verify_kinetic_identity(ke, &a, &c, dim).unwrap() <= 1e-14);
        let e = dipole_from_kinetic(ke, &c, dim).unwrap();
        prop_assert!((e.a - a).norm() <= 1e-13 * a.norm());
    }
}

/// Random superposition of off-centre dipoles, sources and quadratics.
fn random_field(dim: usize, seed: u64) -> Superposition {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v =
        |s: f64| Vector::from_slice(&(0..dim).map(|_| rng.gen_range(-s..s)).collect::<Vec<_>>());
    let centre = |mut p: Vector| {
        p[dim - 1] = 2.0 + p[dim - 1].abs();
        p
    };
    let terms: Vec<(f64, Arc<dyn HarmonicField>)> = vec![
        (1.0, Arc::new(Dipole::at(v(1.0), centre(v(1.0))))),
        (0.5, Arc::new(Dipole::at(v(1.0), centre(v(1.0))))),
        (0.3, Arc::new(HarmonicQuadratic::basis(dim)[0].clone())),
        (
            1.0,
            Arc::new(Linear {
                slope: v(1.0),
                offset: 0.2,
            }),
        ),
    ];
    superpose(terms).unwrap()
}

#[test]
fn divergence_ratio_on_random_superpositions() {
    use rand::{Rng, SeedableRng};
    for dim in [2, 3] {
        let c: Vec<f64> = if dim == 2 {
            vec![1.1, 0.0]
        } else {
            vec![1.1, 0.2, 0.0]
        };
        let p = make_params(1.0, 1.0, &c, dim, 0.5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for s in 0..5 {
            let f = random_field(dim, s);
            for _ in 0..20 {
                let mut x = Vector::from_slice(
                    &(0..dim)
                        .map(|_| rng.gen_range(-1.0..1.0))
                        .collect::<Vec<_>>(),
                );
                x[dim - 1] = -rng.gen_range(0.2..1.0);
                for which in 0..2 {
                    let res = |h: f64| {
                        if which == 0 {
                            divergence_residual_a(&f, &x, h, &p).unwrap()
                        } else {
                            divergence_residual_c(&f, &x, h, &p).unwrap()
                        }
                    };
                    let (r1, r2) = (res(1e-2), res(1e-3));
                    if r1 < 1e-9 {
                        continue;
                    }
                    let ratio = r1 / r2;
                    assert!(
                        (80.0..=120.0).contains(&ratio),
                        "dim {dim} seed {s} ratio {ratio}"
                    );
                }
            }
        }
    }
}

#[test]
fn spatial_tail_mean_matches_closed_form() {
    let p = make_params(1.0, 1.0, &[1.0, 0.0, 0.0], 3, 0.5).unwrap();
    let a = Vector::new3(-0.4, 0.1, 0.0);
    let r = 3.0;
    let m = 128;
    let mean: f64 = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            eta_tail_model(&Vector::new2(r * t.cos(), r * t.sin()), &a, &p).unwrap()
        })
        .sum::<f64>()
        / m as f64;
    assert!((mean + p.c().dot(&a) / (2.0 * r.powi(3))).abs() < 1e-15);
}

#[test]
fn pure_dipole_shell_flux_limit() {
    // The A-flux of a dipole under a flat surface tends to -K_n (c.a) times two
    // with a 1/r correction.
    for (dim, c, a) in [
        (2, vec![1.0, 0.0], Vector::new2(-1.0, 0.0)),
        (3, vec![1.0, 0.0, 0.0], Vector::new3(-1.0, 0.5, 0.0)),
    ] {
        let p = make_params(1.0, 1.0, &c, dim, 0.5).unwrap();
        let d = Dipole::new(a);
        let flat = surface::FlatSurface { dim };
        let q = QuadratureSpec {
            order: 8,
            panels: 64,
        };
        let radii = vec![20.0, 30.0, 40.0, 50.0, 60.0];
        let vals: Vec<f64> = radii
            .iter()
            .map(|r| shell_flux_a(&d, &flat, *r, &p, q).unwrap())
            .collect();
        let s = ShellSeries::new(radii, vals, 2).unwrap();
        let target = -2.0 * kinetic_constant(dim).unwrap() * p.c().dot(&a);
        assert!(
            (s.limit_estimate / target - 1.0).abs() < 5e-3,
            "dim {dim}: {} vs {target}",
            s.limit_estimate
        );
    }
}

#[test]
fn angular_shell_of_spatial_dipole() {
    let a = Vector::new3(1.0, 0.0, 0.0);
    let d = Dipole::new(a);
    let grad = |x: &Point| d.gradient(x);
    let v = angular_momentum_shell(&grad, 5.0, 3, QuadratureSpec::default()).unwrap();
    let target = moment_cross_vertical(&a) * angular_constant(3).unwrap();
    assert!((v - target).norm() < 1e-10, "{v:?} vs {target:?}");
    assert_eq!(moment_cross_vertical(&a).as_slice(), &[0.0, -1.0, 0.0]);
}
