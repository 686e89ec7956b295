use kinokit::numerics::gauss::power_weighted;
use kinokit::numerics::{
    adaptive, ball_volume, fit_power_law, integrate_box, integrate_hyperplane, mc_integrate, pv_ring_integral,
    sphere_area, GaussLegendre, PvSpec, QuadratureSpec, Sampler, SphereRule,
};
use kinokit::Vec3;
use proptest::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_law_fit_recovers_exact_laws(p in -3.0..3.0f64, c in 0.01..100.0f64) {
        let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0, 32.0].iter().map(|&x| (x, c * x.powf(p))).collect();
        let fit = fit_power_law(&pts).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-12 || p.abs() < 1e-8);
    }

    #[test]
    fn power_weighted_rule_integrates_monomials(p in -0.95..1.5f64, k in 0u32..4) {
        // ∫_0^1 r^p r^k dr = 1/(p+k+1), with the singular weight handled by the rule.
        let q = power_weighted(|r| r.powi(k as i32), p, 0.0, 1.0, 1e-14, 1e-12, 100);
        prop_assert!((q.value - 1.0 / (p + f64::from(k) + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn sphere_rules_integrate_linear_functions_to_zero(n in 8usize..200, d in 2usize..=3) {
        let rule = SphereRule::fibonacci(d, n);
        let a = Vec3::new(0.3, -1.2, if d == 3 { 0.7 } else { 0.0 });
        prop_assert!((rule.weights.iter().sum::<f64>() - sphere_area(d)).abs() < 1e-10);
        prop_assert!(rule.integrate(|w| w.dot(&a)).abs() < 0.05 * sphere_area(d));
    }
}

#[test]
fn gauss_legendre_and_adaptive_against_closed_forms() {
    let gl = GaussLegendre::new(10);
    assert!((gl.integrate(|x| x.powi(19), -1.0, 1.0)).abs() < 1e-14);
    assert!((gl.integrate(|x| x.powi(18), 0.0, 1.0) - 1.0 / 19.0).abs() < 1e-14);
    let r = adaptive(|x| x.sqrt().ln(), 0.0, 1.0, 1e-13, 1e-11, 200);
    assert!((r.value + 0.5).abs() < 1e-9, "{}", r.value);
}

#[test]
fn gaussian_hyperplane_integrals() {
    let spec = QuadratureSpec::default();
    let e = Vec3::new(0.0, 0.6, 0.8);
    // Marginal of the standard Maxwellian on a plane through the centre.
    let g3 = |w: &Vec3| (2.0 * PI).powf(-1.5) * (-0.5 * w.norm_squared()).exp();
    let (v, _) = integrate_hyperplane(g3, &e, 3, &spec).unwrap();
    assert!((v - (2.0 * PI).powf(-0.5)).abs() < 1e-10);
    // |w|^k moment over the plane: (2π)^{-1/2} 2^{k/2} Γ(k/2 + 1).
    let k = 1.5;
    let (m, _) = integrate_hyperplane(|w: &Vec3| w.norm().powf(k) * g3(w), &e, 3, &spec).unwrap();
    let want = (2.0 * PI).powf(-0.5) * 2f64.powf(k / 2.0) * gamma(k / 2.0 + 1.0);
    assert!((m / want - 1.0).abs() < 1e-8);
}

#[test]
fn box_quadrature_of_a_gaussian() {
    let spec = QuadratureSpec::default();
    let (v, _) =
        integrate_box(|x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp(), &[-6.0, -6.0], &[6.0, 6.0], &spec).unwrap();
    assert!((v - PI).abs() < 1e-9);
}

#[test]
fn principal_value_of_a_dipole_and_a_constant() {
    let spec = QuadratureSpec::default();
    let pv = PvSpec { directions: 64, ..PvSpec::default() };
    let c = Vec3::new(1.0, 2.0, 0.0);
    // The odd singular part cancels pairwise; the constant gives the ball volume.
    let g = |v: &Vec3| {
        let w = v - c;
        w[0] / w.norm().powi(4) + 1.0
    };
    let r = pv_ring_integral(g, &c, 3, 0.1, 1.0, &spec, &pv).unwrap();
    assert!((r.value - ball_volume(3, 1.0)).abs() < 1e-8, "{}", r.value);
    assert!(pv_ring_integral(g, &c, 3, 1.0, 1.0, &spec, &pv).is_err());
}

#[test]
fn monte_carlo_is_reproducible_and_within_error() {
    let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let ball = Sampler::unit_ball(3);
    let a = mc_integrate(f, &ball, 20_000, 42).unwrap();
    let b = mc_integrate(f, &ball, 20_000, 42).unwrap();
    assert_eq!(a, b);
    // ∫_{B_1} |x|² dx = 4π/5 in three dimensions.
    let exact = 4.0 * PI / 5.0;
    assert!((a.value - exact).abs() < 4.0 * a.std_error, "{} ± {}", a.value, a.std_error);
    let c = mc_integrate(f, &ball, 20_000, 43).unwrap();
    assert_ne!(a.value, c.value);
    assert!(mc_integrate(f, &ball, 999, 42).is_err());
}

#[test]
fn monte_carlo_is_independent_of_thread_count() {
    let f = |x: &[f64]| (x[0] * 3.0).cos() * (-x[1] * x[1]).exp();
    let sampler = Sampler::Gaussian { d: 2, mean: vec![0.5, 0.0], temperature: 2.0 };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_integrate(f, &sampler, 5000, 7).unwrap())
    };
    assert_eq!(run(1), run(4));
}
