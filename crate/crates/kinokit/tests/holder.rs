mod common;

use common::{smooth_family, PhaseFn};
use kinokit::geometry::{Cylinder, Point};
use kinokit::holder::{
    check_increment_v_bound, check_increment_x_bound, check_interpolation, check_localization, check_product,
    increment_v, increment_x, kdeg, seminorm_est, taylor_expansion, HolderCheckSpec, KMultiIndex, SampleSpec,
};
use kinokit::{ModelParams, Vec3};

fn params(s: f64) -> ModelParams {
    ModelParams::new(3, s, 0.0).unwrap()
}

#[test]
fn time_coordinate_has_unit_lipschitz_seminorm() {
    let e = seminorm_est(&|z: &Point| z.t, &Cylinder::unit(), 1.0, 0.5, 3, &SampleSpec::default()).unwrap();
    assert!((e.value - 1.0).abs() <= 0.05, "{}", e.value);
    assert!(e.witness.is_some());
}

#[test]
fn exact_expansions_have_zero_seminorm() {
    let q = Cylinder::unit();
    let spec = SampleSpec::default();
    let cases: Vec<(&str, f64, f64, PhaseFn)> = vec![
        ("constant", 0.5, 0.7, Box::new(|_| 2.5)),
        ("velocity", 0.5, 1.5, Box::new(|z| z.v[0] - 2.0 * z.v[2])),
        ("time and velocity", 0.5, 1.5, Box::new(|z| z.t + z.v[1])),
        ("quadratic velocity", 0.25, 2.2, Box::new(|z| z.v[0] * z.v[1] + z.v[2] * z.v[2] + z.t)),
    ];
    for (name, s, alpha, f) in cases {
        let e = seminorm_est(&f, &q, alpha, s, 3, &spec).unwrap();
        assert!(e.value.abs() <= 1e-6, "{name}: {}", e.value);
    }
}

#[test]
fn kinetic_degrees() {
    assert_eq!(kdeg(&KMultiIndex::t(), 0.25), 0.5);
    assert_eq!(kdeg(&KMultiIndex::x(0), 0.25), 1.5);
    assert_eq!(kdeg(&KMultiIndex::v(2), 0.25), 1.0);
    assert_eq!(kdeg(&KMultiIndex::vv(0, 1), 0.75), 2.0);
}

#[test]
fn expansion_of_a_quadratic_is_exact() {
    let f = |z: &Point| 1.0 + 2.0 * z.t - z.v[0] + 0.5 * z.v[1] * z.v[1];
    let z0 = Point::new(-0.2, Vec3::new(0.1, 0.0, 0.3), Vec3::new(0.4, -0.5, 0.0));
    let p = taylor_expansion(&f, &z0, 2.4, 0.25, 3, 1e-3).unwrap();
    assert!((p.coefficient(&KMultiIndex::t()) - 2.0).abs() < 1e-8);
    assert!((p.coefficient(&KMultiIndex::v(0)) + 1.0).abs() < 1e-8);
    // The drift contributes nothing here: f does not depend on x.
    assert!((p.coefficient(&KMultiIndex::vv(1, 1)) - 0.5).abs() < 1e-6);
    assert!(taylor_expansion(&f, &z0, 2.4, 0.25, 3, 0.0).is_err());
}

#[test]
fn increments_shift_the_right_coordinate() {
    let z = Point::new(0.3, Vec3::new(1.0, 2.0, 3.0), Vec3::new(-1.0, 0.5, 0.0));
    let dx = increment_x(|z: &Point| z.x[0] * z.x[1], Vec3::new(0.5, 0.0, 0.0));
    assert!((dx(&z) - 0.5 * 2.0).abs() < 1e-14);
    let dv = increment_v(|z: &Point| z.v[0], Vec3::new(0.25, 0.0, 0.0));
    assert!((dv(&z) - 0.25).abs() < 1e-14);
}

#[test]
fn inequality_checks_hold_on_the_smooth_family() {
    let spec = HolderCheckSpec {
        c_max: 10.0,
        sample: SampleSpec { base_points: 12, directions: 16, ..SampleSpec::default() },
    };
    let q = Cylinder::unit();
    let family = smooth_family();
    for s in [0.25, 0.5, 0.75] {
        let p = params(s);
        let a = (2.0 * s).min(1.0);
        for (name, f) in &family {
            let checks = [
                check_interpolation(f, name, &p, &q, (0.25 * a, 0.5 * a, a), &spec).unwrap(),
                check_product(f, &family[0].1, name, &p, &q, 0.5 * a, &spec).unwrap(),
                check_localization(f, name, &p, 0.5 * a, 0.25, &spec).unwrap(),
                check_increment_x_bound(f, name, &p, 0.5 * a, &[0.05, 0.1, 0.2], &spec).unwrap(),
            ];
            for c in checks {
                assert!(c.pass, "s={s} {name} {}: {:?}", c.check_id, c.constants);
            }
            if 2.0 * s + 0.5 * a < 1.0 {
                let c = check_increment_v_bound(f, name, &p, 0.5 * a, &[0.05, 0.1, 0.2], &spec).unwrap();
                assert!(c.pass, "s={s} {name} increment_v: {:?}", c.constants);
            }
        }
    }
}

#[test]
fn checks_reject_out_of_range_exponents() {
    let spec = HolderCheckSpec::default();
    let f = |z: &Point| z.t;
    let p = params(0.25);
    assert!(check_interpolation(&f, "t", &p, &Cylinder::unit(), (0.5, 0.4, 0.6), &spec).is_err());
    assert!(check_increment_x_bound(&f, "t", &p, 0.7, &[0.1], &spec).is_err());
    assert!(check_increment_x_bound(&f, "t", &p, 0.25, &[0.6], &spec).is_err());
    assert!(check_increment_v_bound(&f, "t", &params(0.5), 0.25, &[0.1], &spec).is_err());
}
