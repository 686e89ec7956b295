use kinokit::geometry::{dgs, kdistance, knorm, CovMap, Cylinder, Point};
use kinokit::{ModelParams, Vec3};
use proptest::prelude::*;

fn vec3(d: usize) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-3.0..3.0f64).prop_map(move |a| Vec3::from_fn(|i, _| if i < d { a[i] } else { 0.0 }))
}

fn point(d: usize) -> impl Strategy<Value = Point> {
    (-2.0..2.0f64, vec3(d), vec3(d)).prop_map(|(t, x, v)| Point::new(t, x, v))
}

fn s_value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.25), Just(0.5), Just(0.75), 0.05..0.95f64]
}

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    (a.t - b.t).abs() < tol && (a.x - b.x).amax() < tol && (a.v - b.v).amax() < tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn composition_is_associative(a in point(3), b in point(3), c in point(3)) {
        prop_assert!(close(&a.compose(&b).compose(&c), &a.compose(&b.compose(&c)), 1e-10));
    }

    #[test]
    fn inverse_cancels_on_both_sides(a in point(3)) {
        prop_assert!(close(&a.inverse().compose(&a), &Point::origin(), 1e-10));
        prop_assert!(close(&a.compose(&a.inverse()), &Point::origin(), 1e-10));
    }

    #[test]
    fn distance_is_left_invariant(xi in point(3), a in point(3), b in point(3), s in s_value()) {
        let lhs = kdistance(&xi.compose(&a), &xi.compose(&b), s);
        prop_assert!((lhs - kdistance(&a, &b, s)).abs() < 1e-8);
    }

    #[test]
    fn distance_scales_with_dilation(a in point(3), b in point(3), r in 0.1..10.0f64, s in s_value()) {
        let d0 = kdistance(&a, &b, s);
        let dr = kdistance(&a.dilate(r, s), &b.dilate(r, s), s);
        prop_assert!((dr - r * d0).abs() <= 1e-8 * (r * d0).max(1e-300));
    }

    #[test]
    fn distance_is_exactly_symmetric(a in point(2), b in point(2), s in s_value()) {
        prop_assert_eq!(kdistance(&a, &b, s), kdistance(&b, &a, s));
    }

    #[test]
    fn triangle_inequality_for_the_right_power(a in point(3), b in point(3), c in point(3), s in s_value()) {
        // Below s = 1/2 only d^{2s} is a distance.
        let p = if s >= 0.5 { 1.0 } else { 2.0 * s };
        let dd = |u: &Point, w: &Point| kdistance(u, w, s).powf(p);
        prop_assert!(dd(&a, &c) <= dd(&a, &b) + dd(&b, &c) + 1e-8);
    }

    #[test]
    fn group_norm_is_subadditive_for_the_right_power(a in point(3), b in point(3), s in s_value()) {
        // Pure time shifts have norm |t|^{1/2s}, which is superadditive below s = 1/2.
        let p = if s >= 0.5 { 1.0 } else { 2.0 * s };
        let n = |z: &Point| knorm(z, s).powf(p);
        prop_assert!(n(&a.compose(&b)) <= n(&a) + n(&b) + 1e-8);
    }

    #[test]
    fn right_translation_bound(a in point(3), b in point(3), w in vec3(3), s in s_value()) {
        let shift = Point::velocity(w);
        let d0 = kdistance(&a, &b, s);
        let d1 = kdistance(&a.compose(&shift), &b.compose(&shift), s);
        let e = 1.0 / (1.0 + 2.0 * s);
        prop_assert!(d1 <= d0 + d0.powf(2.0 * s * e) * w.norm().powf(e) + 1e-8);
    }

    #[test]
    fn change_of_variables_round_trips(z in point(3), v0 in vec3(3).prop_map(|v| v * 20.0)) {
        let m = CovMap::at_velocity(v0, ModelParams::new(3, 0.5, 1.0).unwrap());
        let back = m.backward(&m.forward(&z));
        prop_assert!(close(&back, &z, 1e-12 * (1.0 + v0.norm()).powi(3)));
    }

    #[test]
    fn determinant_matches_assembled_matrix(v0 in vec3(3).prop_map(|v| v * 30.0), d in 2usize..=3) {
        let v0 = Vec3::from_fn(|i, _| if i < d { v0[i] } else { 0.0 });
        prop_assume!(v0.norm() >= 2.0);
        let m = CovMap::at_velocity(v0, ModelParams::new(d, 0.25, 0.0).unwrap());
        prop_assert!((m.det() - 1.0 / v0.norm()).abs() < 1e-12);
        prop_assert!((m.det_numeric() - 1.0 / v0.norm()).abs() < 1e-12);
    }

    #[test]
    fn anisotropic_distances_are_comparable(v0 in 2.0..64.0f64, a in vec3(3), b in vec3(3)) {
        let m = CovMap::at_velocity(Vec3::new(v0, 0.0, 0.0), ModelParams::new(3, 0.25, 0.0).unwrap());
        let unit = |u: Vec3| if u.norm() > 1.0 { u / u.norm() } else { u };
        let p = m.vbar(&unit(a / 3.0));
        let q = m.vbar(&unit(b / 3.0));
        prop_assume!((p - q).norm() > 1e-9);
        let ratio = m.da(&p, &q).unwrap() / dgs(&p, &q);
        prop_assert!((0.25..=4.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn reference_distances() {
    let e1 = Vec3::new(1.0, 0.0, 0.0);
    let e2 = Vec3::new(0.0, 1.0, 0.0);
    assert!((dgs(&e1, &e2) - 2f64.sqrt()).abs() < 1e-15);
    assert!((dgs(&(e1 * 2.0), &e1) - 13f64.sqrt() / 2.0).abs() < 1e-12);
    // Equal times and positions leave only half the velocity gap.
    let d = kdistance(&Point::velocity(e1), &Point::velocity(-e1), 0.3);
    assert!((d - 1.0).abs() < 1e-12);
    let t = kdistance(&Point::new(0.5, Vec3::zeros(), Vec3::zeros()), &Point::origin(), 0.5);
    assert!((t - 0.5).abs() < 1e-12);
}

#[test]
fn unit_cylinder_is_half_open_in_time() {
    let q = Cylinder::unit();
    assert!(q.contains(&Point::origin(), 0.5));
    assert!(!q.contains(&Point::new(-1.0, Vec3::zeros(), Vec3::zeros()), 0.5));
    assert!(!q.contains(&Point::new(0.1, Vec3::zeros(), Vec3::zeros()), 0.5));
}
