#![allow(dead_code)]

use kinokit::geometry::Point;

pub type PhaseFn = Box<dyn Fn(&Point) -> f64 + Sync>;

/// Smooth functions on phase space exercising time, position and velocity dependence.
pub fn smooth_family() -> Vec<(&'static str, PhaseFn)> {
    vec![
        ("trig", Box::new(|z: &Point| z.t.sin() + z.x[0].cos() + z.v[0].sin())),
        ("gaussian", Box::new(|z: &Point| (-0.5 * z.v.norm_squared()).exp() * (z.x[1] + 0.3 * z.t).cos())),
        ("mixed", Box::new(|z: &Point| (z.x[0] - z.t * z.v[0]).sin() * (1.0 + 0.5 * z.v[1] * z.v[1]))),
    ]
}
