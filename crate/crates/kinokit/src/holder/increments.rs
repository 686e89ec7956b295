use crate::geometry::Point;
use crate::Vec3;

/// `Δ_y f(z) = f(z ∘ (0, y, 0)) - f(z)`.
pub fn increment_x<F: Fn(&Point) -> f64>(f: F, y: Vec3) -> impl Fn(&Point) -> f64 {
    let a = Point::new(0.0, y, Vec3::zeros());
    move |z: &Point| f(&z.compose(&a)) - f(z)
}

/// `Δ_w f(z) = f(z ∘ (0, 0, w)) - f(z)`.
///
/// Right multiplication by `(0, 0, w)` leaves `t` and `x` unchanged.
pub fn increment_v<F: Fn(&Point) -> f64>(f: F, w: Vec3) -> impl Fn(&Point) -> f64 {
    let a = Point::velocity(w);
    move |z: &Point| f(&z.compose(&a)) - f(z)
}
