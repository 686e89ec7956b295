use super::Point;

/// `Q_r(z0) = {t0 - r^{2s} < t <= t0, |x - x0 - (t - t0) v0| < r^{1+2s}, |v - v0| < r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub center: Point,
    pub radius: f64,
}

impl Cylinder {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    /// The unit cylinder at the origin.
    pub fn unit() -> Self {
        Self::new(Point::origin(), 1.0)
    }

    pub fn contains(&self, z: &Point, s: f64) -> bool {
        let c = &self.center;
        let r = self.radius;
        let dt = z.t - c.t;
        dt > -r.powf(2.0 * s)
            && dt <= 0.0
            && (z.x - c.x - c.v * dt).norm() < r.powf(1.0 + 2.0 * s)
            && (z.v - c.v).norm() < r
    }
}
