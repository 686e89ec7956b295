use crate::Vec3;
use serde::{Deserialize, Serialize};

/// Phase-space point `(t, x, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
}

/// Serializable form of a [`Point`] truncated to `d` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl Point {
    pub const fn new(t: f64, x: Vec3, v: Vec3) -> Self {
        Self { t, x, v }
    }

    pub fn origin() -> Self {
        Self::new(0.0, Vec3::zeros(), Vec3::zeros())
    }

    /// `(0, 0, v)`.
    pub fn velocity(v: Vec3) -> Self {
        Self::new(0.0, Vec3::zeros(), v)
    }

    /// Group product `self ∘ z = (h + t, y + x + t w, w + v)` for `self = (h, y, w)`.
    pub fn compose(&self, z: &Point) -> Point {
        Point::new(self.t + z.t, self.x + z.x + self.v * z.t, self.v + z.v)
    }

    /// `(-t, -x + t v, -v)`.
    pub fn inverse(&self) -> Point {
        Point::new(-self.t, -self.x + self.v * self.t, -self.v)
    }

    /// Kinetic scaling `(r^{2s} t, r^{1+2s} x, r v)`.
    pub fn dilate(&self, r: f64, s: f64) -> Point {
        Point::new(r.powf(2.0 * s) * self.t, self.x * r.powf(1.0 + 2.0 * s), self.v * r)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|c| c.is_finite()) && self.v.iter().all(|c| c.is_finite())
    }

    pub fn record(&self, d: usize) -> PointRecord {
        PointRecord { t: self.t, x: self.x.as_slice()[..d].to_vec(), v: self.v.as_slice()[..d].to_vec() }
    }

    /// Lexicographic order of the coordinates; used to canonicalize symmetric computations.
    pub(crate) fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        let a = std::iter::once(self.t).chain(self.x.iter().copied()).chain(self.v.iter().copied());
        let b = std::iter::once(other.t).chain(other.x.iter().copied()).chain(other.v.iter().copied());
        a.zip(b).map(|(p, q)| p.total_cmp(&q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    }
}
