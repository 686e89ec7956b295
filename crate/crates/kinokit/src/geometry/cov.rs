use super::Point;
use crate::{Error, ModelParams, Vec3};
use nalgebra::{Matrix2, Matrix3};

/// Velocity magnitude below which the change of variables is the plain translation.
const LARGE_VELOCITY: f64 = 2.0;

/// Anisotropic change of variables centred at `z0 = (t0, x0, v0)`.
///
/// `T0` shrinks the component along `v0` by `1/|v0|` and fixes the orthogonal complement.
/// `forward(z) = z0 ∘ (|v0|^{-γ-2s} t, |v0|^{-γ-2s} T0 x, T0 v)`.
/// For `|v0| < 2` both maps degenerate to the identity and a plain left translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMap {
    pub z0: Point,
    pub params: ModelParams,
    speed: f64,
    dir: Vec3,
    identity: bool,
}

impl CovMap {
    pub fn new(z0: Point, params: ModelParams) -> Self {
        let speed = z0.v.norm();
        let identity = speed < LARGE_VELOCITY;
        let dir = if identity { Vec3::zeros() } else { z0.v / speed };
        Self { z0, params, speed, dir, identity }
    }

    /// Map centred at `(0, 0, v0)`.
    pub fn at_velocity(v0: Vec3, params: ModelParams) -> Self {
        Self::new(Point::velocity(v0), params)
    }

    pub fn v0(&self) -> Vec3 {
        self.z0.v
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Unit vector along `v0`, or zero when the map is the identity.
    pub fn direction(&self) -> Vec3 {
        self.dir
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn t0_apply(&self, w: &Vec3) -> Vec3 {
        if self.identity {
            return *w;
        }
        w - self.dir * ((1.0 - 1.0 / self.speed) * w.dot(&self.dir))
    }

    pub fn t0_inverse(&self, w: &Vec3) -> Vec3 {
        if self.identity {
            return *w;
        }
        w + self.dir * ((self.speed - 1.0) * w.dot(&self.dir))
    }

    /// `1/|v0|`, or 1 for the identity map.
    pub fn det(&self) -> f64 {
        if self.identity {
            1.0
        } else {
            1.0 / self.speed
        }
    }

    /// Determinant computed from the assembled matrix, independent of [`CovMap::det`].
    pub fn det_numeric(&self) -> f64 {
        let cols: Vec<Vec3> =
            (0..3).map(|i| self.t0_apply(&Vec3::from_fn(|j, _| if i == j { 1.0 } else { 0.0 }))).collect();
        let m = Matrix3::from_columns(&cols);
        if self.params.d == 2 {
            Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]).determinant()
        } else {
            m.determinant()
        }
    }

    /// `|v0|^{γ+2s}`, the time and position scale; 1 for the identity map.
    pub fn time_scale(&self) -> f64 {
        if self.identity {
            1.0
        } else {
            self.speed.powf(self.params.order())
        }
    }

    pub fn forward(&self, z: &Point) -> Point {
        let k = 1.0 / self.time_scale();
        let local = Point::new(k * z.t, self.t0_apply(&z.x) * k, self.t0_apply(&z.v));
        self.z0.compose(&local)
    }

    pub fn backward(&self, zbar: &Point) -> Point {
        let k = self.time_scale();
        let local = self.z0.inverse().compose(zbar);
        Point::new(k * local.t, self.t0_inverse(&local.x) * k, self.t0_inverse(&local.v))
    }

    /// `v0 + T0 v`, the velocity component of the forward map.
    pub fn vbar(&self, v: &Vec3) -> Vec3 {
        self.z0.v + self.t0_apply(v)
    }

    /// Whether `v` lies in the closed ellipsoid `v0 + T0 B_r`.
    pub fn in_ellipsoid(&self, v: &Vec3, r: f64) -> bool {
        self.t0_inverse(&(v - self.z0.v)).norm() <= r
    }

    /// `|T0^{-1}(v1 - v2)|` for `v1, v2` in the unit ellipsoid.
    pub fn da(&self, v1: &Vec3, v2: &Vec3) -> Result<f64, Error> {
        for v in [v1, v2] {
            if !self.in_ellipsoid(v, 1.0 + 1e-12) {
                return Err(Error::Geometry(format!(
                    "velocity ({}, {}, {}) lies outside the unit ellipsoid around v0",
                    v.x, v.y, v.z
                )));
            }
        }
        Ok(self.t0_inverse(&(v1 - v2)).norm())
    }
}

/// `sqrt(¼(|v1|² - |v2|²)² + |v1 - v2|²)`.
pub fn dgs(v1: &Vec3, v2: &Vec3) -> f64 {
    let e = 0.5 * (v1.norm_squared() - v2.norm_squared());
    (e * e + (v1 - v2).norm_squared()).sqrt()
}
