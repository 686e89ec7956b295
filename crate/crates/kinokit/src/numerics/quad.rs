//! Hyperplane, box and ball quadrature driven by a [`QuadratureSpec`].

use super::gauss::{adaptive, adaptive_pieces, QuadResult};
use super::sphere::orthonormal_complement;
use crate::{Error, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerances and truncation for the adaptive routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Radial truncation in units of the profile's standard deviation.
    pub radial_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-12, max_subdivisions: 200, radial_cutoff: 12.0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if !(self.radial_cutoff > 0.0) {
            return Err(Error::Config("quadrature radial_cutoff must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("quadrature max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    fn check(&self, r: QuadResult, what: &str) -> Result<(f64, f64), Error> {
        if r.converged || r.error <= self.abs_tol.max(self.rel_tol * r.value.abs()) {
            Ok((r.value, r.error))
        } else {
            Err(Error::Quadrature {
                what: what.to_string(),
                achieved: r.error,
                requested: self.abs_tol.max(self.rel_tol * r.value.abs()),
            })
        }
    }
}

const ANGULAR_NODES: usize = 64;

/// `∫_{w ⊥ e} g(w) dw` over the `(d-1)`-plane through the origin with unit normal `e`.
///
/// Polar coordinates about the origin of the plane: adaptive Gauss–Kronrod in the radius up to
/// `spec.radial_cutoff`, trapezoid in the angle (`d = 3`); a line integral for `d = 2`.
/// Returns `(value, error estimate)`.
pub fn integrate_hyperplane<G: Fn(&Vec3) -> f64>(
    g: G,
    e: &Vec3,
    d: usize,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), Error> {
    integrate_hyperplane_about(g, e, &Vec3::zeros(), spec.radial_cutoff, d, spec)
}

/// As [`integrate_hyperplane`], with polar coordinates centred at the in-plane point `center`
/// and truncated at `cutoff`.
pub fn integrate_hyperplane_about<G: Fn(&Vec3) -> f64>(
    g: G,
    e: &Vec3,
    center: &Vec3,
    cutoff: f64,
    d: usize,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), Error> {
    let e = e.normalize();
    let frame = orthonormal_complement(d, &e);
    let c = center - e * e.dot(center);
    if d == 2 {
        let a = frame[0];
        let r = adaptive_pieces(
            |y| g(&(c + a * y)),
            &[-cutoff, 0.0, cutoff],
            spec.abs_tol,
            spec.rel_tol,
            spec.max_subdivisions,
        );
        return spec.check(r, "hyperplane line integral");
    }
    let (a, b) = (frame[0], frame[1]);
    let trig: Vec<(f64, f64)> = (0..ANGULAR_NODES)
        .map(|k| {
            let ph = 2.0 * PI * k as f64 / ANGULAR_NODES as f64;
            (ph.cos(), ph.sin())
        })
        .collect();
    let mut angular_err: f64 = 0.0;
    let r = adaptive(
        |rho| {
            let mut fine = 0.0;
            let mut coarse = 0.0;
            for (k, (co, si)) in trig.iter().enumerate() {
                let val = g(&(c + (a * *co + b * *si) * rho));
                fine += val;
                if k % 2 == 0 {
                    coarse += val;
                }
            }
            let fine = fine * 2.0 * PI / ANGULAR_NODES as f64;
            let coarse = coarse * 4.0 * PI / ANGULAR_NODES as f64;
            angular_err = angular_err.max(rho * (fine - coarse).abs());
            rho * fine
        },
        0.0,
        cutoff,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
    );
    let (v, err) = spec.check(r, "hyperplane integral")?;
    // The halved trapezoid rule bounds the angular error of the full one from above.
    Ok((v, err + angular_err * cutoff))
}

/// Nested adaptive quadrature of `g` over the box `[lo, hi] ⊂ R^n`, `n ≤ 3`.
pub fn integrate_box<G: Fn(&[f64]) -> f64>(
    g: G,
    lo: &[f64],
    hi: &[f64],
    spec: &QuadratureSpec,
) -> Result<(f64, f64), Error> {
    let n = lo.len();
    assert!(n == hi.len() && (1..=3).contains(&n), "box dimension must be 1..=3");
    let mut x = [0.0f64; 3];
    let r = nested(&g, lo, hi, 0, &mut x, spec);
    spec.check(r, "box integral")
}

fn nested<G: Fn(&[f64]) -> f64>(
    g: &G,
    lo: &[f64],
    hi: &[f64],
    axis: usize,
    x: &mut [f64; 3],
    spec: &QuadratureSpec,
) -> QuadResult {
    let n = lo.len();
    // Inner integrals are solved more tightly so the outer error estimate dominates.
    let rel = spec.rel_tol * 0.1f64.powi((n - 1 - axis) as i32);
    let abs = spec.abs_tol;
    let mut inner_ok = true;
    let base = *x;
    // Eight starting panels keep a narrow support from slipping between the first nodes.
    let panels: Vec<f64> = (0..=8).map(|k| lo[axis] + (hi[axis] - lo[axis]) * k as f64 / 8.0).collect();
    let r = adaptive_pieces(
        |t| {
            let mut local = base;
            local[axis] = t;
            if axis + 1 == n {
                g(&local[..n])
            } else {
                let r = nested(g, lo, hi, axis + 1, &mut local, spec);
                inner_ok &= r.converged;
                r.value
            }
        },
        &panels,
        abs,
        rel,
        spec.max_subdivisions,
    );
    QuadResult { converged: r.converged && inner_ok, ..r }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_plane_integral_is_marginal_density() {
        let spec = QuadratureSpec::default();
        let e = Vec3::new(1.0, 2.0, -0.5).normalize();
        let g = |w: &Vec3| (2.0 * PI).powf(-1.5) * (-0.5 * w.norm_squared()).exp();
        let (v, _) = integrate_hyperplane(g, &e, 3, &spec).unwrap();
        assert!((v - (2.0 * PI).powf(-0.5)).abs() < 1e-9);
        let (z, _) = integrate_hyperplane(|_| 0.0, &e, 3, &spec).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn box_polynomial_is_exact() {
        let spec = QuadratureSpec::default();
        let (v, _) = integrate_box(|x| x[0] * x[1] * x[1] + x[2], &[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0], &spec).unwrap();
        // ∫ x y² = 1/2·8/3·3 = 4, ∫ z = 1·2·9/2 = 9
        assert!((v - 13.0).abs() < 1e-12);
    }
}
