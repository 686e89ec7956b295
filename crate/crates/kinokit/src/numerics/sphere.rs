//! Direction sets on `S^{d-1}` with quadrature weights, for `d ∈ {2, 3}`.

use super::gauss::GaussLegendre;
use crate::Vec3;
use std::f64::consts::PI;

/// Surface measure of the unit sphere `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("unsupported dimension {d}"),
    }
}

/// Volume of the ball of radius `r` in `R^d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    sphere_area(d) * r.powi(d as i32) / d as f64
}

/// Two unit vectors completing `e` to an orthonormal frame (`d = 3`), or the in-plane
/// normal of `e` as the single entry (`d = 2`).
pub fn orthonormal_complement(d: usize, e: &Vec3) -> Vec<Vec3> {
    if d == 2 {
        return vec![Vec3::new(-e.y, e.x, 0.0)];
    }
    let helper = if e.x.abs() < 0.6 {
        Vec3::new(1.0, 0.0, 0.0)
    } else if e.y.abs() < 0.6 {
        Vec3::new(0.0, 1.0, 0.0)
    } else {
        Vec3::new(0.0, 0.0, 1.0)
    };
    let a = (helper - e * e.dot(&helper)).normalize();
    let b = e.cross(&a);
    vec![a, b]
}

/// Weighted direction set; weights sum to the sphere area.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub d: usize,
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Fibonacci lattice on `S^2` (`d = 3`) or equispaced angles on `S^1` (`d = 2`), equal weights.
    pub fn fibonacci(d: usize, n: usize) -> Self {
        let w = sphere_area(d) / n as f64;
        let points = if d == 2 {
            (0..n)
                .map(|k| {
                    let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                    Vec3::new(th.cos(), th.sin(), 0.0)
                })
                .collect()
        } else {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let th = golden * k as f64;
                    Vec3::new(r * th.cos(), r * th.sin(), z)
                })
                .collect()
        };
        Self { d, points, weights: vec![w; n] }
    }

    /// Product rule resolving a band `|σ·axis| ≲ band` around the equator of `axis`.
    ///
    /// Gauss–Legendre panels in `μ = σ·axis` (`d = 3`) or in the polar angle (`d = 2`) are
    /// graded geometrically towards the equator; azimuths use the trapezoid rule.
    pub fn banded(d: usize, axis: &Vec3, band: f64, n_azimuth: usize) -> Self {
        let axis = axis.normalize();
        let band = band.clamp(1e-4, 1.0);
        let mut breaks = vec![0.0];
        let mut b = band / 8.0;
        while b < 1.0 {
            breaks.push(b);
            b *= 2.0;
        }
        breaks.push(1.0);
        let rule = GaussLegendre::cached(10);
        let symmetric_nodes = |breaks: &[f64]| {
            let mut xs = Vec::new();
            let mut ws = Vec::new();
            for w in breaks.windows(2) {
                let h = 0.5 * (w[1] - w[0]);
                let c = 0.5 * (w[1] + w[0]);
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    for sgn in [-1.0, 1.0] {
                        xs.push(sgn * (c + h * x));
                        ws.push(wt * h);
                    }
                }
            }
            (xs, ws)
        };
        let frame = orthonormal_complement(d, &axis);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if d == 2 {
            // Angle θ from the equator on each half-circle; panels are the arcsines of the μ breaks.
            let tbreaks: Vec<f64> = breaks.iter().map(|m| m.asin()).collect();
            let (ths, tws) = symmetric_nodes(&tbreaks);
            for side in [-1.0, 1.0] {
                for (th, w) in ths.iter().zip(&tws) {
                    points.push(axis * th.sin() + frame[0] * (side * th.cos()));
                    weights.push(*w);
                }
            }
        } else {
            let (mus, mws) = symmetric_nodes(&breaks);
            for (mu, w) in mus.iter().zip(&mws) {
                let r = (1.0 - mu * mu).max(0.0).sqrt();
                for k in 0..n_azimuth {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / n_azimuth as f64;
                    points.push(axis * *mu + (frame[0] * ph.cos() + frame[1] * ph.sin()) * r);
                    weights.push(w * 2.0 * PI / n_azimuth as f64);
                }
            }
        }
        Self { d, points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Weighted sum of `f` over the directions.
    pub fn integrate<F: FnMut(&Vec3) -> f64>(&self, mut f: F) -> f64 {
        let terms: Vec<f64> = self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).collect();
        super::pairwise_sum(&terms)
    }
}
