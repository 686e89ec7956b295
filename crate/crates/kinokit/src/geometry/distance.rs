//! The kinetic distance as the minimax
//! `min_w max(|Δt|^{1/2s}, |Δx - Δt w|^{1/(1+2s)}, |v1 - w|, |v2 - w|)`.
//!
//! For a candidate value `ρ` the admissible `w` form the intersection of three balls, whose centres
//! span at most a plane; feasibility is decided exactly in that plane and `ρ` is bisected.

use super::Point;
use crate::Vec3;

/// Kinetic distance between `z1` and `z2`, to absolute accuracy well below 1e-9.
pub fn kdistance(z1: &Point, z2: &Point, s: f64) -> f64 {
    // Canonical order makes the result exactly symmetric.
    let (a, b) = if z1.lex_cmp(z2).is_le() { (z1, z2) } else { (z2, z1) };
    let dt = a.t - b.t;
    let dx = a.x - b.x;
    let half_dv = 0.5 * (a.v - b.v).norm();
    let t_term = dt.abs().powf(1.0 / (2.0 * s));
    let ex = 1.0 / (1.0 + 2.0 * s);
    if dt == 0.0 {
        return t_term.max(dx.norm().powf(ex)).max(half_dv);
    }
    let lower = t_term.max(half_dv);
    let upper = t_term.max((dx - a.v * dt).norm().powf(ex)).max(2.0 * half_dv);
    let c3 = dx / dt;
    let feasible = |rho: f64| {
        let r3 = rho.powf(1.0 + 2.0 * s) / dt.abs();
        balls_intersect(&[(a.v, rho), (b.v, rho), (c3, r3)])
    };
    if feasible(lower) {
        return lower;
    }
    let (mut lo, mut hi) = (lower, upper);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// `‖z‖ = kdistance(z, 0)`.
pub fn knorm(z: &Point, s: f64) -> f64 {
    kdistance(z, &Point::origin(), s)
}

fn contains_all(balls: &[(Vec3, f64)], p: &Vec3) -> bool {
    balls.iter().all(|(c, r)| (p - c).norm() <= r * (1.0 + 1e-13) + 1e-300)
}

/// Whether closed balls in `R^3` whose centres are given have a common point.
fn balls_intersect(balls: &[(Vec3, f64)]) -> bool {
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let (ci, ri) = balls[i];
            let (cj, rj) = balls[j];
            if (ci - cj).norm() > (ri + rj) * (1.0 + 1e-13) {
                return false;
            }
        }
    }
    // Plane (or line) through the centres.
    let o = balls[0].0;
    let far = balls.iter().map(|(c, _)| c - o).fold(Vec3::zeros(), |m, d| if d.norm() > m.norm() { d } else { m });
    if far.norm() == 0.0 {
        return true;
    }
    let e1 = far.normalize();
    let e2 = balls
        .iter()
        .map(|(c, _)| {
            let d = c - o;
            d - e1 * e1.dot(&d)
        })
        .fold(Vec3::zeros(), |m, d| if d.norm() > m.norm() { d } else { m });
    let planar = e2.norm() > 1e-12 * far.norm();
    if !planar {
        // Collinear centres: intersect intervals on the line.
        let lo = balls.iter().map(|(c, r)| e1.dot(&(c - o)) - r).fold(f64::NEG_INFINITY, f64::max);
        let hi = balls.iter().map(|(c, r)| e1.dot(&(c - o)) + r).fold(f64::INFINITY, f64::min);
        return lo <= hi + 1e-13 * (1.0 + lo.abs().max(hi.abs()));
    }
    let e2 = e2.normalize();
    let to2 = |c: &Vec3| {
        let d = c - o;
        (e1.dot(&d), e2.dot(&d))
    };
    let from2 = |p: (f64, f64)| o + e1 * p.0 + e2 * p.1;
    // The leftmost point of a nonempty intersection is the leftmost point of one disk or a
    // crossing of two circles.
    let mut candidates: Vec<Vec3> = balls.iter().map(|(c, r)| c - e1 * *r).collect();
    for i in 0..balls.len() {
        for j in i + 1..balls.len() {
            let (pi, ri) = (to2(&balls[i].0), balls[i].1);
            let (pj, rj) = (to2(&balls[j].0), balls[j].1);
            let (dx, dy) = (pj.0 - pi.0, pj.1 - pi.1);
            let dist = dx.hypot(dy);
            if dist == 0.0 || dist < (ri - rj).abs() {
                continue;
            }
            let a = (ri * ri - rj * rj + dist * dist) / (2.0 * dist);
            let h = (ri * ri - a * a).max(0.0).sqrt();
            let (mx, my) = (pi.0 + a * dx / dist, pi.1 + a * dy / dist);
            candidates.push(from2((mx - h * dy / dist, my + h * dx / dist)));
            candidates.push(from2((mx + h * dy / dist, my - h * dx / dist)));
        }
    }
    candidates.iter().any(|p| contains_all(balls, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let z = Point::new(0.3, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0));
        assert_eq!(kdistance(&z, &z, 0.25), 0.0);
        let a = Point::velocity(Vec3::zeros());
        let b = Point::velocity(Vec3::new(2.0, 0.0, 0.0));
        assert!((kdistance(&a, &b, 0.3) - 1.0).abs() < 1e-12);
        for tau in [-1.0, -0.4, 0.2, 1.0] {
            let z = Point::new(tau, Vec3::zeros(), Vec3::zeros());
            assert!((kdistance(&z, &Point::origin(), 0.5) - f64::abs(tau)).abs() < 1e-12);
        }
        assert!((knorm(&Point::velocity(Vec3::new(0.0, 3.0, 4.0)), 0.7) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn brute_force_agreement() {
        // Dense grid over w in the plane of the three centres.
        let s = 0.35;
        let z1 = Point::new(0.4, Vec3::new(0.3, -0.2, 0.0), Vec3::new(0.5, 0.1, 0.0));
        let z2 = Point::new(-0.2, Vec3::new(-0.1, 0.4, 0.0), Vec3::new(-0.3, 0.6, 0.0));
        let dt: f64 = z1.t - z2.t;
        let dx = z1.x - z2.x;
        let obj = |w: Vec3| {
            dt.abs()
                .powf(1.0 / (2.0 * s))
                .max((dx - w * dt).norm().powf(1.0 / (1.0 + 2.0 * s)))
                .max((z1.v - w).norm())
                .max((z2.v - w).norm())
        };
        let mut best = f64::INFINITY;
        let n = 800;
        for i in 0..=n {
            for j in 0..=n {
                let w = Vec3::new(-1.0 + 2.0 * i as f64 / n as f64, -1.0 + 2.0 * j as f64 / n as f64, 0.0);
                best = best.min(obj(w));
            }
        }
        let exact = kdistance(&z1, &z2, s);
        assert!(exact <= best + 1e-12);
        assert!(best - exact < 5e-3, "{exact} vs grid {best}");
    }
}
