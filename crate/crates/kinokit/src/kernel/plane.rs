//! Plane integrals `J(p, σ) = ∫_{w ⊥ σ} f(p + w) W(|w|) dw` and their restriction to the line
//! `p + tσ`, which is all the kernel ever needs.
//!
//! For a Gaussian `m (2πT)^{-d/2} e^{-|v-u|²/2T}`, write `p - u = aσ + b` with `b ⊥ σ`. Then
//! `J = m (2πT)^{-d/2} e^{-a²/2T} P(|b|)` where `P` is a one-dimensional moment, and moving `p`
//! along `σ` only changes `a`. So `h(t) = J(p + tσ, σ) = Σ c_i e^{-(a_i + t)²/2T_i}` once the
//! coefficients `c_i` are known.

use super::Kernel;
use crate::numerics::gauss::{power_weighted, GaussLegendre};
use crate::numerics::special::scaled_bessel_i0;
use crate::numerics::sphere::orthonormal_complement;
use crate::profile::CompactBump;
use crate::{KernelMode, Vec3};
use std::f64::consts::PI;

/// Width of the Gaussian window, in standard deviations.
const WINDOW: f64 = 12.0;

/// Radial weight `W(r)` of the plane integral.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Weight {
    /// `r^κ`.
    Power { kappa: f64 },
    /// `min(2^{d-1} (1 + ρ²/r²)^{κ/2}, cap) r^κ` for the distance `ρ = |v' - v|`.
    Carleman { kappa: f64, rho: f64, cap: f64, lead: f64 },
}

impl Weight {
    pub(crate) fn kappa(&self) -> f64 {
        match *self {
            Weight::Power { kappa } | Weight::Carleman { kappa, .. } => kappa,
        }
    }

    /// `W(r) / r^κ`.
    pub(crate) fn ratio(&self, r: f64) -> f64 {
        match *self {
            Weight::Power { .. } => 1.0,
            Weight::Carleman { kappa, rho, cap, lead } => {
                if r == 0.0 {
                    return if kappa > 0.0 { cap } else { 0.0 };
                }
                let q = rho / r;
                (lead * (1.0 + q * q).powf(0.5 * kappa)).min(cap)
            }
        }
    }

    pub(crate) fn value(&self, r: f64) -> f64 {
        if r == 0.0 {
            return if self.kappa() == 0.0 { self.ratio(0.0) } else { 0.0 };
        }
        r.powf(self.kappa()) * self.ratio(r)
    }

    /// Radius where the Carleman factor reaches its cap.
    fn kink(&self) -> Option<f64> {
        match *self {
            Weight::Power { .. } => None,
            Weight::Carleman { kappa, rho, cap, lead } => {
                if kappa <= 0.0 || cap <= lead {
                    return None;
                }
                let x = (cap / lead).powf(2.0 / kappa);
                (x > 1.0).then(|| rho / (x - 1.0).sqrt())
            }
        }
    }
}

/// `∫_{w ⊥ σ} e^{-|b + w|²/2T} W(|w|) dw` for `|b| = beta`.
pub(crate) fn gaussian_plane_moment(d: usize, beta: f64, temp: f64, weight: &Weight, rel_tol: f64) -> f64 {
    let sd = temp.sqrt();
    let lo = (beta - WINDOW * sd).max(0.0);
    let hi = beta + WINDOW * sd;
    let mut points = vec![lo, beta - 3.0 * sd, beta, beta + 3.0 * sd, hi];
    points.extend(weight.kink());
    points.retain(|x| *x >= lo && *x <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let kappa = weight.kappa();
    let mut total = 0.0;
    for w in points.windows(2) {
        let r = if d == 3 {
            power_weighted(
                |r| {
                    2.0 * PI
                        * weight.ratio(r)
                        * (-(r - beta).powi(2) / (2.0 * temp)).exp()
                        * scaled_bessel_i0(r * beta / temp)
                },
                1.0 + kappa,
                w[0],
                w[1],
                0.0,
                rel_tol,
                200,
            )
        } else {
            power_weighted(
                |r| {
                    weight.ratio(r)
                        * ((-(r - beta).powi(2) / (2.0 * temp)).exp() + (-(r + beta).powi(2) / (2.0 * temp)).exp())
                },
                kappa,
                w[0],
                w[1],
                0.0,
                rel_tol,
                200,
            )
        };
        total += r.value;
    }
    total
}

/// Plane integral of a compact bump through `p` with normal `σ`, by a fixed product rule.
pub(crate) fn bump_plane_integral(d: usize, bump: &CompactBump, p: &Vec3, sigma: &Vec3, weight: &Weight) -> f64 {
    let q = p - bump.center;
    let a = q.dot(sigma);
    let b = q - sigma * a;
    let r2 = bump.radius * bump.radius;
    let rr2 = r2 - a * a;
    if rr2 <= 0.0 {
        return 0.0;
    }
    let rr = rr2.sqrt();
    let k = bump.smoothness as i32;
    let profile = |r: f64| bump.amplitude * ((rr2 - r * r) / r2).max(0.0).powi(k);
    let gl = GaussLegendre::cached(32);
    let frame = orthonormal_complement(d, sigma);
    if d == 2 {
        let tau = frame[0];
        let beta = b.dot(&tau);
        // w = yτ, f(p + w) depends on y + beta; W has its kink at y = 0.
        let mut pts = [-rr - beta, -beta, rr - beta];
        pts.sort_by(f64::total_cmp);
        let mut s = 0.0;
        for w in pts.windows(2) {
            s += gl.integrate(|y| profile(y + beta) * weight.value(y.abs()), w[0], w[1]);
        }
        return s;
    }
    let (e1, e2) = (frame[0], frame[1]);
    let n_phi = 96;
    let center = -b;
    let mut panels = vec![0.0, rr];
    let bn = b.norm();
    if bn > 0.0 && bn < rr {
        panels.insert(1, bn);
    }
    let mut s = 0.0;
    for k in 0..n_phi {
        let ph = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
        let dir = e1 * ph.cos() + e2 * ph.sin();
        s += gl.integrate_panels(|r| r * profile(r) * weight.value((center + dir * r).norm()), &panels);
    }
    s * 2.0 * PI / n_phi as f64
}

#[derive(Debug, Clone, Copy)]
struct SliceComp {
    a: f64,
    beta: f64,
    temp: f64,
    /// `m (2πT)^{-d/2}`.
    norm: f64,
    /// `norm · P(beta)` with the power weight; unused in Carleman mode.
    coeff: f64,
}

/// The function `h(t) = J(p + tσ, σ)` for fixed base point `p` and direction `σ`.
///
/// In Carleman mode the weight depends on the distance `ρ` between the two kernel arguments,
/// which every evaluator therefore takes as a second argument; it is ignored in model mode.
#[derive(Debug, Clone)]
pub struct PlaneSlice<'k> {
    kernel: &'k Kernel,
    base: Vec3,
    sigma: Vec3,
    comps: Vec<SliceComp>,
}

impl<'k> PlaneSlice<'k> {
    pub(crate) fn new(kernel: &'k Kernel, base: &Vec3, sigma: &Vec3) -> Self {
        let d = kernel.params.d;
        let power = Weight::Power { kappa: kernel.params.kappa() };
        let model = kernel.params.kernel_mode == KernelMode::Model;
        let comps = kernel
            .profile
            .gaussians
            .iter()
            .map(|g| {
                let q = base - g.drift;
                let a = q.dot(sigma);
                let beta = (q - sigma * a).norm();
                let norm = g.mass * (2.0 * PI * g.temperature).powf(-(d as f64) / 2.0);
                let coeff = if model {
                    norm * gaussian_plane_moment(d, beta, g.temperature, &power, kernel.inner_tol())
                } else {
                    0.0
                };
                SliceComp { a, beta, temp: g.temperature, norm, coeff }
            })
            .collect();
        Self { kernel, base: *base, sigma: *sigma, comps }
    }

    pub fn sigma(&self) -> &Vec3 {
        &self.sigma
    }

    fn model(&self) -> bool {
        self.kernel.params.kernel_mode == KernelMode::Model
    }

    fn coeffs(&self, rho: f64) -> Vec<f64> {
        if self.model() {
            return self.comps.iter().map(|c| c.coeff).collect();
        }
        let w = self.kernel.weight(rho);
        let d = self.kernel.params.d;
        self.comps
            .iter()
            .map(|c| c.norm * gaussian_plane_moment(d, c.beta, c.temp, &w, self.kernel.inner_tol()))
            .collect()
    }

    fn bump_at(&self, t: f64, rho: f64) -> f64 {
        match &self.kernel.profile.bump {
            None => 0.0,
            Some(b) => bump_plane_integral(
                self.kernel.params.d,
                b,
                &(self.base + self.sigma * t),
                &self.sigma,
                &self.kernel.weight(rho),
            ),
        }
    }

    /// `J_ρ(p + tσ, σ)`.
    pub fn value(&self, t: f64, rho: f64) -> f64 {
        let g: f64 =
            self.comps.iter().zip(self.coeffs(rho)).map(|(c, k)| k * (-(c.a + t).powi(2) / (2.0 * c.temp)).exp()).sum();
        g + self.bump_at(t, rho)
    }

    /// `h(0) - (h(t) + h(-t))/2`, free of cancellation for small `t`.
    pub fn even_excess(&self, t: f64, rho: f64) -> f64 {
        let g: f64 = self
            .comps
            .iter()
            .zip(self.coeffs(rho))
            .map(|(c, k)| {
                let x = t * t / (2.0 * c.temp);
                let y = c.a * t / c.temp;
                let g = |s: f64| (-(c.a + s).powi(2) / (2.0 * c.temp)).exp();
                if y.abs() < 1.0 {
                    // 1 - e^{-x} cosh y
                    -0.5 * k * g(0.0) * ((y - x).exp_m1() + (-y - x).exp_m1())
                } else {
                    k * (g(0.0) - 0.5 * (g(t) + g(-t)))
                }
            })
            .sum();
        if self.kernel.profile.bump.is_some() {
            g + self.bump_at(0.0, rho) - 0.5 * (self.bump_at(t, rho) + self.bump_at(-t, rho))
        } else {
            g
        }
    }

    /// `(h(-t) - h(t))/2`.
    pub fn odd_part(&self, t: f64, rho: f64) -> f64 {
        let g: f64 = self
            .comps
            .iter()
            .zip(self.coeffs(rho))
            .map(|(c, k)| {
                let y = c.a * t / c.temp;
                if y.abs() < 1.0 {
                    k * (-(c.a * c.a + t * t) / (2.0 * c.temp)).exp() * y.sinh()
                } else {
                    let g = |s: f64| (-(c.a + s).powi(2) / (2.0 * c.temp)).exp();
                    0.5 * k * (g(-t) - g(t))
                }
            })
            .sum();
        if self.kernel.profile.bump.is_some() {
            g + 0.5 * (self.bump_at(-t, rho) - self.bump_at(t, rho))
        } else {
            g
        }
    }

    /// Positive offsets `t` where `h(±t)` changes shape.
    pub fn breaks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for c in &self.comps {
            let sd = c.temp.sqrt();
            for k in [-6.0, -2.0, 0.0, 2.0, 6.0] {
                let t = c.a.abs() + k * sd;
                if t > 0.0 {
                    out.push(t);
                }
            }
        }
        if let Some(b) = &self.kernel.profile.bump {
            let a = (self.base - b.center).dot(&self.sigma).abs();
            for t in [a - b.radius, a, a + b.radius] {
                if t > 0.0 {
                    out.push(t);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Offset beyond which `h(±t)` is negligible.
    pub fn reach(&self) -> f64 {
        let g = self.comps.iter().map(|c| c.a.abs() + WINDOW * c.temp.sqrt()).fold(0.0, f64::max);
        let b = self.kernel.profile.bump.map_or(0.0, |b| (self.base - b.center).dot(&self.sigma).abs() + b.radius);
        g.max(b)
    }
}
