//! Direction-resolved data of the transformed kernel about one point.
//!
//! In transformed coordinates `K̄(v, v+ρω) = c (ρℓ)^{-d-2s} h_ω(0)` and
//! `K̄(v+ρω, v) = c (ρℓ)^{-d-2s} h_ω(ρℓ)`, where `ℓ = |T0 ω|`, `σ = T0 ω / ℓ`, `h_ω` is the plane
//! slice at `v̄ = v0 + T0 v` along `σ`, and `c = b_norm |v0|^{-1-γ-2s}`. Each sample stores the
//! slice once; every check integral is then a sum over directions of one-dimensional integrals.

use super::{Kernel, PlaneSlice};
use crate::geometry::CovMap;
use crate::numerics::sphere::SphereRule;
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct DirectionSample<'k> {
    pub omega: Vec3,
    pub weight: f64,
    /// `|T0 ω|`.
    pub ell: f64,
    /// `c ℓ^{-d-2s}`.
    pub factor: f64,
    pub slice: PlaneSlice<'k>,
}

#[derive(Debug, Clone)]
pub struct DirectionField<'k> {
    kernel: &'k Kernel,
    pub v: Vec3,
    pub vbar: Vec3,
    pub samples: Vec<DirectionSample<'k>>,
}

impl<'k> DirectionField<'k> {
    pub fn new(kernel: &'k Kernel, m: &CovMap, v: &Vec3, rule: &SphereRule) -> Self {
        let vbar = m.vbar(v);
        let c = kernel.params.b_norm * kernel.cov_prefactor(m);
        let expo = -(kernel.params.d as f64) - 2.0 * kernel.params.s;
        let samples = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(omega, w)| {
                let tw = m.t0_apply(omega);
                let ell = tw.norm();
                DirectionSample {
                    omega: *omega,
                    weight: *w,
                    ell,
                    factor: c * ell.powf(expo),
                    slice: kernel.slice(&vbar, &(tw / ell)),
                }
            })
            .collect();
        Self { kernel, v: *v, vbar, samples }
    }

    /// `r^{d+2s} K̄(v, v + rω)` at unit radius, per direction.
    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|x| x.factor * x.slice.value(0.0, x.ell)).collect()
    }

    /// `r^{2s-2} ∫_0^r ρ^{d+1} K̄(v, v+ρω) dρ`, per direction.
    pub fn second_moments(&self, r: f64) -> Vec<f64> {
        let p = 1.0 - 2.0 * self.kernel.params.s;
        self.samples
            .iter()
            .map(|x| {
                let q = self.kernel.radial(|rho| x.slice.value(0.0, rho * x.ell), p, 0.0, r, &[], 0.0);
                x.factor * r.powf(-p - 1.0) * q.value
            })
            .collect()
    }

    /// `inf_e Σ_ω w (ω·e)_+² m(ω)` over the unit vectors `es`.
    pub fn directional_infimum(&self, moments: &[f64], es: &[Vec3]) -> (f64, Vec3) {
        es.iter()
            .map(|e| {
                let s: f64 = self
                    .samples
                    .iter()
                    .zip(moments)
                    .map(|(x, m)| {
                        let c = x.omega.dot(e).max(0.0);
                        x.weight * c * c * m
                    })
                    .sum();
                (s, *e)
            })
            .fold((f64::INFINITY, Vec3::zeros()), |best, cur| if cur.0 < best.0 { cur } else { best })
    }

    pub fn integrate(&self, per_direction: &[f64]) -> f64 {
        self.samples.iter().zip(per_direction).map(|(x, m)| x.weight * m).sum()
    }

    /// `r^{2s} ∫_{|w|>r} K̄(v, v+w) dw`.
    pub fn forward_tail(&self, r: f64) -> f64 {
        let s = self.kernel.params.s;
        let total: f64 = self
            .samples
            .iter()
            .map(|x| {
                let q = self.kernel.radial(
                    |rho| x.slice.value(0.0, rho * x.ell),
                    -1.0 - 2.0 * s,
                    r,
                    f64::INFINITY,
                    &[],
                    0.0,
                );
                x.weight * x.factor * q.value
            })
            .sum();
        r.powf(2.0 * s) * total
    }

    /// `r^{2s} ∫_{|w|>r} K̄(v+w, v) dw`.
    pub fn reverse_tail(&self, r: f64) -> f64 {
        let s = self.kernel.params.s;
        let total: f64 = self
            .samples
            .iter()
            .map(|x| {
                let breaks: Vec<f64> = x.slice.breaks().iter().map(|b| b / x.ell).collect();
                let scale = x.slice.value(0.0, x.ell).abs() + x.slice.value(r * x.ell, r * x.ell).abs();
                let q = self.kernel.radial(
                    |rho| {
                        let t = rho * x.ell;
                        x.slice.value(t, t)
                    },
                    -1.0 - 2.0 * s,
                    r,
                    f64::INFINITY,
                    &breaks,
                    1e-14 * scale,
                );
                x.weight * x.factor * q.value
            })
            .sum();
        r.powf(2.0 * s) * total
    }

    /// `PV ∫_{B_R} (K̄(v, v+w) - K̄(v+w, v)) dw`.
    pub fn cancel1(&self, radius: f64) -> f64 {
        self.samples.iter().map(|x| x.weight * x.factor * self.kernel.even_radial(&x.slice, x.ell, 0.0, radius)).sum()
    }

    /// `PV ∫_{B_r} (K̄(v, v+w) - K̄(v+w, v)) w dw`.
    pub fn cancel2(&self, r: f64) -> Vec3 {
        self.samples.iter().map(|x| x.omega * (x.weight * x.factor * self.kernel.odd_radial(&x.slice, x.ell, r))).sum()
    }

    /// Spherical measure of `{ω : density(ω) >= lambda}`.
    pub fn superlevel_measure(&self, density: &[f64], lambda: f64) -> f64 {
        self.samples.iter().zip(density).filter(|(_, g)| **g >= lambda).map(|(x, _)| x.weight).sum()
    }
}
