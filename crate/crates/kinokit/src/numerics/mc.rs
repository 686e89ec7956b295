//! Stratified Monte Carlo with counter-based per-stratum random streams.
//!
//! Stratum `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, and the first
//! uniform coordinate is stratified into `K` equal slabs. Strata are independent tasks whose
//! results are reduced in stratum order, so the estimate does not depend on scheduling.

use super::pairwise_sum;
use crate::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Number of strata used by default.
pub const DEFAULT_STRATA: usize = 64;

/// Maps unit-cube points to a domain and reports the importance weight `1/pdf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    /// Uniform in the ball `B_radius(center) ⊂ R^d`.
    Ball { d: usize, center: Vec<f64>, radius: f64 },
    /// Normal with mean `mean` and covariance `temperature · I` in `R^d`.
    Gaussian { d: usize, mean: Vec<f64>, temperature: f64 },
    /// Uniform on the axis-aligned box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Uniform on the unit sphere `S^{d-1}`.
    Sphere { d: usize },
    /// Independent concatenation of samplers.
    Product { parts: Vec<Sampler> },
}

impl Sampler {
    pub fn unit_ball(d: usize) -> Self {
        Sampler::Ball { d, center: vec![0.0; d], radius: 1.0 }
    }

    /// Number of uniforms consumed per draw.
    pub fn uniforms(&self) -> usize {
        match self {
            Sampler::Ball { d, .. } => *d,
            Sampler::Gaussian { d, .. } => 2 * d.div_ceil(2),
            Sampler::Box { lo, .. } => lo.len(),
            Sampler::Sphere { d } => d - 1,
            Sampler::Product { parts } => parts.iter().map(Sampler::uniforms).sum(),
        }
    }

    /// Number of output coordinates per draw.
    pub fn dim(&self) -> usize {
        match self {
            Sampler::Ball { d, .. } | Sampler::Gaussian { d, .. } | Sampler::Sphere { d } => *d,
            Sampler::Box { lo, .. } => lo.len(),
            Sampler::Product { parts } => parts.iter().map(Sampler::dim).sum(),
        }
    }

    /// Appends one point to `out` and returns its weight `1/pdf`.
    #[allow(clippy::needless_range_loop)]
    pub fn draw(&self, u: &[f64], out: &mut Vec<f64>) -> f64 {
        match self {
            Sampler::Ball { d, center, radius } => {
                let r = radius * u[0].powf(1.0 / *d as f64);
                let dir = sphere_point(*d, &u[1..]);
                out.extend(dir.iter().zip(center).map(|(x, c)| c + r * x));
                super::sphere::ball_volume(*d, *radius)
            }
            Sampler::Gaussian { d, mean, temperature } => {
                let sd = temperature.sqrt();
                let mut r2 = 0.0;
                for i in 0..*d {
                    let pair = i / 2;
                    let (a, b) = (u[2 * pair].max(f64::MIN_POSITIVE), u[2 * pair + 1]);
                    let rad = (-2.0 * a.ln()).sqrt();
                    let z = if i % 2 == 0 { rad * (2.0 * PI * b).cos() } else { rad * (2.0 * PI * b).sin() };
                    r2 += z * z;
                    out.push(mean[i] + sd * z);
                }
                (2.0 * PI * temperature).powf(*d as f64 / 2.0) * (0.5 * r2).exp()
            }
            Sampler::Box { lo, hi } => {
                let mut vol = 1.0;
                for i in 0..lo.len() {
                    out.push(lo[i] + u[i] * (hi[i] - lo[i]));
                    vol *= hi[i] - lo[i];
                }
                vol
            }
            Sampler::Sphere { d } => {
                out.extend(sphere_point(*d, u));
                super::sphere::sphere_area(*d)
            }
            Sampler::Product { parts } => {
                let mut w = 1.0;
                let mut offset = 0;
                for p in parts {
                    let k = p.uniforms();
                    w *= p.draw(&u[offset..offset + k], out);
                    offset += k;
                }
                w
            }
        }
    }
}

fn sphere_point(d: usize, u: &[f64]) -> Vec<f64> {
    if d == 2 {
        let th = 2.0 * PI * u[0];
        vec![th.cos(), th.sin()]
    } else {
        let z = 2.0 * u[0] - 1.0;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let ph = 2.0 * PI * u[1];
        vec![r * ph.cos(), r * ph.sin(), z]
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Estimates `∫ g` over the sampler's domain from `n` stratified draws.
pub fn mc_integrate<G>(g: G, sampler: &Sampler, n: usize, seed: u64) -> Result<McResult, Error>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let r = mc_integrate_many(|x, out| out[0] = g(x), 1, sampler, n, seed)?;
    Ok(r[0])
}

/// Estimates several integrals from the same draws; `g` writes `k` values per point.
pub fn mc_integrate_many<G>(g: G, k: usize, sampler: &Sampler, n: usize, seed: u64) -> Result<Vec<McResult>, Error>
where
    G: Fn(&[f64], &mut [f64]) + Sync,
{
    if n < 1000 {
        return Err(Error::Numerics(format!("Monte Carlo needs n >= 1000, got {n}")));
    }
    let strata = DEFAULT_STRATA;
    let per_stratum: Vec<(Vec<f64>, Vec<f64>, usize)> = (0..strata)
        .into_par_iter()
        .map(|s| {
            let count = n / strata + usize::from(s < n % strata);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let nu = sampler.uniforms();
            let mut u = vec![0.0; nu.max(1)];
            let mut point = Vec::with_capacity(sampler.dim());
            let mut vals = vec![0.0; k];
            let mut mean = vec![0.0; k];
            let mut m2 = vec![0.0; k];
            for i in 0..count {
                for (j, uj) in u.iter_mut().enumerate() {
                    let r: f64 = rng.random();
                    *uj = if j == 0 { (s as f64 + r) / strata as f64 } else { r };
                }
                point.clear();
                let w = sampler.draw(&u, &mut point);
                vals.iter_mut().for_each(|v| *v = 0.0);
                g(&point, &mut vals);
                for j in 0..k {
                    let x = vals[j] * w;
                    let delta = x - mean[j];
                    mean[j] += delta / (i + 1) as f64;
                    m2[j] += delta * (x - mean[j]);
                }
            }
            (mean, m2, count)
        })
        .collect();
    let out = (0..k)
        .map(|j| {
            let means: Vec<f64> = per_stratum.iter().map(|s| s.0[j] / strata as f64).collect();
            let vars: Vec<f64> = per_stratum
                .iter()
                .map(|s| {
                    let c = s.2 as f64;
                    if c > 1.0 {
                        s.1[j] / (c - 1.0) / c / (strata * strata) as f64
                    } else {
                        0.0
                    }
                })
                .collect();
            McResult { value: pairwise_sum(&means), std_error: pairwise_sum(&vars).sqrt(), n }
        })
        .collect();
    Ok(out)
}
