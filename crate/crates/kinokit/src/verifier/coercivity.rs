//! Coercivity of `-∫ Q(f, g) g` against the anisotropic seminorm.
//!
//! The bilinear form splits exactly as
//! `-∫ Q(f,g) g = ½∬ (g'-g)² K + ½∫ g² P - c_b ∫ (f * |.|^γ) g²` with
//! `P(v) = PV ∫ (K(v,v') - K(v',v)) dv'`. The last two terms are `I2` and `I3`; `c_b` is set to
//! half the measured cancellation constant so that they agree. Velocities are Monte Carlo
//! samples of a Gaussian; every inner integral is deterministic quadrature.

use super::{CheckResult, CheckSelection, Coords, Verifier};
use crate::geometry::dgs;
use crate::kernel::DIFFERENCE_FLOOR;
use crate::numerics::mc::{Sampler, DEFAULT_STRATA};
use crate::numerics::sphere::SphereRule;
use crate::{Error, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Temperature of the velocity sampler.
const SAMPLER_TEMPERATURE: f64 = 2.0;
/// Scan points locating `{t : d_GS(v, v+tσ) < ρ}`.
const REGION_SCAN: usize = 32;

/// Per-sample terms, already divided by the sampling density.
#[derive(Debug, Clone, Copy, Default)]
struct Terms {
    i1: f64,
    i2: f64,
    i3: f64,
    seminorm: f64,
    zero_order: f64,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = crate::numerics::pairwise_sum(xs) / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}

impl Verifier {
    pub(crate) fn gs_coercivity(&self, sel: &CheckSelection, rho: f64) -> Result<Vec<CheckResult>, Error> {
        let d = self.d();
        let norm = (2.0 * PI).powf(-(d as f64) / 2.0);
        self.gs_with(sel, rho, &move |v: &Vec3| norm * (-0.5 * v.norm_squared()).exp())
    }

    pub(crate) fn gs_with<G: Fn(&Vec3) -> f64 + Sync>(
        &self,
        sel: &CheckSelection,
        rho: f64,
        g: &G,
    ) -> Result<Vec<CheckResult>, Error> {
        if !(rho > 0.0) {
            return Err(Error::Config("coercivity radius must be positive".into()));
        }
        let p = *self.kernel.params();
        let d = p.d;
        let rule = SphereRule::fibonacci(d, sel.directions.unwrap_or(if d == 2 { 32 } else { 128 }));
        let conv0 = self.kernel.conv_gamma(&Vec3::zeros())?;
        let c_cancel =
            if conv0 == 0.0 { 0.0 } else { self.kernel.cancel1(&Vec3::zeros(), f64::INFINITY, &rule)? / conv0 };
        let c_b = 0.5 * c_cancel;
        let big_c = self
            .tol
            .gs_zero_order
            .unwrap_or((0.5 * c_cancel.abs() + c_b.abs()) * (self.bounds.mass_max + self.bounds.energy_max));
        let n = sel.n.unwrap_or(self.mc_samples);
        let sampler = Sampler::Gaussian { d, mean: vec![0.0; d], temperature: SAMPLER_TEMPERATURE };
        let seed = self.grid.seed.unwrap_or(self.seed) ^ rho.to_bits();
        let terms: Vec<Result<Vec<Terms>, Error>> = (0..DEFAULT_STRATA)
            .into_par_iter()
            .map(|k| {
                let count = n / DEFAULT_STRATA + usize::from(k < n % DEFAULT_STRATA);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let mut out = Vec::with_capacity(count);
                let mut pt = Vec::with_capacity(d);
                for _ in 0..count {
                    let u: Vec<f64> = (0..sampler.uniforms()).map(|_| rng.random::<f64>()).collect();
                    pt.clear();
                    let w = sampler.draw(&u, &mut pt);
                    let v = Vec3::from_fn(|i, _| if i < d { pt[i] } else { 0.0 });
                    let t = self.gs_terms(&v, rho, c_b, &rule, g)?;
                    out.push(Terms {
                        i1: t.i1 * w,
                        i2: t.i2 * w,
                        i3: t.i3 * w,
                        seminorm: t.seminorm * w,
                        zero_order: t.zero_order * w,
                    });
                }
                Ok(out)
            })
            .collect();
        let mut samples = Vec::with_capacity(n);
        for t in terms {
            samples.extend(t?);
        }
        let col = |f: &dyn Fn(&Terms) -> f64| samples.iter().map(f).collect::<Vec<f64>>();
        let (i1, i1_se) = mean_and_se(&col(&|t| t.i1));
        let (i2, i2_se) = mean_and_se(&col(&|t| t.i2));
        let (i3, i3_se) = mean_and_se(&col(&|t| t.i3));
        let (lhs, lhs_se) = mean_and_se(&col(&|t| t.i1 + t.i2 - t.i3));
        let (gap, gap_se) = mean_and_se(&col(&|t| t.i2 - t.i3));
        let (sn, sn_se) = mean_and_se(&col(&|t| t.seminorm));
        let (z, _) = mean_and_se(&col(&|t| t.zero_order));
        let c = (lhs + big_c * z) / sn;
        // Delta method for the ratio estimator, using the paired samples.
        let (_, c_se) = mean_and_se(&col(&|t| (t.i1 + t.i2 - t.i3 + big_c * t.zero_order - c * t.seminorm) / sn));
        let inconclusive = !(sn > 0.0) || sn_se > self.tol.gs_mc_rel_max * sn;
        let c_lower = if inconclusive { f64::NAN } else { c - 3.0 * c_se };
        let mut rec = self
            .record(&sel.id, Coords { rho: Some(rho), ..Coords::default() })
            .with("c_lower", c_lower)
            .with("c", c)
            .with("c_stderr", c_se)
            .with("lhs", lhs)
            .with("lhs_stderr", lhs_se)
            .with("i1", i1)
            .with("i1_stderr", i1_se)
            .with("i2", i2)
            .with("i2_stderr", i2_se)
            .with("i3", i3)
            .with("i3_stderr", i3_se)
            .with("i2_minus_i3", gap)
            .with("i2_minus_i3_stderr", gap_se)
            .with("seminorm", sn)
            .with("seminorm_stderr", sn_se)
            .with("zero_order", z)
            .with("zero_order_constant", big_c)
            .with("cancellation_constant", c_cancel)
            .with("c_b", c_b)
            .with("samples", n as f64);
        if inconclusive {
            rec = rec.note("inconclusive: Monte Carlo error of the seminorm exceeds the allowed fraction");
        }
        Ok(vec![rec])
    }

    fn gs_terms<G: Fn(&Vec3) -> f64>(
        &self,
        v: &Vec3,
        rho: f64,
        c_b: f64,
        rule: &SphereRule,
        g: &G,
    ) -> Result<Terms, Error> {
        let p = *self.kernel.params();
        let (s, d) = (p.s, p.d as f64);
        let gv = g(v);
        let mut i1 = 0.0;
        let mut sn = 0.0;
        for (sigma, w) in rule.points.iter().zip(&rule.weights) {
            let sl = self.kernel.slice(v, sigma);
            let dg = |t: f64| g(&(v + sigma * t)) - gv;
            // Difference quotient at a floored step, as in `Kernel::apply_l`.
            let quotient = |t: f64| {
                let h = t.max(DIFFERENCE_FLOOR);
                dg(h) / h
            };
            let near =
                self.kernel.radial(|t| quotient(t).powi(2) * sl.value(0.0, t), 1.0 - 2.0 * s, 0.0, 1.0, &[], 0.0);
            let far =
                self.kernel.radial(|t| dg(t).powi(2) * sl.value(0.0, t), -1.0 - 2.0 * s, 1.0, f64::INFINITY, &[], 0.0);
            i1 += w * (near.value + far.value);
            let a = v.dot(sigma);
            for (lo, hi) in gs_region(v, sigma, rho) {
                let q = self.kernel.radial(
                    |t| {
                        let q = quotient(t);
                        let ratio = ((a + 0.5 * t).powi(2) + 1.0).sqrt();
                        q * q * (1.0 + (v * 2.0 + sigma * t).norm()).powf(p.kappa()) * ratio.powf(-d - 2.0 * s)
                    },
                    1.0 - 2.0 * s,
                    lo,
                    hi,
                    &[],
                    0.0,
                );
                sn += w * q.value;
            }
        }
        let i1 = 0.5 * p.b_norm * i1;
        let g2 = gv * gv;
        let (i2, i3) = if g2 == 0.0 {
            (0.0, 0.0)
        } else {
            let pv = self.kernel.cancel1(v, f64::INFINITY, rule)?;
            (0.5 * g2 * pv, c_b * self.kernel.conv_gamma(v)? * g2)
        };
        Ok(Terms { i1, i2, i3, seminorm: sn, zero_order: g2 * (1.0 + v.norm()).powf(p.gamma.max(0.0)) })
    }
}

/// Intervals of `t ∈ (0, ρ]` with `d_GS(v, v+tσ) < ρ`; `d_GS >= t` bounds the region by `ρ`.
fn gs_region(v: &Vec3, sigma: &Vec3, rho: f64) -> Vec<(f64, f64)> {
    let inside = |t: f64| dgs(v, &(v + sigma * t)) < rho;
    let ts: Vec<f64> = (0..=REGION_SCAN).map(|k| rho * k as f64 / REGION_SCAN as f64).collect();
    let crossing = |mut lo: f64, mut hi: f64, lo_in: bool| {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) == lo_in {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut out = Vec::new();
    let mut start = Some(0.0);
    let mut prev = true;
    for k in 1..ts.len() {
        let cur = inside(ts[k]);
        if cur != prev {
            let c = crossing(ts[k - 1], ts[k], prev);
            match start.take() {
                Some(a) => out.push((a, c)),
                None => start = Some(c),
            }
        }
        prev = cur;
    }
    if let Some(a) = start {
        out.push((a, rho));
    }
    out
}
