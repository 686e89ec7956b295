//! The collision kernel `K_f(v, v') = |v'-v|^{-d-2s} ∫_{w ⊥ (v'-v)} f(v+w) W(|w|) dw` and the
//! integrals of it used by the checks.
//!
//! Everything is organised around plane slices: for a base point `p` and a direction `σ`,
//! `K(p, p+ρσ) = ρ^{-d-2s} h(0)` and `K(p+ρσ, p) = ρ^{-d-2s} h(ρ)` with `h(t) = J(p+tσ, σ)`,
//! so any integral in polar coordinates about `p` reduces to one-dimensional integrals of `h`.

mod cutoff;
mod field;
mod plane;

pub use cutoff::{cutoff_phi, CutoffSpec};
pub use field::{DirectionField, DirectionSample};
pub use plane::PlaneSlice;

use crate::geometry::CovMap;
use crate::numerics::gauss::{power_weighted, QuadResult};
use crate::numerics::quad::QuadratureSpec;
use crate::numerics::sphere::SphereRule;
use crate::{Error, KernelMode, ModelParams, Profile, Vec3};
use plane::Weight;
use serde::Serialize;

/// A kernel value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub value: f64,
    pub error_est: f64,
    pub mode: KernelMode,
}

/// Kernel generated by a fixed profile.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub(crate) profile: Profile,
    pub(crate) params: ModelParams,
    pub(crate) spec: QuadratureSpec,
}

/// Smallest step, relative to the near-field radius, at which difference quotients are formed.
pub(crate) const DIFFERENCE_FLOOR: f64 = 1e-3;

/// Default direction count: 2048 on `S^2`, 512 on `S^1`.
pub fn default_directions(d: usize) -> usize {
    if d == 3 {
        2048
    } else {
        512
    }
}

/// Rule suited to integrands concentrated near the equator of `v`: banded for `|v| >= 2`,
/// otherwise the default Fibonacci rule.
pub fn rule_about(d: usize, v: &Vec3) -> SphereRule {
    let n = v.norm();
    if n >= 2.0 {
        SphereRule::banded(d, v, 1.0 / n, 48)
    } else {
        SphereRule::fibonacci(d, default_directions(d))
    }
}

impl Kernel {
    pub fn new(profile: Profile, params: ModelParams, spec: QuadratureSpec) -> Result<Self, Error> {
        params.validate()?;
        spec.validate()?;
        if profile.d != params.d {
            return Err(Error::InvalidParams(format!(
                "profile dimension {} differs from parameter dimension {}",
                profile.d, params.d
            )));
        }
        Ok(Self { profile, params, spec })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// Tolerance for inner one-dimensional integrals, tighter than the outer one.
    pub(crate) fn inner_tol(&self) -> f64 {
        (self.spec.rel_tol * 1e-2).max(1e-13)
    }

    pub(crate) fn weight(&self, rho: f64) -> Weight {
        let kappa = self.params.kappa();
        match self.params.kernel_mode {
            KernelMode::Model => Weight::Power { kappa },
            KernelMode::Carleman => Weight::Carleman {
                kappa,
                rho,
                cap: self.params.carleman_cap,
                lead: 2f64.powi(self.params.d as i32 - 1),
            },
        }
    }

    pub fn slice(&self, base: &Vec3, sigma: &Vec3) -> PlaneSlice<'_> {
        PlaneSlice::new(self, base, sigma)
    }

    /// `J(v, σ) = ∫_{w ⊥ σ} f(v+w) |w|^{γ+2s+1} dw`, always with the power weight.
    pub fn cone_direction_integral(&self, v: &Vec3, sigma: &Vec3) -> f64 {
        let d = self.params.d;
        let w = Weight::Power { kappa: self.params.kappa() };
        let q = sigma.normalize();
        let mut total = 0.0;
        for g in &self.profile.gaussians {
            let p = v - g.drift;
            let a = p.dot(&q);
            let beta = (p - q * a).norm();
            let norm = g.mass * (2.0 * std::f64::consts::PI * g.temperature).powf(-(d as f64) / 2.0);
            total += norm
                * (-a * a / (2.0 * g.temperature)).exp()
                * plane::gaussian_plane_moment(d, beta, g.temperature, &w, self.inner_tol());
        }
        if let Some(b) = &self.profile.bump {
            total += plane::bump_plane_integral(d, b, v, &q, &w);
        }
        total
    }

    /// `K_f(v, v')`.
    pub fn eval(&self, v: &Vec3, vp: &Vec3) -> Result<KernelEval, Error> {
        let diff = vp - v;
        let rho = diff.norm();
        if !(rho > 0.0) {
            return Err(Error::Kernel("kernel evaluated at coincident points".into()));
        }
        let sigma = diff / rho;
        let j = self.slice(v, &sigma).value(0.0, rho);
        let value = self.params.b_norm * rho.powf(-(self.params.d as f64) - 2.0 * self.params.s) * j;
        Ok(KernelEval { value, error_est: value.abs() * self.spec.rel_tol, mode: self.params.kernel_mode })
    }

    /// `|v0|^{-1-γ-2s}`, or 1 when the map is the identity.
    pub fn cov_prefactor(&self, m: &CovMap) -> f64 {
        if m.is_identity() {
            1.0
        } else {
            m.speed().powf(-1.0 - self.params.order())
        }
    }

    /// Transformed kernel `K̄(v, v+w) = |v0|^{-1-γ-2s} K_f(v̄, v̄ + T0 w)` with `v̄ = v0 + T0 v`.
    pub fn cov_eval(&self, m: &CovMap, v: &Vec3, w: &Vec3) -> Result<KernelEval, Error> {
        let vbar = m.vbar(v);
        let e = self.eval(&vbar, &(vbar + m.t0_apply(w)))?;
        let k = self.cov_prefactor(m);
        Ok(KernelEval { value: k * e.value, error_est: k * e.error_est, ..e })
    }

    /// `∫_lo^hi ρ^p g(ρ) dρ`, split at `breaks` and integrated piecewise with the power
    /// substitution. `hi` may be infinite when `p < -1`.
    pub(crate) fn radial<F: FnMut(f64) -> f64>(
        &self,
        mut g: F,
        p: f64,
        lo: f64,
        hi: f64,
        breaks: &[f64],
        abs_tol: f64,
    ) -> QuadResult {
        if !(hi > lo) {
            return QuadResult::ZERO;
        }
        let mut pts = vec![lo];
        pts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let pieces = (pts.len() - 1) as f64;
        pts.windows(2).fold(QuadResult::ZERO, |acc, w| {
            acc.combine(power_weighted(
                &mut g,
                p,
                w[0],
                w[1],
                abs_tol / pieces,
                self.spec.rel_tol * 0.1,
                self.spec.max_subdivisions,
            ))
        })
    }

    /// `∫ f(v+w) |w|^e dw`, by radial integration of spherical means about `v`.
    pub fn convolution(&self, v: &Vec3, exponent: f64) -> Result<f64, Error> {
        let d = self.params.d as f64;
        if !(exponent > -d) {
            return Err(Error::Kernel(format!("convolution with |w|^{exponent} diverges in dimension {d}")));
        }
        if self.profile.is_zero() {
            return Ok(0.0);
        }
        let mut breaks = Vec::new();
        let mut hi: f64 = 0.0;
        for g in &self.profile.gaussians {
            let beta = (v - g.drift).norm();
            let sd = g.temperature.sqrt();
            for k in [-12.0, -6.0, -2.0, 0.0, 2.0, 6.0] {
                breaks.push(beta + k * sd);
            }
            hi = hi.max(beta + 12.0 * sd);
        }
        if let Some(b) = &self.profile.bump {
            let beta = (v - b.center).norm();
            breaks.extend([beta - b.radius, beta, beta + b.radius]);
            hi = hi.max(beta + b.radius);
        }
        let r = self.radial(|r| self.profile.spherical_mean(v, r), d - 1.0 + exponent, 0.0, hi, &breaks, 0.0);
        if !r.converged && r.error > 1e-6 * r.value.abs() {
            return Err(Error::Quadrature {
                what: "convolution".into(),
                achieved: r.error,
                requested: self.spec.rel_tol * r.value.abs(),
            });
        }
        Ok(r.value)
    }

    /// `(f * |.|^γ)(v)`.
    pub fn conv_gamma(&self, v: &Vec3) -> Result<f64, Error> {
        self.convolution(v, self.params.gamma)
    }

    /// `c_b (f * |.|^γ)(v) g(v)`.
    pub fn q2_eval<G: Fn(&Vec3) -> f64>(&self, g: G, v: &Vec3) -> Result<f64, Error> {
        Ok(self.params.c_b * self.conv_gamma(v)? * g(v))
    }

    /// `∫_{|v'-v| > r} K_f(v, v') dv'`.
    pub fn tail_mass(&self, v: &Vec3, r: f64, rule: &SphereRule) -> Result<f64, Error> {
        if !(r > 0.0) {
            return Err(Error::Kernel("tail radius must be positive".into()));
        }
        let p = -1.0 - 2.0 * self.params.s;
        let mut total = 0.0;
        for (sigma, w) in rule.points.iter().zip(&rule.weights) {
            let sl = self.slice(v, sigma);
            let q = self.radial(|rho| sl.value(0.0, rho), p, r, f64::INFINITY, &[], 0.0);
            total += w * q.value;
        }
        Ok(self.params.b_norm * total)
    }

    /// `L g(v) = PV ∫ (g(v') - g(v)) K_f(v, v') dv'`.
    ///
    /// Antipodal directions are paired, so the integrand is a second difference of `g`. It is
    /// integrated against `ρ^{1-2s}` below `split` and against `ρ^{-1-2s}` above it.
    pub fn apply_l<G: Fn(&Vec3) -> f64>(&self, g: G, v: &Vec3, rule: &SphereRule, split: f64) -> Result<f64, Error> {
        if !(split > 0.0) {
            return Err(Error::Kernel("near-field radius must be positive".into()));
        }
        let s = self.params.s;
        let g0 = g(v);
        let mut total = 0.0;
        let mut failed = false;
        for (sigma, w) in rule.points.iter().zip(&rule.weights) {
            let sl = self.slice(v, sigma);
            let d2 = |rho: f64| 0.5 * (g(&(v + sigma * rho)) + g(&(v - sigma * rho))) - g0;
            // Below `h` the quotient is its curvature limit; evaluating it there only adds
            // cancellation error, which the weight no longer damps once 2s > 1.
            let h = DIFFERENCE_FLOOR * split;
            let near = self.radial(
                |rho| {
                    let r = rho.max(h);
                    sl.value(0.0, rho) * d2(r) / (r * r)
                },
                1.0 - 2.0 * s,
                0.0,
                split,
                &[],
                self.spec.abs_tol,
            );
            let far = self.radial(
                |rho| sl.value(0.0, rho) * d2(rho),
                -1.0 - 2.0 * s,
                split,
                f64::INFINITY,
                &[],
                self.spec.abs_tol,
            );
            failed |= !(near.converged && far.converged);
            total += w * (near.value + far.value);
        }
        if failed && !total.is_finite() {
            return Err(Error::Kernel("apply_l quadrature failed".into()));
        }
        Ok(self.params.b_norm * total)
    }

    /// `PV ∫_{B_R(v)} (K(v,v') - K(v',v)) dv'`; `radius = ∞` gives the whole space.
    pub fn cancel1(&self, v: &Vec3, radius: f64, rule: &SphereRule) -> Result<f64, Error> {
        if !(radius > 0.0) {
            return Err(Error::Kernel("cancellation radius must be positive".into()));
        }
        let mut total = 0.0;
        for (sigma, w) in rule.points.iter().zip(&rule.weights) {
            let sl = self.slice(v, sigma);
            total += w * self.even_radial(&sl, 1.0, 0.0, radius);
        }
        Ok(self.params.b_norm * total)
    }

    /// `∫_lo^hi ρ^{-1-2s} [h(0) - (h(ρℓ) + h(-ρℓ))/2] dρ` with the slice evaluated at `ρℓ`.
    pub(crate) fn even_radial(&self, sl: &PlaneSlice<'_>, ell: f64, lo: f64, hi: f64) -> f64 {
        let s = self.params.s;
        let reach = sl.reach() / ell;
        if reach == 0.0 {
            return 0.0;
        }
        let breaks: Vec<f64> = sl.breaks().iter().map(|b| b / ell).collect();
        let scale = sl.value(0.0, ell).abs();
        let mid = hi.min(reach);
        let mut total = 0.0;
        if mid > lo {
            total += self
                .radial(
                    |rho| {
                        let t = rho * ell;
                        sl.even_excess(t, t) / (rho * rho)
                    },
                    1.0 - 2.0 * s,
                    lo,
                    mid,
                    &breaks,
                    1e-14 * scale,
                )
                .value;
        }
        let start = lo.max(reach);
        if hi > start {
            // Beyond the reach only h(0) survives.
            total += self.radial(|rho| sl.value(0.0, rho * ell), -1.0 - 2.0 * s, start, hi, &[], 1e-14 * scale).value;
        }
        total
    }

    /// `PV ∫_{B_r(v)} (K(v,v') - K(v',v)) (v' - v) dv'`.
    pub fn cancel2(&self, v: &Vec3, r: f64, rule: &SphereRule) -> Result<Vec3, Error> {
        if !(r > 0.0) {
            return Err(Error::Kernel("cancellation radius must be positive".into()));
        }
        let mut total = Vec3::zeros();
        for (sigma, w) in rule.points.iter().zip(&rule.weights) {
            let sl = self.slice(v, sigma);
            total += sigma * (w * self.odd_radial(&sl, 1.0, r));
        }
        Ok(total * self.params.b_norm)
    }

    /// `∫_0^r ρ^{-2s} (h(-ρℓ) - h(ρℓ))/2 dρ`.
    pub(crate) fn odd_radial(&self, sl: &PlaneSlice<'_>, ell: f64, r: f64) -> f64 {
        let breaks: Vec<f64> = sl.breaks().iter().map(|b| b / ell).collect();
        let scale = sl.value(0.0, ell).abs();
        self.radial(
            |rho| {
                let t = rho * ell;
                sl.odd_part(t, t) / rho
            },
            1.0 - 2.0 * self.params.s,
            0.0,
            r,
            &breaks,
            1e-14 * scale,
        )
        .value
    }

    /// `∫_{B_R ∖ E_R} (K(v̄, v̄+w) - K(v̄+w, v̄)) dw` with `E_R = T0 B_R`.
    ///
    /// Along a direction `ω` the ellipsoid ends at `R / |T0^{-1} ω|`, so the region is a radial
    /// interval per direction.
    pub fn cov_pv_discrepancy(&self, m: &CovMap, vbar: &Vec3, radius: f64, rule: &SphereRule) -> Result<f64, Error> {
        if !(radius > 0.0) {
            return Err(Error::Kernel("radius must be positive".into()));
        }
        let mut total = 0.0;
        for (omega, w) in rule.points.iter().zip(&rule.weights) {
            let stretch = m.t0_inverse(omega).norm();
            let lo = radius / stretch;
            if lo >= radius {
                continue;
            }
            let sl = self.slice(vbar, omega);
            total += w * self.even_radial(&sl, 1.0, lo, radius);
        }
        Ok(self.params.b_norm * total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn maxwell_kernel(gamma: f64, s: f64) -> Kernel {
        let p = ModelParams::new(3, s, gamma).unwrap();
        Kernel::new(Profile::maxwellian(3), p, QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn zero_profile_gives_zero() {
        let p = ModelParams::new(3, 0.25, 0.0).unwrap();
        let k = Kernel::new(Profile::zero(3), p, QuadratureSpec::default()).unwrap();
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(k.eval(&Vec3::zeros(), &e1).unwrap().value, 0.0);
        assert_eq!(k.cone_direction_integral(&Vec3::zeros(), &e1), 0.0);
        let rule = SphereRule::fibonacci(3, 64);
        assert_eq!(k.tail_mass(&Vec3::zeros(), 1.0, &rule).unwrap(), 0.0);
        assert_eq!(k.cancel1(&Vec3::zeros(), 1.0, &rule).unwrap(), 0.0);
    }

    #[test]
    fn coincident_points_rejected() {
        let k = maxwell_kernel(0.0, 0.25);
        assert!(k.eval(&Vec3::zeros(), &Vec3::zeros()).is_err());
    }

    #[test]
    fn axis_value_and_scaling() {
        let k = maxwell_kernel(0.0, 0.25);
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let v1 = k.eval(&Vec3::zeros(), &e1).unwrap().value;
        assert!((v1 - 0.6166).abs() < 1e-4, "{v1}");
        let v2 = k.eval(&Vec3::zeros(), &(e1 * 2.0)).unwrap().value;
        assert!((v2 / v1 - 2f64.powf(-3.5)).abs() < 1e-12);
    }

    #[test]
    fn conv_gamma_moments() {
        let k = maxwell_kernel(0.0, 0.25);
        assert!((k.conv_gamma(&Vec3::new(0.3, 2.0, -1.0)).unwrap() - 1.0).abs() < 1e-8);
        let k = maxwell_kernel(2.0, 0.25);
        assert!((k.conv_gamma(&Vec3::zeros()).unwrap() - 3.0).abs() < 1e-8);
    }

    #[test]
    fn tail_mass_scales_exactly() {
        let k = maxwell_kernel(0.0, 0.25);
        let rule = SphereRule::fibonacci(3, 128);
        let v = Vec3::new(0.5, 0.0, 0.0);
        let a = k.tail_mass(&v, 1.0, &rule).unwrap();
        let b = k.tail_mass(&v, 2.0, &rule).unwrap();
        assert!((a / b - 2f64.powf(0.5)).abs() < 1e-12);
    }

    #[test]
    fn apply_l_is_smooth_in_v_for_strong_singularity() {
        // 2s > 1: the near-field weight no longer hides cancellation in the second difference.
        let k = maxwell_kernel(-0.5, 0.75);
        let rule = SphereRule::fibonacci(3, 64);
        let g = |v: &Vec3| (-0.5 * v.norm_squared()).exp();
        let vals: Vec<f64> = (0..6)
            .map(|i| k.apply_l(g, &Vec3::new(1.0 + 0.01 * f64::from(i), 0.0, 0.0), &rule, 1.0).unwrap())
            .collect();
        for w in vals.windows(3) {
            assert!((w[0] - 2.0 * w[1] + w[2]).abs() < 1e-3 * w[1].abs(), "{vals:?}");
        }
    }

    #[test]
    fn apply_l_kills_constants_and_linear_functions() {
        let k = maxwell_kernel(0.0, 0.25);
        let rule = SphereRule::fibonacci(3, 64);
        let v = Vec3::new(0.2, -0.1, 0.4);
        assert!(k.apply_l(|_| 3.0, &v, &rule, 0.5).unwrap().abs() < 1e-9);
        let lin = |w: &Vec3| 1.0 + w.dot(&Vec3::new(0.3, -2.0, 1.0));
        assert!(k.apply_l(lin, &v, &rule, 0.5).unwrap().abs() < 1e-8);
    }

    #[test]
    fn cancel1_matches_direct_radial_sum() {
        // Second route: integrate K(v,v') - K(v',v) in plain polar coordinates with eval.
        let k = maxwell_kernel(0.0, 0.25);
        let rule = SphereRule::fibonacci(3, 32);
        let v = Vec3::new(0.7, 0.2, 0.0);
        let fast = k.cancel1(&v, 0.5, &rule).unwrap();
        let gl = crate::numerics::GaussLegendre::cached(40);
        let mut slow = 0.0;
        for (sigma, w) in rule.points.iter().zip(&rule.weights) {
            let f = |rho: f64| {
                let vp = v + sigma * rho;
                let vm = v - sigma * rho;
                let d = k.eval(&v, &vp).unwrap().value - k.eval(&vp, &v).unwrap().value
                    + k.eval(&v, &vm).unwrap().value
                    - k.eval(&vm, &v).unwrap().value;
                0.5 * d * rho * rho
            };
            slow += w * gl.integrate_panels(f, &[0.0, 0.05, 0.15, 0.5]);
        }
        assert!((fast - slow).abs() < 1e-6 * (1.0 + slow.abs()), "{fast} vs {slow}");
        let _ = PI;
    }
}
