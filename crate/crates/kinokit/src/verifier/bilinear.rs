//! Weighted Hölder bounds on the two halves of the collision operator, and the comparison of
//! Hölder seminorms across the change of variables.

use super::{CheckResult, CheckSelection, Coords, Verifier};
use crate::geometry::{Cylinder, Point};
use crate::holder::{seminorm_est, seminorm_est_mapped, weighted_norm_est, SampleSpec};
use crate::numerics::sphere::SphereRule;
use crate::{Error, Vec3};
use std::f64::consts::PI;

impl Verifier {
    fn small_spec(&self, shells: usize) -> SampleSpec {
        SampleSpec { base_points: 8, shells, directions: 8, seed: self.grid.seed.unwrap_or(self.seed), step_rel: 1e-3 }
    }

    /// Ratio of the weighted norm of `Q1(f, g)` (`which = 1`) or `Q2(f, g)` to the product of the
    /// norms of `f` and `g`, on the unit cylinder at `|v| e1`. `g` is the unit Maxwellian.
    pub(crate) fn bilinear(&self, sel: &CheckSelection, shell: f64, which: u8) -> Result<Vec<CheckResult>, Error> {
        let p = *self.kernel.params();
        let (s, d, gamma) = (p.s, p.d, p.gamma);
        let alpha = sel.alpha.unwrap_or(0.5 * (2.0 * s).min(1.0));
        if !(alpha > 0.0 && alpha < (2.0 * s).min(1.0)) {
            return Err(Error::Config(format!("{} needs 0 < alpha < min(1, 2s), got {alpha}", sel.id)));
        }
        let lift = alpha / (1.0 + 2.0 * s);
        let q = sel.q.unwrap_or(8.0);
        if !(q > d as f64 + gamma.max(0.0) + lift) {
            return Err(Error::Config(format!("{} needs q > d + max(γ, 0) + α/(1+2s), got {q}", sel.id)));
        }
        let alpha_p = 2.0 * s * alpha / (1.0 + 2.0 * s);
        let norm = (2.0 * PI).powf(-(d as f64) / 2.0);
        let g = move |v: &Vec3| norm * (-0.5 * v.norm_squared()).exp();
        let f_pt = |z: &Point| self.kernel.profile().eval(&z.v);
        let g_pt = |z: &Point| g(&z.v);
        let spec = self.small_spec(4);
        let shells = self.sweep_values(sel)?;
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let cyl = Cylinder::new(Point::velocity(e1 * shell), 1.0);
        let (numerator, denominator, weight) = if which == 1 {
            let rule = SphereRule::fibonacci(d, sel.directions.unwrap_or(if d == 3 { 256 } else { 64 }));
            let q1 = |z: &Point| self.kernel.apply_l(g, &z.v, &rule, 1.0).unwrap_or(f64::NAN);
            let weight = q - gamma - 2.0 * s - lift;
            let num = seminorm_est(&q1, &cyl, alpha_p, s, d, &spec)?.norm();
            let nf = weighted_norm_est(&f_pt, &shells, &e1, alpha, q, s, d, &spec)?.value;
            let ng = weighted_norm_est(&g_pt, &shells, &e1, 2.0 * s + alpha, q, s, d, &spec)?.value;
            (num, nf * ng, weight)
        } else {
            let q2 = |z: &Point| self.kernel.q2_eval(g, &z.v).unwrap_or(f64::NAN);
            let num = seminorm_est(&q2, &cyl, alpha_p, s, d, &spec)?.norm();
            let nf = weighted_norm_est(&f_pt, &shells, &e1, alpha, q, s, d, &spec)?.value;
            let ng = weighted_norm_est(&g_pt, &shells, &e1, alpha_p, q + lift + gamma, s, d, &spec)?.value;
            (num, nf * ng, q)
        };
        let weighted = (1.0 + shell).powf(weight) * numerator;
        let ratio = if denominator > 0.0 {
            weighted / denominator
        } else if weighted == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let coords = Coords {
            v: Some(vec![shell, 0.0, 0.0][..d].to_vec()),
            alpha: Some(alpha),
            q: Some(q),
            ..Coords::default()
        };
        Ok(vec![self
            .record(&sel.id, coords)
            .with("ratio", ratio)
            .with("weighted_output", weighted)
            .with("input_norms", denominator)
            .with("output_weight", weight)])
    }

    /// Seminorms of `F` on the image of the unit cylinder and of `F ∘ forward` on the cylinder,
    /// for a test function oscillating in time, position and velocity.
    pub(crate) fn holder_sandwich(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let p = *self.kernel.params();
        let (s, d, gamma) = (p.s, p.d, p.gamma);
        let beta = sel.alpha.unwrap_or(0.5 * (2.0 * s).min(1.0));
        if !(beta > 0.0 && beta < (2.0 * s).min(1.0)) {
            return Err(Error::Config(format!("holder_sandwich needs 0 < alpha < min(1, 2s), got {beta}")));
        }
        let m = self.cov(v0);
        let f = |z: &Point| z.t.cos() + z.x[0].cos() + z.v[0].cos();
        let fbar = |z: &Point| f(&m.forward(z));
        let q1 = Cylinder::unit();
        let spec = SampleSpec { base_points: 12, directions: 16, ..self.small_spec(20) };
        let original =
            seminorm_est_mapped(&f, &q1, |z| m.forward(z), |z| q1.contains(&m.backward(z), s), beta, s, d, &spec)?;
        let pulled = seminorm_est(&fbar, &q1, beta, s, d, &spec)?;
        let c_bar = ((gamma + 2.0 * s) / (2.0 * s)).max(1.0);
        Ok(vec![self
            .record(&sel.id, Coords { v0: Some(v0), alpha: Some(beta), ..Coords::default() })
            .with("upper_ratio", original.value / pulled.value)
            .with("lower_ratio", pulled.value / original.value)
            .with("seminorm_image", original.value)
            .with("seminorm_pulled_back", pulled.value)
            .with("expected_exponent", c_bar * beta)])
    }
}
