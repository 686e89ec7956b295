use super::Kernel;
use crate::numerics::gauss::GaussLegendre;
use crate::numerics::sphere::SphereRule;
use crate::{Error, Vec3};

/// Smooth cutoff equal to 1 on `B_{|v0|/9}` and 0 outside `B_{|v0|/8}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub v0: Vec3,
}

impl CutoffSpec {
    pub fn new(v0: Vec3) -> Self {
        Self { v0 }
    }

    pub fn inner(&self) -> f64 {
        self.v0.norm() / 9.0
    }

    pub fn outer(&self) -> f64 {
        self.v0.norm() / 8.0
    }
}

/// `C^∞` step: 1 for `x <= 0`, 0 for `x >= 1`.
fn smooth_step(x: f64) -> f64 {
    let psi = |y: f64| if y <= 0.0 { 0.0 } else { (-1.0 / y).exp() };
    let a = psi(1.0 - x);
    let b = psi(x);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// `φ(v) = φ̄(|v| / |v0|)` with `φ̄` rising smoothly between radii `1/9` and `1/8`.
pub fn cutoff_phi(spec: &CutoffSpec, v: &Vec3) -> f64 {
    let (a, b) = (spec.inner(), spec.outer());
    smooth_step((v.norm() - a) / (b - a))
}

impl Kernel {
    /// `∫_{|v'| < |v0|/8} |g(v')| φ(v') K_f(v, v') dv'` by a product rule centred at the origin.
    pub fn bump_tail<G: Fn(&Vec3) -> f64>(&self, spec: &CutoffSpec, g: G, v: &Vec3) -> Result<f64, Error> {
        let d = self.params.d;
        let outer = spec.outer();
        if !(outer > 0.0) {
            return Err(Error::Kernel("cutoff needs v0 != 0".into()));
        }
        if (v.norm() - outer) <= 0.0 {
            return Err(Error::Kernel("bump_tail needs v outside the cutoff ball".into()));
        }
        let rule = SphereRule::fibonacci(d, if d == 3 { 512 } else { 128 });
        let gl = GaussLegendre::cached(24);
        let mut panels: Vec<f64> = (0..=8).map(|k| outer * k as f64 / 8.0).collect();
        panels.dedup();
        let mut total = 0.0;
        for (omega, w) in rule.points.iter().zip(&rule.weights) {
            total += w * gl.integrate_panels(
                |r| {
                    let vp = omega * r;
                    let gv = g(&vp).abs();
                    if gv == 0.0 {
                        return 0.0;
                    }
                    let k = self.eval(v, &vp).map(|e| e.value).unwrap_or(0.0);
                    r.powi(d as i32 - 1) * gv * cutoff_phi(spec, &vp) * k
                },
                &panels,
            );
        }
        Ok(total)
    }
}
