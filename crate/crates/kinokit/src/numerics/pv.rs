//! Principal-value integrals over annuli with antipodal pairing and an eps-ladder.

use super::gauss::adaptive;
use super::sphere::{ball_volume, SphereRule};
use super::QuadratureSpec;
use crate::{Error, Vec3};
use serde::{Deserialize, Serialize};

/// Ladder and direction settings for [`pv_ring_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvSpec {
    pub directions: usize,
    /// Ratio between consecutive inner radii of the ladder.
    pub ladder_ratio: f64,
    /// Smallest inner radius relative to the outer radius.
    pub eps_min_rel: f64,
}

impl Default for PvSpec {
    fn default() -> Self {
        Self { directions: 512, ladder_ratio: 0.25, eps_min_rel: 1e-6 }
    }
}

/// Extrapolated principal value with the ladder it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvResult {
    /// Limit `eps → 0` of the annulus integral.
    pub value: f64,
    /// Annulus integral at the requested inner radius.
    pub at_eps: f64,
    /// `(eps_k, annulus value)` along the ladder.
    pub ladder: Vec<(f64, f64)>,
    /// Successive differences of the ladder.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// `PV ∫_{eps < |v' - center| < r_outer} g(v') dv'` in `R^d`.
///
/// Each radial node evaluates `g` at antipodal pairs `center ± ρω`, so odd parts cancel exactly.
/// The inner radius runs down a geometric ladder to `eps_min_rel · r_outer`, and the last three
/// rungs are Aitken-extrapolated.
pub fn pv_ring_integral<G: Fn(&Vec3) -> f64>(
    g: G,
    center: &Vec3,
    d: usize,
    eps: f64,
    r_outer: f64,
    spec: &QuadratureSpec,
    pv: &PvSpec,
) -> Result<PvResult, Error> {
    if !(eps > 0.0 && eps < r_outer) {
        return Err(Error::Numerics(format!("annulus needs 0 < eps < R, got eps={eps}, R={r_outer}")));
    }
    let rule = SphereRule::fibonacci(d, pv.directions);
    let shell = |rho: f64| -> f64 {
        let s = rule.integrate(|w| 0.5 * (g(&(center + w * rho)) + g(&(center - w * rho))));
        s * rho.powi(d as i32 - 1)
    };
    let piece = |a: f64, b: f64| adaptive(shell, a, b, spec.abs_tol, spec.rel_tol * 0.1, spec.max_subdivisions);
    let first = piece(eps, r_outer);
    let mut converged = first.converged;
    let mut ladder = vec![(eps, first.value)];
    let eps_min = pv.eps_min_rel * r_outer;
    let mut cur = eps;
    let mut acc = first.value;
    while cur * pv.ladder_ratio >= eps_min {
        let next = cur * pv.ladder_ratio;
        let r = piece(next, cur);
        converged &= r.converged;
        acc += r.value;
        ladder.push((next, acc));
        cur = next;
    }
    let residuals: Vec<f64> = ladder.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let last = ladder.last().map(|l| l.1).unwrap_or(first.value);
    let value = if ladder.len() >= 3 {
        let n = ladder.len();
        let (v0, v1, v2) = (ladder[n - 3].1, ladder[n - 2].1, ladder[n - 1].1);
        let denom = (v2 - v1) - (v1 - v0);
        if denom.abs() > 1e-300 && ((v2 - v1) / (v1 - v0)).abs() < 1.0 {
            v2 - (v2 - v1).powi(2) / denom
        } else {
            v2
        }
    } else {
        last
    };
    let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
    if let Some(r) = residuals.last() {
        converged &= r.abs() <= tol.max(1e-3 * value.abs());
    }
    Ok(PvResult { value, at_eps: first.value, ladder, residuals, converged })
}

/// Volume of the annulus `eps < |v| < r` in `R^d`.
pub fn annulus_volume(d: usize, eps: f64, r: f64) -> f64 {
    ball_volume(d, r) - ball_volume(d, eps)
}
