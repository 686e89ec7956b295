//! Measured forms of the interpolation, product, localization and increment inequalities.

use super::increments::{increment_v, increment_x};
use super::seminorm::{grad_x_sup, sample_cylinder, seminorm_est, SampleSpec};
use crate::geometry::{knorm, Cylinder, Point};
use crate::verifier::{CheckResult, Coords, Tolerance};
use crate::{Error, ModelParams, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderCheckSpec {
    pub c_max: f64,
    pub sample: SampleSpec,
}

impl Default for HolderCheckSpec {
    fn default() -> Self {
        Self { c_max: 10.0, sample: SampleSpec::default() }
    }
}

fn ratio_or_vacuous(num: f64, den: f64) -> (f64, bool) {
    if den == 0.0 {
        (if num == 0.0 { 0.0 } else { f64::INFINITY }, num == 0.0)
    } else {
        (num / den, false)
    }
}

/// `[f]_{a2} / ([f]_{a1}^θ [f]_{a3}^{1-θ} + r^{a1-a2} [f]_{a1})` with `a2 = θ a1 + (1-θ) a3`.
pub fn check_interpolation<F: Fn(&Point) -> f64>(
    f: &F,
    label: &str,
    params: &ModelParams,
    q: &Cylinder,
    exponents: (f64, f64, f64),
    spec: &HolderCheckSpec,
) -> Result<CheckResult, Error> {
    let (a1, a2, a3) = exponents;
    if !(a1 < a2 && a2 < a3) {
        return Err(Error::Holder(format!("interpolation needs a1 < a2 < a3, got {a1}, {a2}, {a3}")));
    }
    let theta = (a3 - a2) / (a3 - a1);
    let (s, d) = (params.s, params.d);
    let n1 = seminorm_est(f, q, a1, s, d, &spec.sample)?.value;
    let n2 = seminorm_est(f, q, a2, s, d, &spec.sample)?;
    let n3 = seminorm_est(f, q, a3, s, d, &spec.sample)?.value;
    let den = n1.powf(theta) * n3.powf(1.0 - theta) + q.radius.powf(a1 - a2) * n1;
    let (ratio, vacuous) = ratio_or_vacuous(n2.value, den);
    let mut out = CheckResult::new(
        "holder_interpolation",
        params,
        label,
        Coords { r: Some(q.radius), alpha: Some(a2), ..Coords::default() },
        Tolerance::at_most("ratio", spec.c_max),
    )
    .with("seminorm_a1", n1)
    .with("seminorm_a2", n2.value)
    .with("seminorm_a3", n3)
    .with("theta", theta)
    .with("ratio", ratio);
    if let Some((a, b)) = n2.witness {
        out.witnesses = vec![a, b];
    }
    if vacuous {
        out = out.note("vacuous: all seminorms vanish");
    }
    Ok(out.finish())
}

/// `‖fg‖ / (‖f‖ ‖g‖)` in `C^α_ℓ(Q)`.
pub fn check_product<F: Fn(&Point) -> f64, G: Fn(&Point) -> f64>(
    f: &F,
    g: &G,
    label: &str,
    params: &ModelParams,
    q: &Cylinder,
    alpha: f64,
    spec: &HolderCheckSpec,
) -> Result<CheckResult, Error> {
    let (s, d) = (params.s, params.d);
    let fg = |z: &Point| f(z) * g(z);
    let nfg = seminorm_est(&fg, q, alpha, s, d, &spec.sample)?.norm();
    let nf = seminorm_est(f, q, alpha, s, d, &spec.sample)?.norm();
    let ng = seminorm_est(g, q, alpha, s, d, &spec.sample)?.norm();
    let (ratio, vacuous) = ratio_or_vacuous(nfg, nf * ng);
    let mut out = CheckResult::new(
        "holder_product",
        params,
        label,
        Coords { r: Some(q.radius), alpha: Some(alpha), ..Coords::default() },
        Tolerance::at_most("ratio", spec.c_max),
    )
    .with("norm_fg", nfg)
    .with("norm_f", nf)
    .with("norm_g", ng)
    .with("ratio", ratio);
    if vacuous {
        out = out.note("vacuous: zero factor");
    }
    Ok(out.finish())
}

/// Global seminorm on `Q_1` against `C0 + r0^{-α} osc f`, where `C0` is the largest seminorm
/// over sampled sub-cylinders `Q_{r0}(z)`.
pub fn check_localization<F: Fn(&Point) -> f64>(
    f: &F,
    label: &str,
    params: &ModelParams,
    alpha: f64,
    r0: f64,
    spec: &HolderCheckSpec,
) -> Result<CheckResult, Error> {
    let (s, d) = (params.s, params.d);
    let q1 = Cylinder::unit();
    let global = seminorm_est(f, &q1, alpha, s, d, &spec.sample)?.value;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.sample.seed ^ 0x5bd1_e995);
    let mut c0 = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..256 {
        let z = sample_cylinder(&mut rng, &q1, s, d);
        let fz = f(&z);
        lo = lo.min(fz);
        hi = hi.max(fz);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.sample.seed ^ 0x1b87_3593);
    let local_spec = SampleSpec { base_points: spec.sample.base_points.div_ceil(2), ..spec.sample };
    for _ in 0..12 {
        let c = sample_cylinder(&mut rng, &q1, s, d);
        let est = seminorm_est(f, &Cylinder::new(c, r0), alpha, s, d, &local_spec)?;
        c0 = c0.max(est.value);
    }
    let osc = hi - lo;
    let (ratio, vacuous) = ratio_or_vacuous(global, c0 + r0.powf(-alpha) * osc);
    let mut out = CheckResult::new(
        "holder_localization",
        params,
        label,
        Coords { r: Some(r0), alpha: Some(alpha), ..Coords::default() },
        Tolerance::at_most("ratio", spec.c_max),
    )
    .with("global_seminorm", global)
    .with("local_seminorm", c0)
    .with("oscillation", osc)
    .with("ratio", ratio);
    if vacuous {
        out = out.note("vacuous: constant function");
    }
    Ok(out.finish())
}

fn spread(values: &[f64]) -> f64 {
    let pos: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    if pos.is_empty() {
        return 1.0;
    }
    pos.iter().copied().fold(0.0, f64::max) / pos.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `‖Δ_y f‖_{C^α(Q_{1/2})} / (‖f‖_{C^{2s+α}(Q_1)} ‖(0,y,0)‖^{2s})` over `y = m e_1`, `m ∈ ys`.
pub fn check_increment_x_bound<F: Fn(&Point) -> f64>(
    f: &F,
    label: &str,
    params: &ModelParams,
    alpha: f64,
    ys: &[f64],
    spec: &HolderCheckSpec,
) -> Result<CheckResult, Error> {
    let (s, d) = (params.s, params.d);
    if !(alpha > 0.0 && alpha <= 1f64.min(2.0 * s)) {
        return Err(Error::Holder(format!("0 < alpha <= min(1, 2s) violated: alpha = {alpha}, s = {s}")));
    }
    if let Some(y) = ys.iter().find(|y| !(y.abs() < 0.5)) {
        return Err(Error::Holder(format!("|y| < R^(1+2s)/2 = 0.5 violated: |y| = {y}")));
    }
    let q = Cylinder::unit();
    let inner = Cylinder::new(Point::origin(), 0.5);
    let nf = seminorm_est(f, &q, 2.0 * s + alpha, s, d, &spec.sample)?.norm();
    let mut ratios = Vec::new();
    for &m in ys {
        let y = Vec3::new(m, 0.0, 0.0);
        let dy = increment_x(f, y);
        let num = seminorm_est(&dy, &inner, alpha, s, d, &spec.sample)?.norm();
        let scale = knorm(&Point::new(0.0, y, Vec3::zeros()), s).powf(2.0 * s);
        ratios.push(ratio_or_vacuous(num, nf * scale).0);
    }
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let out = CheckResult::new(
        "holder_increment_x",
        params,
        label,
        Coords { alpha: Some(alpha), r: Some(1.0), ..Coords::default() },
        Tolerance::at_most("ratio", spec.c_max),
    )
    .with("norm_f", nf)
    .with("ratio", worst)
    .with("ratio_spread", spread(&ratios));
    Ok(out.finish())
}

/// `[Δ_w f]_{C^α(Q_{1/2})} / (([f]_{2s+α} + |w|^{1-α} ‖∇_x f‖_{C^0}) ‖(0,0,w)‖^{2s})` over
/// `w = m e_1`, `m ∈ ws`.
pub fn check_increment_v_bound<F: Fn(&Point) -> f64>(
    f: &F,
    label: &str,
    params: &ModelParams,
    alpha: f64,
    ws: &[f64],
    spec: &HolderCheckSpec,
) -> Result<CheckResult, Error> {
    let (s, d) = (params.s, params.d);
    if !(2.0 * s + alpha < 1.0) {
        return Err(Error::Holder(format!("2s + alpha < 1 violated: 2s + alpha = {}", 2.0 * s + alpha)));
    }
    if !(alpha > 0.0 && alpha <= 1f64.min(2.0 * s)) {
        return Err(Error::Holder(format!("0 < alpha <= min(1, 2s) violated: alpha = {alpha}, s = {s}")));
    }
    if let Some(w) = ws.iter().find(|w| !(w.abs() < 0.5)) {
        return Err(Error::Holder(format!("|w| < R/2 = 0.5 violated: |w| = {w}")));
    }
    let q = Cylinder::unit();
    let inner = Cylinder::new(Point::origin(), 0.5);
    let sf = seminorm_est(f, &q, 2.0 * s + alpha, s, d, &spec.sample)?.value;
    let gx = grad_x_sup(f, &q, s, d, &spec.sample);
    let mut ratios = Vec::new();
    for &m in ws {
        let w = Vec3::new(m, 0.0, 0.0);
        let dw = increment_v(f, w);
        let num = seminorm_est(&dw, &inner, alpha, s, d, &spec.sample)?.value;
        let den = (sf + m.abs().powf(1.0 - alpha) * gx) * knorm(&Point::velocity(w), s).powf(2.0 * s);
        ratios.push(ratio_or_vacuous(num, den).0);
    }
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let out = CheckResult::new(
        "holder_increment_v",
        params,
        label,
        Coords { alpha: Some(alpha), r: Some(1.0), ..Coords::default() },
        Tolerance::at_most("ratio", spec.c_max),
    )
    .with("seminorm_f", sf)
    .with("grad_x_sup", gx)
    .with("ratio", worst)
    .with("ratio_spread", spread(&ratios));
    Ok(out.finish())
}
