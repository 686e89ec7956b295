//! Sampled kinetic Hölder seminorms.
//!
//! Base points come from one seeded stream and each base point owns its own direction stream, so
//! raising any sample count only adds samples: the estimate can never decrease.

use super::poly::taylor_expansion;
use crate::geometry::{knorm, Cylinder, Point, PointRecord};
use crate::{Error, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Sample counts for the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSpec {
    pub base_points: usize,
    /// Offsets at radii `r 2^{-k}`, `k < shells`.
    pub shells: usize,
    /// Offset directions per base point, the axial ones first.
    pub directions: usize,
    pub seed: u64,
    /// Finite-difference step relative to the cylinder radius.
    pub step_rel: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { base_points: 24, shells: 8, directions: 32, seed: 42, step_rel: 1e-3 }
    }
}

/// A sampled supremum, hence a lower bound for the true seminorm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub value: f64,
    /// Sampled `sup |f|`; zero for weighted estimates, whose `value` already is a full norm.
    pub sup_abs: f64,
    pub witness: Option<(PointRecord, PointRecord)>,
    pub alpha: f64,
    pub q: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    /// For weighted estimates, `(|v|, local norm)` per unit cylinder.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_cylinder: Vec<(f64, f64)>,
}

impl SeminormEstimate {
    /// `sup |f| + [f]` for plain estimates; the weighted norm itself otherwise.
    pub fn norm(&self) -> f64 {
        self.sup_abs + self.value
    }
}

fn unit_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec3 {
    loop {
        let mut p = Vec3::zeros();
        for i in 0..d {
            p[i] = rng.random_range(-1.0..1.0);
        }
        if p.norm_squared() < 1.0 {
            return p;
        }
    }
}

/// Uniform point of `Q_r(center)` as `center ∘ S_r(ζ)` with `ζ ∈ Q_1`.
pub(crate) fn sample_cylinder(rng: &mut ChaCha8Rng, q: &Cylinder, s: f64, d: usize) -> Point {
    let t = -rng.random::<f64>();
    let x = unit_ball(rng, d);
    let v = unit_ball(rng, d);
    q.center.compose(&Point::new(t, x, v).dilate(q.radius, s))
}

/// Offset directions of unit kinetic norm: `±t`, `±x_i`, `±v_i`, then seeded random ones.
fn directions(rng: &mut ChaCha8Rng, n: usize, s: f64, d: usize) -> Vec<Point> {
    let mut raw = vec![Point::new(1.0, Vec3::zeros(), Vec3::zeros()), Point::new(-1.0, Vec3::zeros(), Vec3::zeros())];
    for i in 0..d {
        let e = Vec3::from_fn(|j, _| if i == j { 1.0 } else { 0.0 });
        raw.extend([
            Point::new(0.0, e, Vec3::zeros()),
            Point::new(0.0, -e, Vec3::zeros()),
            Point::velocity(e),
            Point::velocity(-e),
        ]);
    }
    raw.truncate(n);
    while raw.len() < n {
        let mut x = Vec3::zeros();
        let mut v = Vec3::zeros();
        for i in 0..d {
            x[i] = rng.random_range(-1.0..1.0);
            v[i] = rng.random_range(-1.0..1.0);
        }
        raw.push(Point::new(rng.random_range(-1.0..1.0), x, v));
    }
    raw.into_iter()
        .map(|z| {
            let n = knorm(&z, s);
            z.dilate(1.0 / n, s)
        })
        .collect()
}

/// Sampled `sup |f(z) - p_{z0}(z)| / d_ℓ(z, z0)^α` over base points `z0 ∈ Q` and offsets
/// `z = z0 ∘ S_ρ(ζ) ∈ Q` with `‖ζ‖ = 1`, so that `d_ℓ(z, z0) = ρ`.
pub fn seminorm_est<F: Fn(&Point) -> f64>(
    f: &F,
    q: &Cylinder,
    alpha: f64,
    s: f64,
    d: usize,
    spec: &SampleSpec,
) -> Result<SeminormEstimate, Error> {
    sampled_seminorm(f, q, |z| *z, |z| q.contains(z, s), alpha, s, d, spec)
}

/// As [`seminorm_est`] on the image `map(Q)`: base points are images of samples of `Q`,
/// offsets are taken in the target coordinates and kept when `inside` accepts them.
#[allow(clippy::too_many_arguments)]
pub fn seminorm_est_mapped<F, M, I>(
    f: &F,
    q: &Cylinder,
    map: M,
    inside: I,
    alpha: f64,
    s: f64,
    d: usize,
    spec: &SampleSpec,
) -> Result<SeminormEstimate, Error>
where
    F: Fn(&Point) -> f64,
    M: Fn(&Point) -> Point,
    I: Fn(&Point) -> bool,
{
    sampled_seminorm(f, q, map, inside, alpha, s, d, spec)
}

#[allow(clippy::too_many_arguments)]
fn sampled_seminorm<F, M, I>(
    f: &F,
    q: &Cylinder,
    map: M,
    inside: I,
    alpha: f64,
    s: f64,
    d: usize,
    spec: &SampleSpec,
) -> Result<SeminormEstimate, Error>
where
    F: Fn(&Point) -> f64,
    M: Fn(&Point) -> Point,
    I: Fn(&Point) -> bool,
{
    if !(alpha >= 0.0) {
        return Err(Error::Holder(format!("alpha must be nonnegative, got {alpha}")));
    }
    let mut base_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let h = spec.step_rel * q.radius;
    let mut best = 0.0f64;
    let mut sup_abs = 0.0f64;
    let mut witness = None;
    let mut samples = 0usize;
    for i in 0..spec.base_points {
        let z0 = map(&sample_cylinder(&mut base_rng, q, s, d));
        let mut dir_rng = ChaCha8Rng::seed_from_u64(spec.seed);
        dir_rng.set_stream(i as u64 + 1);
        let poly = taylor_expansion(f, &z0, alpha, s, d, h)?;
        let f0 = f(&z0);
        sup_abs = sup_abs.max(f0.abs());
        for zeta in directions(&mut dir_rng, spec.directions, s, d) {
            for k in 0..spec.shells {
                let rho = q.radius * 0.5f64.powi(k as i32);
                let xi = zeta.dilate(rho, s);
                let z = z0.compose(&xi);
                if !inside(&z) {
                    continue;
                }
                samples += 1;
                let fz = f(&z);
                sup_abs = sup_abs.max(fz.abs());
                let ratio = (fz - poly.eval(&xi)).abs() / rho.powf(alpha);
                if ratio > best {
                    best = ratio;
                    witness = Some((z0.record(d), z.record(d)));
                }
            }
        }
    }
    if samples == 0 {
        return Err(Error::Holder("no offset fell inside the sampled region".into()));
    }
    Ok(SeminormEstimate {
        value: best,
        sup_abs,
        witness,
        alpha,
        q: None,
        samples,
        seed: spec.seed,
        per_cylinder: Vec::new(),
    })
}

/// `sup_{|v| ∈ grid} (1+|v|)^q ‖f‖_{C^α_ℓ(Q_1(0, 0, |v| e))}`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_norm_est<F: Fn(&Point) -> f64>(
    f: &F,
    v_magnitudes: &[f64],
    direction: &Vec3,
    alpha: f64,
    q: f64,
    s: f64,
    d: usize,
    spec: &SampleSpec,
) -> Result<SeminormEstimate, Error> {
    if v_magnitudes.is_empty() {
        return Err(Error::Holder("empty velocity grid".into()));
    }
    let e = direction.normalize();
    let mut out = SeminormEstimate {
        value: 0.0,
        sup_abs: 0.0,
        witness: None,
        alpha,
        q: Some(q),
        samples: 0,
        seed: spec.seed,
        per_cylinder: Vec::new(),
    };
    for &m in v_magnitudes {
        let cyl = Cylinder::new(Point::velocity(e * m), 1.0);
        let local = seminorm_est(f, &cyl, alpha, s, d, spec)?;
        let weighted = (1.0 + m).powf(q) * local.norm();
        out.samples += local.samples;
        out.per_cylinder.push((m, local.norm()));
        if weighted > out.value || out.witness.is_none() {
            out.value = out.value.max(weighted);
            out.witness = local.witness;
        }
    }
    Ok(out)
}

/// Sampled `sup_Q |∇_x f|` by central differences.
pub fn grad_x_sup<F: Fn(&Point) -> f64>(f: &F, q: &Cylinder, s: f64, d: usize, spec: &SampleSpec) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9);
    let h = spec.step_rel * q.radius.powf(1.0 + 2.0 * s);
    let mut best = 0.0f64;
    for _ in 0..spec.base_points * spec.directions {
        let z = sample_cylinder(&mut rng, q, s, d);
        let mut g = Vec3::zeros();
        for i in 0..d {
            let e = Vec3::from_fn(|j, _| if i == j { h } else { 0.0 });
            let p = z.compose(&Point::new(0.0, e, Vec3::zeros()));
            let m = z.compose(&Point::new(0.0, -e, Vec3::zeros()));
            g[i] = (f(&p) - f(&m)) / (2.0 * h);
        }
        best = best.max(g.norm());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_exact_expansions_vanish() {
        let q = Cylinder::unit();
        let spec = SampleSpec::default();
        assert_eq!(seminorm_est(&|_: &Point| 1.0, &q, 0.7, 0.5, 3, &spec).unwrap().value, 0.0);
        let e = seminorm_est(&|z: &Point| z.v.x, &q, 1.5, 0.5, 3, &spec).unwrap();
        assert!(e.value < 1e-6, "{}", e.value);
    }

    #[test]
    fn time_coordinate_has_unit_seminorm() {
        let e = seminorm_est(&|z: &Point| z.t, &Cylinder::unit(), 1.0, 0.5, 3, &SampleSpec::default()).unwrap();
        assert!((e.value - 1.0).abs() < 0.05, "{}", e.value);
    }

    #[test]
    fn refinement_never_decreases() {
        let f = |z: &Point| (z.x.x * 3.0 + z.v.y).sin() * (-z.t).exp();
        let mut spec = SampleSpec { base_points: 6, directions: 16, shells: 4, ..SampleSpec::default() };
        let mut last = 0.0;
        for _ in 0..3 {
            let e = seminorm_est(&f, &Cylinder::unit(), 0.4, 0.3, 3, &spec).unwrap();
            assert!(e.value >= last);
            last = e.value;
            spec.base_points *= 2;
            spec.directions += 8;
            spec.shells += 2;
        }
    }
}
