//! Velocity profiles: Gaussian mixtures plus an optional compact polynomial bump.

use crate::numerics::gauss::GaussLegendre;
use crate::numerics::quad::{integrate_box, QuadratureSpec};
use crate::numerics::special::{scaled_bessel_i0, scaled_sinhc};
use crate::numerics::sphere::sphere_area;
use crate::{Error, Vec3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;

/// `m (2πT)^{-d/2} exp(-|v-u|²/(2T))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub mass: f64,
    pub temperature: f64,
    pub drift: Vec3,
}

/// `A (1 - |v-c|²/R²)_+^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactBump {
    pub center: Vec3,
    pub radius: f64,
    pub amplitude: f64,
    pub smoothness: u32,
}

/// One entry of a profile description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Gaussian {
        mass: f64,
        temperature: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drift: Option<Vec<f64>>,
    },
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
        #[serde(default = "default_smoothness")]
        smoothness: u32,
    },
}

fn default_smoothness() -> u32 {
    3
}

/// Serializable description of a [`Profile`]; the dimension comes from the model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub components: Vec<ComponentSpec>,
}

impl ProfileSpec {
    /// Unit-mass, unit-temperature Maxwellian at rest.
    pub fn maxwellian() -> Self {
        Self { components: vec![ComponentSpec::Gaussian { mass: 1.0, temperature: 1.0, drift: None }] }
    }
}

/// Velocity distribution `f(v)`; a sum of component densities.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub d: usize,
    pub gaussians: Vec<GaussianComponent>,
    pub bump: Option<CompactBump>,
}

/// Mass, energy and entropy `∫ f`, `∫ f |v|²`, `∫ f ln f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hydro {
    pub mass: f64,
    pub energy: f64,
    pub entropy: f64,
}

/// Lower mass bound and upper mass, energy and entropy bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydroBounds {
    #[serde(rename = "m0")]
    pub mass_min: f64,
    #[serde(rename = "M0")]
    pub mass_max: f64,
    #[serde(rename = "E0")]
    pub energy_max: f64,
    #[serde(rename = "H0")]
    pub entropy_max: f64,
}

impl Default for HydroBounds {
    fn default() -> Self {
        Self { mass_min: 0.5, mass_max: 2.0, energy_max: 10.0, entropy_max: 0.0 }
    }
}

impl HydroBounds {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.mass_min > 0.0 && self.mass_min <= self.mass_max) {
            return Err(Error::InvalidProfile("0 < m0 <= M0 violated".into()));
        }
        if !(self.energy_max >= 0.0) {
            return Err(Error::InvalidProfile("E0 >= 0 violated".into()));
        }
        Ok(())
    }

    /// `m0 <= M <= M0`, `E <= E0`, `H <= H0`.
    pub fn admits(&self, h: &Hydro) -> bool {
        self.mass_min <= h.mass
            && h.mass <= self.mass_max
            && h.energy <= self.energy_max
            && h.entropy <= self.entropy_max
    }
}

fn to_vec3(d: usize, xs: &[f64], what: &str) -> Result<Vec3, Error> {
    if xs.len() != d {
        return Err(Error::InvalidProfile(format!("{what} has {} entries, expected d = {d}", xs.len())));
    }
    let mut v = Vec3::zeros();
    for (i, x) in xs.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::InvalidProfile(format!("{what} is not finite")));
        }
        v[i] = *x;
    }
    Ok(v)
}

impl GaussianComponent {
    pub fn density(&self, d: usize, v: &Vec3) -> f64 {
        let t = self.temperature;
        self.mass * (2.0 * PI * t).powf(-(d as f64) / 2.0) * (-(v - self.drift).norm_squared() / (2.0 * t)).exp()
    }
}

impl CompactBump {
    pub fn density(&self, v: &Vec3) -> f64 {
        let y = 1.0 - (v - self.center).norm_squared() / (self.radius * self.radius);
        if y <= 0.0 {
            0.0
        } else {
            self.amplitude * y.powi(self.smoothness as i32)
        }
    }

    /// `∫_0^1 (1-r²)^k r^{p} dr`, exact for integer `k` and `p`.
    fn radial_moment(&self, p: i32) -> f64 {
        GaussLegendre::cached(64).integrate(|r| (1.0 - r * r).powi(self.smoothness as i32) * r.powi(p), 0.0, 1.0)
    }

    pub fn mass(&self, d: usize) -> f64 {
        self.amplitude * self.radius.powi(d as i32) * sphere_area(d) * self.radial_moment(d as i32 - 1)
    }

    pub fn energy(&self, d: usize) -> f64 {
        let second =
            self.amplitude * self.radius.powi(d as i32 + 2) * sphere_area(d) * self.radial_moment(d as i32 + 1);
        self.mass(d) * self.center.norm_squared() + second
    }
}

impl Profile {
    pub fn maxwellian(d: usize) -> Self {
        Self::from_spec(&ProfileSpec::maxwellian(), d).expect("unit Maxwellian is valid")
    }

    /// The zero profile `f ≡ 0`.
    pub fn zero(d: usize) -> Self {
        Self { d, gaussians: Vec::new(), bump: None }
    }

    pub fn from_spec(spec: &ProfileSpec, d: usize) -> Result<Self, Error> {
        if d != 2 && d != 3 {
            return Err(Error::InvalidProfile(format!("d must be 2 or 3, got {d}")));
        }
        let mut gaussians = Vec::new();
        let mut bump = None;
        for c in &spec.components {
            match c {
                ComponentSpec::Gaussian { mass, temperature, drift } => {
                    if !(*mass > 0.0 && *temperature > 0.0) {
                        return Err(Error::InvalidProfile("gaussian mass and temperature must be positive".into()));
                    }
                    let drift = match drift {
                        Some(u) => to_vec3(d, u, "drift")?,
                        None => Vec3::zeros(),
                    };
                    gaussians.push(GaussianComponent { mass: *mass, temperature: *temperature, drift });
                }
                ComponentSpec::Bump { center, radius, amplitude, smoothness } => {
                    if bump.is_some() {
                        return Err(Error::InvalidProfile("at most one bump component".into()));
                    }
                    if !(*radius > 0.0 && *amplitude > 0.0) || *smoothness == 0 {
                        return Err(Error::InvalidProfile(
                            "bump radius, amplitude and smoothness must be positive".into(),
                        ));
                    }
                    bump = Some(CompactBump {
                        center: to_vec3(d, center, "bump center")?,
                        radius: *radius,
                        amplitude: *amplitude,
                        smoothness: *smoothness,
                    });
                }
            }
        }
        Ok(Self { d, gaussians, bump })
    }

    pub fn to_spec(&self) -> ProfileSpec {
        let mut components: Vec<ComponentSpec> = self
            .gaussians
            .iter()
            .map(|g| ComponentSpec::Gaussian {
                mass: g.mass,
                temperature: g.temperature,
                drift: (g.drift != Vec3::zeros()).then(|| g.drift.as_slice()[..self.d].to_vec()),
            })
            .collect();
        if let Some(b) = &self.bump {
            components.push(ComponentSpec::Bump {
                center: b.center.as_slice()[..self.d].to_vec(),
                radius: b.radius,
                amplitude: b.amplitude,
                smoothness: b.smoothness,
            });
        }
        ProfileSpec { components }
    }

    /// Hex SHA-256 of the canonical JSON description and dimension.
    pub fn hash(&self) -> String {
        let body = serde_json::to_string(&self.to_spec()).expect("profile spec serializes");
        let mut h = Sha256::new();
        h.update(format!("d={};", self.d).as_bytes());
        h.update(body.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.gaussians.is_empty() && self.bump.is_none()
    }

    pub fn eval(&self, v: &Vec3) -> f64 {
        let g: f64 = self.gaussians.iter().map(|c| c.density(self.d, v)).sum();
        g + self.bump.map_or(0.0, |b| b.density(v))
    }

    /// Radius of a ball about the origin outside which `f` is below `e^{-cutoff²/2}` of its scale.
    pub fn support_radius(&self, cutoff: f64) -> f64 {
        let g = self.gaussians.iter().map(|c| c.drift.norm() + cutoff * c.temperature.sqrt()).fold(0.0, f64::max);
        let b = self.bump.map_or(0.0, |b| b.center.norm() + b.radius);
        g.max(b)
    }

    /// `∫_{S^{d-1}} f(p + rω) dω`.
    pub fn spherical_mean(&self, p: &Vec3, r: f64) -> f64 {
        let d = self.d;
        let mut total = 0.0;
        for c in &self.gaussians {
            let t = c.temperature;
            let beta = (p - c.drift).norm();
            let pref = c.mass * (2.0 * PI * t).powf(-(d as f64) / 2.0);
            let x = r * beta / t;
            let gauss = (-(r - beta).powi(2) / (2.0 * t)).exp();
            total += pref * gauss * if d == 3 { 4.0 * PI * scaled_sinhc(x) } else { 2.0 * PI * scaled_bessel_i0(x) };
        }
        if let Some(b) = &self.bump {
            total += bump_spherical_mean(b, d, p, r);
        }
        total
    }

    /// `M`, `E` and `H`. Entropy is closed-form for a single Gaussian, quadrature otherwise.
    pub fn hydro_quantities(&self, spec: &QuadratureSpec) -> Result<Hydro, Error> {
        let d = self.d as f64;
        let mut mass: f64 = self.gaussians.iter().map(|c| c.mass).sum();
        let mut energy: f64 =
            self.gaussians.iter().map(|c| c.mass * (c.drift.norm_squared() + d * c.temperature)).sum();
        if let Some(b) = &self.bump {
            mass += b.mass(self.d);
            energy += b.energy(self.d);
        }
        let entropy = match (self.gaussians.as_slice(), &self.bump) {
            ([], None) => 0.0,
            ([c], None) => {
                let peak = c.mass * (2.0 * PI * c.temperature).powf(-d / 2.0);
                c.mass * (peak.ln() - d / 2.0)
            }
            _ => self.entropy_quadrature(spec)?,
        };
        Ok(Hydro { mass, energy, entropy })
    }

    fn entropy_quadrature(&self, spec: &QuadratureSpec) -> Result<f64, Error> {
        let tight = QuadratureSpec { rel_tol: spec.rel_tol.min(1e-8), ..*spec };
        let r = self.support_radius(tight.radial_cutoff);
        let lo = vec![-r; self.d];
        let hi = vec![r; self.d];
        let (v, _) = integrate_box(
            |x| {
                let mut v = Vec3::zeros();
                v.as_mut_slice()[..x.len()].copy_from_slice(x);
                let f = self.eval(&v);
                if f > 0.0 {
                    f * f.ln()
                } else {
                    0.0
                }
            },
            &lo,
            &hi,
            &tight,
        )?;
        Ok(v)
    }

    /// `N_q = sup_v (1+|v|)^q f(v)`.
    ///
    /// Scans rays through the origin towards every component centre (and the coordinate axes),
    /// refines the best bracket by golden section, then polishes along coordinate directions.
    pub fn decay_envelope(&self, q: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let phi = |v: &Vec3| (1.0 + v.norm()).powf(q) * self.eval(v);
        let mut rays: Vec<Vec3> = Vec::new();
        for c in self.gaussians.iter().map(|g| g.drift).chain(self.bump.map(|b| b.center)) {
            if c.norm() > 0.0 {
                rays.push(c.normalize());
                rays.push(-c.normalize());
            }
        }
        for i in 0..self.d {
            let mut e = Vec3::zeros();
            e[i] = 1.0;
            rays.push(e);
        }
        let t_max = self.gaussians.iter().map(|g| g.temperature).fold(0.0, f64::max);
        let r_max = self.support_radius(12.0) + 2.0 * (q * t_max).sqrt() + q * t_max + 1.0;
        let n = 2048;
        let mut best = (phi(&Vec3::zeros()), Vec3::zeros());
        for e in &rays {
            let h = r_max / n as f64;
            let (mut k_best, mut f_best) = (0usize, phi(&Vec3::zeros()));
            for k in 1..=n {
                let f = phi(&(e * (k as f64 * h)));
                if f > f_best {
                    k_best = k;
                    f_best = f;
                }
            }
            let lo = (k_best.saturating_sub(1)) as f64 * h;
            let hi = (k_best + 1).min(n) as f64 * h;
            let (r, f) = golden_max(|r| phi(&(e * r)), lo, hi);
            if f > best.0 {
                best = (f, e * r);
            }
            if f_best > best.0 {
                best = (f_best, e * (k_best as f64 * h));
            }
        }
        // Coordinate polish around the best point.
        let mut x = best.1;
        let mut fx = best.0;
        let mut step = r_max / n as f64;
        for _ in 0..40 {
            let mut moved = false;
            for i in 0..self.d {
                let mut e = Vec3::zeros();
                e[i] = 1.0;
                let (t, f) = golden_max(|t| phi(&(x + e * t)), -step, step);
                if f > fx {
                    x += e * t;
                    fx = f;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
                if step < 1e-10 {
                    break;
                }
            }
        }
        fx
    }
}

fn bump_spherical_mean(b: &CompactBump, d: usize, p: &Vec3, r: f64) -> f64 {
    let beta = (p - b.center).norm();
    let r2 = b.radius * b.radius;
    let k = b.smoothness as i32;
    if d == 3 && r * beta > 1e-12 * r2 {
        // With x = 1 - (r² + β² - 2rβμ)/R², dx = 2rβ/R² dμ.
        let q = r * r + beta * beta;
        let x_lo = (1.0 - (q + 2.0 * r * beta) / r2).max(0.0);
        let x_hi = (1.0 - (q - 2.0 * r * beta) / r2).max(0.0);
        let prim = |x: f64| x.powi(k + 1) / (k + 1) as f64;
        return b.amplitude * 2.0 * PI * r2 / (2.0 * r * beta) * (prim(x_hi) - prim(x_lo));
    }
    if r * beta <= 1e-12 * r2 {
        let y = (1.0 - (r * r + beta * beta) / r2).max(0.0);
        return b.amplitude * y.powi(k) * sphere_area(d);
    }
    // d = 2: the integrand is supported on the arc where the circle enters the bump.
    let q = r * r + beta * beta;
    let cos_max = ((q - r2) / (2.0 * r * beta)).clamp(-1.0, 1.0);
    let th_max = cos_max.acos();
    let rule = GaussLegendre::cached(48);
    2.0 * rule.integrate(
        |th| {
            let y = 1.0 - (q - 2.0 * r * beta * th.cos()) / r2;
            if y > 0.0 {
                b.amplitude * y.powi(k)
            } else {
                0.0
            }
        },
        0.0,
        th_max,
    )
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    [(c, fc), (d, fd), (m, fm)].into_iter().fold((m, fm), |acc, x| if x.1 > acc.1 { x } else { acc })
}
