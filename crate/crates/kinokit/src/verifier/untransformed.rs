//! Checks on the original kernel and on the change of variables itself.

use super::{CheckResult, CheckSelection, Coords, Verifier};
use crate::geometry::{dgs, Point};
use crate::kernel::rule_about;
use crate::numerics::sphere::orthonormal_complement;
use crate::{Error, Vec3};
use rand::Rng;
use std::f64::consts::PI;

/// Azimuths of the cone scan on `S^2`.
const CONE_AZIMUTHS: usize = 32;
/// Grid points of the cone scan in `u = σ·v/|v|`, on the whole range and again on the band.
const CONE_SCAN: usize = 160;

impl Verifier {
    fn at_speed(&self, id: &str, speed: f64) -> CheckResult {
        self.record(id, Coords { v: Some(vec![speed, 0.0, 0.0][..self.d()].to_vec()), ..Coords::default() })
    }

    /// `∫_{|v'-v|>1} K_f(v, v') dv'` at `v = |v| e1`.
    pub(crate) fn tail_mass_point(&self, _sel: &CheckSelection, speed: f64) -> Result<Vec<CheckResult>, Error> {
        let v = Vec3::new(speed, 0.0, 0.0);
        let rule = rule_about(self.d(), &v);
        let t = self.kernel.tail_mass(&v, 1.0, &rule)?;
        Ok(vec![self.at_speed("tail_mass", speed).with("lambda_upper", t)])
    }

    /// Spherical measure and width of `{σ : K_f(v, v+ρσ) ρ^{d+2s} >= λ (1+|v|)^{γ+2s+1}}`.
    pub(crate) fn cone(&self, _sel: &CheckSelection, speed: f64) -> Result<Vec<CheckResult>, Error> {
        let v = Vec3::new(speed, 0.0, 0.0);
        let thr = self.tol.cone_lambda * (1.0 + speed).powf(self.kernel.params().kappa());
        let (measure, width) = self.cone_scan(&v, thr);
        Ok(vec![self.at_speed("cone", speed).with("measure", measure).with("width", width).with("threshold", thr)])
    }

    /// Superlevel set of `σ ↦ b J(v, σ)` located by scanning `u = σ·ê` and bisecting each
    /// crossing, so the measure is not quantized by a direction grid.
    pub(crate) fn cone_scan(&self, v: &Vec3, thr: f64) -> (f64, f64) {
        let d = self.d();
        let speed = v.norm();
        let axis = if speed > 0.0 { v / speed } else { Vec3::new(1.0, 0.0, 0.0) };
        let frame = orthonormal_complement(d, &axis);
        let band = if speed > 0.0 { (6.0 / speed).min(1.0) } else { 1.0 };
        let mut us: Vec<f64> = (0..=CONE_SCAN)
            .flat_map(|k| {
                let x = -1.0 + 2.0 * k as f64 / CONE_SCAN as f64;
                [x, x * band]
            })
            .collect();
        us.sort_by(f64::total_cmp);
        us.dedup();
        let b = self.kernel.params().b_norm;
        let sides: Vec<(Vec3, f64)> = if d == 2 {
            vec![(frame[0], 1.0), (-frame[0], 1.0)]
        } else {
            (0..CONE_AZIMUTHS)
                .map(|k| {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / CONE_AZIMUTHS as f64;
                    (frame[0] * ph.cos() + frame[1] * ph.sin(), 2.0 * PI / CONE_AZIMUTHS as f64)
                })
                .collect()
        };
        let mut measure = 0.0;
        let mut width: f64 = 0.0;
        for (perp, dphi) in &sides {
            let inside = |u: f64| {
                let sigma = axis * u + perp * (1.0 - u * u).max(0.0).sqrt();
                b * self.kernel.cone_direction_integral(v, &sigma) >= thr
            };
            let crossing = |mut lo: f64, mut hi: f64, lo_in: bool| {
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    if inside(mid) == lo_in {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            let flags: Vec<bool> = us.iter().map(|u| inside(*u)).collect();
            let mut start = if flags[0] { Some(us[0]) } else { None };
            let mut close = |a: f64, b: f64| {
                measure += if d == 2 { a.acos() - b.acos() } else { dphi * (b - a) };
                width = width.max(a.abs().max(b.abs()) * speed);
            };
            for k in 1..us.len() {
                if flags[k] != flags[k - 1] {
                    let c = crossing(us[k - 1], us[k], flags[k - 1]);
                    match start.take() {
                        Some(a) => close(a, c),
                        None => start = Some(c),
                    }
                }
            }
            if let Some(a) = start {
                close(a, *us.last().unwrap());
            }
        }
        (measure, width)
    }

    /// `|∫_{B_R ∖ T0 B_R} (K(v0, v0+w) - K(v0+w, v0)) dw|` at one radius.
    pub(crate) fn cov_pv(&self, sel: &CheckSelection, radius: f64) -> Result<Vec<CheckResult>, Error> {
        let v0 = sel.v0.unwrap_or(8.0);
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let value = self.kernel.cov_pv_discrepancy(&m, &m.v0(), radius, &rule)?;
        Ok(vec![self
            .record(&sel.id, Coords { v0: Some(v0), r: Some(radius), ..Coords::default() })
            .with("discrepancy", value)
            .with("abs_discrepancy", value.abs())])
    }

    /// `PV ∫ (K(v, v') - K(v', v)) dv' / (f * |.|^γ)(v)` at `v = |v| e1`.
    pub(crate) fn cancel_ratio(&self, sel: &CheckSelection, speed: f64) -> Result<Vec<CheckResult>, Error> {
        let v = Vec3::new(speed, 0.0, 0.0);
        let rule = self.sphere(sel);
        let c1 = self.kernel.cancel1(&v, f64::INFINITY, &rule)?;
        let conv = self.kernel.conv_gamma(&v)?;
        Ok(vec![self.at_speed(&sel.id, speed).with("ratio", c1 / conv).with("cancel", c1).with("conv_gamma", conv)])
    }

    /// Range of `d_a / d_GS` over random pairs of the unit ellipsoid about `v0 = |v0| e1`.
    pub(crate) fn da_equivalence(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let d = self.d();
        let m = self.cov(v0);
        let n = sel.n.unwrap_or(10_000);
        let mut rng = self.rng(&sel.id, v0.to_bits());
        let mut ball = || loop {
            let mut p = Vec3::zeros();
            for i in 0..d {
                p[i] = rng.random_range(-1.0..1.0);
            }
            if p.norm_squared() < 1.0 {
                return m.v0() + m.t0_apply(&p);
            }
        };
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut witness = (Vec3::zeros(), Vec3::zeros());
        for _ in 0..n {
            let (a, b) = (ball(), ball());
            let g = dgs(&a, &b);
            let r = if g == 0.0 { 1.0 } else { m.da(&a, &b)? / g };
            if r < lo {
                lo = r;
            }
            if r > hi {
                hi = r;
                witness = (a, b);
            }
        }
        let mut rec = self
            .record(&sel.id, Coords::v0(v0))
            .with("band", hi.max(1.0 / lo))
            .with("min_ratio", lo)
            .with("max_ratio", hi)
            .with("spread", hi / lo)
            .with("pairs", n as f64);
        rec.witnesses.push(Point::velocity(witness.0).record(d));
        rec.witnesses.push(Point::velocity(witness.1).record(d));
        Ok(vec![rec])
    }
}
