//! Checks on the transformed kernel `K̄`, one task per `|v0|`.

use super::{probe_velocities, CheckResult, CheckSelection, Coords, Verifier};
use crate::geometry::{kdistance, CovMap, Point};
use crate::kernel::DirectionField;
use crate::numerics::sphere::SphereRule;
use crate::{Error, Vec3};
use rand::Rng;

impl Verifier {
    pub(crate) fn cov(&self, v0: f64) -> CovMap {
        CovMap::at_velocity(Vec3::new(v0, 0.0, 0.0), *self.kernel.params())
    }

    fn fields<'k>(&'k self, m: &CovMap, rule: &SphereRule) -> Vec<DirectionField<'k>> {
        probe_velocities(self.d()).iter().map(|v| DirectionField::new(&self.kernel, m, v, rule)).collect()
    }

    /// Unit vectors over which directional infima are taken: a Fibonacci set and the axes.
    fn probe_directions(&self) -> Vec<Vec3> {
        let d = self.d();
        let mut es = SphereRule::fibonacci(d, if d == 3 { 256 } else { 64 }).points;
        for i in 0..d {
            let e = Vec3::from_fn(|j, _| if i == j { 1.0 } else { 0.0 });
            es.extend([e, -e]);
        }
        es
    }

    fn at(&self, id: &str, v0: f64, r: Option<f64>) -> CheckResult {
        self.record(id, Coords { v0: Some(v0), r, ..Coords::default() })
    }

    /// `inf_{v, e} r^{2s-2} ∫_{B_r} ((w·e)_+)² K̄(v, v+w) dw` per radius.
    pub(crate) fn nondeg1(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let fields = self.fields(&m, &rule);
        let es = self.probe_directions();
        Ok(self
            .grid
            .radii
            .iter()
            .map(|&r| {
                let (lam, v) = fields
                    .iter()
                    .map(|f| (f.directional_infimum(&f.second_moments(r), &es).0, f.v))
                    .fold((f64::INFINITY, Vec3::zeros()), |a, b| if b.0 < a.0 { b } else { a });
                let mut rec = self.at(&sel.id, v0, Some(r)).with("lambda", lam);
                rec.witnesses.push(Point::velocity(v).record(self.d()));
                rec
            })
            .collect())
    }

    /// `sup_v r^{2s} ∫_{|w|>r} K̄(v, v+w) dw` (`which = 1`) or with the arguments swapped.
    pub(crate) fn bounded(&self, sel: &CheckSelection, v0: f64, which: u8) -> Result<Vec<CheckResult>, Error> {
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let fields = self.fields(&m, &rule);
        let moment = self.hydro.mass + self.hydro.energy;
        Ok(self
            .grid
            .radii
            .iter()
            .map(|&r| {
                let (lam, v) = fields
                    .iter()
                    .map(|f| (if which == 1 { f.forward_tail(r) } else { f.reverse_tail(r) }, f.v))
                    .fold((f64::NEG_INFINITY, Vec3::zeros()), |a, b| if b.0 > a.0 { b } else { a });
                let mut rec =
                    self.at(&sel.id, v0, Some(r)).with("lambda_upper", lam).with("over_mass_energy", lam / moment);
                rec.witnesses.push(Point::velocity(v).record(self.d()));
                rec
            })
            .collect())
    }

    /// `sup_v |PV ∫_{B_{1/4}} (K̄(v, v+w) - K̄(v+w, v)) dw|`, with the whole-space value at `v = 0`.
    pub(crate) fn cancel1(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let fields = self.fields(&m, &rule);
        let (lam, v) = fields
            .iter()
            .map(|f| (f.cancel1(0.25).abs(), f.v))
            .fold((f64::NEG_INFINITY, Vec3::zeros()), |a, b| if b.0 > a.0 { b } else { a });
        let whole = fields[0].cancel1(f64::INFINITY);
        let mut rec = self.at(&sel.id, v0, Some(0.25)).with("lambda_upper", lam).with("whole_space_at_origin", whole);
        rec.witnesses.push(Point::velocity(v).record(self.d()));
        Ok(vec![rec])
    }

    /// `sup_v |PV ∫_{B_r} (K̄(v, v+w) - K̄(v+w, v)) w dw| / (1 + r^{1-2s})` for `r <= 1/4`.
    pub(crate) fn cancel2(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let s = self.kernel.params().s;
        if s < 0.5 {
            return Err(Error::Config("cancel2 applies only for s >= 1/2".into()));
        }
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let fields = self.fields(&m, &rule);
        let mut radii: Vec<f64> = self.grid.radii.iter().copied().filter(|r| *r < 0.25).collect();
        radii.push(0.25);
        Ok(radii
            .iter()
            .map(|&r| {
                let scale = 1.0 + r.powf(1.0 - 2.0 * s);
                let (lam, v) = fields
                    .iter()
                    .map(|f| (f.cancel2(r).norm() / scale, f.v))
                    .fold((f64::NEG_INFINITY, Vec3::zeros()), |a, b| if b.0 > a.0 { b } else { a });
                let mut rec = self.at(&sel.id, v0, Some(r)).with("lambda_upper", lam);
                rec.witnesses.push(Point::velocity(v).record(self.d()));
                rec
            })
            .collect())
    }

    /// Upper second moment `sup_v r^{2s-2} ∫_{B_r} |w|² K̄(v, v+w) dw`, its ratio to
    /// `∫ (1+|v|²) f`, and the symmetry residual of the frozen kernel.
    pub(crate) fn class_k_ii(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let fields = self.fields(&m, &rule);
        let moment = self.hydro.mass + self.hydro.energy;
        let residual = self.symmetry_residual(&m)?;
        Ok(self
            .grid
            .radii
            .iter()
            .map(|&r| {
                let lam = fields.iter().map(|f| f.integrate(&f.second_moments(r))).fold(f64::NEG_INFINITY, f64::max);
                self.at(&sel.id, v0, Some(r))
                    .with("lambda_upper", lam)
                    .with("over_moment", lam / moment)
                    .with("symmetry_residual", residual)
            })
            .collect())
    }

    /// The frozen kernel is the even part `(K̄(v, v+w) + K̄(v, v-w))/2`; its residual
    /// `max |K(w) - K(-w)| / max K` over sampled `w`.
    fn symmetry_residual(&self, m: &CovMap) -> Result<f64, Error> {
        let rule = SphereRule::fibonacci(self.d(), 64);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for v in probe_velocities(self.d()) {
            for w in &rule.points {
                for rho in [0.1, 0.5] {
                    let a = self.kernel.cov_eval(m, &v, &(w * rho))?.value;
                    let b = self.kernel.cov_eval(m, &v, &(-w * rho))?.value;
                    let plus = 0.5 * (a + b);
                    let minus = 0.5 * (b + a);
                    worst = worst.max((plus - minus).abs());
                    scale = scale.max(plus.abs());
                }
            }
        }
        Ok(if scale > 0.0 { worst / scale } else { 0.0 })
    }

    /// `inf_{v, e} r^{2s-2} ∫_{B_r} (w·e)_+² K_z(w) dw` for the frozen (even) kernel, which is
    /// half the full quadratic form.
    pub(crate) fn class_k_iv(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let fields = self.fields(&m, &rule);
        let es = self.probe_directions();
        Ok(self
            .grid
            .radii
            .iter()
            .map(|&r| {
                let lam = fields
                    .iter()
                    .map(|f| {
                        let mom = f.second_moments(r);
                        es.iter()
                            .map(|e| {
                                let total: f64 = f
                                    .samples
                                    .iter()
                                    .zip(&mom)
                                    .map(|(x, mm)| x.weight * x.omega.dot(e).powi(2) * mm)
                                    .sum();
                                0.5 * total
                            })
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(f64::INFINITY, f64::min);
                self.at(&sel.id, v0, Some(r)).with("lambda", lam)
            })
            .collect())
    }

    /// `inf_v |{σ : r^{d+2s} K̄(v, v+rσ) >= λ̄}|` on the sphere.
    pub(crate) fn cone_transformed(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let fields = self.fields(&m, &rule);
        let lam = self.tol.cone_lambda_bar;
        let (measure, v) = fields
            .iter()
            .map(|f| (f.superlevel_measure(&f.density(), lam), f.v))
            .fold((f64::INFINITY, Vec3::zeros()), |a, b| if b.0 < a.0 { b } else { a });
        let mut rec = self.at(&sel.id, v0, None).with("measure", measure).with("threshold", lam);
        rec.witnesses.push(Point::velocity(v).record(self.d()));
        Ok(vec![rec])
    }

    /// Monte Carlo fraction of a ball `B ∋ v` where `K̄(v, v') >= λ |v'-v|^{-d-2s}`.
    ///
    /// Balls are `B_r(v + r u/2)` with `u ∈ {0, e1, e2}`; the minimum over probe velocities and
    /// offsets is reported per radius.
    pub(crate) fn measure_condition(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let m = self.cov(v0);
        let d = self.d();
        let n = sel.n.unwrap_or(self.mc_samples);
        let lambda = self.tol.lambda_probe;
        let offsets = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let mut out = Vec::new();
        for (ri, &r) in self.grid.radii.iter().enumerate() {
            let mut worst = (f64::INFINITY, 0.0, Vec3::zeros());
            for (vi, v) in probe_velocities(d).iter().enumerate() {
                for (oi, u) in offsets.iter().enumerate() {
                    let center = v + u * (0.5 * r);
                    let stream =
                        ((v0.to_bits() % 1_000_003) << 16) | ((ri as u64) << 8) | ((vi as u64) << 4) | oi as u64;
                    let mut rng = self.rng(&sel.id, stream);
                    let frac = self.superlevel_fraction(&m, v, &center, r, lambda, n, &mut rng)?;
                    if frac < worst.0 {
                        worst = (frac, (frac * (1.0 - frac) / n as f64).sqrt(), *v);
                    }
                }
            }
            let mut rec = self
                .at(&sel.id, v0, Some(r))
                .with("mu", worst.0)
                .with("mu_stderr", worst.1)
                .with("lambda_probe", lambda);
            rec.witnesses.push(Point::velocity(worst.2).record(d));
            out.push(rec);
        }
        Ok(out)
    }

    /// Fraction of `n` uniform points of `B_r(center)` in the superlevel set about `v`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn superlevel_fraction<R: Rng>(
        &self,
        m: &CovMap,
        v: &Vec3,
        center: &Vec3,
        r: f64,
        lambda: f64,
        n: usize,
        rng: &mut R,
    ) -> Result<f64, Error> {
        let d = self.d();
        let expo = d as f64 + 2.0 * self.kernel.params().s;
        let mut hits = 0usize;
        let mut drawn = 0usize;
        while drawn < n {
            let mut p = Vec3::zeros();
            for i in 0..d {
                p[i] = rng.random_range(-1.0..1.0);
            }
            if p.norm_squared() >= 1.0 {
                continue;
            }
            drawn += 1;
            let w = center + p * r - v;
            let rho = w.norm();
            if rho == 0.0 {
                continue;
            }
            let k = self.kernel.cov_eval(m, v, &w)?.value;
            if k * rho.powf(expo) >= lambda {
                hits += 1;
            }
        }
        Ok(hits as f64 / n as f64)
    }

    /// `sup ∫_{B_ρ} |K̄_{z1}(w) - K̄_{z2}(w)| |w|² dw / (ρ^{2-2s} d_ℓ(z1, z2)^{α'})` over
    /// velocity-shifted pairs in `Q_1` and `ρ <= 1`.
    pub(crate) fn a0(&self, sel: &CheckSelection, v0: f64) -> Result<Vec<CheckResult>, Error> {
        let p = *self.kernel.params();
        let (s, d) = (p.s, p.d);
        let alpha = sel.alpha.unwrap_or(0.5 * (2.0 * s).min(1.0));
        if !(alpha > 0.0 && alpha < (2.0 * s).min(1.0)) {
            return Err(Error::Config(format!("a0 needs 0 < alpha < min(1, 2s), got {alpha}")));
        }
        let alpha_p = 2.0 * s * alpha / (1.0 + 2.0 * s);
        let m = self.cov(v0);
        let rule = self.sphere(sel);
        let base = DirectionField::new(&self.kernel, &m, &Vec3::zeros(), &rule);
        let rhos: Vec<f64> = self.grid.radii.iter().copied().filter(|r| *r <= 1.0).collect();
        let mut best = (0.0f64, Vec3::zeros());
        for delta in [0.5, 0.25, 0.125] {
            for dir in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)] {
                let v2 = dir * delta;
                let other = DirectionField::new(&self.kernel, &m, &v2, &rule);
                let dist = kdistance(&Point::origin(), &Point::velocity(v2), s);
                for &rho in &rhos {
                    let num: f64 = base
                        .samples
                        .iter()
                        .zip(&other.samples)
                        .map(|(a, b)| {
                            let q = self.kernel.radial(
                                |t| (a.slice.value(0.0, t * a.ell) - b.slice.value(0.0, t * b.ell)).abs(),
                                1.0 - 2.0 * s,
                                0.0,
                                rho,
                                &[],
                                0.0,
                            );
                            a.weight * a.factor * q.value
                        })
                        .sum();
                    let ratio = num / (rho.powf(2.0 - 2.0 * s) * dist.powf(alpha_p));
                    if ratio > best.0 {
                        best = (ratio, v2);
                    }
                }
            }
        }
        // A pair differing only in time sees the same static profile.
        let shifted = DirectionField::new(&self.kernel, &m, &Vec3::zeros(), &rule);
        let static_gap: f64 = base
            .samples
            .iter()
            .zip(&shifted.samples)
            .map(|(a, b)| (a.slice.value(0.0, a.ell) - b.slice.value(0.0, b.ell)).abs())
            .fold(0.0, f64::max);
        let expected = alpha / (1.0 + 2.0 * s) * (1.0 - 2.0 * s - p.gamma).max(0.0);
        let mut rec = self
            .record(&sel.id, Coords { v0: Some(v0), alpha: Some(alpha), ..Coords::default() })
            .with("a0", best.0)
            .with("time_shift_gap", static_gap)
            .with("expected_exponent", expected);
        rec.witnesses.push(Point::origin().record(d));
        rec.witnesses.push(Point::velocity(best.1).record(d));
        Ok(vec![rec])
    }
}
