//! Measurable forms of the ellipticity, cancellation, cone and coercivity properties.
//!
//! A check is measured at each value of its sweep (a velocity magnitude, a radius, a shell) as an
//! independent task. [`Verifier::summarize`] then fixes tolerances that depend on the whole sweep
//! (anchors at the smallest `|v0|`), appends the sweep-level record and sets every pass flag.

mod bilinear;
mod coercivity;
mod config;
pub(crate) mod result;
mod summary;
mod transformed;
mod untransformed;

pub use config::{CheckEntry, CheckSelection, SweepGrid, Tolerances};
pub use result::{CheckResult, Constant, Coords, Tolerance};

use crate::kernel::{default_directions, Kernel};
use crate::numerics::sphere::SphereRule;
use crate::{Error, Hydro, HydroBounds, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Every check id, in report order.
pub const CHECK_IDS: &[&str] = &[
    "a0",
    "bilinear_q1",
    "bilinear_q2",
    "bounded1",
    "bounded2",
    "cancel1",
    "cancel2",
    "cancel_ratio",
    "classK_ii",
    "classK_iv",
    "cone",
    "cone_transformed",
    "cov_pv",
    "da_equivalence",
    "gs_coercivity",
    "holder_sandwich",
    "measure_condition",
    "nondeg1",
    "tail_mass",
];

/// Checks whose constant must be uniform over the `|v0|` sweep.
pub const UNIFORMITY_CHECKS: &[&str] =
    &["nondeg1", "bounded1", "bounded2", "cancel1", "cancel2", "classK_ii", "classK_iv", "cone_transformed"];

pub fn is_known_check(id: &str) -> bool {
    CHECK_IDS.contains(&id)
}

/// Everything a check needs: the kernel, the hydrodynamic data and the sweep settings.
#[derive(Debug, Clone)]
pub struct Verifier {
    pub kernel: Kernel,
    pub hydro: Hydro,
    pub bounds: HydroBounds,
    pub grid: SweepGrid,
    pub tol: Tolerances,
    pub mc_samples: usize,
    pub seed: u64,
    /// Multiplies the width of every tolerance interval.
    pub tolerance_scale: f64,
    hash: String,
}

impl Verifier {
    pub fn new(
        kernel: Kernel,
        bounds: HydroBounds,
        grid: SweepGrid,
        tol: Tolerances,
        mc_samples: usize,
        seed: u64,
    ) -> Result<Self, Error> {
        grid.validate()?;
        tol.validate()?;
        bounds.validate()?;
        if mc_samples < 1000 {
            return Err(Error::Config(format!("mc samples must be at least 1000, got {mc_samples}")));
        }
        let hydro = kernel.profile().hydro_quantities(kernel.spec())?;
        let hash = kernel.profile().hash();
        Ok(Self { kernel, hydro, bounds, grid, tol, mc_samples, seed, tolerance_scale: 1.0, hash })
    }

    pub fn d(&self) -> usize {
        self.kernel.params().d
    }

    pub fn profile_hash(&self) -> &str {
        &self.hash
    }

    /// Blank record of `id` at `coords`; the tolerance is set when summarizing.
    pub(crate) fn record(&self, id: &str, coords: Coords) -> CheckResult {
        CheckResult::new(id, self.kernel.params(), &self.hash, coords, Tolerance::at_least("unset", 0.0))
    }

    /// Record carrying a failure of the measurement itself.
    pub fn error_record(&self, id: &str, coords: Coords, err: &Error) -> CheckResult {
        CheckResult::new(id, self.kernel.params(), &self.hash, coords, Tolerance::at_least("error", 0.0))
            .note(format!("error: {err}"))
    }

    pub(crate) fn sphere(&self, sel: &CheckSelection) -> SphereRule {
        let n = sel.directions.or(self.grid.directions).unwrap_or_else(|| default_directions(self.d()));
        SphereRule::fibonacci(self.d(), n)
    }

    /// Random stream owned by `(id, index)`; independent of scheduling.
    pub(crate) fn rng(&self, id: &str, index: u64) -> ChaCha8Rng {
        let tag =
            id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3));
        let mut rng = ChaCha8Rng::seed_from_u64(self.grid.seed.unwrap_or(self.seed) ^ tag);
        rng.set_stream(index);
        rng
    }

    /// Sweep values of `sel`: velocity magnitudes, radii or shells depending on the check.
    pub fn sweep_values(&self, sel: &CheckSelection) -> Result<Vec<f64>, Error> {
        if !is_known_check(&sel.id) {
            return Err(Error::Config(format!("unknown check id '{}'", sel.id)));
        }
        if let Some(v) = &sel.values {
            config::validate_ladder(&format!("values of {}", sel.id), v)?;
            return Ok(v.clone());
        }
        let grid = self.grid.v0_magnitudes.clone();
        Ok(match sel.id.as_str() {
            "cone" => vec![4.0, 8.0, 16.0, 32.0],
            "da_equivalence" => vec![2.0, 8.0, 32.0],
            "cancel_ratio" => vec![0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0],
            "cov_pv" => vec![1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 0.125, 0.25],
            "gs_coercivity" => vec![1.0],
            "bilinear_q1" | "bilinear_q2" => vec![0.0, 1.0, 2.0, 4.0],
            "cancel2" if self.kernel.params().s < 0.5 => Vec::new(),
            _ => grid,
        })
    }

    /// Measures `sel` at one sweep value.
    pub fn measure(&self, sel: &CheckSelection, value: f64) -> Result<Vec<CheckResult>, Error> {
        match sel.id.as_str() {
            "nondeg1" => self.nondeg1(sel, value),
            "bounded1" => self.bounded(sel, value, 1),
            "bounded2" => self.bounded(sel, value, 2),
            "cancel1" => self.cancel1(sel, value),
            "cancel2" => self.cancel2(sel, value),
            "classK_ii" => self.class_k_ii(sel, value),
            "classK_iv" => self.class_k_iv(sel, value),
            "cone_transformed" => self.cone_transformed(sel, value),
            "measure_condition" => self.measure_condition(sel, value),
            "a0" => self.a0(sel, value),
            "tail_mass" => self.tail_mass_point(sel, value),
            "cone" => self.cone(sel, value),
            "cov_pv" => self.cov_pv(sel, value),
            "cancel_ratio" => self.cancel_ratio(sel, value),
            "da_equivalence" => self.da_equivalence(sel, value),
            "gs_coercivity" => self.gs_coercivity(sel, value),
            "bilinear_q1" => self.bilinear(sel, value, 1),
            "bilinear_q2" => self.bilinear(sel, value, 2),
            "holder_sandwich" => self.holder_sandwich(sel, value),
            other => Err(Error::Config(format!("unknown check id '{other}'"))),
        }
    }

    /// Measures every sweep value of `sel` in order and summarizes. Measurement errors become
    /// failing records.
    pub fn run_check(&self, sel: &CheckSelection) -> Result<Vec<CheckResult>, Error> {
        let values = self.sweep_values(sel)?;
        let mut records = Vec::new();
        for v in &values {
            records.extend(self.measure_or_record(sel, *v));
        }
        Ok(self.summarize(sel, records))
    }

    /// [`Verifier::measure`] with errors turned into a failing record at that sweep value.
    pub fn measure_or_record(&self, sel: &CheckSelection, value: f64) -> Vec<CheckResult> {
        self.measure(sel, value).unwrap_or_else(|e| {
            let coords = Coords { v0: Some(value), ..Coords::default() };
            vec![self.error_record(&sel.id, coords, &e)]
        })
    }
}

/// Velocity points of `B_2` (and of `B_{7/4}`) probed in transformed coordinates.
pub(crate) fn probe_velocities(d: usize) -> Vec<Vec3> {
    let mut v = vec![Vec3::zeros(), Vec3::new(1.5, 0.0, 0.0), Vec3::new(-1.5, 0.0, 0.0)];
    if d >= 2 {
        v.push(Vec3::new(0.0, 1.5, 0.0));
    }
    v
}
