use crate::Error;
use serde::{Deserialize, Serialize};

/// Sweep coordinates shared by the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub v0_magnitudes: Vec<f64>,
    pub radii: Vec<f64>,
    /// Sphere directions; `None` means 2048 on `S^2` and 512 on `S^1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    /// Replaces the scenario seed for the sweep's sampling when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            v0_magnitudes: vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            radii: vec![0.0625, 0.125, 0.25, 0.5, 1.0, 2.0],
            directions: None,
            seed: None,
        }
    }
}

pub(crate) fn validate_ladder(name: &str, xs: &[f64]) -> Result<(), Error> {
    if xs.is_empty() {
        return Err(Error::Config(format!("{name} must be nonempty")));
    }
    if xs.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Config(format!("{name} must be finite and nonnegative")));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), Error> {
        validate_ladder("sweep.v0_magnitudes", &self.v0_magnitudes)?;
        validate_ladder("sweep.radii", &self.radii)?;
        if self.v0_magnitudes[0] < 2.0 {
            return Err(Error::Config("sweep.v0_magnitudes must be >= 2".into()));
        }
        if self.radii[0] <= 0.0 {
            return Err(Error::Config("sweep.radii must be positive".into()));
        }
        if self.directions.is_some_and(|n| n < 16) {
            return Err(Error::Config("sweep.directions must be at least 16".into()));
        }
        Ok(())
    }
}

/// Thresholds turning measured constants into pass flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Lower bound for the coercivity constants.
    pub lambda_min: f64,
    /// Upper constants may reach this multiple of their value at the smallest `|v0|`.
    pub anchor_factor: f64,
    /// Largest admissible max/min ratio of a constant over the `|v0|` sweep.
    pub uniformity_max: f64,
    pub min_r_squared: f64,
    /// Slack on fitted exponents.
    pub exponent_tol: f64,
    /// Threshold factor of the untransformed cone, scaled by `(1+|v|)^{γ+2s+1}`.
    pub cone_lambda: f64,
    pub cone_exponent: f64,
    pub cone_exponent_tol: f64,
    /// Threshold of the transformed cone.
    pub cone_lambda_bar: f64,
    pub cone_anchor_v0: f64,
    pub cone_anchor_fraction: f64,
    /// Threshold of the measure condition.
    pub lambda_probe: f64,
    pub mu_min: f64,
    /// Admissible relative spread of the cancellation ratio over velocities.
    pub cancel_ratio_spread: f64,
    /// `d_a / d_GS` must stay in `[1/da_band, da_band]`.
    pub da_band: f64,
    /// Relative Monte Carlo error of the seminorm above which coercivity is inconclusive.
    pub gs_mc_rel_max: f64,
    /// Zero-order constant of the coercivity inequality; derived from the hydrodynamic bounds
    /// when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gs_zero_order: Option<f64>,
    pub bilinear_c_max: f64,
    pub c_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            lambda_min: 1e-4,
            anchor_factor: 10.0,
            uniformity_max: 10.0,
            min_r_squared: 0.9,
            exponent_tol: 0.3,
            cone_lambda: 0.05,
            cone_exponent: -1.0,
            cone_exponent_tol: 0.25,
            cone_lambda_bar: 0.5,
            cone_anchor_v0: 4.0,
            cone_anchor_fraction: 0.5,
            lambda_probe: 0.5,
            mu_min: 0.1,
            cancel_ratio_spread: 0.1,
            da_band: 4.0,
            gs_mc_rel_max: 0.2,
            gs_zero_order: None,
            bilinear_c_max: 10.0,
            c_max: 10.0,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("lambda_min", self.lambda_min),
            ("anchor_factor", self.anchor_factor),
            ("uniformity_max", self.uniformity_max),
            ("exponent_tol", self.exponent_tol),
            ("cone_lambda", self.cone_lambda),
            ("cone_exponent_tol", self.cone_exponent_tol),
            ("cone_lambda_bar", self.cone_lambda_bar),
            ("cone_anchor_v0", self.cone_anchor_v0),
            ("cone_anchor_fraction", self.cone_anchor_fraction),
            ("lambda_probe", self.lambda_probe),
            ("mu_min", self.mu_min),
            ("cancel_ratio_spread", self.cancel_ratio_spread),
            ("da_band", self.da_band),
            ("gs_mc_rel_max", self.gs_mc_rel_max),
            ("bilinear_c_max", self.bilinear_c_max),
            ("c_max", self.c_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.min_r_squared) {
            return Err(Error::Config("tolerances.min_r_squared must lie in [0, 1]".into()));
        }
        if self.gs_zero_order.is_some_and(|c| !(c >= 0.0)) {
            return Err(Error::Config("tolerances.gs_zero_order must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Per-check settings; unset fields take the check's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSelection {
    pub id: String,
    /// Sweep values replacing the check's default sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    /// Sample or pair count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
}

impl CheckSelection {
    pub fn new(id: &str) -> Self {
        Self { id: id.into(), ..Self::default() }
    }

    fn is_plain(&self) -> bool {
        *self == Self::new(&self.id)
    }
}

/// A check id, either bare or with overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckEntry {
    Id(String),
    Selection(CheckSelection),
}

impl CheckEntry {
    pub fn selection(&self) -> CheckSelection {
        match self {
            CheckEntry::Id(id) => CheckSelection::new(id),
            CheckEntry::Selection(s) => s.clone(),
        }
    }

    /// Bare ids for entries without overrides, so saving does not grow the file.
    pub fn normalized(&self) -> Self {
        let s = self.selection();
        if s.is_plain() {
            CheckEntry::Id(s.id)
        } else {
            CheckEntry::Selection(s)
        }
    }
}
