//! Model parameters of the collision kernel.

use crate::Error;
use serde::{Deserialize, Serialize};

/// Which angular factor multiplies the plane integral of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    /// Bounded factor replaced by 1.
    #[default]
    Model,
    /// Closed-form Carleman factor, capped at `ModelParams::carleman_cap`.
    Carleman,
}

fn default_one() -> f64 {
    1.0
}

fn default_cap() -> f64 {
    1e6
}

/// Dimension, singularity order `s`, potential exponent `gamma` and kernel constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub d: usize,
    pub s: f64,
    pub gamma: f64,
    #[serde(default)]
    pub kernel_mode: KernelMode,
    /// Constant of the lower-order term `c_b (f * |.|^gamma) g`.
    #[serde(default = "default_one")]
    pub c_b: f64,
    /// Scaling of the angular kernel.
    #[serde(default = "default_one")]
    pub b_norm: f64,
    /// Ceiling for the Carleman factor.
    #[serde(default = "default_cap")]
    pub carleman_cap: f64,
}

impl ModelParams {
    pub fn new(d: usize, s: f64, gamma: f64) -> Result<Self, Error> {
        let p =
            Self { d, s, gamma, kernel_mode: KernelMode::Model, c_b: 1.0, b_norm: 1.0, carleman_cap: default_cap() };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mode(mut self, mode: KernelMode) -> Self {
        self.kernel_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.d != 2 && self.d != 3 {
            return Err(Error::InvalidParams(format!("d must be 2 or 3, got {}", self.d)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::InvalidParams(format!("0 < s < 1 violated: s = {}", self.s)));
        }
        if !(self.gamma > -(self.d as f64)) || !self.gamma.is_finite() {
            return Err(Error::InvalidParams(format!("gamma > -d violated: gamma = {}, d = {}", self.gamma, self.d)));
        }
        if !(self.c_b > 0.0 && self.b_norm > 0.0) {
            return Err(Error::InvalidParams("c_b and b_norm must be positive".into()));
        }
        if !(self.carleman_cap > 0.0) {
            return Err(Error::InvalidParams("carleman_cap must be positive".into()));
        }
        Ok(())
    }

    /// Exponent `gamma + 2s + 1` of `|w|` inside the plane integral.
    pub fn kappa(&self) -> f64 {
        self.gamma + 2.0 * self.s + 1.0
    }

    /// `gamma + 2s`, the growth exponent of the kernel's tail in `|v|`.
    pub fn order(&self) -> f64 {
        self.gamma + 2.0 * self.s
    }

    /// Whether `gamma + 2s ∈ [0, 2]`, the range where the ellipticity checks apply.
    pub fn in_ellipticity_range(&self) -> bool {
        let o = self.order();
        (-1e-12..=2.0 + 1e-12).contains(&o)
    }

    /// Human-readable tags for parameters outside the ellipticity range.
    pub fn tags(&self) -> Vec<String> {
        let mut tags = Vec::new();
        if !self.in_ellipticity_range() {
            tags.push(format!("gamma+2s={} outside [0,2]", self.order()));
        }
        tags
    }
}

/// Parameters of the inverse-power-law interaction `|x|^{1-p}` in dimension `d`.
pub fn make_inverse_power_params(p_exp: f64, d: usize) -> Result<ModelParams, Error> {
    if !(p_exp > 2.0) {
        return Err(Error::InvalidParams(format!(
            "inverse-power exponent must exceed 2 (s would be >= 1), got {p_exp}"
        )));
    }
    let gamma = (p_exp - 2.0 * d as f64 + 1.0) / (p_exp - 1.0);
    let s = 1.0 / (p_exp - 1.0);
    ModelParams::new(d, s, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_power_examples() {
        let p = make_inverse_power_params(5.0, 3).unwrap();
        assert_eq!((p.gamma, p.s), (0.0, 0.25));
        let p = make_inverse_power_params(3.0, 3).unwrap();
        assert_eq!((p.gamma, p.s), (-1.0, 0.5));
        assert!(p.in_ellipticity_range());
        let p = make_inverse_power_params(4.0, 2).unwrap();
        assert!((p.gamma - 1.0 / 3.0).abs() < 1e-15 && (p.s - 1.0 / 3.0).abs() < 1e-15);
        assert!(make_inverse_power_params(2.0, 3).is_err());
    }

    #[test]
    fn validation_and_tags() {
        assert!(ModelParams::new(3, 0.5, -4.0).is_err());
        assert!(ModelParams::new(3, 1.0, 0.0).is_err());
        assert!(ModelParams::new(4, 0.5, 0.0).is_err());
        let p = ModelParams::new(3, 0.25, 2.0).unwrap();
        assert_eq!(p.tags().len(), 1);
        assert!(ModelParams::new(3, 0.25, 0.0).unwrap().tags().is_empty());
    }

    #[test]
    fn serde_fills_defaults() {
        let p: ModelParams = serde_json::from_str(r#"{"d":3,"s":0.25,"gamma":0.0}"#).unwrap();
        assert_eq!(p.kernel_mode, KernelMode::Model);
        assert_eq!(p.c_b, 1.0);
        assert!(serde_json::from_str::<ModelParams>(r#"{"d":3,"s":0.25,"gamma":0.0,"x":1}"#).is_err());
    }
}
