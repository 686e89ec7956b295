use crate::numerics::quad::QuadratureSpec;
use crate::verifier::{is_known_check, CheckEntry, SweepGrid, Tolerances};
use crate::{Error, HydroBounds, ModelParams, Profile, ProfileSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

fn default_mc() -> usize {
    4096
}

fn default_scale() -> f64 {
    1.0
}

/// One verification run: model, profile, checks and every setting that affects the numbers.
///
/// Plain values come first so the TOML form is valid (tables must follow scalars).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    #[serde(default = "default_mc")]
    pub mc: usize,
    #[serde(default = "default_scale")]
    pub tolerance_scale: f64,
    #[serde(default)]
    pub checks: Vec<CheckEntry>,
    pub params: ModelParams,
    #[serde(default = "ProfileSpec::maxwellian")]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub hydro_bounds: HydroBounds,
    #[serde(default)]
    pub sweep: SweepGrid,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Scenario {
    /// Default settings around `params`, with no checks selected.
    pub fn new(params: ModelParams, seed: u64) -> Self {
        Self {
            seed,
            mc: default_mc(),
            tolerance_scale: 1.0,
            checks: Vec::new(),
            params,
            profile: ProfileSpec::maxwellian(),
            hydro_bounds: HydroBounds::default(),
            sweep: SweepGrid::default(),
            quadrature: QuadratureSpec::default(),
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_checks(mut self, ids: &[&str]) -> Self {
        self.checks = ids.iter().map(|id| CheckEntry::Id((*id).to_string())).collect();
        self
    }

    /// Every violated invariant, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |r: Result<(), Error>| {
            if let Err(e) = r {
                out.push(e.to_string());
            }
        };
        push(self.params.validate());
        if self.params.validate().is_ok() {
            push(Profile::from_spec(&self.profile, self.params.d).map(|_| ()));
        }
        push(self.hydro_bounds.validate());
        push(self.sweep.validate());
        push(self.quadrature.validate());
        push(self.tolerances.validate());
        if self.mc < 1000 {
            out.push(format!("mc must be at least 1000, got {}", self.mc));
        }
        if !(self.tolerance_scale >= 1.0 && self.tolerance_scale.is_finite()) {
            out.push(format!("tolerance_scale must be >= 1, got {}", self.tolerance_scale));
        }
        if self.seed > i64::MAX as u64 {
            out.push("seed must fit in a signed 64-bit integer".into());
        }
        for c in &self.checks {
            let id = c.selection().id;
            if !is_known_check(&id) {
                out.push(format!("unknown check id '{id}'"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), Error> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v.join("; ")))
        }
    }

    /// Parses TOML, or JSON when the text starts with `{`, and validates.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let s: Scenario = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("json: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("toml: {e}")))?
        };
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Canonical TOML: checks without overrides are written as bare ids.
    pub fn to_toml(&self) -> Result<String, Error> {
        let mut canon = self.clone();
        canon.checks = self.checks.iter().map(CheckEntry::normalized).collect();
        toml::to_string(&canon).map_err(|e| Error::Config(format!("toml: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    /// SHA-256 of the canonical TOML.
    pub fn digest(&self) -> Result<String, Error> {
        let text = self.to_toml()?;
        Ok(Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
    }
}
