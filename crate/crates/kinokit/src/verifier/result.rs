use crate::geometry::PointRecord;
use crate::numerics::FitResult;
use crate::ModelParams;
use serde::{Deserialize, Serialize};

/// Sweep coordinates of one record; unset coordinates are omitted from the output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Coords {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl Coords {
    pub fn v0(v0: f64) -> Self {
        Self { v0: Some(v0), ..Self::default() }
    }

    /// Key used to order records: missing coordinates sort first.
    pub fn sort_key(&self) -> Vec<f64> {
        let o = |x: Option<f64>| x.unwrap_or(f64::NEG_INFINITY);
        let mut k = vec![o(self.v0)];
        k.extend(self.v.clone().unwrap_or_default());
        k.extend([o(self.r), o(self.rho), o(self.alpha), o(self.q)]);
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    #[serde(with = "nonfinite")]
    pub value: f64,
}

/// JSON has no NaN or infinity: those are written as the strings `"NaN"`, `"inf"`, `"-inf"`.
pub(crate) mod nonfinite {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(D::Error::custom(format!("expected a number, got '{t}'"))),
            },
        }
    }
}

/// Admissible interval for the constant named `quantity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub quantity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    /// Required `r²` of the record's power-law fit, when the constant is a fitted exponent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_r_squared: Option<f64>,
}

impl Tolerance {
    pub fn at_most(quantity: &str, max: f64) -> Self {
        Self { quantity: quantity.into(), min: None, max: Some(max), min_r_squared: None }
    }

    pub fn at_least(quantity: &str, min: f64) -> Self {
        Self { quantity: quantity.into(), min: Some(min), max: None, min_r_squared: None }
    }

    /// No bound: the record passes whenever the constant is finite.
    pub fn finite(quantity: &str) -> Self {
        Self { quantity: quantity.into(), min: None, max: None, min_r_squared: None }
    }

    pub fn between(quantity: &str, min: f64, max: f64) -> Self {
        Self { quantity: quantity.into(), min: Some(min), max: Some(max), min_r_squared: None }
    }

    pub fn with_r_squared(mut self, r2: f64) -> Self {
        self.min_r_squared = Some(r2);
        self
    }

    pub fn admits(&self, value: f64) -> bool {
        value.is_finite() && self.min.is_none_or(|m| value >= m) && self.max.is_none_or(|m| value <= m)
    }

    /// Widens the interval by `scale >= 1` on the multiplicative side of each bound.
    pub fn scaled(&self, scale: f64) -> Self {
        let widen = |b: f64, up: bool| {
            if (b >= 0.0) == up {
                b * scale
            } else {
                b / scale
            }
        };
        Self {
            quantity: self.quantity.clone(),
            min: self.min.map(|m| widen(m, false)),
            max: self.max.map(|m| widen(m, true)),
            min_r_squared: self.min_r_squared,
        }
    }
}

/// One measured record of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub params: ModelParams,
    pub profile_hash: String,
    pub coords: Coords,
    pub constants: Vec<Constant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    pub pass: bool,
    pub tolerance: Tolerance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<PointRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckResult {
    pub fn new(check_id: &str, params: &ModelParams, profile_hash: &str, coords: Coords, tolerance: Tolerance) -> Self {
        Self {
            check_id: check_id.into(),
            params: *params,
            profile_hash: profile_hash.into(),
            coords,
            constants: Vec::new(),
            fit: None,
            pass: false,
            tolerance,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.push(name, value);
        self
    }

    pub fn push(&mut self, name: &str, value: f64) {
        self.constants.push(Constant { name: name.into(), value });
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|c| c.name == name).map(|c| c.value)
    }

    /// Sets `pass` from the tolerance and the measured constants; nothing else enters.
    pub fn finish(mut self) -> Self {
        let fit_ok = match self.tolerance.min_r_squared {
            Some(r2) => self.fit.as_ref().is_some_and(|f| f.r_squared >= r2),
            None => true,
        };
        self.pass = fit_ok && self.constant(&self.tolerance.quantity).is_some_and(|v| self.tolerance.admits(v));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_tolerance() {
        let p = ModelParams::new(3, 0.25, 0.0).unwrap();
        let r = CheckResult::new("x", &p, "h", Coords::default(), Tolerance::at_most("ratio", 10.0))
            .with("ratio", 3.0)
            .finish();
        assert!(r.pass);
        let r = CheckResult::new("x", &p, "h", Coords::default(), Tolerance::at_least("lambda", 1e-4))
            .with("lambda", 0.0)
            .finish();
        assert!(!r.pass);
        let r = CheckResult::new("x", &p, "h", Coords::default(), Tolerance::at_most("ratio", 10.0))
            .with("ratio", f64::NAN)
            .finish();
        assert!(!r.pass);
        assert_eq!(Tolerance::at_least("a", 2.0).scaled(2.0).min, Some(1.0));
        assert!(Tolerance::finite("a").admits(-1e300) && !Tolerance::finite("a").admits(f64::INFINITY));
    }

    #[test]
    fn non_finite_constants_survive_json() {
        for x in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY, 0.1 + 0.2] {
            let c = Constant { name: "c".into(), value: x };
            let back: Constant = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
            assert!(back.value.to_bits() == x.to_bits() || (x.is_nan() && back.value.is_nan()));
        }
    }
}
