//! Experiment configuration: JSON-file or flag driven, with exact rational
//! rate parameters.

use std::fmt;
use std::str::FromStr;

use num::BigRational;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An exact rational parameter. Serialized as `{"num": "...", "den": "..."}`
/// strings so no precision is lost; accepted on input also as `"a/b"`,
/// a decimal string like `"0.25"`, or a bare integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational64 {
    pub num: i64,
    pub den: i64,
}

impl Rational64 {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::BadConfig("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn to_scalar<S: Scalar>(&self) -> S {
        S::from_ratio(self.num, self.den)
    }
}

impl fmt::Display for Rational64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational64 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse::<i64>().map_err(bad)?;
            let den = b.trim().parse::<i64>().map_err(bad)?;
            return Rational64::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            let digits = frac.len() as u32;
            if digits > 15 {
                return Err(Error::BadConfig(format!("too many decimals: {s}")));
            }
            let den = 10i64.pow(digits);
            let sign = if s.starts_with('-') { -1 } else { 1 };
            let abs_int = match int.trim_start_matches('-') {
                "" => 0,
                other => other.parse::<i64>().map_err(bad)?,
            };
            let frac_part = frac.parse::<i64>().map_err(bad)?;
            return Rational64::new(sign * (abs_int * den + frac_part), den);
        }
        Rational64::new(s.parse::<i64>().map_err(bad)?, 1)
    }
}

fn bad(e: std::num::ParseIntError) -> Error {
    Error::BadConfig(format!("bad rational literal: {e}"))
}

impl Serialize for Rational64 {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut s = serializer.serialize_struct("Rational64", 2)?;
        s.serialize_field("num", &self.num.to_string())?;
        s.serialize_field("den", &self.den.to_string())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Rational64 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
            Pair { num: String, den: String },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(Rational64 { num: n, den: 1 }),
            Repr::Text(s) => s.parse().map_err(de::Error::custom),
            Repr::Pair { num, den } => {
                let num = num.parse().map_err(de::Error::custom)?;
                let den = den.parse().map_err(de::Error::custom)?;
                Rational64::new(num, den).map_err(de::Error::custom)
            }
        }
    }
}

/// Scalar backend selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    #[default]
    Float,
}

fn default_replicas() -> u64 {
    10_000
}

/// A full experiment description; CLI flags override file fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Number of particles.
    pub n: usize,
    /// Time horizon.
    pub t: usize,
    /// Initial positions, strictly decreasing.
    pub y: Vec<i64>,
    /// Time-indexed parameters `p_1..p_t`.
    pub p: Vec<Rational64>,
    /// Particle-indexed parameters `q_1..q_N`.
    pub q: Vec<Rational64>,
    /// Multipoint query `(k_i, s_i)` with strictly increasing `k_i`.
    #[serde(default)]
    pub query: Vec<(usize, i64)>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    /// Optional override of the initial Fredholm window lower edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadConfig("need at least one particle".into()));
        }
        if self.y.len() != self.n || self.q.len() != self.n {
            return Err(Error::BadConfig(format!(
                "expected {} initial positions and q values",
                self.n
            )));
        }
        if self.p.len() < self.t {
            return Err(Error::BadConfig(format!(
                "need at least {} p values, got {}",
                self.t,
                self.p.len()
            )));
        }
        if self.y.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::BadConfig("y must be strictly decreasing".into()));
        }
        for w in self.query.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::BadConfig(
                    "query particle indices must be strictly increasing".into(),
                ));
            }
        }
        if self.query.iter().any(|&(k, _)| k == 0 || k > self.n) {
            return Err(Error::BadConfig("query particle index out of range".into()));
        }
        Ok(())
    }

    pub fn rates<S: Scalar>(&self) -> Result<crate::dynamics::Rates<S>> {
        crate::dynamics::Rates::new(
            self.p.iter().map(Rational64::to_scalar).collect(),
            self.q.iter().map(Rational64::to_scalar).collect(),
        )
    }

    pub fn initial(&self) -> Result<crate::dynamics::ParticleConfig> {
        crate::dynamics::ParticleConfig::new(self.y.clone())
    }
}

/// JSON rendering of a scalar: `{"num","den"}` for exact rationals, a
/// plain number for floats.
pub fn scalar_to_json<S: Scalar>(v: &S) -> serde_json::Value {
    if S::EXACT {
        let text = v.to_string();
        let (num, den) = text.split_once('/').unwrap_or((text.as_str(), "1"));
        serde_json::json!({ "num": num, "den": den })
    } else {
        serde_json::json!(v.to_f64())
    }
}

/// Parses a BigRational back out of the report encoding (test helper and
/// round-trip support).
pub fn json_to_rational(v: &serde_json::Value) -> Option<BigRational> {
    let num = v.get("num")?.as_str()?.parse().ok()?;
    let den = v.get("den")?.as_str()?.parse().ok()?;
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_forms() {
        assert_eq!("1/4".parse::<Rational64>().unwrap(), Rational64 { num: 1, den: 4 });
        assert_eq!("0.25".parse::<Rational64>().unwrap(), Rational64 { num: 25, den: 100 });
        assert_eq!("3".parse::<Rational64>().unwrap(), Rational64 { num: 3, den: 1 });
        assert_eq!(
            "-1.5".parse::<Rational64>().unwrap(),
            Rational64 { num: -15, den: 10 }
        );
        assert!("1/0".parse::<Rational64>().is_err());
    }

    #[test]
    fn rational_json_round_trip() {
        let r = Rational64 { num: 7, den: 3 };
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, r#"{"num":"7","den":"3"}"#);
        let back: Rational64 = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let from_str: Rational64 = serde_json::from_str(r#""7/3""#).unwrap();
        assert_eq!(from_str, r);
    }

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig {
            n: 2,
            t: 2,
            y: vec![1, -1],
            p: vec![Rational64 { num: 1, den: 4 }, Rational64 { num: 1, den: 3 }],
            q: vec![Rational64 { num: 3, den: 2 }, Rational64 { num: 2, den: 1 }],
            query: vec![(1, 2), (2, 0)],
            seed: 0,
            backend: Backend::Rational,
            replicas: 10,
            window: None,
        };
        assert!(cfg.validate().is_ok());
        let mut bad = cfg.clone();
        bad.y = vec![1, 1];
        assert!(bad.validate().is_err());
        let mut bad = cfg;
        bad.query = vec![(2, 0), (1, 2)];
        assert!(bad.validate().is_err());
    }
}
