use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::params::Quintuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Matrix,
    Trace,
    Claim,
    Harnack,
}

impl std::fmt::Display for ReportKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ReportKind::Matrix => "matrix",
            ReportKind::Trace => "trace",
            ReportKind::Claim => "claim",
            ReportKind::Harnack => "harnack",
        };
        f.write_str(name)
    }
}

/// Space-time location of a minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTime {
    pub x: Vec<f64>,
    pub t: f64,
}

/// Outcome of one certification run. `pass ⇔ min_margin ≥ −tolerance`.
///
/// A vacuous check records `min_margin = +∞` and no argmin; in JSON the
/// infinite value is written as the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub kind: ReportKind,
    #[serde(with = "extended_float")]
    pub min_margin: f64,
    pub argmin: Option<SpaceTime>,
    pub pass: bool,
    pub tolerance: f64,
    pub epsilon: f64,
    pub quintuple: Quintuple,
    pub p: f64,
    pub n: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
}

impl MarginReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: ReportKind,
        min_margin: f64,
        argmin: Option<SpaceTime>,
        tolerance: f64,
        epsilon: f64,
        quintuple: Quintuple,
        p: f64,
        n: u32,
    ) -> Self {
        Self {
            kind,
            min_margin,
            argmin,
            pass: min_margin >= -tolerance,
            tolerance,
            epsilon,
            quintuple,
            p,
            n,
            details: BTreeMap::new(),
            notes: Vec::new(),
            config: None,
        }
    }

    /// Record a numeric detail; non-finite values become strings.
    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    pub fn detail_f64(&mut self, key: &str, value: f64) {
        self.details.insert(key.to_string(), float_value(value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn to_json_line(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }
}

pub(crate) fn float_value(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::from(extended_float::label(v))
    }
}

/// `f64` that survives JSON even when infinite or NaN.
mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn label(v: f64) -> &'static str {
        if v.is_nan() {
            "nan"
        } else if v > 0.0 {
            "inf"
        } else {
            "-inf"
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(label(*v))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a margin value: {other}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(margin: f64) -> MarginReport {
        MarginReport::new(
            ReportKind::Claim,
            margin,
            None,
            1e-3,
            0.5,
            Quintuple::new(4.0, 3.0, 1.0, 4.0, 4.0),
            1.2,
            1,
        )
    }

    #[test]
    fn pass_follows_tolerance() {
        assert!(sample(-1e-3).pass);
        assert!(!sample(-1.1e-3).pass);
        assert!(sample(f64::INFINITY).pass);
    }

    #[test]
    fn key_order_and_round_trip() {
        let mut r = sample(0.25);
        r.argmin = Some(SpaceTime { x: vec![0.5], t: 0.1 });
        let text = r.to_json_line().unwrap();
        assert!(text.starts_with(
            r#"{"kind":"claim","min_margin":0.25,"argmin":{"x":[0.5],"t":0.1},"pass":true,"tolerance":0.001,"epsilon":0.5,"quintuple":{"a":4.0,"b":3.0,"c":1.0,"d":4.0,"theta":4.0},"p":1.2,"n":1"#
        ));
        let back: MarginReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn vacuous_margin_serializes_as_text() {
        let text = sample(f64::INFINITY).to_json_line().unwrap();
        assert!(text.contains(r#""min_margin":"inf","argmin":null"#));
        let back: MarginReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.min_margin, f64::INFINITY);
    }
}
