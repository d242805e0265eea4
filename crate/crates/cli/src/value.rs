use std::fmt;

use gq_core::blocksets::BlockSet;
use gq_core::ghquat::{GenQuaternion, Polar};
use gq_core::gnum::{GenScalar, IdempotentScalar, Valuation};
use gq_core::ideals::FgIdeal;
use gq_core::oracle::OracleReport;
use gq_core::rational::{fmt_q, Q};
use serde_json::{json, Value as Json};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(GenScalar),
    Quat(GenQuaternion),
    Bool(bool),
    Real(f64),
    Valuation(Valuation),
    Set(BlockSet),
    Idem(IdempotentScalar),
    Ideal(FgIdeal),
    Polar(Polar),
    /// Standard part of a finite element, absent for infinite ones.
    Shadow(Option<[Q; 4]>),
    Text(String),
    Reports(Vec<OracleReport>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Quat(_) => "quaternion",
            Value::Bool(_) => "bool",
            Value::Real(_) => "real",
            Value::Valuation(_) => "valuation",
            Value::Set(_) => "set",
            Value::Idem(_) => "idempotent",
            Value::Ideal(_) => "ideal",
            Value::Polar(_) => "polar",
            Value::Shadow(_) => "shadow",
            Value::Text(_) => "text",
            Value::Reports(_) => "oracle",
        }
    }

    /// `{"type", "text", "value"}`.
    pub fn to_json(&self) -> Json {
        let value = match self {
            Value::Scalar(x) => serde_json::to_value(x).expect("scalar serializes"),
            Value::Quat(x) => serde_json::to_value(x).expect("quaternion serializes"),
            Value::Bool(b) => json!(b),
            Value::Real(x) => json!(x),
            Value::Valuation(v) => json!(v.to_string()),
            Value::Set(s) => json!(s.to_string()),
            Value::Idem(e) => json!(e.set().to_string()),
            Value::Ideal(i) => serde_json::to_value(i).expect("ideal serializes"),
            Value::Polar(p) => json!({
                "theta": serde_json::to_value(&p.theta).expect("quaternion serializes"),
                "n": serde_json::to_value(&p.n).expect("scalar serializes"),
            }),
            Value::Shadow(s) => match s {
                Some(c) => json!(c.iter().map(fmt_q).collect::<Vec<_>>()),
                None => Json::Null,
            },
            Value::Text(t) => json!(t),
            Value::Reports(r) => serde_json::to_value(r).expect("reports serialize"),
        };
        json!({ "type": self.type_name(), "text": self.to_string(), "value": value })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(x) => write!(f, "{x}"),
            Value::Quat(x) => write!(f, "{x}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Real(x) => write!(f, "{x}"),
            Value::Valuation(v) => write!(f, "{v}"),
            Value::Set(s) => write!(f, "{s}"),
            Value::Idem(e) => write!(f, "{e}"),
            Value::Ideal(i) => write!(f, "{i}"),
            Value::Polar(p) => write!(f, "theta = {}; n = {}", p.theta, p.n),
            Value::Shadow(None) => f.write_str("none"),
            Value::Shadow(Some(c)) => {
                let x = GenQuaternion::from_components(c.clone().map(GenScalar::constant));
                write!(f, "{x}")
            }
            Value::Text(t) => f.write_str(t),
            Value::Reports(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    let v = serde_json::to_value(r.verdict).expect("verdict serializes");
                    write!(f, "{}: {} (margin {:.3e})", r.decision, v.as_str().unwrap_or("?"), r.margin)?;
                }
                Ok(())
            }
        }
    }
}
