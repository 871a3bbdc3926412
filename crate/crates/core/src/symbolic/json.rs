//! JSON encoding `{"finite":[..],"geo":[{"b","c","d","n0"}],"ap":[{"c","d"}]}`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Number, Value};

use super::{ApTerm, GeoTerm, SymbolicError, SymbolicSet};

/// An integer as an exact JSON number.
pub fn big_to_json(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integers are valid JSON numbers"))
}

fn json_to_big(v: &Value, what: &str) -> Result<BigInt, SymbolicError> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| SymbolicError::Json(format!("{what}: expected an integer, got {n}"))),
        other => Err(SymbolicError::Json(format!(
            "{what}: expected an integer, got {other}"
        ))),
    }
}

fn field<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
    what: &str,
) -> Result<&'a Value, SymbolicError> {
    obj.get(key)
        .ok_or_else(|| SymbolicError::Json(format!("{what}: missing field \"{key}\"")))
}

fn array<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a [Value], SymbolicError> {
    match obj.get(key) {
        None => Ok(&[]),
        Some(Value::Array(items)) => Ok(items),
        Some(other) => Err(SymbolicError::Json(format!(
            "\"{key}\" must be an array, got {other}"
        ))),
    }
}

impl SymbolicSet {
    pub fn to_json(&self) -> Value {
        let finite: Vec<Value> = self.finite_part().iter().map(big_to_json).collect();
        let geo: Vec<Value> = self
            .geo_terms()
            .iter()
            .map(|g| {
                json!({
                    "b": big_to_json(&g.base),
                    "c": big_to_json(&g.coeff),
                    "d": big_to_json(&g.offset),
                    "n0": g.start,
                })
            })
            .collect();
        let ap: Vec<Value> = self
            .ap_terms()
            .iter()
            .map(|a| json!({"c": big_to_json(&a.modulus), "d": big_to_json(&a.residue)}))
            .collect();
        json!({"finite": finite, "geo": geo, "ap": ap})
    }

    pub fn from_json(base: u32, v: &Value) -> Result<SymbolicSet, SymbolicError> {
        let obj = v
            .as_object()
            .ok_or_else(|| SymbolicError::Json("expected an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "finite" | "geo" | "ap") {
                return Err(SymbolicError::Json(format!("unknown field \"{key}\"")));
            }
        }
        let finite = array(obj, "finite")?
            .iter()
            .map(|x| json_to_big(x, "finite"))
            .collect::<Result<Vec<_>, _>>()?;
        let mut geos = Vec::new();
        for g in array(obj, "geo")? {
            let g = g
                .as_object()
                .ok_or_else(|| SymbolicError::Json("geo entries must be objects".into()))?;
            let start = json_to_big(field(g, "n0", "geo")?, "geo.n0")?;
            geos.push(GeoTerm {
                base: json_to_big(field(g, "b", "geo")?, "geo.b")?,
                coeff: json_to_big(field(g, "c", "geo")?, "geo.c")?,
                offset: json_to_big(field(g, "d", "geo")?, "geo.d")?,
                start: start.to_u64().ok_or(SymbolicError::InvalidStart(start))?,
            });
        }
        let mut aps = Vec::new();
        for a in array(obj, "ap")? {
            let a = a
                .as_object()
                .ok_or_else(|| SymbolicError::Json("ap entries must be objects".into()))?;
            aps.push(ApTerm::new(
                json_to_big(field(a, "c", "ap")?, "ap.c")?,
                json_to_big(field(a, "d", "ap")?, "ap.d")?,
            )?);
        }
        SymbolicSet::from_terms(base, finite, &geos, &aps)
    }
}
