//! Deterministic JSON rendering: sorted keys, floats at 15 significant digits.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::Result;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(round_value(serde_json::to_value(v)?))
}

/// Pretty JSON with a trailing newline.
pub fn render<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_value(v)?)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_and_key_order() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_sig(-2.5e-300), -2.5e-300);
        let v = serde_json::json!({"b": [1.0 / 3.0, 2], "a": {"z": 0.1 + 0.2, "s": "x"}});
        assert_eq!(render(&v).unwrap(), render(&v).unwrap());
        let s = serde_json::to_string(&to_value(&v).unwrap()).unwrap();
        assert_eq!(s, r#"{"a":{"s":"x","z":0.3},"b":[0.333333333333333,2]}"#);
    }
}
