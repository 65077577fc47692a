//! Deterministic report emission: sorted keys, floats at 12 significant
//! digits, trailing newline.

use serde::Serialize;
use serde_json::Value;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every non-integer number in the tree.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    normalize(serde_json::to_value(v).expect("report types serialize"))
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(v)).expect("values serialize");
    s.push('\n');
    s
}

/// A float cell for CSV output.
pub fn csv_float(x: f64) -> String {
    let r = round_sig(x);
    if r.is_finite() {
        format!("{r}")
    } else {
        String::new()
    }
}

/// Renders rows under a header, one line each.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(2.302775637731995), 2.30277563773);
        assert_eq!(round_sig(-12345.678901234567), -12345.6789012);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn stable_output() {
        let v = json!({"b": 0.1 + 0.2, "a": [1, 2.5], "c": u64::MAX});
        assert_eq!(
            to_json(&v),
            "{\n  \"a\": [\n    1,\n    2.5\n  ],\n  \"b\": 0.3,\n  \"c\": 18446744073709551615\n}\n"
        );
    }
}
