//! Float formatting shared by every JSON and CSV writer: 17 significant digits, NaN as null.

use serde_json::{Number, Value};
use std::str::FromStr;

/// Shortest-stable text for a float: 17 significant digits in scientific form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float parses"))
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}
