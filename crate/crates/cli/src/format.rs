use serde_json::Value;

/// Rounds to 12 significant digits; CSV and JSON both emit this value.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// CSV cell for a number.
pub fn cell(x: f64) -> String {
    let r = round12(x);
    if r.is_nan() {
        "NaN".into()
    } else if r != 0.0 && r.abs() < 1e-6 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// JSON number for a value, `null` when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

/// Replaces every float in a JSON tree by its 12-digit rounding.
pub fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            if let Some(f) = n.as_f64() {
                *v = num(f);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

pub fn csv_line<I, S>(cells: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = cells
        .into_iter()
        .map(|c| quote(c.as_ref()))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(cell(1.0 / 3.0), "0.333333333333");
        assert_eq!(cell(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(cell(0.0), "0");
        assert_eq!(cell(-0.0), "0");
        assert_eq!(cell(1234567.891234567), "1234567.89123");
        assert_eq!(cell(-2.5e-16), "-2.5e-16");
        assert_eq!(round12(1.0 / 3.0), cell(1.0 / 3.0).parse::<f64>().unwrap());
    }

    #[test]
    fn json_rounding_matches_csv() {
        let mut v = serde_json::json!({"a": [std::f64::consts::PI, 2], "b": {"c": -1e-17}});
        round_tree(&mut v);
        assert_eq!(v["a"][0].as_f64().unwrap(), cell(std::f64::consts::PI).parse::<f64>().unwrap());
        assert_eq!(v["a"][1], 2);
        assert_eq!(v["b"]["c"].as_f64().unwrap(), -1e-17);
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_line(["a", "b,c"]), "a,\"b,c\"\n");
    }
}
