//! Rendering of command results as JSON, a key/value table, or CSV.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
    Csv,
}

/// Rounds `x` to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every floating-point number in `v` to 12 significant digits.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(result: Value, config: Value, format: Format) -> String {
    let mut doc = match result {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("result".into(), other);
            map
        }
    };
    doc.insert("config".into(), config);
    let doc = normalize(Value::Object(doc));
    match format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
        Format::Table | Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &doc, &mut rows);
            let mut s = String::new();
            if format == Format::Csv {
                s.push_str("key,value\n");
                for (k, v) in rows {
                    s.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
                }
            } else {
                let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in rows {
                    s.push_str(&format!("{k:<width$}  {v}\n"));
                }
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(1.6094379124341003), 1.60943791243);
        assert_eq!(round12(123456.78901234567), 123456.789012);
        assert_eq!(round12(-2.0), -2.0);
        assert!(round12(-0.0).is_sign_positive());
    }

    #[test]
    fn table_and_csv_flatten_nested_values() {
        let out = render(json!({"a": {"b": 1.0, "c": [2, "x,y"]}}), json!({"k": true}), Format::Csv);
        assert_eq!(out, "key,value\na.b,1.0\na.c.0,2\na.c.1,\"x,y\"\nconfig.k,true\n");
        let table = render(json!({"v": 0.5}), json!({}), Format::Table);
        assert!(table.starts_with("v  0.5\n"));
    }

    #[test]
    fn integers_are_untouched() {
        assert_eq!(normalize(json!({"n": 7, "x": 0.1234567890123456})), json!({"n": 7, "x": 0.123456789012}));
    }
}
