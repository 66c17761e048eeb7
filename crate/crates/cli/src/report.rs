use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

pub const SCHEMA_VERSION: u32 = 1;

/// A command result with the metadata every report carries.
pub struct Report {
    pub command: String,
    pub config: Value,
    pub result: Value,
    /// False when a check failed; the process then exits with status 2.
    pub ok: bool,
}

impl Report {
    pub fn new(command: &str, config: impl Serialize, result: impl Serialize, ok: bool) -> Self {
        Report {
            command: command.to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            result: serde_json::to_value(result).expect("result serializes"),
            ok,
        }
    }

    /// Result fields at the top level, next to `schema_version`, `version`,
    /// `command`, `config` and `ok`.
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), SCHEMA_VERSION.into());
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        m.insert("command".into(), self.command.clone().into());
        m.insert("config".into(), self.config.clone());
        m.insert("ok".into(), self.ok.into());
        match &self.result {
            Value::Object(r) => {
                for (k, v) in r {
                    m.insert(k.clone(), v.clone());
                }
            }
            other => {
                m.insert("result".into(), other.clone());
            }
        }
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> String {
        let v = self.to_value();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["key", "value"]).expect("in-memory write");
                if let Value::Object(m) = v {
                    for (k, x) in m {
                        let cell = match x {
                            Value::String(s) => s,
                            other => other.to_string(),
                        };
                        w.write_record([k, cell]).expect("in-memory write");
                    }
                }
                String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn result_fields_are_flattened() {
        let r = Report::new("x", json!({"seed": 1}), json!({"dim": 3}), false);
        let v = r.to_value();
        assert_eq!(v["dim"], 3);
        assert_eq!(v["ok"], false);
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["config"]["seed"], 1);
    }

    #[test]
    fn csv_has_one_row_per_key() {
        let r = Report::new("x", json!({}), json!({"list": [1, 2], "name": "a,b"}), true);
        let text = r.render(Format::Csv);
        assert!(text.starts_with("key,value\n"));
        assert!(text.contains("list,\"[1,2]\"\n"));
        assert!(text.contains("name,\"a,b\"\n"));
        assert_eq!(text.lines().count(), 8);
    }
}
