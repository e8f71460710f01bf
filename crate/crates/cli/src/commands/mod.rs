pub mod corpus;
pub mod eval;
pub mod tokenizer;

use serde_json::Value;

use crate::Format;

/// Prints a flat summary object as pretty JSON or as aligned `key  value` lines.
pub fn print_summary(format: Format, summary: &Value) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(summary).expect("summary serializes")),
        Format::Table => {
            let Value::Object(map) = summary else { return println!("{summary}") };
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in map {
                match v {
                    Value::String(s) => println!("{k:<width$}  {s}"),
                    Value::Number(n) if n.is_f64() => println!("{k:<width$}  {:.4}", n.as_f64().unwrap()),
                    other => println!("{k:<width$}  {other}"),
                }
            }
        }
    }
}
