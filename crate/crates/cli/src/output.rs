//! Tables emitted as JSON `{meta, rows}` or as CSV with a header row.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn json_rows(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert((*c).to_string(), v.clone());
                }
                Value::Object(m)
            })
            .collect()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

pub fn render(table: &Table, meta: Value, format: Format) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("meta".into(), meta);
            doc.insert("rows".into(), Value::Array(table.json_rows()));
            let mut out = serde_json::to_vec_pretty(&Value::Object(doc))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for r in &table.rows {
                w.write_record(r.iter().map(cell))?;
            }
            Ok(w.into_inner()?)
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(bytes)?;
            s.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn table() -> Table {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![json!(1), json!([2, 3]), Value::Null]);
        t.push(vec![json!("x,y"), json!(true), json!(0.5)]);
        t
    }

    #[test]
    fn csv_projection() {
        let out = render(&table(), json!({}), Format::Csv).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,b,c\n1,2 3,\n\"x,y\",true,0.5\n");
    }

    #[test]
    fn json_keeps_column_order() {
        let out = render(&table(), json!({"k": 1}), Format::Json).unwrap();
        let text = String::from_utf8(out).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rows"][1]["a"], "x,y");
        assert!(text.find("\"meta\"").unwrap() < text.find("\"rows\"").unwrap());
        let keys: Vec<&String> = v["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["a", "b", "c"]);
    }
}
