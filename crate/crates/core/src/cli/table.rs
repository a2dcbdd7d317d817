//! Result tables and their CSV / JSON serialization.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Printed in shortest round-trip form.
    Num(f64),
    /// Printed in scientific notation with six significant digits.
    Prob(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x}"),
            Cell::Prob(x) => format!("{x:.5e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) | Cell::Prob(x) => {
                serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number)
            }
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cells: Vec<Cell>,
    pub flags: Vec<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) -> Result<()> {
        if row.cells.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: row.cells.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn has_flag(&self, prefix: &str) -> bool {
        self.rows.iter().any(|r| r.flags.iter().any(|f| f.starts_with(prefix)))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = self.columns.iter().map(String::as_str).chain(["flags"]);
        w.write_record(header).map_err(csv_err)?;
        for row in &self.rows {
            let flags = row.flags.join(";");
            let record = row.cells.iter().map(Cell::csv).chain([flags]);
            w.write_record(record).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `{"meta": …, "rows": [{column: value, …, "flags": [...], "wall_time_s": …}]}`.
    pub fn to_json<M: Serialize>(&self, meta: &M) -> Result<Value> {
        let meta = serde_json::to_value(meta).map_err(|e| Error::Io(e.to_string()))?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                for (c, cell) in self.columns.iter().zip(&r.cells) {
                    obj.insert(c.clone(), cell.json());
                }
                obj.insert("flags".into(), json!(r.flags));
                obj.insert("wall_time_s".into(), json!(r.wall_time_s));
                Value::Object(obj)
            })
            .collect();
        Ok(json!({ "meta": meta, "rows": Value::Array(rows) }))
    }

    pub fn write<W: Write, M: Serialize>(&self, format: Format, meta: &M, mut out: W) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Io("no result rows to emit".into()));
        }
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                let v = self.to_json(meta)?;
                serde_json::to_writer_pretty(&mut out, &v).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(vec!["x".into(), "sop".into(), "note".into()]);
        t.push(Row {
            cells: vec![Cell::Num(-2.5), Cell::Prob(1.234_567_89e-5), Cell::Text("a,b".into())],
            flags: vec![],
            wall_time_s: 0.1,
        })
        .unwrap();
        t.push(Row {
            cells: vec![Cell::Num(3.0), Cell::Prob(2e-15), Cell::Empty],
            flags: vec!["sop:below_numerical_floor".into(), "mvn_accuracy_warning".into()],
            wall_time_s: 0.2,
        })
        .unwrap();
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        table().write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "x,sop,note,flags");
        assert_eq!(lines[1], "-2.5,1.23457e-5,\"a,b\",");
        assert_eq!(lines[2], "3,2.00000e-15,,sop:below_numerical_floor;mvn_accuracy_warning");
    }

    #[test]
    fn json_rows() {
        let v = table().to_json(&json!({"k": 1})).unwrap();
        assert_eq!(v["meta"]["k"], 1);
        assert_eq!(v["rows"][1]["sop"].as_f64().unwrap(), 2e-15);
        assert_eq!(v["rows"][1]["note"], Value::Null);
        assert_eq!(v["rows"][1]["flags"][0], "sop:below_numerical_floor");
    }

    #[test]
    fn row_width_checked() {
        let mut t = Table::new(vec!["a".into()]);
        assert!(t
            .push(Row {
                cells: vec![],
                flags: vec![],
                wall_time_s: 0.0
            })
            .is_err());
    }
}
