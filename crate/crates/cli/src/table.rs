use std::io::{self, Write};

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
        }
    }
}

/// Rows under a fixed header, with optional trailing summary records.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Named summary records; `#`-prefixed `key=value` lines in CSV.
    pub footer: Vec<Map<String, Value>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        for record in &self.footer {
            let fields: Vec<String> = record
                .iter()
                .map(|(k, v)| match v {
                    Value::Number(n) => match n.as_f64() {
                        Some(f) if !n.is_i64() && !n.is_u64() => format!("{k}={f:.16e}"),
                        _ => format!("{k}={n}"),
                    },
                    Value::String(s) => format!("{k}={s}"),
                    other => format!("{k}={other}"),
                })
                .collect();
            writeln!(w, "# {}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W, metadata: Map<String, Value>) -> io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut rec = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    rec.insert(name.clone(), cell.json());
                }
                Value::Object(rec)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("metadata".into(), Value::Object(metadata));
        doc.insert("columns".into(), json!(self.columns));
        doc.insert("rows".into(), Value::Array(rows));
        if !self.footer.is_empty() {
            doc.insert(
                "summary".into(),
                Value::Array(self.footer.iter().cloned().map(Value::Object).collect()),
            );
        }
        serde_json::to_writer_pretty(&mut w, &Value::Object(doc))?;
        writeln!(w)
    }
}
