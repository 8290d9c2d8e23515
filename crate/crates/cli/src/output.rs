use std::cmp::Ordering;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn compare(&self, other: &Cell) -> Ordering {
        match (self, other) {
            (Cell::Real(a), Cell::Real(b)) => a.total_cmp(b),
            (Cell::Int(a), Cell::Int(b)) => a.cmp(b),
            (Cell::Text(a), Cell::Text(b)) => a.cmp(b),
            _ => self.render().cmp(&other.render()),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A table with a schema name, a header and rows sorted on a key prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &'static str, header: Vec<&'static str>) -> Self {
        Table {
            schema,
            header,
            rows: Vec::new(),
        }
    }

    /// Sorts rows lexicographically on the listed column indices.
    pub fn sort_by_columns(&mut self, keys: &[usize]) {
        self.rows.sort_by(|a, b| {
            keys.iter()
                .map(|&k| a[k].compare(&b[k]))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        });
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = out;
        writeln!(out, "# schema={} version={SCHEMA_VERSION}", self.schema)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }

    /// Array of objects keyed by the header.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, c)| {
                        let v = match c {
                            Cell::Real(x) => serde_json::json!(x),
                            Cell::Int(n) => serde_json::json!(n),
                            Cell::Text(s) => serde_json::json!(s),
                        };
                        (h.to_string(), v)
                    })
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Opens `path` for writing, or stdout when absent.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0] {
            let s = format_real(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_real(0.25), "2.5000000000000000e-1");
    }

    #[test]
    fn csv_layout_and_sorting() {
        let mut t = Table::new("demo", vec!["q", "n", "name"]);
        t.rows.push(vec![Cell::Real(0.9), Cell::Int(1), Cell::Text("b".into())]);
        t.rows.push(vec![Cell::Real(0.5), Cell::Int(2), Cell::Text("a".into())]);
        t.rows.push(vec![Cell::Real(0.5), Cell::Int(1), Cell::Text("c".into())]);
        t.sort_by_columns(&[0, 1]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema=demo version=1");
        assert_eq!(lines[1], "q,n,name");
        assert!(lines[2].ends_with(",1,c"));
        assert!(lines[4].starts_with("9.0000000000000002e-1"));
    }
}
