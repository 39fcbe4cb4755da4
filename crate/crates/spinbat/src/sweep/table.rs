//! Result tables and their serialized forms.
//!
//! CSV: UTF-8, one header row, `\n` line endings, reals in shortest
//! round-trip representation. JSON lines: one object per row with the same
//! key order as the CSV columns.

use std::io::{self, Write};

/// One output value. Floats are emitted in shortest round-trip form, so
/// `parse(emit(x)) == x` bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Cell {
    fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        match self {
            Cell::Int(v) => write!(w, "{v}"),
            Cell::Float(v) => write!(w, "{v}"),
            Cell::Str(v) => write!(w, "{v}"),
        }
    }

    fn write_json(&self, w: &mut impl Write) -> io::Result<()> {
        match self {
            Cell::Int(v) => write!(w, "{v}"),
            Cell::Float(v) => match serde_json::Number::from_f64(*v) {
                Some(num) => write!(w, "{num}"),
                None => Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("non-finite value {v} cannot be emitted as JSON"),
                )),
            },
            Cell::Str(v) => {
                let quoted = serde_json::to_string(v)?;
                w.write_all(quoted.as_bytes())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "jsonlines" | "json-lines" => Ok(OutputFormat::JsonLines),
            other => Err(format!("unknown format '{other}' (expected csv or jsonl)")),
        }
    }
}

/// Ordered columns plus rows in deterministic grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }
}

/// Serialize the table to the chosen format.
pub fn emit(table: &Table, format: OutputFormat, w: &mut impl Write) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(w, "{}", table.columns.join(","))?;
            for row in &table.rows {
                debug_assert_eq!(row.len(), table.columns.len());
                for (i, cell) in row.iter().enumerate() {
                    if i > 0 {
                        w.write_all(b",")?;
                    }
                    cell.write_csv(w)?;
                }
                w.write_all(b"\n")?;
            }
        }
        OutputFormat::JsonLines => {
            for row in &table.rows {
                debug_assert_eq!(row.len(), table.columns.len());
                w.write_all(b"{")?;
                for (i, (name, cell)) in table.columns.iter().zip(row.iter()).enumerate() {
                    if i > 0 {
                        w.write_all(b",")?;
                    }
                    write!(w, "\"{name}\":")?;
                    cell.write_json(w)?;
                }
                w.write_all(b"}\n")?;
            }
        }
    }
    w.flush()
}

/// Serialize to an in-memory byte buffer.
pub fn emit_to_vec(table: &Table, format: OutputFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    emit(table, format, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(vec!["d", "xi"]);
        let bytes = emit_to_vec(&t, OutputFormat::Csv);
        assert_eq!(bytes, b"d,xi\n");
    }

    #[test]
    fn single_row_csv_line() {
        let xi = 6.26f64.sqrt() - 0.5;
        let mut t = Table::new(vec!["d", "xi"]);
        t.rows.push(vec![Cell::Float(2.5), Cell::Float(xi)]);
        let bytes = emit_to_vec(&t, OutputFormat::Csv);
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            format!("d,xi\n2.5,{xi}\n")
        );
        assert!((xi - 2.0020).abs() < 1e-4);
    }

    #[test]
    fn csv_floats_round_trip_bit_exactly() {
        let values = [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-17, -0.30000000000000004];
        let mut t = Table::new(vec!["x"]);
        for v in values {
            t.rows.push(vec![Cell::Float(v)]);
        }
        let text = String::from_utf8(emit_to_vec(&t, OutputFormat::Csv)).unwrap();
        let parsed: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|line| line.parse::<f64>().unwrap())
            .collect();
        for (orig, back) in values.iter().zip(parsed.iter()) {
            assert_eq!(orig.to_bits(), back.to_bits());
        }
    }

    #[test]
    fn jsonl_preserves_key_order_and_round_trips() {
        let mut t = Table::new(vec!["n", "region", "xi"]);
        t.rows.push(vec![
            Cell::Int(3),
            Cell::Str("R2".into()),
            Cell::Float(0.25),
        ]);
        let text = String::from_utf8(emit_to_vec(&t, OutputFormat::JsonLines)).unwrap();
        assert_eq!(text, "{\"n\":3,\"region\":\"R2\",\"xi\":0.25}\n");
        let value: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(value["xi"].as_f64().unwrap().to_bits(), 0.25f64.to_bits());
    }
}
