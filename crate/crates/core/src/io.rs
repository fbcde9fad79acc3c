//! Result tables and their CSV / JSON encodings.
//!
//! Numbers are written with 12 significant digits in lowercase scientific
//! notation (`3.39869721450e-7`), so output is byte-stable for a fixed
//! input. Both encodings read back to the same [`Table`].

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Formats with 12 significant digits, e.g. `1.00000000000e0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        // folds −0 into 0
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

/// `x` rounded to the value its 12-digit text parses back to.
pub fn round_to_format(x: f64) -> f64 {
    if x.is_finite() {
        format_number(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Rectangular table with named columns.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Shape(format!(
                "row of {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// Numbers rounded to the written precision, as a reader would see them.
    pub fn rounded(&self) -> Table {
        Table {
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(x) => Cell::Num(round_to_format(*x)),
                            t => t.clone(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::Never)
            .from_writer(writer);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_number(*x),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            w.write_record(&fields).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Table> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        let columns: Vec<String> = r
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = Table::new(columns);
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|f| match f.parse::<f64>() {
                    Ok(x) => Cell::Num(x),
                    Err(_) => Cell::Text(f.to_string()),
                })
                .collect();
            table.push(row)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(x) => Number::from_f64(round_to_format(*x))
                                .map_or(Value::Null, Value::Number),
                            Cell::Text(s) => Value::String(s.clone()),
                        })
                        .collect(),
                )
            })
            .collect();
        let mut obj = Map::new();
        obj.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        obj.insert("rows".into(), Value::Array(rows));
        Value::Object(obj)
    }

    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<()> {
        let text =
            serde_json::to_string_pretty(&self.to_json()).map_err(|e| Error::Io(e.to_string()))?;
        writer.write_all(text.as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Table> {
        let bad = |what: &str| Error::Io(format!("malformed table json: {what}"));
        let v: Value = serde_json::from_reader(reader).map_err(|e| Error::Io(e.to_string()))?;
        let columns = v
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing columns"))?
            .iter()
            .map(|c| {
                c.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("column name"))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = Table::new(columns);
        for row in v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing rows"))?
        {
            let cells = row
                .as_array()
                .ok_or_else(|| bad("row"))?
                .iter()
                .map(|c| match c {
                    Value::Number(n) => n.as_f64().map(Cell::Num).ok_or_else(|| bad("number")),
                    Value::String(s) => Ok(Cell::Text(s.clone())),
                    Value::Null => Ok(Cell::Num(f64::NAN)),
                    _ => Err(bad("cell")),
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(cells)?;
        }
        Ok(table)
    }

    pub fn write_to(&self, path: &Path, format: Format) -> Result<()> {
        let file = BufWriter::new(
            File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        );
        match format {
            Format::Csv => self.write_csv(file),
            Format::Json => self.write_json(file),
        }
    }

    pub fn read_from(path: &Path, format: Format) -> Result<Table> {
        let file = BufReader::new(
            File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        );
        match format {
            Format::Csv => Table::read_csv(file),
            Format::Json => Table::read_json(file),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.34), "3.40000000000e-1");
        assert_eq!(format_number(-0.0), "0.00000000000e0");
        assert_eq!(format_number(1.0), "1.00000000000e0");
        assert_eq!(format_number(92435202.529), "9.24352025290e7");
    }

    fn sample() -> Table {
        let mut t = Table::new(vec!["t_us".into(), "model".into(), "fidelity".into()]);
        t.push(vec![0.0.into(), "block_analytic".into(), 1.0.into()])
            .unwrap();
        t.push(vec![
            0.339869721450302.into(),
            "block_analytic".into(),
            (1.0 - 1e-13).into(),
        ])
        .unwrap();
        t
    }

    #[test]
    fn csv_and_json_agree() {
        let t = sample();
        let mut csv_bytes = Vec::new();
        t.write_csv(&mut csv_bytes).unwrap();
        let mut json_bytes = Vec::new();
        t.write_json(&mut json_bytes).unwrap();
        let from_csv = Table::read_csv(csv_bytes.as_slice()).unwrap();
        let from_json = Table::read_json(json_bytes.as_slice()).unwrap();
        assert_eq!(from_csv, from_json);
        assert_eq!(from_csv, t.rounded());
        let text = String::from_utf8(csv_bytes).unwrap();
        assert!(text
            .starts_with("t_us,model,fidelity\n0.00000000000e0,block_analytic,1.00000000000e0\n"));
    }

    #[test]
    fn row_length_checked() {
        let mut t = Table::new(vec!["a".into()]);
        assert!(t.push(vec![1.0.into(), 2.0.into()]).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_is_stable(xs in prop::collection::vec(-1e12f64..1e12, 1..20)) {
            let mut t = Table::new(vec!["x".into()]);
            for x in &xs {
                t.push(vec![(*x).into()]).unwrap();
            }
            let mut a = Vec::new();
            t.write_csv(&mut a).unwrap();
            let back = Table::read_csv(a.as_slice()).unwrap();
            let mut b = Vec::new();
            back.write_csv(&mut b).unwrap();
            prop_assert_eq!(a, b);
            let mut j = Vec::new();
            t.write_json(&mut j).unwrap();
            prop_assert_eq!(Table::read_json(j.as_slice()).unwrap(), back);
        }
    }
}
