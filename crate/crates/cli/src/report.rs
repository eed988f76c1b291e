//! Tabular output shared by all commands.

use serde::Serialize;
use std::io::Write;

/// Output encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// One value: the display form matches the reference tables, `full` keeps every
/// digit computed.
#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub display: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full: Option<String>,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell { display: s.into(), full: None }
    }

    pub fn int(v: i64) -> Self {
        Cell::text(v.to_string())
    }

    pub fn flag(ok: bool) -> Self {
        Cell::text(if ok { "pass" } else { "fail" })
    }

    pub fn number(display: String, full: String) -> Self {
        Cell { display, full: Some(full) }
    }
}

/// A table with a descriptive header. CSV output starts with `#` comment lines
/// naming what the table mirrors and the units of its columns.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub title: String,
    pub units: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, units: impl Into<String>, columns: &[&str]) -> Self {
        Report {
            title: title.into(),
            units: units.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "# {}", self.title)?;
        writeln!(out, "# units: {}", self.units)?;
        for n in &self.notes {
            writeln!(out, "# {n}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.display.as_str()))?;
        }
        w.flush()
    }
}
