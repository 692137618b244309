//! Report documents and their three serializations.
//!
//! * `text`: aligned tables, 4 significant figures for display only.
//! * `csv`: one record per cell, `table,row,column,value,unit`, values
//!   printed in shortest round-trip form.
//! * `structured`: pretty JSON of the whole document at full precision.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Csv,
    Structured,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "structured" | "json" => Ok(Self::Structured),
            other => Err(format!("unknown format `{other}` (text, csv, structured)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Text => "text",
            Self::Csv => "csv",
            Self::Structured => "structured",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    /// One entry per column; `None` is an undefined cell.
    pub values: Vec<Option<f64>>,
    /// Overrides the column units for every cell of this row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub name: String,
    pub row_header: String,
    pub columns: Vec<Column>,
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn new(
        name: impl Into<String>,
        row_header: impl Into<String>,
        columns: Vec<Column>,
    ) -> Self {
        Self {
            name: name.into(),
            row_header: row_header.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, values: Vec<Option<f64>>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(ReportRow {
            label: label.into(),
            values,
            unit: None,
        });
    }

    /// Row whose cells all share `unit`, for tables of mixed quantities.
    pub fn push_quantity(
        &mut self,
        label: impl Into<String>,
        value: Option<f64>,
        unit: impl Into<String>,
    ) {
        self.rows.push(ReportRow {
            label: label.into(),
            values: vec![value; self.columns.len()],
            unit: Some(unit.into()),
        });
    }

    pub fn push_values(&mut self, label: impl Into<String>, values: &[f64]) {
        self.push(label, values.iter().copied().map(Some).collect());
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<f64> {
        let c = self.columns.iter().position(|c| c.name == column)?;
        self.rows.iter().find(|r| r.label == row)?.values[c]
    }
}

/// Tool identity. Nothing time-dependent, so identical inputs serialize
/// to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub title: String,
    pub scenario: String,
    pub tables: Vec<ReportTable>,
    #[serde(default)]
    pub notes: Vec<String>,
    pub metadata: Metadata,
}

impl ReportDocument {
    pub fn new(title: impl Into<String>, scenario: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            scenario: scenario.into(),
            tables: Vec::new(),
            notes: Vec::new(),
            metadata: Metadata::default(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&ReportTable> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Clone)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write report to {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse report: {0}")]
    Parse(String),
}

/// 4 significant figures: plain notation for moderate magnitudes,
/// scientific otherwise.
pub fn display_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-3..6).contains(&exp) {
        let decimals = (3 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.3e}")
    }
}

fn column_title(c: &Column) -> String {
    if c.unit.is_empty() {
        c.name.clone()
    } else {
        format!("{} ({})", c.name, c.unit)
    }
}

pub fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} [scenario: {}]\n", doc.title, doc.scenario));
    for table in &doc.tables {
        out.push('\n');
        out.push_str(&table.name);
        out.push('\n');
        let mut grid: Vec<Vec<String>> = Vec::with_capacity(table.rows.len() + 1);
        let mut header = vec![table.row_header.clone()];
        header.extend(table.columns.iter().map(column_title));
        grid.push(header);
        for row in &table.rows {
            let label = match &row.unit {
                Some(u) if !u.is_empty() => format!("{} ({u})", row.label),
                _ => row.label.clone(),
            };
            let mut line = vec![label];
            line.extend(
                row.values
                    .iter()
                    .map(|v| v.map(display_number).unwrap_or_else(|| "-".into())),
            );
            grid.push(line);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|c| grid.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        for line in &grid {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (cell, &w))| {
                    if i == 0 {
                        format!("{cell:<w$}")
                    } else {
                        format!("{cell:>w$}")
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
    }
    if !doc.notes.is_empty() {
        out.push('\n');
        for note in &doc.notes {
            out.push_str(&format!("note: {note}\n"));
        }
    }
    out
}

pub const CSV_HEADER: [&str; 5] = ["table", "row", "column", "value", "unit"];

pub fn render_csv(doc: &ReportDocument) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for table in &doc.tables {
        for row in &table.rows {
            for (col, value) in table.columns.iter().zip(&row.values) {
                let value = value.map(|v| v.to_string()).unwrap_or_default();
                let unit = row.unit.as_ref().unwrap_or(&col.unit);
                writer
                    .write_record([&table.name, &row.label, &col.name, &value, unit])
                    .expect("in-memory write");
            }
        }
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn render_structured(doc: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_report(doc: &ReportDocument, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(doc),
        ReportFormat::Csv => render_csv(doc),
        ReportFormat::Structured => render_structured(doc),
    }
}

pub fn write_report(
    doc: &ReportDocument,
    format: ReportFormat,
    destination: &Destination,
) -> Result<(), ReportError> {
    let body = render_report(doc, format);
    match destination {
        Destination::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| ReportError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
        Destination::File(path) => fs::write(path, body).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        }),
    }
}

/// One parsed CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvCell {
    pub table: String,
    pub row: String,
    pub column: String,
    pub value: Option<f64>,
    pub unit: String,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvCell>, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ReportError::Parse(e.to_string()))?;
    if headers.iter().ne(CSV_HEADER) {
        return Err(ReportError::Parse(format!("unexpected header {headers:?}")));
    }
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| ReportError::Parse(e.to_string()))?;
            let value = match &rec[3] {
                "" => None,
                v => Some(
                    v.parse::<f64>()
                        .map_err(|e| ReportError::Parse(format!("value `{v}`: {e}")))?,
                ),
            };
            Ok(CsvCell {
                table: rec[0].to_string(),
                row: rec[1].to_string(),
                column: rec[2].to_string(),
                value,
                unit: rec[4].to_string(),
            })
        })
        .collect()
}

pub fn parse_structured(text: &str) -> Result<ReportDocument, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))
}
