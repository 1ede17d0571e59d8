//! Unit-tagged result tables and their JSON, CSV and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Unit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Integer(i64),
    Number(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Number(v)
        } else {
            Cell::Missing
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::from)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Integer(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Integer(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Absent for labels and calendar years.
    pub unit: Option<Unit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[(&str, Option<Unit>)]) -> Self {
        Table {
            name: name.into(),
            columns: columns
                .iter()
                .map(|(n, u)| Column {
                    name: n.to_string(),
                    unit: *u,
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric value at `row` in the named column.
    pub fn number(&self, row: usize, column: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column_index(column)?)? {
            Cell::Number(v) => Some(*v),
            Cell::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }
}

/// Everything a command emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub tool_version: String,
    pub config: BTreeMap<String, String>,
    pub provenance: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub tables: Vec<Table>,
}

impl ReportEnvelope {
    pub fn new(command: &str) -> Self {
        ReportEnvelope {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: BTreeMap::new(),
            provenance: BTreeMap::new(),
            warnings: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn echo(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Output(format!("serializing report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: "report".into(),
            line: e.line() as u64,
            message: e.to_string(),
        })
    }

    /// Each table as a block of CSV: a header row of `name [unit]` cells,
    /// then data rows. Blocks are separated by an empty line.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = Vec::new();
        for (i, table) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push(b'\n');
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let header: Vec<String> = std::iter::once("table".to_string())
                .chain(table.columns.iter().map(|c| match c.unit {
                    Some(u) => format!("{} [{}]", c.name, u),
                    None => c.name.clone(),
                }))
                .collect();
            w.write_record(&header).map_err(csv_err)?;
            for row in &table.rows {
                let cells: Vec<String> = std::iter::once(table.name.clone())
                    .chain(row.iter().map(machine_cell))
                    .collect();
                w.write_record(&cells).map_err(csv_err)?;
            }
            out.extend(w.into_inner().map_err(|e| Error::Output(e.to_string()))?);
        }
        String::from_utf8(out).map_err(|e| Error::Output(e.to_string()))
    }

    /// Human-readable rendering with rates in percent per year.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "thermo-hindcast {} ({})", self.command, self.tool_version);
        if let Some(kind) = self.provenance.get("dataset") {
            let _ = writeln!(s, "data: {kind}");
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for table in &self.tables {
            let _ = writeln!(s, "\n[{}]", table.name);
            let header: Vec<String> = table
                .columns
                .iter()
                .map(|c| match c.unit.map(human_unit) {
                    Some(u) if !u.is_empty() => format!("{} ({u})", c.name),
                    _ => c.name.clone(),
                })
                .collect();
            let body: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(&table.columns)
                        .map(|(cell, col)| human_cell(cell, col.unit))
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    body.iter()
                        .map(|r| r[i].chars().count())
                        .chain(std::iter::once(header[i].chars().count()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(s, "{}", line(&header));
            for r in &body {
                let _ = writeln!(s, "{}", line(r));
            }
        }
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Output(format!("writing CSV: {e}"))
}

/// Shortest representation that parses back to the same value.
fn machine_cell(cell: &Cell) -> String {
    match cell {
        Cell::Integer(v) => v.to_string(),
        Cell::Number(v) => format!("{v:?}"),
        Cell::Text(t) => t.clone(),
        Cell::Missing => String::new(),
    }
}

fn human_unit(unit: Unit) -> &'static str {
    match unit {
        Unit::FractionPerYear => "%/yr",
        Unit::WattsPerCurrency => "mW/USD",
        Unit::Dimensionless => "",
        other => other.token(),
    }
}

fn human_cell(cell: &Cell, unit: Option<Unit>) -> String {
    match (cell, unit) {
        (Cell::Number(v), Some(Unit::FractionPerYear)) => format!("{:.3}", v * 100.0),
        (Cell::Number(v), Some(Unit::WattsPerCurrency)) => format!("{:.4}", v * 1e3),
        (Cell::Number(v), Some(Unit::Dimensionless)) => format!("{v:.4}"),
        (Cell::Number(v), _) => format!("{v:.6e}"),
        (Cell::Integer(v), _) => v.to_string(),
        (Cell::Text(t), _) => t.clone(),
        (Cell::Missing, _) => "-".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(values: &[f64]) -> ReportEnvelope {
        let mut env = ReportEnvelope::new("test");
        env.echo("window", "1970:2010");
        let mut t = Table::new("rates", &[("year", None), ("eta", Some(Unit::FractionPerYear)), ("note", None)]);
        for (i, v) in values.iter().enumerate() {
            t.push(vec![(1950 + i as i32).into(), (*v).into(), "a,\"b\"".into()]);
        }
        t.push(vec![2100.into(), Cell::Missing, "".into()]);
        env.tables.push(t);
        env
    }

    #[test]
    fn csv_quotes_and_tags_units() {
        let csv = sample(&[0.02]).to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "table,year,eta [1/yr],note");
        assert_eq!(lines.next().unwrap(), "rates,1950,0.02,\"a,\"\"b\"\"\"");
    }

    #[test]
    fn text_uses_percent() {
        let text = sample(&[0.0224]).to_text();
        assert!(text.contains("eta (%/yr)"));
        assert!(text.contains("2.240"));
    }

    proptest! {
        #[test]
        fn json_round_trip_is_lossless(values in proptest::collection::vec(-1e300f64..1e300, 0..20)) {
            let env = sample(&values);
            let back = ReportEnvelope::from_json(&env.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, env);
        }

        #[test]
        fn csv_numbers_match_json(values in proptest::collection::vec(-1.0f64..1.0, 1..20)) {
            let env = sample(&values);
            let csv = env.to_csv().unwrap();
            let mut rdr = csv::Reader::from_reader(csv.as_bytes());
            for (i, rec) in rdr.records().enumerate().take(values.len()) {
                let v: f64 = rec.unwrap()[2].parse().unwrap();
                prop_assert_eq!(v, env.tables[0].number(i, "eta").unwrap());
            }
        }
    }
}
