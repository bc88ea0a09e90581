//! CSV output with a `#`-prefixed provenance header.

use std::io::{self, Write};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Settings and backend provenance, one header line each.
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), ..Self::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, out: &mut impl Write, experiment: &str, config_text: Option<&str>) -> io::Result<()> {
        writeln!(out, "# ergovolume {}", ergovolume::VERSION)?;
        writeln!(out, "# experiment: {experiment}")?;
        if let Some(text) = config_text {
            for line in text.lines() {
                writeln!(out, "# config | {line}")?;
            }
        }
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        writeln!(out, "# rows: {}", self.rows.len())?;
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}
