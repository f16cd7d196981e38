//! CSV output: one `#` metadata line, a header row, then numeric rows
//! written with 17 significant digits.

use std::fmt::Write;

use crate::settings::Settings;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
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

    pub fn push(&mut self, row: Vec<f64>) {
        self.push_cells(row.into_iter().map(Cell::Num).collect());
    }

    pub fn push_cells(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// First cell that is NaN or infinite, as (row, column name).
    pub fn first_non_finite(&self) -> Option<(usize, &'static str)> {
        self.rows.iter().enumerate().find_map(|(i, row)| {
            row.iter()
                .position(|c| matches!(c, Cell::Num(x) if !x.is_finite()))
                .map(|j| (i, self.columns[j]))
        })
    }

    /// Renders the table; `settings` goes into the metadata line so the file
    /// can be regenerated from it.
    pub fn render(&self, kind: &str, settings: &Settings) -> String {
        let mut out = format!("# wqed {} kind={kind}", env!("CARGO_PKG_VERSION"));
        for (k, v) in settings.iter() {
            let _ = write!(out, " {k}={v}");
        }
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = match cell {
                    Cell::Num(x) => write!(out, "{x:.16e}"),
                    Cell::Text(s) => write!(out, "{s}"),
                };
            }
            out.push('\n');
        }
        out
    }
}
