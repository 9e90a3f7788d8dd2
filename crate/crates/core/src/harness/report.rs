//! CSV reports with `#` footers and golden-file comparison.

use std::fmt::Write as _;
use std::path::Path;

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // adding zero folds −0 into +0
            Cell::Float(v) => format!("{:.16e}", v + 0.0),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

#[derive(Debug, Clone, PartialEq)]
pub struct CsvReport {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub footers: Vec<(String, Cell)>,
    /// Columns derived from quadrature, compared at the looser golden tolerance.
    pub quadrature_columns: Vec<String>,
}

impl CsvReport {
    pub fn new(columns: &[&str]) -> Self {
        CsvReport {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footers: Vec::new(),
            quadrature_columns: Vec::new(),
        }
    }

    pub fn with_quadrature_columns(mut self, cols: &[&str]) -> Self {
        self.quadrature_columns = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn footer(&mut self, key: &str, value: impl Into<Cell>) {
        self.footers.push((key.to_string(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        for (k, v) in &self.footers {
            writeln!(s, "# {k},{}", v.render()).unwrap();
        }
        s
    }
}

/// A report read back from text: cells are kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footers: Vec<(String, String)>,
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv, HarnessError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| HarnessError::Schema("empty report".into()))?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut footers = Vec::new();
    for (i, line) in lines {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest
                .split_once(',')
                .ok_or_else(|| HarnessError::Schema(format!("line {}: footer without value", i + 1)))?;
            footers.push((k.to_string(), v.to_string()));
            continue;
        }
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        if cells.len() != columns.len() {
            return Err(HarnessError::Schema(format!(
                "line {}: {} cells for {} columns",
                i + 1,
                cells.len(),
                columns.len()
            )));
        }
        rows.push(cells);
    }
    Ok(ParsedCsv {
        columns,
        rows,
        footers,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub default: f64,
    pub quadrature: f64,
    pub quadrature_columns: Vec<String>,
    /// If set, only these columns and footers are compared.
    pub only: Option<Vec<String>>,
    pub override_tolerance: Option<f64>,
}

impl Tolerances {
    pub fn for_report(report: &CsvReport) -> Self {
        Tolerances {
            default: 1e-9,
            quadrature: 1e-5,
            quadrature_columns: report.quadrature_columns.clone(),
            only: None,
            override_tolerance: None,
        }
    }

    fn compared(&self, name: &str) -> bool {
        self.only.as_ref().is_none_or(|o| o.iter().any(|c| c == name))
    }

    fn tolerance(&self, name: &str) -> f64 {
        if let Some(t) = self.override_tolerance {
            return t;
        }
        if self.quadrature_columns.iter().any(|c| c == name) {
            self.quadrature
        } else {
            self.default
        }
    }
}

fn cells_match(a: &str, b: &str, tol: f64) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => {
            (x - y).abs() <= tol * x.abs().max(y.abs())
        }
        _ => false,
    }
}

/// Mismatches between `report` and the golden file, one message per cell.
pub fn golden_check(
    report: &CsvReport,
    golden_path: &Path,
    tol: &Tolerances,
) -> Result<Vec<String>, HarnessError> {
    let text = std::fs::read_to_string(golden_path).map_err(|e| HarnessError::Io {
        path: golden_path.display().to_string(),
        reason: e.to_string(),
    })?;
    compare_text(report, &text, tol)
}

pub fn compare_text(report: &CsvReport, golden: &str, tol: &Tolerances) -> Result<Vec<String>, HarnessError> {
    let fresh = parse_csv(&report.render())?;
    let gold = parse_csv(golden)?;
    if fresh.columns != gold.columns {
        return Err(HarnessError::Schema(format!(
            "columns differ: [{}] vs golden [{}]",
            fresh.columns.join(","),
            gold.columns.join(",")
        )));
    }
    if fresh.rows.len() != gold.rows.len() {
        return Err(HarnessError::Schema(format!(
            "{} rows vs {} golden rows",
            fresh.rows.len(),
            gold.rows.len()
        )));
    }
    let mut out = Vec::new();
    for (i, (r, g)) in fresh.rows.iter().zip(&gold.rows).enumerate() {
        for (j, name) in fresh.columns.iter().enumerate() {
            if tol.compared(name) && !cells_match(&r[j], &g[j], tol.tolerance(name)) {
                out.push(format!("row {i} column {name}: {} vs golden {}", r[j], g[j]));
            }
        }
    }
    for (k, v) in &fresh.footers {
        if !tol.compared(k) {
            continue;
        }
        match gold.footers.iter().find(|(gk, _)| gk == k) {
            Some((_, gv)) if cells_match(v, gv, tol.tolerance(k)) => {}
            Some((_, gv)) => out.push(format!("footer {k}: {v} vs golden {gv}")),
            None => out.push(format!("footer {k} missing from golden")),
        }
    }
    Ok(out)
}
