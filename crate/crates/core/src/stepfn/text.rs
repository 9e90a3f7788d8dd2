//! Plain-text step function format.
//!
//! ```text
//! dim 1
//! half_width 1
//! level 3
//! 0e0
//! 1.5e0
//! ...
//! ```
//!
//! One value per line, row-major with the last axis fastest. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt::Write as _;

use super::{GridSpec, StepFunction};
use crate::error::{Error, Result};

pub fn write_step_function(f: &StepFunction) -> String {
    let g = f.grid();
    let mut out = format!(
        "dim {}\nhalf_width {}\nlevel {}\n",
        g.dim(),
        g.half_width(),
        g.level()
    );
    for v in f.values() {
        writeln!(out, "{v:e}").expect("writing to a String");
    }
    out
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn parse_step_function(text: &str) -> Result<StepFunction> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |key: &str| -> Result<(usize, String)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing `{key}` header")))?;
        match l.split_once(char::is_whitespace) {
            Some((k, v)) if k == key => Ok((n, v.trim().to_string())),
            _ => Err(parse_err(n, format!("expected `{key} <value>`, found `{l}`"))),
        }
    };
    let (n, dim) = header("dim")?;
    let dim: usize = dim.parse().map_err(|_| parse_err(n, "dim is not an integer"))?;
    let (n, hw) = header("half_width")?;
    let hw: f64 = hw.parse().map_err(|_| parse_err(n, "half_width is not a number"))?;
    let (n, level) = header("level")?;
    let level: i32 = level.parse().map_err(|_| parse_err(n, "level is not an integer"))?;
    let grid = GridSpec::new(dim, hw, level).map_err(|e| parse_err(n, e.to_string()))?;

    let mut values = Vec::with_capacity(grid.cell_count());
    let mut last = n;
    for (n, l) in lines {
        let v: f64 = l
            .parse()
            .map_err(|_| parse_err(n, format!("`{l}` is not a number")))?;
        values.push(v);
        last = n;
    }
    if values.len() != grid.cell_count() {
        return Err(parse_err(
            last,
            format!("expected {} values, found {}", grid.cell_count(), values.len()),
        ));
    }
    StepFunction::new(grid, values).map_err(|e| parse_err(last, e.to_string()))
}
