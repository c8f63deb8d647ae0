//! Number formatting and the three output formats.

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned text for reading in a terminal.
    Table,
    /// Comma-separated values with a fixed header row.
    Csv,
    /// Pretty-printed JSON that parses back into the same value.
    Structured,
}

/// Formats a float with 12 significant digits, `%.12g` style: trailing zeros
/// are dropped and very small or large magnitudes switch to exponent form.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        format!("{}e{}", trim_fraction(mantissa), exp)
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Rows of already formatted cells under a header.
#[derive(Debug, Default)]
pub struct Grid {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Grid {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Grid {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Single-row grid from `(column, value)` pairs.
    pub fn record(pairs: Vec<(&str, String)>) -> Self {
        let mut g = Grid::new(pairs.iter().map(|(k, _)| *k));
        g.push(pairs.into_iter().map(|(_, v)| v).collect());
        g
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::usage(format!("cannot write CSV: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells"))
    }

    /// Column-aligned text; numbers are right-aligned, everything else left.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| {
                    if c.parse::<f64>().is_ok() {
                        format!("{c:>w$}")
                    } else {
                        format!("{c:<w$}")
                    }
                })
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&self.header, &mut out);
        for row in &self.rows {
            line(row, &mut out);
        }
        out
    }
}

/// Two-column `name  value` listing.
pub fn key_values(pairs: &[(&str, String)]) -> String {
    let w = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs
        .iter()
        .map(|(k, v)| format!("{k:<w$}  {v}\n"))
        .collect()
}

/// A command result that can be shown in every output format.
pub trait Render: Serialize {
    fn text(&self) -> String;
    fn grid(&self) -> Grid;
}

pub fn render<R: Render>(value: &R, format: Format) -> CliResult<String> {
    match format {
        Format::Table => Ok(value.text()),
        Format::Csv => value.grid().to_csv(),
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Domain(format!("cannot serialize result: {e}")))?;
            s.push('\n');
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.09523809523809523), "0.0952380952381");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(123456789012345.0), "1.23456789012e14");
        assert_eq!(num(1.5e-7), "1.5e-7");
        assert_eq!(num(0.0001234), "0.0001234");
        assert_eq!(num(99999999999.99), "100000000000");
        assert_eq!(num(999999999999.9), "1e12");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(-0.0), "0");
    }

    #[test]
    fn csv_quotes_and_newlines() {
        let mut g = Grid::new(["id", "v"]);
        g.push(vec!["a,b".into(), num(0.5)]);
        assert_eq!(g.to_csv().unwrap(), "id,v\n\"a,b\",0.5\n");
    }
}
