//! Report rendering: JSON, CSV, and an aligned text table.
//!
//! Every rational appears exactly (`n/d`, or `n` for integers; `{num, den}`
//! in JSON) next to a 4-place decimal rounded half to even.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rindex_core::{RIndexReport, Rational};
use serde_json::{json, Value};

pub const DECIMAL_PLACES: u32 = 4;

pub const CSV_COLUMNS: [&str; 8] = [
    "researcher",
    "responsibility_total",
    "responsibility_decimal",
    "completed_total",
    "r_index",
    "r_index_decimal",
    "lagged_out_papers",
    "excluded_events",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Table,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Table => "table",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedReport {
    pub format: OutputFormat,
    pub content: String,
}

/// `n/d` in lowest terms, or just `n` when `d` is 1.
pub fn exact(value: &Rational) -> String {
    value.to_string()
}

/// Fixed-point with `places` decimals, ties rounded to even.
pub fn fixed(value: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = value.numer() * &scale;
    let den = value.denom();
    let (mut q, rem) = scaled.div_mod_floor(den);
    let twice: BigInt = rem * 2;
    if &twice > den || (&twice == den && q.is_odd()) {
        q += 1;
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let (int, frac) = q.abs().div_rem(&scale);
    if places == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{frac:0width$}", width = places as usize)
}

pub fn decimal(value: &Rational) -> String {
    fixed(value, DECIMAL_PLACES)
}

fn json_int(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(small) => Value::from(small),
        None => Value::String(n.to_string()),
    }
}

fn json_rational(value: &Rational) -> Value {
    json!({ "num": json_int(value.numer()), "den": json_int(value.denom()) })
}

fn joined<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
}

pub fn render_json(reports: &[RIndexReport]) -> String {
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "researcher": r.researcher.as_str(),
                "responsibility_total": json_rational(&r.responsibility_total),
                "completed_total": r.completed_total,
                "r_index": json_rational(&r.r_index),
                "r_index_decimal": decimal(&r.r_index),
                "lagged_out_papers": r.lagged_out_papers.iter().map(|p| p.as_str()).collect::<Vec<_>>(),
                "excluded_events": r.excluded_events.iter().map(|e| e.as_str()).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("json values serialize") + "\n"
}

pub fn render_csv(reports: &[RIndexReport]) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(CSV_COLUMNS).expect("write to memory");
    for r in reports {
        writer
            .write_record([
                r.researcher.as_str(),
                &exact(&r.responsibility_total),
                &decimal(&r.responsibility_total),
                &r.completed_total.to_string(),
                &exact(&r.r_index),
                &decimal(&r.r_index),
                &joined(&r.lagged_out_papers),
                &joined(&r.excluded_events),
            ])
            .expect("write to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 fields")
}

/// Most review-indebted first (ascending R-Index), ties by researcher id.
pub fn render_table(reports: &[RIndexReport]) -> String {
    let mut sorted: Vec<&RIndexReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.r_index.cmp(&b.r_index).then_with(|| a.researcher.cmp(&b.researcher)));

    let header = ["researcher", "responsibility", "", "completed", "r_index", ""];
    let rows: Vec<[String; 6]> = sorted
        .iter()
        .map(|r| {
            [
                r.researcher.to_string(),
                exact(&r.responsibility_total),
                decimal(&r.responsibility_total),
                r.completed_total.to_string(),
                exact(&r.r_index),
                decimal(&r.r_index),
            ]
        })
        .collect();

    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[&str]| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i == 0 {
                out.push_str(&format!("{cell:<w$}"));
            } else {
                out.push_str(&format!("  {cell:>w$}"));
            }
        }
        out.trim_end().to_owned() + "\n"
    };

    let mut out = line(&header);
    for row in &rows {
        out.push_str(&line(&row.each_ref().map(String::as_str)));
    }
    out
}

pub fn render(reports: &[RIndexReport], format: OutputFormat) -> RenderedReport {
    let content = match format {
        OutputFormat::Json => render_json(reports),
        OutputFormat::Csv => render_csv(reports),
        OutputFormat::Table => render_table(reports),
    };
    RenderedReport { format, content }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn exact_forms() {
        assert_eq!(exact(&rat(3, 2)), "3/2");
        assert_eq!(exact(&rat(6, 4)), "3/2");
        assert_eq!(exact(&rat(-1, 2)), "-1/2");
        assert_eq!(exact(&rat(4, 1)), "4");
        assert_eq!(exact(&rat(0, 5)), "0");
    }

    #[test]
    fn fixed_rounds_half_to_even() {
        assert_eq!(decimal(&rat(3, 2)), "1.5000");
        assert_eq!(decimal(&rat(1, 2)), "0.5000");
        assert_eq!(decimal(&rat(-1, 2)), "-0.5000");
        assert_eq!(decimal(&rat(7, 3)), "2.3333");
        assert_eq!(decimal(&rat(2, 3)), "0.6667");
        assert_eq!(decimal(&rat(-2, 3)), "-0.6667");
        // Exact ties at the fifth decimal.
        assert_eq!(decimal(&rat(5, 100_000)), "0.0000");
        assert_eq!(decimal(&rat(15, 100_000)), "0.0002");
        assert_eq!(decimal(&rat(25, 100_000)), "0.0002");
        assert_eq!(decimal(&rat(-15, 100_000)), "-0.0002");
        assert_eq!(decimal(&rat(-5, 100_000)), "0.0000");
        assert_eq!(decimal(&rat(12345, 1)), "12345.0000");
        assert_eq!(fixed(&rat(5, 2), 0), "2");
        assert_eq!(fixed(&rat(7, 2), 0), "4");
    }

    #[test]
    fn huge_values_fall_back_to_strings() {
        let big = Rational::from_integer(BigInt::from(u64::MAX) * 4);
        let v = json_rational(&big);
        assert!(v["num"].is_string());
        assert_eq!(v["den"], Value::from(1));
    }

    #[test]
    fn format_names() {
        for f in [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Table] {
            assert_eq!(f.to_string().parse::<OutputFormat>().unwrap(), f);
        }
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
