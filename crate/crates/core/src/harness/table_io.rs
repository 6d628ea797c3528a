//! Text, CSV and JSON serialization of [`SweepTable`]s.
//!
//! `paper_txt` is the plotting format: whitespace-separated columns, α first,
//! one row per grid point, no header, fixed 8 decimals. CSV writes 17
//! significant digits and JSON the shortest round-trip representation, so
//! both read back bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sweep::{LossKind, SweepTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    PaperTxt,
    Csv,
    Json,
}

/// Decimal places of the `paper_txt` format.
pub const PAPER_TXT_DECIMALS: usize = 8;

/// Renders `table` in `format`.
pub fn render_table(table: &SweepTable, format: TableFormat) -> Result<String> {
    table.validate()?;
    let mut out = String::new();
    match format {
        TableFormat::PaperTxt => {
            for (alpha, row) in table.alpha_grid.iter().zip(&table.values_db) {
                out.push_str(&format!("{alpha:.prec$}", prec = PAPER_TXT_DECIMALS));
                for v in row {
                    out.push_str(&format!(" {v:.prec$}", prec = PAPER_TXT_DECIMALS));
                }
                out.push('\n');
            }
        }
        TableFormat::Csv => {
            out.push_str("alpha");
            for s in &table.snr_db_list {
                out.push_str(&format!(",{s:.16e}"));
            }
            out.push('\n');
            for (alpha, row) in table.alpha_grid.iter().zip(&table.values_db) {
                out.push_str(&format!("{alpha:.16e}"));
                for v in row {
                    out.push_str(&format!(",{v:.16e}"));
                }
                out.push('\n');
            }
        }
        TableFormat::Json => {
            out = serde_json::to_string_pretty(table)
                .map_err(|e| Error::InvalidArgument(format!("cannot encode table: {e}")))?;
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn write_table(table: &SweepTable, path: &Path, format: TableFormat) -> Result<()> {
    let text = render_table(table, format)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn format_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn parse_number(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| format_error(path, format!("line {line}: `{field}` is not a number")))
}

/// Parses the `paper_txt` format into `(alpha, rows)`.
pub fn parse_paper_txt(path: &Path, text: &str) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut alpha = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|f| parse_number(path, i + 1, f))
            .collect::<Result<Vec<_>>>()?;
        if nums.len() < 2 {
            return Err(format_error(path, format!("line {}: expected at least two columns", i + 1)));
        }
        alpha.push(nums[0]);
        rows.push(nums[1..].to_vec());
    }
    Ok((alpha, rows))
}

fn parse_csv(path: &Path, text: &str, kind: LossKind) -> Result<SweepTable> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| format_error(path, "empty file"))?;
    let mut cols = header.split(',');
    if cols.next().map(str::trim) != Some("alpha") {
        return Err(format_error(path, "header must start with `alpha`"));
    }
    let snr_db_list = cols.map(|f| parse_number(path, 1, f)).collect::<Result<Vec<_>>>()?;
    let mut alpha_grid = Vec::new();
    let mut values_db = Vec::new();
    for (i, line) in lines {
        let nums = line
            .split(',')
            .map(|f| parse_number(path, i + 1, f))
            .collect::<Result<Vec<_>>>()?;
        if nums.len() != snr_db_list.len() + 1 {
            return Err(format_error(path, format!("line {}: wrong number of columns", i + 1)));
        }
        alpha_grid.push(nums[0]);
        values_db.push(nums[1..].to_vec());
    }
    Ok(SweepTable {
        kind,
        alpha_grid,
        snr_db_list,
        values_db,
    })
}

/// Reads a CSV or JSON table. CSV carries no kind, so it is taken from
/// `kind`; for JSON a given `kind` must match the embedded one.
pub fn read_table(path: &Path, format: TableFormat, kind: Option<LossKind>) -> Result<SweepTable> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let table = match format {
        TableFormat::Csv => {
            let kind = kind.ok_or_else(|| format_error(path, "CSV tables need an explicit kind"))?;
            parse_csv(path, &text, kind)?
        }
        TableFormat::Json => {
            let table: SweepTable = serde_json::from_str(&text).map_err(|e| format_error(path, e.to_string()))?;
            if let Some(k) = kind {
                if k != table.kind {
                    return Err(format_error(path, "table kind does not match"));
                }
            }
            table
        }
        TableFormat::PaperTxt => {
            return Err(format_error(
                path,
                "paper_txt has no SNR header; use parse_paper_txt",
            ))
        }
    };
    table
        .validate()
        .map_err(|e| format_error(path, e.to_string()))?;
    Ok(table)
}
