//! CSV tables with a config-hash comment header: deterministic writer and a
//! tolerant reader used by the `rates` re-fit path.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

/// Render a table: `# config_hash = <hex>` comment, one header row, then one
/// line per data row. '.' decimal separator and '\n' line ends come from the
/// standard float formatting.
pub fn render_table(config_hash: &str, columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# config_hash = {config_hash}");
    let _ = writeln!(s, "{}", columns.join(","));
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let line = row
            .iter()
            .map(|v| format_float(*v))
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(s, "{line}");
    }
    s
}

/// Shortest round-trip decimal form (never locale-dependent).
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

pub fn write_table(
    path: &Path,
    config_hash: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    std::fs::write(path, render_table(config_hash, columns, rows))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parsed numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub config_hash: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Parse the table format produced by [`render_table`]. Comment lines start
/// with '#'; the first non-comment line names the columns; every further
/// line must carry exactly that many numeric fields ("NaN" allowed).
pub fn parse_table(text: &str) -> Result<Table> {
    let mut config_hash = None;
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                if k.trim() == "config_hash" {
                    config_hash = Some(v.trim().to_string());
                }
            }
            continue;
        }
        match &columns {
            None => {
                let cols: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
                if cols.iter().any(|c| c.is_empty()) {
                    return Err(CliError::Validation(format!(
                        "line {}: empty column name",
                        lineno + 1
                    )));
                }
                columns = Some(cols);
            }
            Some(cols) => {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != cols.len() {
                    return Err(CliError::Validation(format!(
                        "line {}: {} fields, expected {}",
                        lineno + 1,
                        fields.len(),
                        cols.len()
                    )));
                }
                let mut row = Vec::with_capacity(fields.len());
                for f in fields {
                    let f = f.trim();
                    let v = if f == "NaN" {
                        f64::NAN
                    } else {
                        f.parse::<f64>().map_err(|_| {
                            CliError::Validation(format!(
                                "line {}: bad number {f:?}",
                                lineno + 1
                            ))
                        })?
                    };
                    row.push(v);
                }
                rows.push(row);
            }
        }
    }
    let columns = columns
        .ok_or_else(|| CliError::Validation("table has no header row".into()))?;
    Ok(Table {
        config_hash,
        columns,
        rows,
    })
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_table(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let rows = vec![
            vec![0.0, 1.5, f64::NAN],
            vec![0.1, -2.25e-7, 3.0],
            vec![1.0 / 3.0, 1e300, -0.0],
        ];
        let text = render_table("abc123", &["t", "a", "b"], &rows);
        let table = parse_table(&text).unwrap();
        assert_eq!(table.config_hash.as_deref(), Some("abc123"));
        assert_eq!(table.columns, vec!["t", "a", "b"]);
        for (r0, r1) in rows.iter().zip(table.rows.iter()) {
            for (v0, v1) in r0.iter().zip(r1.iter()) {
                if v0.is_nan() {
                    assert!(v1.is_nan());
                } else {
                    assert_eq!(v0, v1, "exact round-trip");
                }
            }
        }
        assert_eq!(table.column("a").unwrap()[1], -2.25e-7);
    }

    #[test]
    fn reader_rejects_malformed() {
        assert!(parse_table("").is_err());
        assert!(parse_table("a,b\n1,2,3\n").is_err());
        assert!(parse_table("a,b\n1,x\n").is_err());
        assert!(parse_table("a,,b\n").is_err());
    }

    #[test]
    fn line_termination_is_newline_only() {
        let text = render_table("h", &["x"], &[vec![1.0]]);
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }
}
