//! Fixed-format tabular output.

use std::fmt::Write as _;

/// Formats a float with 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // Normalize -0.0 so identical runs cannot differ in sign bits.
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Float(x) => serde_json::json!(x),
            Cell::Int(k) => serde_json::json!(k),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A small table rendered as CSV (LF line endings) or JSON.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Renders the table, optionally preceded by `# key=value` comment lines.
    pub fn render(&self, comments: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in comments {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"columns": [...], "rows": [[...], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        serde_json::json!({ "columns": self.header, "rows": rows })
    }
}

/// Parses a two-column numeric table; `#` comments, blank lines and a
/// non-numeric header line are skipped. Columns may be separated by commas
/// or whitespace.
pub fn parse_two_columns(text: &str) -> crate::Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if cells.len() != 2 {
            return Err(crate::Error::Parse(format!(
                "line {}: expected 2 columns, found {}",
                lineno + 1,
                cells.len()
            )));
        }
        match (cells[0].parse::<f64>(), cells[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => rows.push((a, b)),
            _ if rows.is_empty() => continue,
            _ => return Err(crate::Error::Parse(format!("line {}: non-numeric cell", lineno + 1))),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_f64(-0.0), fmt_f64(0.0));
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn render_with_comments() {
        let mut t = CsvTable::new(["m", "p"]);
        t.push_row(vec![0usize.into(), 1.0.into()]);
        let s = t.render(&[("manifest_sha256".into(), "ab".into())]);
        assert_eq!(s, "# manifest_sha256=ab\nm,p\n0,1.0000000000000000e0\n");
        assert_eq!(t.to_json()["rows"][0][1], serde_json::json!(1.0));
    }

    #[test]
    fn two_column_parser() {
        let rows = parse_two_columns("omega1,omega2\n1 2\n# note\n0.5, 1\n\n").unwrap();
        assert_eq!(rows, vec![(1.0, 2.0), (0.5, 1.0)]);
        assert!(parse_two_columns("1 2 3\n").is_err());
        assert!(parse_two_columns("1 2\nx y\n").is_err());
    }
}
