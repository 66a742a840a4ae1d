//! Plain tables written as CSV (LF, header row) or JSON.

use std::fmt::Write as _;

use serde::Serialize;

pub use orbit_census::format::{opt_real, real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Self {
            columns: header.split(',').map(str::to_string).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// Append rows already rendered as CSV lines (as produced by the census
    /// report helpers).
    pub fn push_csv_lines(&mut self, text: &str) {
        for line in text.lines() {
            self.push(line.split(',').map(str::to_string).collect());
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("strings always serialize");
        s.push('\n');
        s
    }

    /// Column `name` of row `i`, for tests and summaries.
    pub fn get(&self, i: usize, name: &str) -> Option<&str> {
        let c = self.columns.iter().position(|h| h == name)?;
        self.rows.get(i).map(|r| r[c].as_str())
    }
}

/// Cells for a list of displayable values.
#[macro_export]
macro_rules! cells {
    ($($v:expr),* $(,)?) => { vec![$($v.to_string()),*] };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_shapes() {
        let mut t = Table::new("n,value");
        t.push(cells![3, real(0.5)]);
        assert_eq!(t.to_csv(), "n,value\n3,5.0000000000000000e-1\n");
        assert_eq!(t.get(0, "value"), Some("5.0000000000000000e-1"));
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["columns"][1], "value");
        assert_eq!(v["rows"][0][0], "3");
    }
}
