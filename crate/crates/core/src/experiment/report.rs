use std::fmt::Write as _;

use serde_json::{json, Value};

use super::Suite;

/// One table cell. Doubles print in shortest round-trip form.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    pub fn opt_float(x: Option<f64>) -> Cell {
        x.map_or(Cell::Missing, Cell::Float)
    }

    pub fn count(x: usize) -> Cell {
        Cell::Int(x as i64)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format!("{x}")),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A suite's result table plus its overall verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub seed: Option<u64>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub passed: bool,
    /// Witnesses and remarks, in the order they were produced.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: Suite, seed: Option<u64>, columns: &[&'static str]) -> Self {
        Report { suite, seed, columns: columns.to_vec(), rows: Vec::new(), passed: true, notes: Vec::new() }
    }

    /// Appends a row; the last cell of every row is its pass flag.
    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        if let Some(Cell::Bool(false)) = row.last() {
            self.passed = false;
        }
        self.rows.push(row);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn fail(&mut self, text: impl Into<String>) {
        self.passed = false;
        self.notes.push(text.into());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// Header line, then one line per row. Notes follow as `# ` comments.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let v = json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "passed": self.passed,
            "columns": self.columns,
            "rows": rows,
            "notes": self.notes,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("report values serialise");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats() {
        let mut r = Report::new(Suite::Axioms, None, &["id", "x", "note", "pass"]);
        r.push(vec!["a".into(), 0.1.into(), Cell::Missing, true.into()]);
        r.push(vec!["b,c".into(), Cell::Int(3), "q\"".into(), false.into()]);
        r.note("witness {0,1}");
        assert!(!r.passed);
        assert_eq!(r.to_csv(), "id,x,note,pass\na,0.1,,true\n\"b,c\",3,\"q\"\"\",false\n# witness {0,1}\n");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"][0][1], json!(0.1));
        assert_eq!(v["rows"][0][2], Value::Null);
        assert_eq!(v["passed"], json!(false));
    }
}
