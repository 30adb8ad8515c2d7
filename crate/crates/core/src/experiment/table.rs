use crate::error::Result;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::I(v as i64)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:.12e}"),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

/// One output table: written as `<name>.csv` and, for its numeric
/// columns, `<name>.dat`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn f64_at(&self, row: usize, col: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(col)?)? {
            Cell::F(v) => Some(*v),
            Cell::I(v) => Some(*v as f64),
            Cell::S(_) => None,
        }
    }

    /// CSV with leading `config_hash,seed` columns on every row.
    pub fn to_csv(&self, hash: &str, seed: u64) -> String {
        let mut s = format!("config_hash,seed,{}\n", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            let _ = writeln!(s, "{hash},{seed},{}", cells.join(","));
        }
        s
    }

    /// Whitespace-separated numeric columns with a `#` header.
    pub fn to_dat(&self, hash: &str, seed: u64) -> String {
        let numeric: Vec<usize> = (0..self.columns.len())
            .filter(|&c| self.rows.iter().all(|r| !matches!(r[c], Cell::S(_))))
            .collect();
        let mut s = format!("# config {hash} seed {seed}\n# ");
        s.push_str(&numeric.iter().map(|&c| self.columns[c].as_str()).collect::<Vec<_>>().join(" "));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = numeric.iter().map(|&c| r[c].csv()).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, dir: &Path, hash: &str, seed: u64) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.csv", self.name)), self.to_csv(hash, seed))?;
        std::fs::write(dir.join(format!("{}.dat", self.name)), self.to_dat(hash, seed))?;
        Ok(())
    }
}
