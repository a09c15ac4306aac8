//! CSV tables and their JSON sidecars.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

/// Significant digits written for real values.
pub const SIG_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// `v` with [`SIG_DIGITS`] significant digits: positional notation for
/// moderate magnitudes, scientific otherwise.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..=9).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // Rounding can carry into a new digit (9.9999999995 -> 10.00000000).
        let s = if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > SIG_DIGITS && decimals > 0 {
            format!("{v:.prec$}", prec = decimals - 1)
        } else {
            s
        };
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.prec$e}", prec = SIG_DIGITS - 1)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Result of one subcommand.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Fully resolved parameters (defaults applied).
    pub resolved: Value,
    /// Aggregate results that do not fit the row layout.
    pub summary: Value,
}

impl Table {
    pub fn new(columns: &[&'static str], resolved: Value) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new(), resolved, summary: Value::Null }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Sidecar path next to the CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".json");
    csv.with_file_name(name)
}

pub fn sidecar(table: &Table, config: &RunConfig) -> Result<Value, CliError> {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(json!({
        "subcommand": config.subcommand.name(),
        "seed": config.seed,
        "config": config.to_toml()?,
        "resolved": table.resolved,
        "columns": table.columns,
        "summary": table.summary,
        "versions": {
            "spinclone": spinclone::VERSION,
            "spinclone-cli": env!("CARGO_PKG_VERSION"),
            "parallel": spinclone::par::is_parallel(),
        },
        "timestamp_unix": timestamp,
    }))
}

/// Write the CSV and its sidecar. Both are rendered before either file is
/// touched.
pub fn write(table: &Table, config: &RunConfig, csv_path: &Path) -> Result<(), CliError> {
    let body = table.to_csv()?;
    let meta = serde_json::to_vec_pretty(&sidecar(table, config)?).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(csv_path, body).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    let side = sidecar_path(csv_path);
    std::fs::write(&side, meta).map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_real(0.853_553_390_593_273_7), "0.853553391");
        assert_eq!(format_real(2.221_441_469_079_183), "2.22144147");
        assert_eq!(format_real(0.5), "0.5");
        assert_eq!(format_real(1200.0), "1200");
        assert_eq!(format_real(-0.001_234_567_891_2), "-0.00123456789");
        assert_eq!(format_real(1.5e-9), "1.50000000e-9");
        assert_eq!(format_real(9.999_999_999_6), "10");
        assert_eq!(format_real(0.0), "0");
    }

    #[test]
    fn csv_quotes_and_orders() {
        let mut t = Table::new(&["a", "b"], Value::Null);
        t.push(vec![Cell::from("x,y"), Cell::from(1.0)]);
        t.push(vec![Cell::Empty, Cell::from(3usize)]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "a,b\n\"x,y\",1\n,3\n");
    }

    #[test]
    fn sidecar_sits_next_to_csv() {
        assert_eq!(sidecar_path(Path::new("out/pcc.csv")), PathBuf::from("out/pcc.csv.json"));
    }
}
