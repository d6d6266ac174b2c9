use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::CliError;

/// Where a command's result goes: a file, or stdout when no path is set.
pub struct Sink {
    pub path: Option<PathBuf>,
}

impl Sink {
    fn write_bytes(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
            }
        }
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.write_bytes(text.as_bytes())
    }

    pub fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        self.write_bytes(&bytes)
    }

    pub fn text(&self, text: &str) -> Result<(), CliError> {
        self.write_bytes(text.as_bytes())
    }
}

/// Rounds to 6 significant digits so that summaries print identically.
pub fn fixed(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 5 - x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{:.12}", x).trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        x.to_string()
    }
}
