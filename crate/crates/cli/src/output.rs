use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

/// Significant digits for CSV numbers.
const DIGITS: usize = 12;

/// `%.12g`-style formatting: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn render(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let internal = |e: csv::Error| CliError::Internal(format!("csv: {e}"));
        w.write_record(&self.header).map_err(internal)?;
        for r in &self.rows {
            w.write_record(r).map_err(internal)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }
}

/// Data produced by a subcommand.
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    pub default_format: Format,
}

impl Report {
    pub fn json(json: Value) -> Self {
        Self {
            json,
            table: None,
            default_format: Format::Json,
        }
    }

    pub fn with_table(json: Value, table: Table, default_format: Format) -> Self {
        Self {
            json,
            table: Some(table),
            default_format,
        }
    }

    pub fn render(&self, format: Option<Format>) -> Result<String, CliError> {
        match format.unwrap_or(self.default_format) {
            Format::Json => {
                let mut s = serde_json::to_string(&self.json).map_err(|e| CliError::Internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => match &self.table {
                Some(t) => t.render(),
                None => Err(CliError::Usage(
                    "this subcommand has no CSV output; use --format json".into(),
                )),
            },
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Internal(format!("writing stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}
