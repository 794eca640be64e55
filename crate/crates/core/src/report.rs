//! Machine-readable output of benchmark runs.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bench::BenchResult;
use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;
pub const BENCH_CSV_HEADER: &str = "hash,class,ns_per_byte,compressions,cipher_calls,state_bytes";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: u32,
    pub results: Vec<BenchResult>,
}

pub fn render_bench(results: &[BenchResult], format: Format) -> Result<String> {
    if results.is_empty() {
        return Err(Error::InvalidArgument("no benchmark results to report".into()));
    }
    Ok(match format {
        Format::Json => {
            let r = BenchReport { schema: SCHEMA, results: results.to_vec() };
            serde_json::to_string_pretty(&r)? + "\n"
        }
        Format::Csv => {
            let mut s = format!("{BENCH_CSV_HEADER}\n");
            for r in results {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.hash, r.class, r.ns_per_byte, r.compressions, r.cipher_calls, r.state_bytes
                );
            }
            s
        }
    })
}

pub fn parse_bench_json(text: &str) -> Result<BenchReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `text` to `path`, or to standard output without one.
pub fn write_output(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Renders and writes in one step.
pub fn report_emit(results: &[BenchResult], format: Format, path: Option<&Path>) -> Result<()> {
    write_output(&render_bench(results, format)?, path)
}
