//! CSV and JSON output. Files depend only on the report, so identical configs
//! give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::config::OutputFormat;
use super::ScenarioReport;
use crate::error::{Error, Result};
use crate::measures::trace::LimitTrace;

/// `param,re,im` with 17 significant digits.
pub fn trace_csv(t: &LimitTrace) -> String {
    let mut s = String::from("param,re,im\n");
    for (p, v) in t.params.iter().zip(&t.values) {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", p, v[0], v[1]);
    }
    s
}

pub fn parse_trace_csv(text: &str) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut params = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {s:?} on csv line {}", i + 1)))
        };
        if cols.len() != 3 {
            return Err(Error::Config(format!("csv line {} has {} columns", i + 1, cols.len())));
        }
        params.push(parse(cols[0])?);
        values.push(Complex64::new(parse(cols[1])?, parse(cols[2])?));
    }
    Ok((params, values))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

pub fn report_json(report: &ScenarioReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Writes `<out>/<scenario>/<trace>.csv` and `<out>/<scenario>/report.json`.
pub fn emit(report: &ScenarioReport, out: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    let dir = out.join(&report.scenario);
    fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    if format.csv() {
        for t in &report.traces {
            if let Some(trace) = &t.trace {
                let p = dir.join(format!("{}.csv", file_stem(&t.name)));
                fs::write(&p, trace_csv(trace))?;
                written.push(p);
            }
        }
    }
    if format.json() {
        let p = dir.join("report.json");
        fs::write(&p, report_json(report)?)?;
        written.push(p);
    }
    Ok(written)
}
