use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::metrics::{csv_cell, MetricsReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub format: ReportFormat,
    /// Include wall-clock columns. Off by default so that reports of
    /// identical runs are byte-identical.
    pub with_timings: bool,
    /// Append one `dataset = "mean"` row per algorithm.
    pub aggregate: bool,
}

impl ReportOptions {
    pub fn new(format: ReportFormat) -> Self {
        ReportOptions {
            format,
            with_timings: false,
            aggregate: false,
        }
    }
}

fn records(reports: &[MetricsReport], opts: &ReportOptions) -> Vec<Value> {
    let mut rows: Vec<Value> = reports.iter().map(|r| r.to_json(opts.with_timings)).collect();
    if opts.aggregate {
        let mut algorithms: Vec<&str> = Vec::new();
        for r in reports {
            if !algorithms.contains(&r.algorithm.as_str()) {
                algorithms.push(&r.algorithm);
            }
        }
        for alg in algorithms {
            let group: Vec<Value> = reports
                .iter()
                .filter(|r| r.algorithm == alg)
                .map(|r| r.to_json(opts.with_timings))
                .collect();
            rows.push(mean_record(&group));
        }
    }
    rows
}

fn mean_record(group: &[Value]) -> Value {
    let first = group[0].as_object().unwrap();
    let mut out = Map::new();
    for key in first.keys() {
        let value = match key.as_str() {
            "dataset" => Value::from("mean"),
            "algorithm" => first[key].clone(),
            "seed" => Value::Null,
            _ => {
                let nums: Vec<f64> = group.iter().filter_map(|r| r[key].as_f64()).collect();
                if nums.len() == group.len() {
                    Value::from(nums.iter().sum::<f64>() / nums.len() as f64)
                } else {
                    Value::Null
                }
            }
        };
        out.insert(key.clone(), value);
    }
    Value::Object(out)
}

/// Renders the reports; CSV always starts with the header line, JSON is an
/// array of flat objects.
pub fn render_report(reports: &[MetricsReport], opts: &ReportOptions) -> String {
    let rows = records(reports, opts);
    match opts.format {
        ReportFormat::Csv => {
            let mut out = MetricsReport::csv_header(opts.with_timings).join(",");
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.as_object().unwrap().values().map(csv_cell).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(&Value::Array(rows)).unwrap();
            out.push('\n');
            out
        }
    }
}

/// Writes the reports to `path`. With `append`, CSV rows are added below the
/// existing ones (the header is written only for a new or empty file) and a
/// JSON array is extended in place.
pub fn emit_report(reports: &[MetricsReport], opts: &ReportOptions, path: &Path, append: bool) -> Result<()> {
    let existing = if append && path.exists() {
        fs::read_to_string(path).map_err(|e| Error::io(path, e))?
    } else {
        String::new()
    };
    let text = if existing.trim().is_empty() {
        render_report(reports, opts)
    } else {
        match opts.format {
            ReportFormat::Csv => {
                let rendered = render_report(reports, opts);
                let body = rendered.split_once('\n').map_or("", |(_, rest)| rest);
                let mut out = existing;
                if !out.ends_with('\n') {
                    out.push('\n');
                }
                out.push_str(body);
                out
            }
            ReportFormat::Json => {
                let mut rows = match serde_json::from_str::<Value>(&existing) {
                    Ok(Value::Array(rows)) => rows,
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "{} does not hold a JSON array",
                            path.display()
                        )))
                    }
                };
                rows.extend(records(reports, opts));
                let mut out = serde_json::to_string_pretty(&Value::Array(rows)).unwrap();
                out.push('\n');
                out
            }
        }
    };
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
