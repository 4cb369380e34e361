//! Trace rows and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Point;

pub const TRACE_HEADER: [&str; 6] = [
    "k",
    "primal_updates",
    "squared_error",
    "disagreement",
    "algorithm",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub k: u64,
    pub primal_updates: u64,
    pub squared_error: f64,
    pub disagreement: f64,
    pub algorithm: String,
    pub seed: u64,
}

/// `sum_v ||x(v) - x*||^2`.
pub fn squared_error(x: &[Point], xstar: &[f64]) -> f64 {
    x.iter().map(|xv| xv.distance_sq(xstar)).sum()
}

/// 17 significant digits, scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace<W: Write>(records: &[MetricsRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in records {
        w.write_record([
            r.k.to_string(),
            r.primal_updates.to_string(),
            format_real(r.squared_error),
            format_real(r.disagreement),
            r.algorithm.clone(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_to_string(records: &[MetricsRecord]) -> String {
    let mut buf = Vec::new();
    write_trace(records, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<MetricsRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != TRACE_HEADER {
        return Err(Error::Io(format!("unexpected trace header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
