//! CSV rows for reports. Numbers use 17 significant digits so rows re-parse bit-exactly.

use std::io::Write;

use crate::embeddings::{fmt_f64, ProductMap};
use crate::error::{Error, Result};
use crate::search::SearchResult;
use crate::squeezing::{BoundReport, LimitProfile, MethodTag};

pub const BOUND_HEADER: [&str; 5] = ["lower", "upper", "exact", "methods", "witness"];
pub const PROFILE_HEADER: [&str; 5] = ["param", "lower", "upper", "exact", "clearance_lower"];
pub const LIMIT_HEADER: [&str; 4] = ["param", "clearance_lower", "exact", "bound"];
pub const SEARCH_HEADER: [&str; 7] = ["value", "sampled_value", "exact", "gap", "evaluations", "converged", "witness"];

pub fn fmt_num(x: f64) -> String {
    fmt_f64(x)
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn parse_num(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
}

pub fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() { Ok(None) } else { parse_num(s).map(Some) }
}

pub fn bound_row(rep: &BoundReport) -> Vec<String> {
    let methods: Vec<&str> = rep.methods.iter().map(|m| m.as_str()).collect();
    let witnesses: Vec<String> = rep.witnesses.iter().map(ToString::to_string).collect();
    vec![fmt_num(rep.lower), fmt_num(rep.upper), fmt_opt(rep.exact), methods.join("|"), witnesses.join(" ")]
}

/// Inverse of [`bound_row`]. The family gap is not part of the row and comes back as `None`.
pub fn parse_bound_row(fields: &[&str]) -> Result<BoundReport> {
    let [lower, upper, exact, methods, witness] = fields else {
        return Err(Error::Parse(format!("expected 5 fields, got {}", fields.len())));
    };
    let methods = if methods.is_empty() {
        vec![]
    } else {
        methods.split('|').map(str::parse::<MethodTag>).collect::<Result<_>>()?
    };
    let witnesses = witness.split_whitespace().map(str::parse::<ProductMap>).collect::<Result<_>>()?;
    Ok(BoundReport {
        lower: parse_num(lower)?,
        upper: parse_num(upper)?,
        exact: parse_opt(exact)?,
        witnesses,
        methods,
        family_gap: None,
    })
}

pub fn search_row(res: &SearchResult, exact: Option<f64>) -> Vec<String> {
    vec![
        fmt_num(res.value),
        fmt_opt(res.sampled_value),
        fmt_opt(exact),
        fmt_opt(res.gap),
        res.evaluations.to_string(),
        res.converged.to_string(),
        res.witness.to_string(),
    ]
}

pub fn limit_rows(p: &LimitProfile) -> Vec<Vec<String>> {
    p.entries
        .iter()
        .map(|e| vec![fmt_num(e.param), fmt_num(e.clearance), fmt_num(e.exact), fmt_num(e.bound)])
        .collect()
}

pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(format!("writing CSV: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("writing CSV: {e}")))?;
    Ok(())
}
