//! CSV and JSON emission.
//!
//! CSV output starts with `# key=value` lines echoing the resolved
//! configuration, followed by a header and the rows. Every real number is
//! written with six decimals and a '.' separator.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::estimate::Estimate;
use crate::estimators::GammaCurve;
use crate::experiments::{TableRow, TrialRecord};

/// Fixed six-decimal formatting.
pub fn fmt6(v: f64) -> String {
    // Avoid printing "-0.000000".
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_owned()
    } else {
        s
    }
}

/// Ordered `key=value` pairs describing a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConfigEcho(pub Vec<(String, String)>);

impl ConfigEcho {
    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn write_comments(&self, out: &mut impl Write) -> Result<()> {
        for (k, v) in &self.0 {
            writeln!(out, "# {k}={v}")?;
        }
        Ok(())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.0
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect(),
        )
    }
}

fn write_table(out: &mut impl Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const CURVE_HEADER: [&str; 7] = [
    "p", "value", "trials", "hoeff_lo", "hoeff_hi", "norm_lo", "norm_hi",
];

pub fn write_curve_csv(out: &mut impl Write, curve: &GammaCurve) -> Result<()> {
    let rows: Vec<Vec<String>> = curve
        .grid
        .iter()
        .map(|(p, e)| {
            vec![
                fmt6(*p),
                fmt6(e.value),
                e.trials.to_string(),
                fmt6(e.hoeffding_ci.0),
                fmt6(e.hoeffding_ci.1),
                fmt6(e.normal_ci.0),
                fmt6(e.normal_ci.1),
            ]
        })
        .collect();
    write_table(out, &CURVE_HEADER, &rows)
}

pub const ESTIMATE_HEADER: [&str; 7] = [
    "value", "trials", "std_err", "hoeff_lo", "hoeff_hi", "norm_lo", "norm_hi",
];

fn estimate_fields(e: &Estimate) -> Vec<String> {
    vec![
        fmt6(e.value),
        e.trials.to_string(),
        fmt6(e.std_err),
        fmt6(e.hoeffding_ci.0),
        fmt6(e.hoeffding_ci.1),
        fmt6(e.normal_ci.0),
        fmt6(e.normal_ci.1),
    ]
}

/// Named estimates, one per row, with a leading `quantity` column.
pub fn write_estimates_csv(out: &mut impl Write, rows: &[(&str, Estimate)]) -> Result<()> {
    let mut header = vec!["quantity"];
    header.extend(ESTIMATE_HEADER);
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(name, e)| {
            let mut r = vec![name.to_string()];
            r.extend(estimate_fields(e));
            r
        })
        .collect();
    write_table(out, &header, &rows)
}

pub const TRIAL_HEADER: [&str; 9] = [
    "trial_index",
    "lcs_xy",
    "lcs_xstar_y",
    "gaps_max",
    "gaps_min",
    "e_flag",
    "k_flag",
    "g_flag",
    "h_flag",
];

pub fn write_trials_csv(out: &mut impl Write, records: &[TrialRecord]) -> Result<()> {
    let b = |f: bool| (f as u8).to_string();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.trial_index.to_string(),
                r.lcs_xy.to_string(),
                r.lcs_xstar_y.to_string(),
                r.gaps_max.to_string(),
                r.gaps_min.to_string(),
                b(r.e_flag),
                b(r.k_flag),
                b(r.g_flag),
                b(r.h_flag),
            ]
        })
        .collect();
    write_table(out, &TRIAL_HEADER, &rows)
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "k",
    "ell",
    "n",
    "trials",
    "mean_gaps",
    "median_gaps",
    "gap_proportion",
    "mean_delta",
    "heuristic_delta",
];

pub fn write_summary_csv(out: &mut impl Write, rows: &[TableRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.ell.to_string(),
                r.n.to_string(),
                r.trials.to_string(),
                fmt6(r.mean_gaps),
                fmt6(r.median_gaps),
                fmt6(r.gap_proportion),
                fmt6(r.mean_delta),
                fmt6(r.heuristic_delta),
            ]
        })
        .collect();
    write_table(out, &SUMMARY_HEADER, &rows)
}

/// `{"config": {...}, <key>: <payload>}` followed by a newline.
pub fn write_json(
    out: &mut impl Write,
    echo: &ConfigEcho,
    key: &str,
    payload: &impl Serialize,
) -> Result<()> {
    let mut obj = serde_json::Map::new();
    obj.insert("config".to_owned(), echo.to_json());
    obj.insert(key.to_owned(), serde_json::to_value(payload)?);
    serde_json::to_writer_pretty(&mut *out, &serde_json::Value::Object(obj))?;
    writeln!(out)?;
    Ok(())
}
