// SPDX-License-Identifier: Apache-2.0

//! Table, CSV and JSON renderings of a [`RunOutput`].
//!
//! CSV and JSON carry full precision; the table rounds to four significant
//! digits.

use std::fmt::Write as _;

use exitq::QuantileBoundReport;
use serde::Serialize;

use crate::config::{Method, OutputFormat};
use crate::run::{DvSummary, OracleRow, RunBody, RunOutput};

pub fn render(output: &RunOutput, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => table(output),
        OutputFormat::Csv => csv(output),
        OutputFormat::Json => json(output),
    }
}

/// Rounds to `digits` significant digits; scientific notation outside
/// `[1e-4, 1e6)`.
pub fn significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exponent) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn start_label(start: &[f64]) -> String {
    start
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

fn full(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        x.to_string()
    }
}

fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

const QUANTILE_COLUMNS: [&str; 14] = [
    "kind",
    "problem",
    "start",
    "p",
    "n_paths",
    "dt",
    "d_p",
    "d_lo",
    "d_hi",
    "bound",
    "certified_bound",
    "censored_fraction",
    "seed",
    "flag",
];

const DV_COLUMNS: [&str; 6] = ["problem", "solver", "h", "sup_w", "argmax", "dv_bound"];

const ORACLE_COLUMNS: [&str; 6] = ["problem", "start", "p", "d_p", "bound", "lambda_ref"];

fn quantile_cells(kind: &str, r: &QuantileBoundReport, num: fn(f64) -> String) -> Vec<String> {
    vec![
        kind.to_string(),
        r.problem.clone(),
        start_label(&r.start),
        r.p.to_string(),
        r.n_paths.to_string(),
        r.dt.to_string(),
        num(r.d_p),
        num(r.d_lo),
        num(r.d_hi),
        num(r.bound),
        num(r.certified_bound),
        num(r.censored_fraction),
        r.seed.to_string(),
        if r.undersampled {
            "undersampled".into()
        } else {
            String::new()
        },
    ]
}

fn dv_cells(d: &DvSummary, num: fn(f64) -> String) -> Vec<String> {
    vec![
        d.problem.clone(),
        d.solver.clone(),
        d.h.to_string(),
        num(d.sup_w),
        num(d.argmax),
        num(d.dv_bound),
    ]
}

fn oracle_cells(r: &OracleRow, num: fn(f64) -> String) -> Vec<String> {
    vec![
        r.problem.clone(),
        start_label(&r.start),
        r.p.to_string(),
        num(r.d_p),
        num(r.bound),
        num(r.lambda_ref),
    ]
}

fn four(x: f64) -> String {
    significant(x, 4)
}

fn rows(output: &RunOutput, num: fn(f64) -> String) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match &output.body {
        RunBody::Quantile { reports, sup } => (
            QUANTILE_COLUMNS.to_vec(),
            reports
                .iter()
                .map(|r| quantile_cells("start", r, num))
                .chain(sup.iter().map(|r| quantile_cells("sup", r, num)))
                .collect(),
        ),
        RunBody::Dv(d) => (DV_COLUMNS.to_vec(), vec![dv_cells(d, num)]),
        RunBody::Oracle(rows) => (
            ORACLE_COLUMNS.to_vec(),
            rows.iter().map(|r| oracle_cells(r, num)).collect(),
        ),
    }
}

fn table(output: &RunOutput) -> String {
    let (header, rows) = rows(output, four);
    aligned(&header, &rows)
}

fn csv(output: &RunOutput) -> String {
    let (header, rows) = rows(output, full);
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[derive(Serialize)]
#[serde(untagged)]
enum JsonBody<'a> {
    Quantile {
        problem: &'a str,
        method: Method,
        reports: &'a [QuantileBoundReport],
        sup: &'a [QuantileBoundReport],
    },
    Dv {
        problem: &'a str,
        method: Method,
        dv: &'a DvSummary,
    },
    Oracle {
        problem: &'a str,
        method: Method,
        rows: &'a [OracleRow],
    },
}

fn json(output: &RunOutput) -> String {
    let problem = output.problem.as_str();
    let method = output.method;
    let body = match &output.body {
        RunBody::Quantile { reports, sup } => JsonBody::Quantile {
            problem,
            method,
            reports,
            sup,
        },
        RunBody::Dv(dv) => JsonBody::Dv {
            problem,
            method,
            dv,
        },
        RunBody::Oracle(rows) => JsonBody::Oracle {
            problem,
            method,
            rows,
        },
    };
    let mut text = serde_json::to_string_pretty(&body).expect("output serializes");
    text.push('\n');
    text
}
