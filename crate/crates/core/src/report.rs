//! Table layouts and output records for the command-line front end.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::oracle::{oracle_energy, OracleError};
use crate::solver::{
    digits_agreed, self_consistent_energy, EnergySolution, SolverConfig, SolverError, Status,
};
use crate::splitparams::{ParamError, SchemeKind, SchemeSpec};

/// Tables that can be regenerated (there is no table 4).
pub const TABLE_IDS: [u8; 8] = [1, 2, 3, 5, 6, 7, 8, 9];

/// Literal used for cells without a converged value.
pub const NC: &str = "NC";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown table id {0}; valid ids are 1, 2, 3, 5, 6, 7, 8, 9")]
    UnknownTable(u8),
    #[error("unknown output format `{0}` (expected table, csv or json)")]
    UnknownFormat(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(ReportError::UnknownFormat(s.to_string())),
        }
    }
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_value(x: f64) -> String {
    format!("{x}")
}

fn fmt_small(x: f64) -> String {
    format!("{x:e}")
}

/// One solved `(scheme, λ, n, K)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub scheme: String,
    pub lambda: f64,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub value: Option<f64>,
    pub status: String,
    pub iterations: usize,
    pub residual: Option<f64>,
    pub parameters: Vec<(String, f64)>,
}

impl EnergyRecord {
    pub fn from_solution(sol: &EnergySolution) -> Self {
        EnergyRecord {
            scheme: sol.scheme.kind.label(),
            lambda: sol.scheme.lambda,
            n: sol.state_n,
            k: sol.order_k,
            value: sol.energy,
            status: sol.status.label().to_string(),
            iterations: sol.iterations,
            residual: sol.final_residual,
            parameters: sol.scheme.parameters(),
        }
    }

    pub fn value_text(&self) -> String {
        self.value.map_or_else(|| NC.to_string(), fmt_value)
    }

    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self
            .parameters
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({
            "scheme": self.scheme,
            "lambda": self.lambda,
            "n": self.n,
            "K": self.k,
            "value": self.value,
            "status": self.status,
            "iterations": self.iterations,
            "residual": self.residual,
            "parameters": params,
        })
    }
}

/// A single energy query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyQuery {
    pub scheme: SchemeKind,
    pub lambda: f64,
    pub state_n: usize,
    pub order_k: usize,
    /// Resolve state-dependent frequencies at `n = 0` instead of at the
    /// target state. Chain schemes are state independent already.
    pub ground_params: bool,
}

impl EnergyQuery {
    pub fn scheme_spec(&self) -> Result<SchemeSpec, ParamError> {
        let param_state = if self.ground_params { 0 } else { self.state_n };
        SchemeSpec::resolve(self.scheme, self.lambda, param_state)
    }

    pub fn solve(&self, config: &SolverConfig) -> Result<EnergySolution, ReportError> {
        let scheme = self.scheme_spec()?;
        Ok(self_consistent_energy(
            &scheme,
            self.state_n,
            self.order_k,
            config,
        )?)
    }
}

pub fn render_energy(record: &EnergyRecord, format: OutputFormat) -> Result<String, ReportError> {
    match format {
        OutputFormat::Table => {
            let mut out = String::new();
            let params = record
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={}", fmt_value(*v)))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "scheme      {}", record.scheme).unwrap();
            writeln!(out, "lambda      {}", fmt_value(record.lambda)).unwrap();
            writeln!(out, "state       {}", record.n).unwrap();
            writeln!(out, "order       {}", record.k).unwrap();
            writeln!(out, "parameters  {params}").unwrap();
            writeln!(out, "energy      {}", record.value_text()).unwrap();
            writeln!(out, "status      {}", record.status).unwrap();
            writeln!(out, "iterations  {}", record.iterations).unwrap();
            writeln!(
                out,
                "residual    {}",
                record.residual.map_or_else(|| "-".to_string(), fmt_small)
            )
            .unwrap();
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec![
                "scheme".to_string(),
                "lambda".into(),
                "n".into(),
                "K".into(),
                "value".into(),
                "status".into(),
                "iterations".into(),
                "residual".into(),
            ];
            header.extend(record.parameters.iter().map(|(k, _)| k.clone()));
            w.write_record(&header)?;
            let mut row = vec![
                record.scheme.clone(),
                fmt_value(record.lambda),
                record.n.to_string(),
                record.k.to_string(),
                record.value_text(),
                record.status.clone(),
                record.iterations.to_string(),
                record.residual.map_or_else(String::new, fmt_small),
            ];
            row.extend(record.parameters.iter().map(|(_, v)| fmt_value(*v)));
            w.write_record(&row)?;
            Ok(csv_string(w))
        }
        OutputFormat::Json => Ok(format!("{}\n", record.to_json())),
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory csv writer");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub key: String,
    pub cells: Vec<EnergyRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableReport {
    pub id: u8,
    pub title: String,
    pub row_label: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

struct Layout {
    title: &'static str,
    row_label: &'static str,
    rows: Vec<(String, Vec<EnergyQuery>)>,
    columns: Vec<String>,
}

fn query(scheme: SchemeKind, lambda: f64, state_n: usize, order_k: usize) -> EnergyQuery {
    EnergyQuery {
        scheme,
        lambda,
        state_n,
        order_k,
        ground_params: false,
    }
}

const EXCITED_LAMBDAS: [f64; 3] = [0.1, 1.0, 100.0];

fn layout(id: u8) -> Result<Layout, ReportError> {
    let chain = |depth| SchemeKind::Chain { depth };
    let lambda_columns = || {
        EXCITED_LAMBDAS
            .iter()
            .map(|l| format!("lambda={l}"))
            .collect()
    };
    let state_rows = |scheme: SchemeKind, k: usize| {
        (1..=10)
            .map(|n| {
                let cells = EXCITED_LAMBDAS
                    .iter()
                    .map(|&l| query(scheme, l, n, k))
                    .collect();
                (n.to_string(), cells)
            })
            .collect()
    };
    Ok(match id {
        1 => Layout {
            title: "ground state, lambda=1, two-step splitting (chain:1)",
            row_label: "K",
            columns: vec!["chain:1".into()],
            rows: (0..=15)
                .map(|k| (k.to_string(), vec![query(chain(1), 1.0, 0, k)]))
                .collect(),
        },
        2 => Layout {
            title: "ground state, lambda=1, multi-step splitting",
            row_label: "K",
            columns: (2..=4).map(|d| format!("chain:{d}")).collect(),
            rows: (0..=15)
                .map(|k| {
                    let cells = (2..=4).map(|d| query(chain(d), 1.0, 0, k)).collect();
                    (k.to_string(), cells)
                })
                .collect(),
        },
        3 => Layout {
            title: "ground state, two-step splitting, late orders",
            row_label: "K",
            columns: [0.01, 10.0, 100.0]
                .iter()
                .map(|l| format!("lambda={l}"))
                .collect(),
            rows: (13..=15)
                .map(|k| {
                    let cells = [0.01, 10.0, 100.0]
                        .iter()
                        .map(|&l| query(chain(1), l, 0, k))
                        .collect();
                    (k.to_string(), cells)
                })
                .collect(),
        },
        5 => Layout {
            title: "excited states, ground-state two-step parameters, K=15",
            row_label: "n",
            columns: lambda_columns(),
            rows: state_rows(chain(1), 15),
        },
        6 => Layout {
            title: "excited states, single-step variational parameters, K=14",
            row_label: "n",
            columns: lambda_columns(),
            rows: state_rows(SchemeKind::VariationalSingleStep, 14),
        },
        7 => Layout {
            title: "excited states, single-step variational parameters, K=15",
            row_label: "n",
            columns: lambda_columns(),
            rows: state_rows(SchemeKind::VariationalSingleStep, 15),
        },
        8 => Layout {
            title: "excited states, two-step variational parameters, K=14",
            row_label: "n",
            columns: lambda_columns(),
            rows: state_rows(SchemeKind::VariationalTwoStep, 14),
        },
        9 => Layout {
            title: "excited states, two-step variational parameters, K=15",
            row_label: "n",
            columns: lambda_columns(),
            rows: state_rows(SchemeKind::VariationalTwoStep, 15),
        },
        other => return Err(ReportError::UnknownTable(other)),
    })
}

/// Solves every cell of a table. Cells run in parallel; the result keeps
/// row and column order.
pub fn build_table(id: u8, config: &SolverConfig) -> Result<TableReport, ReportError> {
    let layout = layout(id)?;
    let rows = layout
        .rows
        .into_par_iter()
        .map(|(key, queries)| {
            let cells = queries
                .into_par_iter()
                .map(|q| q.solve(config).map(|s| EnergyRecord::from_solution(&s)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TableRow { key, cells })
        })
        .collect::<Result<Vec<_>, ReportError>>()?;
    Ok(TableReport {
        id,
        title: layout.title.to_string(),
        row_label: layout.row_label.to_string(),
        columns: layout.columns,
        rows,
    })
}

pub fn render_table(report: &TableReport, format: OutputFormat) -> Result<String, ReportError> {
    match format {
        OutputFormat::Table => {
            let mut out = String::new();
            writeln!(out, "Table {}: {}", report.id, report.title).unwrap();
            let key_w = report
                .rows
                .iter()
                .map(|r| r.key.len())
                .chain([report.row_label.len()])
                .max()
                .unwrap_or(1);
            let col_w = report
                .rows
                .iter()
                .flat_map(|r| r.cells.iter().map(|c| c.value_text().len()))
                .chain(report.columns.iter().map(String::len))
                .max()
                .unwrap_or(2);
            write!(out, "{:>key_w$}", report.row_label).unwrap();
            for c in &report.columns {
                write!(out, "  {c:>col_w$}").unwrap();
            }
            out.push('\n');
            for row in &report.rows {
                write!(out, "{:>key_w$}", row.key).unwrap();
                for cell in &row.cells {
                    write!(out, "  {:>col_w$}", cell.value_text()).unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["row_key".to_string()];
            header.extend(report.columns.iter().cloned());
            w.write_record(&header)?;
            for row in &report.rows {
                let mut rec = vec![row.key.clone()];
                rec.extend(row.cells.iter().map(EnergyRecord::value_text));
                w.write_record(&rec)?;
            }
            Ok(csv_string(w))
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "row_key": r.key,
                        "cells": r.cells.iter().map(EnergyRecord::to_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = json!({
                "id": report.id,
                "title": report.title,
                "row_label": report.row_label,
                "columns": report.columns,
                "rows": rows,
            });
            Ok(format!("{doc}\n"))
        }
    }
}

/// Series energy next to the diagonalization reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub mfnps: EnergyRecord,
    pub oracle: f64,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    pub digits_agreed: Option<u32>,
}

/// Basis-convergence target for reference values.
pub const ORACLE_TOLERANCE: f64 = 1e-11;

pub fn compare(
    query: &EnergyQuery,
    config: &SolverConfig,
) -> Result<(Comparison, Status), ReportError> {
    let sol = query.solve(config)?;
    let oracle = oracle_energy(query.lambda, query.state_n, ORACLE_TOLERANCE)?;
    let mfnps = EnergyRecord::from_solution(&sol);
    let abs_diff = sol.energy.map(|e| (e - oracle).abs());
    Ok((
        Comparison {
            abs_diff,
            rel_diff: abs_diff.map(|d| d / oracle.abs()),
            digits_agreed: sol.energy.map(|e| digits_agreed(e, oracle)),
            mfnps,
            oracle,
        },
        sol.status,
    ))
}

pub fn render_comparison(cmp: &Comparison, format: OutputFormat) -> Result<String, ReportError> {
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), fmt_small);
    let digits = cmp
        .digits_agreed
        .map_or_else(|| "-".to_string(), |d| d.to_string());
    match format {
        OutputFormat::Table => {
            let mut out = String::new();
            writeln!(
                out,
                "scheme      {}  lambda {}  state {}  order {}",
                cmp.mfnps.scheme,
                fmt_value(cmp.mfnps.lambda),
                cmp.mfnps.n,
                cmp.mfnps.k
            )
            .unwrap();
            writeln!(out, "mfnps       {}", cmp.mfnps.value_text()).unwrap();
            writeln!(out, "oracle      {}", fmt_value(cmp.oracle)).unwrap();
            writeln!(out, "abs diff    {}", opt(cmp.abs_diff)).unwrap();
            writeln!(out, "rel diff    {}", opt(cmp.rel_diff)).unwrap();
            writeln!(out, "digits      {digits}").unwrap();
            writeln!(out, "status      {}", cmp.mfnps.status).unwrap();
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "scheme", "lambda", "n", "K", "mfnps", "oracle", "abs_diff", "rel_diff", "digits",
                "status",
            ])?;
            w.write_record([
                cmp.mfnps.scheme.clone(),
                fmt_value(cmp.mfnps.lambda),
                cmp.mfnps.n.to_string(),
                cmp.mfnps.k.to_string(),
                cmp.mfnps.value_text(),
                fmt_value(cmp.oracle),
                cmp.abs_diff.map_or_else(String::new, fmt_small),
                cmp.rel_diff.map_or_else(String::new, fmt_small),
                cmp.digits_agreed
                    .map_or_else(String::new, |d| d.to_string()),
                cmp.mfnps.status.clone(),
            ])?;
            Ok(csv_string(w))
        }
        OutputFormat::Json => {
            let doc = json!({
                "mfnps": cmp.mfnps.to_json(),
                "oracle": cmp.oracle,
                "abs_diff": cmp.abs_diff,
                "rel_diff": cmp.rel_diff,
                "digits_agreed": cmp.digits_agreed,
            });
            Ok(format!("{doc}\n"))
        }
    }
}

/// Output of the `oracle` command.
pub fn render_oracle(
    lambda: f64,
    state_n: usize,
    energy: f64,
    format: OutputFormat,
) -> Result<String, ReportError> {
    match format {
        OutputFormat::Table => Ok(format!(
            "lambda      {}\nstate       {state_n}\noracle      {}\n",
            fmt_value(lambda),
            fmt_value(energy)
        )),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["lambda", "n", "oracle"])?;
            w.write_record([fmt_value(lambda), state_n.to_string(), fmt_value(energy)])?;
            Ok(csv_string(w))
        }
        OutputFormat::Json => Ok(format!(
            "{}\n",
            json!({"lambda": lambda, "n": state_n, "oracle": energy})
        )),
    }
}
