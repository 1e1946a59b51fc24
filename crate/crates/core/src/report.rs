//! Grid analysis and its CSV / JSON serialisations.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classifier::{classify_meridian, ClassificationResult};
use crate::config::{Analysis, COLUMNS};
use crate::error::GeomError;
use crate::invariants::{
    curvature_report, first_form, second_form, structural_residuals_with_retry,
};
use crate::semiparallel::{checked_tensor, residual_tol};

/// Failure at a specific grid point that is not a domain problem.
#[derive(Debug, Error)]
#[error("evaluation failed at (u={u}, v={v}): {source}")]
pub struct EvalError {
    pub u: f64,
    pub v: f64,
    pub source: GeomError,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedRow {
    pub u: f64,
    pub v: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub rows_emitted: usize,
    pub rows_skipped: usize,
    pub max_sp_residual: f64,
    pub max_gauss_res: f64,
    pub max_ricci_res: f64,
    pub max_codazzi_res: f64,
    pub semi_parallel: bool,
    pub tol_used: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub skipped: Vec<SkippedRow>,
    pub summary: Summary,
}

/// One value per entry of [`COLUMNS`], in that order.
pub type Row = [f64; COLUMNS.len()];

/// Errors that only say the point sits outside where the surface is usable.
fn skippable(e: &GeomError) -> bool {
    e.is_domain_error() || matches!(e, GeomError::StencilOutOfDomain { .. })
}

/// Every column at one parameter point.
pub fn evaluate_point(analysis: &Analysis, u: f64, v: f64) -> Result<Row, GeomError> {
    let (handle, policy) = (&analysis.handle, &analysis.policy);
    let (jet, frame) = handle.point(u, v, policy)?;
    let first = first_form(&jet, policy)?;
    let sff = second_form(&jet, &frame);
    let c = curvature_report(&sff);
    let sp = checked_tensor(&sff)?;
    let s = structural_residuals_with_retry(handle, u, v, policy)?;
    Ok([
        u,
        v,
        first.e,
        first.f,
        first.g,
        c.k,
        c.k_n,
        c.h_norm,
        c.umbilicity_deviation,
        c.isotropy_deviation,
        c.h_h2_minus_3k,
        sp.residual_norm,
        s.gauss,
        s.ricci,
        s.codazzi,
    ])
}

pub fn run_analysis(analysis: &Analysis) -> Result<AnalysisReport, EvalError> {
    let points = analysis.grid.points();
    // rows are computed in parallel; collect keeps grid order
    let results: Vec<_> = points
        .par_iter()
        .map(|&(u, v)| evaluate_point(analysis, u, v))
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (&(u, v), r) in points.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) if skippable(&e) => skipped.push(SkippedRow {
                u,
                v,
                reason: e.to_string(),
            }),
            Err(source) => return Err(EvalError { u, v, source }),
        }
    }

    let col_max = |i: usize| rows.iter().map(|r| r[i]).fold(0.0, f64::max);
    let tol = residual_tol(analysis.handle.jet_kind(), &analysis.policy);
    let max_sp_residual = col_max(11);
    let classification = match analysis.handle.meridian() {
        Some(_) => match classify_meridian(&analysis.handle, &analysis.grid, &analysis.policy) {
            Ok(c) => Some(c),
            Err(e) if skippable(&e) => None,
            Err(source) => {
                return Err(EvalError {
                    u: analysis.grid.u.0,
                    v: analysis.grid.v.0,
                    source,
                })
            }
        },
        None => None,
    };
    let summary = Summary {
        rows_emitted: rows.len(),
        rows_skipped: skipped.len(),
        max_sp_residual,
        max_gauss_res: col_max(12),
        max_ricci_res: col_max(13),
        max_codazzi_res: col_max(14),
        semi_parallel: !rows.is_empty() && max_sp_residual < tol,
        tol_used: tol,
        classification,
    };
    let columns = analysis.columns.iter().map(|&i| COLUMNS[i]).collect();
    let rows = rows
        .iter()
        .map(|r| analysis.columns.iter().map(|&i| r[i]).collect())
        .collect();
    Ok(AnalysisReport {
        columns,
        rows,
        skipped,
        summary,
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows with 17 significant digits, then `#`-prefixed summary lines.
pub fn write_csv(report: &AnalysisReport, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{}", report.columns.join(","))?;
    for row in &report.rows {
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    let s = &report.summary;
    writeln!(out, "# summary")?;
    writeln!(out, "# rows_emitted={}", s.rows_emitted)?;
    writeln!(out, "# rows_skipped={}", s.rows_skipped)?;
    for skip in &report.skipped {
        writeln!(
            out,
            "# skipped u={} v={}: {}",
            num(skip.u),
            num(skip.v),
            skip.reason
        )?;
    }
    writeln!(out, "# max_sp_residual={}", num(s.max_sp_residual))?;
    writeln!(out, "# max_gauss_res={}", num(s.max_gauss_res))?;
    writeln!(out, "# max_ricci_res={}", num(s.max_ricci_res))?;
    writeln!(out, "# max_codazzi_res={}", num(s.max_codazzi_res))?;
    writeln!(out, "# semi_parallel={}", s.semi_parallel)?;
    writeln!(out, "# tol_used={}", num(s.tol_used))?;
    if let Some(c) = &s.classification {
        let case = serde_json::to_value(c.case).map_err(io::Error::other)?;
        let branch = serde_json::to_value(c.theorem2_branch).map_err(io::Error::other)?;
        writeln!(out, "# case={}", case.as_str().unwrap_or_default())?;
        writeln!(
            out,
            "# theorem2_branch={}",
            branch.as_str().unwrap_or_default()
        )?;
        writeln!(out, "# ode_residual_max={}", num(c.ode_residual_max))?;
        writeln!(out, "# hyperplanar={}", c.hyperplanar)?;
    }
    Ok(())
}

pub fn write_json(report: &AnalysisReport, out: &mut impl Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report).map_err(io::Error::other)?;
    writeln!(out)
}
