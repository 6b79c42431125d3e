use std::fmt::Write;
use std::str::FromStr;

use super::{ConvergenceReport, Refinement, StudyPlan, TableId};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "alpha,level,h,tau,err_l2max,co_l2max,err_sup,co_sup,seconds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::InvalidPlan(format!("unknown output format `{other}`"))),
        }
    }
}

/// Six significant digits in scientific notation; empty for missing cells.
fn sci(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.5e}")).unwrap_or_default()
}

pub fn emit(report: &ConvergenceReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => csv(report),
        OutputFormat::Markdown => markdown(report),
    }
}

fn csv(report: &ConvergenceReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.alpha,
            r.level,
            sci(r.h),
            sci(Some(r.tau)),
            sci(r.err_l2max),
            sci(r.co_l2max),
            sci(r.err_sup),
            sci(r.co_sup),
            r.seconds
        );
    }
    out
}

fn reciprocal(step: f64) -> String {
    format!("1/{}", (1.0 / step).round())
}

fn markdown(report: &ConvergenceReport) -> String {
    let plan = StudyPlan::for_table(report.table, false);
    let mut out = String::new();
    let opt = |v: Option<f64>, f: &dyn Fn(f64) -> String| v.map(f).unwrap_or_default();
    match report.table {
        TableId::T1 => {
            out.push_str("| α | M | E(τ) | CO |\n|---|---|---|---|\n");
            for (i, r) in report.rows.iter().enumerate() {
                let alpha = first_in_block(report, i).then(|| r.alpha.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "| {alpha} | {} | {} | {} |",
                    r.nt,
                    opt(r.err_sup, &|v| format!("{v:.6e}")),
                    opt(r.co_sup, &|v| format!("{v:.2}"))
                );
            }
        }
        TableId::T7 => {
            out.push_str("| α | M | ‖z‖_C | CO | CPU (s) |\n|---|---|---|---|---|\n");
            for (i, r) in report.rows.iter().enumerate() {
                let alpha = first_in_block(report, i).then(|| format!("{:.2}", r.alpha)).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "| {alpha} | {} | {} | {} | {:.4} |",
                    r.nt,
                    opt(r.err_sup, &|v| format!("{v:.4e}")),
                    opt(r.co_sup, &|v| format!("{v:.4}")),
                    r.seconds
                );
            }
        }
        _ => {
            let step = match plan.refinement {
                Refinement::Space => "h",
                Refinement::Time => "τ",
            };
            let _ = writeln!(
                out,
                "| α | {step} | max‖zⁿ‖₀ | CO in ‖·‖₀ | ‖z‖_C | CO in ‖·‖_C |\n|---|---|---|---|---|---|"
            );
            for (i, r) in report.rows.iter().enumerate() {
                let alpha = first_in_block(report, i).then(|| format!("{:.2}", r.alpha)).unwrap_or_default();
                let size = match plan.refinement {
                    Refinement::Space => reciprocal(r.h.unwrap_or(r.tau)),
                    Refinement::Time => reciprocal(r.tau),
                };
                let _ = writeln!(
                    out,
                    "| {alpha} | {size} | {} | {} | {} | {} |",
                    opt(r.err_l2max, &|v| format!("{v:.4e}")),
                    opt(r.co_l2max, &|v| format!("{v:.4}")),
                    opt(r.err_sup, &|v| format!("{v:.4e}")),
                    opt(r.co_sup, &|v| format!("{v:.4}"))
                );
            }
        }
    }
    out
}

fn first_in_block(report: &ConvergenceReport, i: usize) -> bool {
    i == 0 || report.rows[i - 1].alpha != report.rows[i].alpha
}
