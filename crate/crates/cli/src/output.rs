//! CSV rows and plain-text report formatting.

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use fracab_core::stability::{MarginKind, StabilityMargin};

use crate::driver::{CheckReport, ConvergenceRow, RunReport, SweepRow};
use crate::error::CliError;

pub const CSV_HEADER: [&str; 5] = ["x", "t", "u_numeric", "u_exact", "abs_err"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    pub t: f64,
    pub u_numeric: f64,
    pub u_exact: Option<f64>,
    pub abs_err: Option<f64>,
}

fn field(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the header and rows. Floats use the shortest representation that
/// parses back to the same value.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.x.to_string(),
            r.t.to_string(),
            r.u_numeric.to_string(),
            field(r.u_exact),
            field(r.abs_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, rows: &[CsvRow]) -> Result<(), CliError> {
    write_csv(BufWriter::new(File::create(path)?), rows)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::Argument(format!("unexpected CSV header {header:?}")));
    }
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse().map_err(|_| CliError::Argument(format!("bad number '{s}' in CSV")))
    };
    let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(CsvRow {
                x: num(&rec[0])?,
                t: num(&rec[1])?,
                u_numeric: num(&rec[2])?,
                u_exact: opt(&rec[3])?,
                abs_err: opt(&rec[4])?,
            })
        })
        .collect()
}

fn margin_line(m: &Option<StabilityMargin>) -> String {
    match m {
        None => "n/a".into(),
        Some(m) => {
            let kind = match m.kind {
                MarginKind::Classical => "3hc/(4l)",
                MarginKind::Fractional => "2h^a d max(delta)/(l^2 Gamma(a))",
            };
            let verdict = if m.within_criterion() { "below 1" } else { "NOT below 1" };
            format!("{:.6} [{kind}, {verdict}]", m.value)
        }
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "n/a".into())
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "problem            {} (alpha = {})", self.problem, self.alpha)?;
        writeln!(f, "grid               nx = {}, nt = {}, h = {:.6e}, l = {}", self.nx, self.nt, self.h, opt_num(self.l))?;
        writeln!(f, "oracle             {}", self.oracle)?;
        writeln!(f, "stability margin   {}", margin_line(&self.stability_margin))?;
        writeln!(f, "m2 (max |F''|)     {:.6e}", self.m2)?;
        writeln!(f, "residual bound     {:.6e}", self.residual_bound_final)?;
        writeln!(f, "final level        {} (t = {})", self.final_level, self.final_time)?;
        writeln!(f, "max abs error      {}", opt_num(self.max_abs_error_final))?;
        match self.halted_unstable_at {
            Some(level) => writeln!(f, "status             HALTED: non-finite values at level {level}")?,
            None => writeln!(f, "status             completed")?,
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stability margin   {}", margin_line(&self.stability_margin))?;
        writeln!(f, "m2 (exact data)    {:.6e}", self.m2)?;
        writeln!(f, "residual bound     {:.6e}", self.residual_bound_final)?;
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

pub fn format_convergence(rows: &[ConvergenceRow]) -> String {
    let mut s = format!("{:>14} {:>14} {:>14} {:>8} {:>8}\n", "h", "l", "max_abs_err", "ratio", "halted");
    for r in rows {
        let _ = writeln!(
            s,
            "{:>14.6e} {:>14} {:>14} {:>8} {:>8}",
            r.h,
            opt_num(r.l),
            opt_num(r.max_abs_error),
            r.ratio.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into()),
            r.halted_unstable_at.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
        );
    }
    s
}

pub fn format_sweep(rows: &[SweepRow]) -> String {
    let mut s = format!(
        "{:>8} {:>14} {:>14} {:>8} {:>14} {:>14}\n",
        "margin", "h", "max_amp", "halted", "final_max|u|", "max_abs_err"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>8} {:>14.6e} {:>14.6e} {:>8} {:>14.6e} {:>14}",
            r.margin,
            r.h,
            r.max_amplification,
            r.halted_level.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
            r.final_max_abs,
            opt_num(r.max_abs_error_final),
        );
    }
    s
}
