//! Diagnostic time series as CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagnostics::EntropyReport;
use crate::solver::EnergyEntry;

pub const HEADER: &str = "t,rel_entropy,kinetic,quantum,internal,thm_vel,thm_dens,thm_grad,E_total,E_diss_cum";
pub const ABORTED: &str = "ABORTED";

/// One recorded time: entropy diagnostics plus the energy ledger entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub report: EntropyReport,
    pub energy: EnergyEntry,
}

impl Record {
    pub fn values(&self) -> [f64; 10] {
        let r = &self.report;
        [
            r.t,
            r.rel_entropy,
            r.kinetic_part,
            r.quantum_part,
            r.internal_part,
            r.theorem_lhs[0],
            r.theorem_lhs[1],
            r.theorem_lhs[2],
            self.energy.total,
            self.energy.dissipation_cumulative,
        ]
    }
}

/// `{:.16e}` keeps 17 significant digits, enough to round-trip any f64.
pub fn format_row(values: &[f64]) -> String {
    let mut s = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        write!(s, "{v:.16e}").unwrap();
    }
    s
}

pub fn render_csv(records: &[Record], aborted: bool) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    let mut sorted: Vec<&Record> = records.iter().collect();
    sorted.sort_by(|a, b| a.report.t.total_cmp(&b.report.t));
    for r in sorted {
        out.push_str(&format_row(&r.values()));
        out.push('\n');
    }
    if aborted {
        out.push_str(ABORTED);
        out.push_str(&",".repeat(HEADER.split(',').count() - 1));
        out.push('\n');
    }
    out
}

pub fn write_csv(records: &[Record], path: &Path) -> std::io::Result<()> {
    fs::write(path, render_csv(records, false))
}

/// Partial series of an aborted run, terminated by the sentinel row.
pub fn write_aborted_csv(records: &[Record], path: &Path) -> std::io::Result<()> {
    fs::write(path, render_csv(records, true))
}
