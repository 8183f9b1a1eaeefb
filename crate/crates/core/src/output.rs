//! Per-iteration trace in CSV form.

use std::io::Write;

use serde::Serialize;

use crate::drivers::IterationRecord;
use crate::error::{Error, Result};

/// One CSV row; optional quantities are left empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub nu: f64,
    pub theta: Option<f64>,
    pub tau: Option<f64>,
    pub centrality: f64,
    pub rp_norm: f64,
    pub rd_norm: f64,
    pub kappa_newton: Option<f64>,
    pub alpha: f64,
    pub solver_residual: f64,
    pub xi_k: f64,
    pub wall_ms: f64,
}

impl TraceRow {
    pub fn from_record(r: &IterationRecord, timing: bool) -> Self {
        Self {
            k: r.k,
            nu: r.nu,
            theta: r.theta,
            tau: r.tau,
            centrality: r.centrality,
            rp_norm: r.rp_norm,
            rd_norm: r.rd_norm,
            kappa_newton: r.kappa_newton,
            alpha: r.alpha,
            solver_residual: r.solver_residual,
            xi_k: r.xi_k,
            wall_ms: if timing { r.wall_ms } else { 0.0 },
        }
    }
}

/// Writes the trace. With `timing == false` the `wall_ms` column is zero,
/// which makes the output a pure function of the instance and config.
pub fn write_trace_csv<W: Write>(out: W, records: &[IterationRecord], timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(TraceRow::from_record(r, timing))
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}
