//! Growth of the Newton-matrix condition number along the central path.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::drivers::{run_if_with, IfConfig, Termination};
use crate::error::{Error, Result};
use crate::model::{Iterate, SdoProblem};
use crate::tensor::cond_2;

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoglogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LoglogFit> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Config("need at least two positive points to fit".into()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LoglogFit {
        slope,
        intercept: my - slope * mx,
        r2,
        points: pts.len(),
    })
}

/// Number of strict decreases in consecutive values.
pub fn count_inversions(vals: &[f64]) -> usize {
    vals.windows(2).filter(|w| w[1] < w[0]).count()
}

#[derive(Debug, Clone, Serialize)]
pub struct KappaStudy {
    pub nu: Vec<f64>,
    /// `κ₂` of the nullspace Newton matrix solved at each iterate.
    pub kappa: Vec<f64>,
    /// `κ₂(A diag(x/s) Aᵀ)` for linear programs.
    pub kappa_compact: Option<Vec<f64>>,
    /// `max(x/s) / min(x/s)` for linear programs.
    pub spread: Option<Vec<f64>>,
    /// Fits over the tail half.
    pub fit: LoglogFit,
    pub compact_fit: Option<LoglogFit>,
    pub spread_fit: Option<LoglogFit>,
    /// Decreases of `κ` over the last ten iterations.
    pub tail_inversions: usize,
    pub iterations: usize,
}

/// Runs the feasible method with condition tracking and fits `ln κ`
/// against `ln ν` over the second half of the iterations. With `lo_a`
/// (the LP constraint matrix of a diagonal embedding) the compact
/// normal-equations matrix and the spread of `x/s` are measured too.
pub fn kappa_study(p: &SdoProblem, start: &Iterate, cfg: &IfConfig, lo_a: Option<&DMatrix<f64>>) -> Result<KappaStudy> {
    let cfg = IfConfig {
        track_condition: true,
        ..cfg.clone()
    };
    let mut compact = Vec::new();
    let mut spread = Vec::new();
    let run = run_if_with(p, start, &cfg, |pt, _| {
        if let Some(a) = lo_a {
            let d = DVector::from_fn(p.n, |i, _| pt.it.x[(i, i)] / pt.it.s[(i, i)]);
            let m = a * DMatrix::from_diagonal(&d) * a.transpose();
            compact.push(cond_2(&m).value);
            spread.push(d.max() / d.min());
        }
    })?;
    if let Termination::Failed { reason } = &run.termination {
        return Err(Error::NonConvergence(format!("study run: {reason}")));
    }
    // Row 0 is the start, which has no Newton matrix.
    let rows = &run.records[1..];
    let nu: Vec<f64> = rows.iter().map(|r| r.nu).collect();
    let kappa: Vec<f64> = rows.iter().map(|r| r.kappa_newton.unwrap_or(f64::NAN)).collect();
    let tail = rows.len() / 2;
    if rows.len() - tail < 6 {
        return Err(Error::Config(format!(
            "insufficient data: {} tail points, need 6",
            rows.len() - tail
        )));
    }
    let pairs: Vec<(f64, f64)> = nu.iter().copied().zip(kappa.iter().copied()).collect();
    let fit = fit_loglog(&pairs[tail..])?;
    let tail_fit = |series: &[f64]| -> Result<Option<LoglogFit>> {
        if lo_a.is_none() {
            return Ok(None);
        }
        let cp: Vec<(f64, f64)> = nu.iter().copied().zip(series.iter().copied()).collect();
        Ok(Some(fit_loglog(&cp[tail..])?))
    };
    let compact_fit = tail_fit(&compact)?;
    let spread_fit = tail_fit(&spread)?;
    let last = kappa.len().saturating_sub(10);
    Ok(KappaStudy {
        tail_inversions: count_inversions(&kappa[last..]),
        iterations: rows.len(),
        nu,
        kappa,
        kappa_compact: lo_a.map(|_| compact),
        spread: lo_a.map(|_| spread),
        fit,
        compact_fit,
        spread_fit,
    })
}
