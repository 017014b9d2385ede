//! Diagnostics for the sign structure the greedy solvers rely on.

use nalgebra::DMatrix;
use serde::Serialize;

use super::qr::{dot, IncrementalQr};
use super::TAU_NN;
use crate::atoms::AtomSystem;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateSign {
    pub column: usize,
    pub inner_product: f64,
    /// Coefficient the candidate receives in the refit.
    pub new_coefficient: f64,
    /// Whether every refit coefficient is non-negative.
    pub refit_nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessityReport {
    /// The selection already reaches the tolerance; nothing to probe.
    pub terminal: bool,
    pub residue_inf: f64,
    pub candidates: Vec<CandidateSign>,
    /// Candidates in the span of the selection.
    pub dependent: usize,
    /// Candidates with `|inner product| > tau` whose new coefficient has the
    /// opposite sign.
    pub sign_violations: usize,
    /// Candidates with inner product below `−tau` whose refit is nonetheless
    /// non-negative.
    pub necessity_violations: usize,
    pub has_positive: bool,
}

/// Refits `selection ∪ {c}` for every other column `c` and compares the
/// sign of the new coefficient with the sign of `⟨r, a_c⟩`, where `r` is the
/// least-squares residue of the selection.
pub fn positive_ip_necessity_probe(
    sys: &AtomSystem,
    selection: &[usize],
    epsilon: f64,
    tau: f64,
) -> Result<NecessityReport> {
    let h = sys.h();
    let qr = IncrementalQr::from_columns(sys.p(), selection.iter().map(|&c| sys.column(c)), h)?;
    let g = qr.solve_with(None);
    let mut r = h.to_vec();
    for (&c, &w) in selection.iter().zip(&g) {
        r.iter_mut().zip(sys.column(c)).for_each(|(ri, a)| *ri -= w * a);
    }
    let residue_inf = r.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let mut report = NecessityReport {
        terminal: residue_inf < epsilon,
        residue_inf,
        candidates: Vec::new(),
        dependent: 0,
        sign_violations: 0,
        necessity_violations: 0,
        has_positive: false,
    };
    if report.terminal {
        return Ok(report);
    }
    for c in 0..sys.num_columns() {
        if selection.contains(&c) {
            continue;
        }
        let ip = dot(sys.column(c), &r);
        let Ok(ext) = qr.extend(sys.column(c), h) else {
            report.dependent += 1;
            continue;
        };
        let refit = qr.solve_with(Some(&ext));
        let coef = *refit.last().expect("refit has the candidate");
        let refit_nonnegative = refit.iter().all(|&v| v >= -TAU_NN);
        if ip.abs() > tau && (ip > 0.0) != (coef > 0.0) {
            report.sign_violations += 1;
        }
        if ip < -tau && refit_nonnegative {
            report.necessity_violations += 1;
        }
        report.has_positive |= ip > tau;
        report.candidates.push(CandidateSign { column: c, inner_product: ip, new_coefficient: coef, refit_nonnegative });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionConeProbe {
    pub found: bool,
    /// First column whose projection onto the others has non-negative
    /// coefficients.
    pub witness_column: Option<usize>,
}

/// Searches for a column of a non-negative, full-column-rank `gm` whose
/// least-squares fit by the remaining columns has non-negative coefficients.
pub fn projection_cone_probe(gm: &DMatrix<f64>) -> Result<ProjectionConeProbe> {
    if gm.iter().any(|&v| v < 0.0) {
        return Err(Error::OutOfRange("matrix must be entrywise non-negative".into()));
    }
    let p = gm.nrows();
    let cols: Vec<Vec<f64>> = gm.column_iter().map(|c| c.iter().copied().collect()).collect();
    // independence of the whole set
    IncrementalQr::from_columns(p, cols.iter().map(Vec::as_slice), &vec![0.0; p])?;
    for (k, target) in cols.iter().enumerate() {
        let others = cols.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, c)| c.as_slice());
        let qr = IncrementalQr::from_columns(p, others, target)?;
        if qr.solve_with(None).iter().all(|&x| x >= -TAU_NN) {
            return Ok(ProjectionConeProbe { found: true, witness_column: Some(k) });
        }
    }
    Ok(ProjectionConeProbe { found: false, witness_column: None })
}
