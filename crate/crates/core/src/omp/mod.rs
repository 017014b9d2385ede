//! Greedy sparse recovery of inclusion certificates.
//!
//! Both solvers pick the column with the largest signed inner product against
//! the residue and accept it only when the least-squares refit stays
//! non-negative. [`run_alg1`] moves on after one failed depth; [`run_alg2`]
//! backtracks. Column indices refer to the stored columns of the
//! [`AtomSystem`]; build it without dedup to work on the raw atom stream.

mod probe;
mod qr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::atoms::{caratheodory_bound, AtomSystem, InclusionCertificate};
use crate::error::{Error, Result};
pub use probe::{projection_cone_probe, positive_ip_necessity_probe, CandidateSign, ProjectionConeProbe, NecessityReport};
use qr::{dot, IncrementalQr};
pub use qr::TAU_RANK;

/// Coefficients down to `−TAU_NN` count as non-negative.
pub const TAU_NN: f64 = 1e-10;
pub const DEFAULT_EPSILON: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct OmpConfig {
    /// Sparsity cap.
    pub s: usize,
    /// Residue tolerance in the `∞`-norm.
    pub epsilon: f64,
    /// Pass limit for the backtracking solver.
    pub max_actual_iters: usize,
    pub record_trace: bool,
}

impl OmpConfig {
    /// `s` from the Carathéodory bound of the target shape, defaults otherwise.
    pub fn for_shape(n2: usize, m2: usize) -> Result<Self> {
        Ok(Self::with_sparsity(caratheodory_bound(n2, m2, false)?))
    }

    pub fn with_sparsity(s: usize) -> Self {
        OmpConfig { s, epsilon: DEFAULT_EPSILON, max_actual_iters: 50 * s, record_trace: false }
    }

    fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::OutOfRange("sparsity cap must be at least 1".into()));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::OutOfRange(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// One least-squares attempt with a candidate column.
#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    pub depth: usize,
    pub column: usize,
    pub inner_product: f64,
    /// Coefficient of the candidate; `None` when it was linearly dependent.
    pub new_coefficient: Option<f64>,
    pub min_coefficient: f64,
}

/// A residue update after a depth finished.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub depth: usize,
    pub nonnegative: bool,
    pub residue_l2_before: f64,
    pub residue_l2_after: f64,
    /// `max_k |r_tᵀ a_k|` over the selected columns.
    pub orthogonality: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    pub attempts: Vec<Attempt>,
    pub steps: Vec<Step>,
    pub backtracks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmpOutcome {
    pub f: bool,
    pub s1: usize,
    /// Selected stored-column indices, in selection order.
    pub lambda: Vec<usize>,
    pub g: Vec<f64>,
    pub t_act: usize,
    pub residue_inf: f64,
    #[serde(skip)]
    pub backtracks: usize,
    #[serde(skip)]
    pub trace: Option<Trace>,
}

impl OmpOutcome {
    pub fn certificate(&self, sys: &AtomSystem) -> InclusionCertificate {
        sys.certificate_from_columns(&self.lambda, &self.g)
    }
}

/// Unconstrained least squares on the columns of `a_sel`, with the
/// non-negativity verdict.
pub fn nnls_gate(a_sel: &DMatrix<f64>, h: &[f64]) -> Result<(Vec<f64>, bool)> {
    if a_sel.nrows() != h.len() {
        return Err(Error::ShapeMismatch(format!("{} rows against {} measurements", a_sel.nrows(), h.len())));
    }
    let cols: Vec<Vec<f64>> = a_sel.column_iter().map(|c| c.iter().copied().collect()).collect();
    let qr = IncrementalQr::from_columns(h.len(), cols.iter().map(Vec::as_slice), h)?;
    let g = qr.solve_with(None);
    let nonneg = g.iter().all(|&v| v >= -TAU_NN);
    Ok((g, nonneg))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &x| a.max(x.abs()))
}

fn residue(sys: &AtomSystem, lambda: &[usize], g: &[f64]) -> Vec<f64> {
    let mut r = sys.h().to_vec();
    for (&c, &w) in lambda.iter().zip(g) {
        r.iter_mut().zip(sys.column(c)).for_each(|(ri, a)| *ri -= w * a);
    }
    r
}

fn inner_products(sys: &AtomSystem, r: &[f64]) -> Vec<f64> {
    let p = sys.p();
    sys.a().chunks_exact(p).map(|col| dot(col, r)).collect()
}

/// Largest strictly positive entry, lowest index on ties.
fn argmax_positive(p: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &v) in p.iter().enumerate() {
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((j, v));
        }
    }
    best.map(|(j, _)| j)
}

struct Accepted {
    column: usize,
    ext: qr::Extension,
    g: Vec<f64>,
}

/// Lines 04–09 of the first solver and 09–14 of the second: attempt the
/// best remaining candidates until the refit is non-negative or none remain.
/// Returns the last successful attempt, if any.
fn attempt_depth(
    sys: &AtomSystem,
    qr: &IncrementalQr,
    row: &mut [f64],
    depth: usize,
    trace: &mut Option<Trace>,
) -> Option<Accepted> {
    let h = sys.h();
    let mut last: Option<Accepted> = None;
    let mut min_g = -1.0;
    while min_g < -TAU_NN {
        let Some(lam) = argmax_positive(row) else { break };
        let ip = row[lam];
        row[lam] = -1.0;
        match qr.extend(sys.column(lam), h) {
            Ok(ext) => {
                let g = qr.solve_with(Some(&ext));
                min_g = g.iter().copied().fold(f64::INFINITY, f64::min);
                if let Some(t) = trace {
                    t.attempts.push(Attempt {
                        depth,
                        column: lam,
                        inner_product: ip,
                        new_coefficient: g.last().copied(),
                        min_coefficient: min_g,
                    });
                }
                last = Some(Accepted { column: lam, ext, g });
            }
            Err(_) => {
                if let Some(t) = trace {
                    t.attempts.push(Attempt {
                        depth,
                        column: lam,
                        inner_product: ip,
                        new_coefficient: None,
                        min_coefficient: f64::NAN,
                    });
                }
            }
        }
    }
    last
}

fn record_step(trace: &mut Option<Trace>, sys: &AtomSystem, depth: usize, lambda: &[usize], g: &[f64], before: &[f64], after: &[f64]) {
    if let Some(t) = trace {
        let orthogonality = lambda.iter().map(|&c| dot(sys.column(c), after).abs()).fold(0.0, f64::max);
        t.steps.push(Step {
            depth,
            nonnegative: g.iter().all(|&v| v >= -TAU_NN),
            residue_l2_before: dot(before, before).sqrt(),
            residue_l2_after: dot(after, after).sqrt(),
            orthogonality,
        });
    }
}

fn clamp_weights(g: &[f64]) -> Vec<f64> {
    g.iter().map(|&v| v.max(0.0)).collect()
}

/// Greedy solver without backtracking. A depth whose candidates all give a
/// negative refit still commits the last attempt, as the pseudo-code does;
/// a depth with no positive inner product at all ends the run with `f = 0`.
pub fn run_alg1(sys: &AtomSystem, cfg: &OmpConfig) -> Result<OmpOutcome> {
    cfg.validate()?;
    let mut trace = cfg.record_trace.then(Trace::default);
    let mut qr = IncrementalQr::new(sys.p());
    let mut r = sys.h().to_vec();
    let mut lambda = Vec::new();
    let mut g: Vec<f64> = Vec::new();
    let mut t = 1;
    while t <= cfg.s && inf_norm(&r) >= cfg.epsilon {
        let mut row = inner_products(sys, &r);
        let Some(acc) = attempt_depth(sys, &qr, &mut row, t, &mut trace) else { break };
        qr.push(acc.ext);
        lambda.push(acc.column);
        g = acc.g;
        let next = residue(sys, &lambda, &g);
        record_step(&mut trace, sys, t, &lambda, &g, &r, &next);
        r = next;
        t += 1;
    }
    let residue_inf = inf_norm(&r);
    let f = !lambda.is_empty() && g.iter().all(|&v| v >= -TAU_NN) && residue_inf < cfg.epsilon;
    Ok(OmpOutcome {
        f,
        s1: lambda.len(),
        g: if f { clamp_weights(&g) } else { g },
        lambda,
        t_act: t - 1,
        residue_inf,
        backtracks: 0,
        trace,
    })
}

/// Greedy solver with backtracking. Inner products are cached per depth and
/// regenerated when a depth is re-entered after being reset.
pub fn run_alg2(sys: &AtomSystem, cfg: &OmpConfig) -> Result<OmpOutcome> {
    cfg.validate()?;
    let h = sys.h();
    let mut trace = cfg.record_trace.then(Trace::default);
    // rows[t] caches depth t; an empty row is the reset (all-zero) state
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); cfg.s + 1];
    let mut residues: Vec<Vec<f64>> = vec![h.to_vec()];
    let mut weights: Vec<Vec<f64>> = vec![Vec::new()];
    let mut lambda: Vec<usize> = Vec::new();
    let mut qr = IncrementalQr::new(sys.p());
    let mut t: usize = 1;
    let mut t_act = 0;
    let mut backtracks = 0;

    while t >= 1 && t <= cfg.s && inf_norm(&residues[t - 1]) >= cfg.epsilon {
        if t_act >= cfg.max_actual_iters {
            return Err(Error::IterationLimit(cfg.max_actual_iters));
        }
        let row = &mut rows[t];
        let exhausted = !row.is_empty()
            && row.iter().all(|&v| v <= 0.0)
            && row.iter().any(|&v| v < 0.0);
        let mut advance = false;
        if !exhausted {
            if row.is_empty() {
                *row = inner_products(sys, &residues[t - 1]);
            }
            if let Some(acc) = attempt_depth(sys, &qr, row, t, &mut trace) {
                if acc.g.iter().all(|&v| v >= -TAU_NN) {
                    qr.push(acc.ext);
                    lambda.push(acc.column);
                    let next = residue(sys, &lambda, &acc.g);
                    record_step(&mut trace, sys, t, &lambda, &acc.g, &residues[t - 1], &next);
                    residues.push(next);
                    weights.push(acc.g);
                    advance = true;
                }
            }
        }
        if advance {
            t += 1;
        } else {
            rows[t].clear();
            t -= 1;
            backtracks += 1;
            if t >= 1 {
                // depth t is re-chosen: drop its selection and refactor
                lambda.truncate(t - 1);
                residues.truncate(t);
                weights.truncate(t);
                qr = IncrementalQr::from_columns(sys.p(), lambda.iter().map(|&c| sys.column(c)), h)?;
            }
        }
        t_act += 1;
    }
    if let Some(tr) = trace.as_mut() {
        tr.backtracks = backtracks;
    }
    if t == 0 {
        return Ok(OmpOutcome {
            f: false,
            s1: 0,
            lambda: Vec::new(),
            g: Vec::new(),
            t_act,
            residue_inf: inf_norm(h),
            backtracks,
            trace,
        });
    }
    let residue_inf = inf_norm(&residues[t - 1]);
    let f = residue_inf < cfg.epsilon;
    let g = weights.pop().unwrap_or_default();
    Ok(OmpOutcome {
        f,
        s1: t - 1,
        g: if f { clamp_weights(&g) } else { g },
        lambda,
        t_act,
        residue_inf,
        backtracks,
        trace,
    })
}
