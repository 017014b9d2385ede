//! Dense two-phase revised simplex with Bland's rule.
//!
//! Solves `min cᵀx` subject to rows `aᵢᵀx {≤,≥,=} bᵢ` and `x ≥ 0`. The basis
//! inverse is kept explicitly and refreshed from scratch periodically.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Pivot and optimality tolerance.
pub const TAU_LP: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    relations: Vec<Relation>,
    rhs: Vec<f64>,
    objective: Vec<f64>,
    /// Column-major, `rows × vars`.
    a: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// One multiplier per constraint row, in the caller's row orientation.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LinearProgram {
    pub fn new(relations: Vec<Relation>, rhs: Vec<f64>) -> Result<Self> {
        if relations.len() != rhs.len() {
            return Err(Error::ShapeMismatch(format!("{} relations, {} right-hand sides", relations.len(), rhs.len())));
        }
        Ok(LinearProgram { relations, rhs, objective: Vec::new(), a: Vec::new() })
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    /// Appends a variable with objective coefficient `cost`; returns its index.
    pub fn push_column(&mut self, cost: f64, column: &[f64]) -> Result<usize> {
        if column.len() != self.rows() {
            return Err(Error::ShapeMismatch(format!("column of {} for {} rows", column.len(), self.rows())));
        }
        self.objective.push(cost);
        self.a.extend_from_slice(column);
        Ok(self.objective.len() - 1)
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let m = self.rows();
        &self.a[j * m..(j + 1) * m]
    }

    pub fn solve(&self, max_iters: usize) -> Result<LpSolution> {
        Solver::new(self).run(max_iters)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

struct Solver<'a> {
    lp: &'a LinearProgram,
    m: usize,
    n: usize,
    /// Row sign making every right-hand side non-negative.
    sign: Vec<f64>,
    b: Vec<f64>,
    /// Effective relation after the sign flip.
    rel: Vec<Relation>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Row-major `m × m`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    iterations: usize,
}

// Variable layout: 0..n original, n..n+m row logicals (slack for ≤, surplus
// for ≥, unused for =), n+m..n+2m artificials (unused for ≤ rows).
impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let m = lp.rows();
        let n = lp.vars();
        let mut sign = vec![1.0; m];
        let mut b = lp.rhs.clone();
        let mut rel = lp.relations.clone();
        for i in 0..m {
            if b[i] < 0.0 {
                sign[i] = -1.0;
                b[i] = -b[i];
                rel[i] = match rel[i] {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        let basis: Vec<usize> =
            (0..m).map(|i| if rel[i] == Relation::Le { n + i } else { n + m + i }).collect();
        let mut in_basis = vec![false; n + 2 * m];
        basis.iter().for_each(|&j| in_basis[j] = true);
        let mut binv = vec![0.0; m * m];
        (0..m).for_each(|i| binv[i * m + i] = 1.0);
        let xb = b.clone();
        Solver { lp, m, n, sign, b, rel, basis, in_basis, binv, xb, iterations: 0 }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    fn usable(&self, j: usize, phase: Phase) -> bool {
        if j < self.n {
            return true;
        }
        if j < self.n + self.m {
            return self.rel[j - self.n] != Relation::Eq;
        }
        phase == Phase::One && self.rel[j - self.n - self.m] != Relation::Le
    }

    fn cost(&self, j: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if self.is_artificial(j) {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => {
                if j < self.n {
                    self.lp.objective[j]
                } else {
                    0.0
                }
            }
        }
    }

    /// `yᵀ a_j` for the sign-flipped column `j`.
    fn dot_column(&self, y: &[f64], j: usize) -> f64 {
        if j < self.n {
            self.lp.column(j).iter().zip(y).zip(&self.sign).map(|((a, y), s)| a * s * y).sum()
        } else if j < self.n + self.m {
            let i = j - self.n;
            if self.rel[i] == Relation::Le {
                y[i]
            } else {
                -y[i]
            }
        } else {
            y[j - self.n - self.m]
        }
    }

    /// `B⁻¹ a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        if j < self.n {
            let col: Vec<f64> = self.lp.column(j).iter().zip(&self.sign).map(|(a, s)| a * s).collect();
            (0..m).map(|r| self.binv[r * m..(r + 1) * m].iter().zip(&col).map(|(x, y)| x * y).sum()).collect()
        } else {
            let (i, scale) = if j < self.n + m {
                let i = j - self.n;
                (i, if self.rel[i] == Relation::Le { 1.0 } else { -1.0 })
            } else {
                (j - self.n - m, 1.0)
            };
            (0..m).map(|r| scale * self.binv[r * m + i]).collect()
        }
    }

    fn duals(&self, phase: Phase) -> Vec<f64> {
        let m = self.m;
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost(j, phase)).collect();
        (0..m).map(|c| (0..m).map(|r| cb[r] * self.binv[r * m + c]).sum()).collect()
    }

    fn pivot(&mut self, r: usize, entering: usize, u: &[f64]) {
        let m = self.m;
        let piv = u[r];
        for c in 0..m {
            self.binv[r * m + c] /= piv;
        }
        self.xb[r] /= piv;
        for i in 0..m {
            if i != r && u[i] != 0.0 {
                let f = u[i];
                for c in 0..m {
                    self.binv[i * m + c] -= f * self.binv[r * m + c];
                }
                self.xb[i] -= f * self.xb[r];
            }
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[entering] = true;
        self.basis[r] = entering;
        self.iterations += 1;
        if self.iterations.is_multiple_of(REFACTOR_EVERY) {
            self.refactor();
        }
    }

    fn refactor(&mut self) {
        let m = self.m;
        let mut bmat = DMatrix::zeros(m, m);
        for (k, &j) in self.basis.iter().enumerate() {
            let col: Vec<f64> = if j < self.n {
                self.lp.column(j).iter().zip(&self.sign).map(|(a, s)| a * s).collect()
            } else {
                let mut e = vec![0.0; m];
                if j < self.n + m {
                    let i = j - self.n;
                    e[i] = if self.rel[i] == Relation::Le { 1.0 } else { -1.0 };
                } else {
                    e[j - self.n - m] = 1.0;
                }
                e
            };
            bmat.set_column(k, &nalgebra::DVector::from_vec(col));
        }
        // keep the product-form inverse if the fresh one is unavailable
        if let Some(inv) = bmat.try_inverse() {
            for r in 0..m {
                for c in 0..m {
                    self.binv[r * m + c] = inv[(r, c)];
                }
            }
            self.xb = (0..m).map(|r| (0..m).map(|c| inv[(r, c)] * self.b[c]).sum()).collect();
        }
    }

    fn iterate(&mut self, phase: Phase, max_iters: usize) -> Result<()> {
        let total = self.n + 2 * self.m;
        loop {
            if self.iterations >= max_iters {
                return Err(Error::IterationLimit(max_iters));
            }
            let y = self.duals(phase);
            // Bland: lowest-index improving column
            let entering = (0..total).find(|&j| {
                !self.in_basis[j] && self.usable(j, phase) && self.cost(j, phase) - self.dot_column(&y, j) < -TAU_LP
            });
            let Some(entering) = entering else {
                return Ok(());
            };
            let u = self.ftran(entering);
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if u[r] > TAU_LP {
                    let ratio = self.xb[r].max(0.0) / u[r];
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - TAU_LP * lratio.abs().max(1.0)
                                || (ratio <= lratio + TAU_LP * lratio.abs().max(1.0) && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(if phase == Phase::One { Error::Infeasible } else { Error::Unbounded });
            };
            self.pivot(r, entering, &u);
        }
    }

    fn run(mut self, max_iters: usize) -> Result<LpSolution> {
        if self.basis.iter().any(|&j| self.is_artificial(j)) {
            self.iterate(Phase::One, max_iters)?;
            let infeasibility: f64 =
                self.basis.iter().zip(&self.xb).filter(|(&j, _)| self.is_artificial(j)).map(|(_, &x)| x).sum();
            let scale = 1.0 + self.b.iter().fold(0.0f64, |a, &v| a.max(v));
            if infeasibility > TAU_LP * scale {
                return Err(Error::Infeasible);
            }
            self.drive_out_artificials();
        }
        self.iterate(Phase::Two, max_iters)?;
        self.refactor();
        let mut x = vec![0.0; self.n];
        for (&j, &v) in self.basis.iter().zip(&self.xb) {
            if j < self.n {
                x[j] = v.max(0.0);
            }
        }
        let value = x.iter().zip(&self.lp.objective).map(|(x, c)| x * c).sum();
        let duals = self.duals(Phase::Two).iter().zip(&self.sign).map(|(y, s)| y * s).collect();
        Ok(LpSolution { value, x, duals, iterations: self.iterations })
    }

    /// Replaces zero-level artificials with structural or logical columns.
    /// Rows where no replacement exists are redundant and keep theirs.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let binv_row: Vec<f64> = self.binv[r * self.m..(r + 1) * self.m].to_vec();
            let candidate = (0..self.n + self.m).find(|&j| {
                !self.in_basis[j] && self.usable(j, Phase::Two) && self.dot_column(&binv_row, j).abs() > 1e-7
            });
            if let Some(j) = candidate {
                let u = self.ftran(j);
                self.pivot(r, j, &u);
            }
        }
    }
}
