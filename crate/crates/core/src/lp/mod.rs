//! Inclusion and deficiency by linear programming over an [`AtomSystem`].
//!
//! Two deficiency objectives are provided. [`shannon_deficiency`] minimizes
//! `Σ_i max_j |D_ij|` where `D = Σ g_α R_α K1 T_α − K2`, with `c_i` bounding
//! row `i`. [`total_variation_deficiency`] minimizes `max_j Σ_i |D_ij|`, the
//! `∞`-norm of `Dᵀ`. Both are zero exactly when `K2` lies in the pure-atom
//! polytope of `K1`.

pub mod simplex;

use rand::seq::index::sample;
use rand::SeedableRng;
use serde::Serialize;

use crate::atoms::{AtomSystem, InclusionCertificate};
use crate::error::{Error, Result};
pub use simplex::{LinearProgram, LpSolution, Relation, TAU_LP};

/// Deficiency at or below this counts as inclusion.
pub const TAU_INC: f64 = 1e-7;
/// Stored-column count above which column generation is used.
pub const COLUMN_GENERATION_THRESHOLD: usize = 50_000;

#[derive(Clone, Debug)]
pub struct LpOptions {
    pub max_iters: usize,
    pub tol_inclusion: f64,
    /// Column generation kicks in above this many stored columns.
    pub column_generation_threshold: usize,
    /// Initial pool size for column generation besides `seed_columns`.
    pub random_pool: usize,
    /// Stored-column indices to seed the pool with (for example OMP picks).
    pub seed_columns: Vec<usize>,
    /// Columns added per pricing pass.
    pub pricing_batch: usize,
    pub seed: u64,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            max_iters: 1_000_000,
            tol_inclusion: TAU_INC,
            column_generation_threshold: COLUMN_GENERATION_THRESHOLD,
            random_pool: 2_000,
            seed_columns: Vec::new(),
            pricing_batch: 500,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeficiencyResult {
    pub value: f64,
    /// Weight per stored column of the system.
    pub g_full: Vec<f64>,
    pub included: bool,
    /// Simplex pivots, summed over pricing passes.
    pub iterations: usize,
    /// Restricted-master solves; 1 without column generation.
    pub passes: usize,
}

impl DeficiencyResult {
    /// Support of `g_full` as a certificate.
    pub fn certificate(&self, sys: &AtomSystem) -> InclusionCertificate {
        sys.certificate_from_dense(&self.g_full, 0.0)
    }
}

/// Which deficiency objective a master problem encodes.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Objective {
    RowMax,
    TotalVariation,
}

/// Column layout of the master LP: weights first, then auxiliaries.
struct Master {
    objective: Objective,
    n2: usize,
    m2: usize,
}

impl Master {
    fn p(&self) -> usize {
        self.n2 * self.m2
    }

    fn rows(&self) -> usize {
        match self.objective {
            Objective::RowMax => 2 * self.p() + 2,
            Objective::TotalVariation => 2 * self.p() + self.m2 + 2,
        }
    }

    fn base(&self, h: &[f64]) -> Result<LinearProgram> {
        let mut rhs = Vec::with_capacity(self.rows());
        for &hk in h {
            rhs.push(hk);
            rhs.push(-hk);
        }
        if self.objective == Objective::TotalVariation {
            rhs.extend(std::iter::repeat_n(0.0, self.m2));
        }
        rhs.push(1.0);
        rhs.push(-1.0);
        debug_assert_eq!(rhs.len(), self.rows());
        LinearProgram::new(vec![Relation::Le; rhs.len()], rhs)
    }

    /// Constraint column of a weight variable for atom column `a`.
    fn weight_column(&self, a: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for &v in a {
            out.push(v);
            out.push(-v);
        }
        if self.objective == Objective::TotalVariation {
            out.extend(std::iter::repeat_n(0.0, self.m2));
        }
        out.push(1.0);
        out.push(-1.0);
    }

    fn push_auxiliaries(&self, lp: &mut LinearProgram) -> Result<()> {
        let rows = self.rows();
        let p = self.p();
        let mut col = vec![0.0; rows];
        match self.objective {
            Objective::RowMax => {
                // c_i bounds every entry of row i (vec index k = j·n2 + i)
                for i in 0..self.n2 {
                    col.iter_mut().for_each(|v| *v = 0.0);
                    for j in 0..self.m2 {
                        let k = j * self.n2 + i;
                        col[2 * k] = -1.0;
                        col[2 * k + 1] = -1.0;
                    }
                    lp.push_column(1.0, &col)?;
                }
            }
            Objective::TotalVariation => {
                // e_k bounds |D_k|, column sums of e are bounded by t
                for k in 0..p {
                    col.iter_mut().for_each(|v| *v = 0.0);
                    col[2 * k] = -1.0;
                    col[2 * k + 1] = -1.0;
                    col[2 * p + k / self.n2] = 1.0;
                    lp.push_column(0.0, &col)?;
                }
                col.iter_mut().for_each(|v| *v = 0.0);
                for j in 0..self.m2 {
                    col[2 * p + j] = -1.0;
                }
                lp.push_column(1.0, &col)?;
            }
        }
        Ok(())
    }

    /// Builds the LP over the given stored columns; weights come first.
    fn build(&self, sys: &AtomSystem, columns: &[usize]) -> Result<LinearProgram> {
        let mut lp = self.base(sys.h())?;
        let mut buf = Vec::with_capacity(self.rows());
        for &c in columns {
            self.weight_column(sys.column(c), &mut buf);
            lp.push_column(0.0, &buf)?;
        }
        self.push_auxiliaries(&mut lp)?;
        Ok(lp)
    }

    /// Reduced cost of the weight variable for atom column `a` under `duals`.
    fn reduced_cost(&self, a: &[f64], duals: &[f64]) -> f64 {
        let p = self.p();
        let mut dot = 0.0;
        for (k, &v) in a.iter().enumerate() {
            dot += v * (duals[2 * k] - duals[2 * k + 1]);
        }
        let tail = self.rows() - 2;
        debug_assert!(tail >= 2 * p);
        dot += duals[tail] - duals[tail + 1];
        -dot
    }
}

fn solve_master(sys: &AtomSystem, objective: Objective, opts: &LpOptions) -> Result<DeficiencyResult> {
    let (n2, m2) = sys.k2().shape();
    let master = Master { objective, n2, m2 };
    let q = sys.num_columns();
    if q <= opts.column_generation_threshold {
        let all: Vec<usize> = (0..q).collect();
        let sol = master.build(sys, &all)?.solve(opts.max_iters)?;
        return Ok(finish(sol.value, &sol.x[..q], &all, q, sol.iterations, 1, opts));
    }

    let mut in_pool = vec![false; q];
    let mut pool = Vec::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let random = sample(&mut rng, q, opts.random_pool.min(q));
    for c in opts.seed_columns.iter().copied().chain(random.iter()) {
        if c < q && !in_pool[c] {
            in_pool[c] = true;
            pool.push(c);
        }
    }
    let mut iterations = 0;
    let mut passes = 0;
    loop {
        passes += 1;
        let sol = master.build(sys, &pool)?.solve(opts.max_iters)?;
        iterations += sol.iterations;
        let mut priced: Vec<(f64, usize)> = (0..q)
            .filter(|&c| !in_pool[c])
            .map(|c| (master.reduced_cost(sys.column(c), &sol.duals), c))
            .filter(|&(d, _)| d < -TAU_LP)
            .collect();
        if priced.is_empty() {
            return Ok(finish(sol.value, &sol.x[..pool.len()], &pool, q, iterations, passes, opts));
        }
        priced.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, c) in priced.iter().take(opts.pricing_batch) {
            in_pool[c] = true;
            pool.push(c);
        }
    }
}

fn finish(
    value: f64,
    weights: &[f64],
    columns: &[usize],
    q: usize,
    iterations: usize,
    passes: usize,
    opts: &LpOptions,
) -> DeficiencyResult {
    let mut g_full = vec![0.0; q];
    for (&c, &w) in columns.iter().zip(weights) {
        g_full[c] = w.max(0.0);
    }
    let s: f64 = g_full.iter().sum();
    if s > 0.0 {
        g_full.iter_mut().for_each(|w| *w /= s);
    }
    let value = value.max(0.0);
    DeficiencyResult { value, g_full, included: value <= opts.tol_inclusion, iterations, passes }
}

/// Minimizes `Σ_i c_i` subject to `−c ≤ D_{(:,j)} ≤ c` for every column `j`
/// of the deviation `D`, over probability weights on the system's columns.
pub fn shannon_deficiency(sys: &AtomSystem) -> Result<DeficiencyResult> {
    shannon_deficiency_with(sys, &LpOptions::default())
}

pub fn shannon_deficiency_with(sys: &AtomSystem, opts: &LpOptions) -> Result<DeficiencyResult> {
    solve_master(sys, Objective::RowMax, opts)
}

/// Minimizes `max_j Σ_i |D_ij|`, the total-variation form of the deficiency.
pub fn total_variation_deficiency(sys: &AtomSystem) -> Result<DeficiencyResult> {
    total_variation_deficiency_with(sys, &LpOptions::default())
}

pub fn total_variation_deficiency_with(sys: &AtomSystem, opts: &LpOptions) -> Result<DeficiencyResult> {
    solve_master(sys, Objective::TotalVariation, opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisPursuit {
    /// Weight per stored column.
    pub g: Vec<f64>,
    pub objective: f64,
    pub support: Vec<usize>,
    pub iterations: usize,
}

/// `min Σ|g|` subject to `A g = h`. Every column of `A` has entry sum `n2`,
/// so feasible points have `Σg = 1`; the non-negative half of the split is
/// the only one that can be optimal, so `g ≥ 0` is imposed directly.
pub fn basis_pursuit(sys: &AtomSystem) -> Result<BasisPursuit> {
    let p = sys.p();
    let mut lp = LinearProgram::new(vec![Relation::Eq; p], sys.h().to_vec())?;
    for c in 0..sys.num_columns() {
        lp.push_column(1.0, sys.column(c))?;
    }
    let sol = lp.solve(LpOptions::default().max_iters)?;
    let support: Vec<usize> = sol.x.iter().enumerate().filter(|(_, &v)| v > TAU_LP).map(|(c, _)| c).collect();
    let residual = sys.column_residual(&support, &support.iter().map(|&c| sol.x[c]).collect::<Vec<_>>());
    if residual > TAU_INC {
        return Err(Error::Infeasible);
    }
    Ok(BasisPursuit { g: sol.x, objective: sol.value, support, iterations: sol.iterations })
}
