//! Randomized planted-inclusion experiments.
//!
//! A planted instance draws `K1`, `β` processing pairs `(R, T)` and weights
//! `g` with i.i.d. uniform[0,1] entries normalized per row, and sets
//! `K2 = Σ g_α R_α K1 T_α`, so inclusion holds by construction. Every trial
//! owns a ChaCha8 stream keyed by `(seed, β)` with the trial index as stream
//! id, which makes any single trial reproducible in isolation.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::{verify_certificate, AtomSystem, CertificateTerm, ExplicitCertificate, ENUMERATION_CAP};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::lp::{self, LpOptions};
use crate::omp::{self, OmpConfig};

/// `K1` is `n1 × m1`, `K2` is `n2 × m2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub n1: usize,
    pub m1: usize,
    pub n2: usize,
    pub m2: usize,
}

impl Shape {
    pub const fn new(n1: usize, m1: usize, n2: usize, m2: usize) -> Self {
        Shape { n1, m1, n2, m2 }
    }

    /// Both channels `n × m`.
    pub const fn square(n: usize, m: usize) -> Self {
        Shape { n1: n, m1: m, n2: n, m2: m }
    }

    /// `n1^n2 · m2^m1`.
    pub fn atom_count(&self) -> u128 {
        let pow = |b: usize, e: usize| (b as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
        pow(self.n1, self.n2).saturating_mul(pow(self.m2, self.m1))
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}->{}x{}", self.n1, self.m1, self.n2, self.m2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Alg1,
    Alg2,
    Lp,
    BasisPursuit,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Lp => "lp",
            Algorithm::BasisPursuit => "basis_pursuit",
        }
    }

    /// LP-based solvers only need distinct columns.
    fn dedup(self) -> bool {
        matches!(self, Algorithm::Lp | Algorithm::BasisPursuit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub shape: Shape,
    pub beta_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    /// Residue tolerance for the greedy solvers.
    pub epsilon: f64,
    pub tol_inclusion: f64,
    /// Pass cap for Algorithm 2; `None` uses `50·s`.
    pub max_iters: Option<usize>,
    /// Visit atoms in a seeded random order instead of lexicographically.
    pub shuffle_atoms: Option<u64>,
}

impl ExperimentSpec {
    pub fn new(shape: Shape, beta_values: Vec<usize>, trials: usize, seed: u64, algorithm: Algorithm) -> Self {
        ExperimentSpec {
            shape,
            beta_values,
            trials,
            seed,
            algorithm,
            epsilon: omp::DEFAULT_EPSILON,
            tol_inclusion: lp::TAU_INC,
            max_iters: None,
            shuffle_atoms: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Shape { n1, m1, n2, m2 } = self.shape;
        if n1 == 0 || m1 == 0 || n2 == 0 || m2 == 0 {
            return Err(Error::EmptyMatrix);
        }
        if self.trials == 0 {
            return Err(Error::OutOfRange("trials must be at least 1".into()));
        }
        if self.beta_values.is_empty() || self.beta_values.contains(&0) {
            return Err(Error::OutOfRange("beta values must be positive".into()));
        }
        let needed = self.shape.atom_count();
        if needed > ENUMERATION_CAP {
            return Err(Error::SizeLimit { what: "atoms", needed, cap: ENUMERATION_CAP });
        }
        Ok(())
    }
}

/// RNG for one trial.
pub fn trial_rng(seed: u64, beta: usize, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(beta as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Row-normalized uniform[0,1] matrix.
pub fn random_stochastic(rows: usize, cols: usize, rng: &mut impl Rng) -> Channel {
    let mut data: Vec<f64> = (0..rows * cols).map(|_| rng.gen::<f64>()).collect();
    for row in data.chunks_mut(cols) {
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Channel::from_row_major(rows, cols, data).expect("normalized uniform rows are stochastic")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedInstance {
    pub k1: Channel,
    pub k2: Channel,
    pub certificate: ExplicitCertificate,
}

/// Draws `K1`, then `(R_α, T_α)` for each `α`, then the weights.
pub fn planted_instance(shape: Shape, beta: usize, rng: &mut impl Rng) -> Result<PlantedInstance> {
    if beta == 0 {
        return Err(Error::OutOfRange("beta must be positive".into()));
    }
    let k1 = random_stochastic(shape.n1, shape.m1, rng);
    let pairs: Vec<(Channel, Channel)> = (0..beta)
        .map(|_| (random_stochastic(shape.n2, shape.n1, rng), random_stochastic(shape.m1, shape.m2, rng)))
        .collect();
    let mut g: Vec<f64> = (0..beta).map(|_| rng.gen::<f64>()).collect();
    let sum: f64 = g.iter().sum();
    g.iter_mut().for_each(|w| *w /= sum);
    let certificate = ExplicitCertificate {
        terms: pairs
            .into_iter()
            .zip(g)
            .map(|((input, output), weight)| CertificateTerm { weight, input, output })
            .collect(),
    };
    let k2 = certificate.combine(&k1)?;
    Ok(PlantedInstance { k1, k2, certificate })
}

/// Planted instance of one trial.
pub fn planted_trial(shape: Shape, beta: usize, seed: u64, trial: u64) -> Result<PlantedInstance> {
    planted_instance(shape, beta, &mut trial_rng(seed, beta, trial))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Success,
    Failure,
    IterationLimit,
}

/// Outcome of one planted trial. `s1`, `t_act` and `residue_inf` come from the
/// greedy solvers; `value` is the LP objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub beta: usize,
    pub status: TrialStatus,
    pub s1: Option<usize>,
    pub t_act: Option<usize>,
    pub residue_inf: Option<f64>,
    pub value: Option<f64>,
    /// Whether the returned weights pass [`verify_certificate`]; absent on
    /// failure.
    pub certificate_ok: Option<bool>,
    pub wall_time_us: u64,
}

/// Runs one trial of `spec`.
pub fn run_trial(spec: &ExperimentSpec, beta: usize, trial: u64) -> Result<TrialRecord> {
    let inst = planted_trial(spec.shape, beta, spec.seed, trial)?;
    let start = Instant::now();
    let mut sys = AtomSystem::build(&inst.k1, &inst.k2, spec.algorithm.dedup())?;
    if let Some(seed) = spec.shuffle_atoms {
        sys = sys.shuffled(seed);
    }
    let mut rec = TrialRecord {
        trial,
        beta,
        status: TrialStatus::Failure,
        s1: None,
        t_act: None,
        residue_inf: None,
        value: None,
        certificate_ok: None,
        wall_time_us: 0,
    };
    match spec.algorithm {
        Algorithm::Alg1 | Algorithm::Alg2 => {
            let mut cfg = OmpConfig::for_shape(spec.shape.n2, spec.shape.m2)?;
            cfg.epsilon = spec.epsilon;
            if let Some(cap) = spec.max_iters {
                cfg.max_actual_iters = cap;
            }
            let run = if spec.algorithm == Algorithm::Alg1 { omp::run_alg1(&sys, &cfg) } else { omp::run_alg2(&sys, &cfg) };
            match run {
                Ok(out) => {
                    rec.s1 = Some(out.s1);
                    rec.t_act = Some(out.t_act);
                    rec.residue_inf = Some(out.residue_inf);
                    if out.f {
                        rec.status = TrialStatus::Success;
                        rec.certificate_ok = Some(verify_certificate(&sys, &out.certificate(&sys), 10.0 * cfg.epsilon)?);
                    }
                }
                Err(Error::IterationLimit(t)) => {
                    rec.status = TrialStatus::IterationLimit;
                    rec.t_act = Some(t);
                }
                Err(e) => return Err(e),
            }
        }
        Algorithm::Lp => {
            let opts = LpOptions { tol_inclusion: spec.tol_inclusion, seed: trial, ..LpOptions::default() };
            let res = lp::shannon_deficiency_with(&sys, &opts)?;
            rec.value = Some(res.value);
            if res.included {
                rec.status = TrialStatus::Success;
                rec.certificate_ok = Some(verify_certificate(&sys, &res.certificate(&sys), spec.tol_inclusion)?);
            }
        }
        Algorithm::BasisPursuit => match lp::basis_pursuit(&sys) {
            Ok(bp) => {
                rec.status = TrialStatus::Success;
                rec.s1 = Some(bp.support.len());
                rec.value = Some(bp.objective);
                let weights: Vec<f64> = bp.support.iter().map(|&c| bp.g[c]).collect();
                let cert = sys.certificate_from_columns(&bp.support, &weights);
                rec.residue_inf = Some(cert.residual_inf);
                rec.certificate_ok = Some(verify_certificate(&sys, &cert, spec.tol_inclusion)?);
            }
            Err(Error::Infeasible) => {}
            Err(e) => return Err(e),
        },
    }
    rec.wall_time_us = start.elapsed().as_micros() as u64;
    Ok(rec)
}

/// Per-β aggregate of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSummary {
    pub beta: usize,
    pub trials: usize,
    /// Trials without a verified success, iteration-limited ones included.
    pub failures: usize,
    pub rate: f64,
    pub iteration_limits: usize,
    pub mean_t_act: Option<f64>,
    pub max_t_act: Option<usize>,
    pub mean_s1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    /// Sorted by `(β, trial)`.
    pub records: Vec<TrialRecord>,
    pub summary: Vec<BetaSummary>,
}

/// Runs every `(β, trial)` of `spec` on the current rayon pool.
pub fn failure_rate(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let jobs: Vec<(usize, u64)> =
        spec.beta_values.iter().flat_map(|&b| (0..spec.trials as u64).map(move |t| (b, t))).collect();
    let mut records = jobs.par_iter().map(|&(b, t)| run_trial(spec, b, t)).collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.beta, r.trial));
    let summary = spec.beta_values.iter().map(|&b| summarize(b, records.iter().filter(|r| r.beta == b))).collect();
    Ok(ExperimentReport { spec: spec.clone(), records, summary })
}

fn summarize<'a>(beta: usize, recs: impl Iterator<Item = &'a TrialRecord>) -> BetaSummary {
    let recs: Vec<&TrialRecord> = recs.collect();
    let trials = recs.len();
    let failures = recs.iter().filter(|r| r.status != TrialStatus::Success || r.certificate_ok == Some(false)).count();
    let iteration_limits = recs.iter().filter(|r| r.status == TrialStatus::IterationLimit).count();
    let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let t_acts: Vec<usize> = recs.iter().filter_map(|r| r.t_act).collect();
    BetaSummary {
        beta,
        trials,
        failures,
        rate: failures as f64 / trials.max(1) as f64,
        iteration_limits,
        mean_t_act: mean(t_acts.iter().map(|&t| t as f64).collect()),
        max_t_act: t_acts.iter().copied().max(),
        mean_s1: mean(recs.iter().filter(|r| r.status == TrialStatus::Success).filter_map(|r| r.s1).map(|s| s as f64).collect()),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

/// Per-trial CSV. Columns: `trial,beta,status,s1,t_act,residue_inf,value,certificate_ok`,
/// plus `wall_time_us` when `timing` is set (timings are not reproducible).
pub fn write_records_csv(records: &[TrialRecord], timing: bool, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["trial", "beta", "status", "s1", "t_act", "residue_inf", "value", "certificate_ok"];
    if timing {
        header.push("wall_time_us");
    }
    w.write_record(&header)?;
    for r in records {
        let status = match r.status {
            TrialStatus::Success => "success",
            TrialStatus::Failure => "failure",
            TrialStatus::IterationLimit => "iteration_limit",
        };
        let mut row = vec![
            r.trial.to_string(),
            r.beta.to_string(),
            status.to_string(),
            opt(&r.s1),
            opt(&r.t_act),
            opt(&r.residue_inf),
            opt(&r.value),
            opt(&r.certificate_ok),
        ];
        if timing {
            row.push(r.wall_time_us.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready summary. Columns:
/// `beta,trials,failures,rate,iteration_limits,mean_t_act,max_t_act,mean_s1`.
pub fn write_summary_csv(summary: &[BetaSummary], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "trials", "failures", "rate", "iteration_limits", "mean_t_act", "max_t_act", "mean_s1"])
        ?;
    for s in summary {
        w.write_record([
            s.beta.to_string(),
            s.trials.to_string(),
            s.failures.to_string(),
            s.rate.to_string(),
            s.iteration_limits.to_string(),
            opt(&s.mean_t_act),
            opt(&s.max_t_act),
            opt(&s.mean_s1),
        ])
        ?;
    }
    w.flush()?;
    Ok(())
}
