//! Command-line front end.
//!
//! Every `cmd_*` function returns a serializable report and is usable as a
//! library call; [`main`] wires them to `clap` and maps outcomes to exit
//! codes: 0 when the question was decided in the positive (inclusion holds,
//! channels equivalent, certificate lifted, sweep finished), 1 when it was
//! refuted or left undecided, 2 on errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::atoms::{self, AtomSystem, CertificateTerm, ExplicitCertificate, InclusionCertificate, ENUMERATION_CAP};
use crate::channel::{kron_power, read_channel, Channel};
use crate::equivalence::{self, AssumptionReport, Capacity, EquivalenceVerdict};
use crate::error::{Error, Result};
use crate::experiment::{self, Algorithm, ExperimentReport, ExperimentSpec, PlantedInstance, Shape};
use crate::lp::{self, LpOptions};
use crate::omp::{self, OmpConfig};
use crate::order;

pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CheckMethod {
    /// Structural screens first, LP when they are inconclusive.
    #[default]
    Auto,
    Lp,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecidedBy {
    Majorization,
    Circulant,
    BscBec,
    Equivalence,
    Lp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomSet {
    /// All pure input and output maps.
    Full,
    /// Permutation pairs only.
    Permutation,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub method: CheckMethod,
    pub doubly_stochastic_atoms: bool,
    pub tol_inclusion: f64,
    pub epsilon: f64,
    /// Pass cap for Algorithm 2.
    pub max_iters: Option<usize>,
    pub atoms_cache: Option<PathBuf>,
    pub shuffle_atoms: Option<u64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            method: CheckMethod::Auto,
            doubly_stochastic_atoms: false,
            tol_inclusion: lp::TAU_INC,
            epsilon: omp::DEFAULT_EPSILON,
            max_iters: None,
            atoms_cache: None,
            shuffle_atoms: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyReport {
    pub value: f64,
    pub label: String,
    pub atoms: AtomSet,
    pub columns: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// `alg1`, `alg2`, `lp`, `circulant` or `equivalence`.
    pub solver: String,
    pub residual_inf: f64,
    pub verified: bool,
    pub certificate: ExplicitCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub k1_shape: (usize, usize),
    pub k2_shape: (usize, usize),
    /// `None` when no method reached a verdict.
    pub included: Option<bool>,
    pub decided_by: Option<DecidedBy>,
    pub deficiency: Option<DeficiencyReport>,
    pub certificate: Option<CertificateReport>,
    /// Degradation kernel `x` with `K2 = K1 · circ(x)` for circulant pairs.
    pub circulant_kernel: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn exit_code(&self) -> i32 {
        if self.included == Some(true) {
            EXIT_DECIDED
        } else {
            EXIT_REFUTED
        }
    }

    fn decide(&mut self, included: bool, by: DecidedBy) {
        self.included = Some(included);
        self.decided_by = Some(by);
    }
}

fn single_term(input: Channel, output: Channel) -> ExplicitCertificate {
    ExplicitCertificate { terms: vec![CertificateTerm { weight: 1.0, input, output }] }
}

fn certificate_report(solver: &str, cert: ExplicitCertificate, k1: &Channel, k2: &Channel, tol: f64) -> Result<CertificateReport> {
    Ok(CertificateReport {
        solver: solver.to_string(),
        residual_inf: cert.residual(k1, k2)?,
        verified: cert.verify(k1, k2, tol)?,
        certificate: cert,
    })
}

/// Inclusion `K2 ⊆ K1`, with a verdict, the screen or solver that reached
/// it, the deficiency when the LP ran, and a certificate when inclusion holds.
pub fn cmd_check(k1: &Channel, k2: &Channel, opts: &CheckOptions) -> Result<CheckReport> {
    let mut rep = CheckReport {
        k1_shape: k1.shape(),
        k2_shape: k2.shape(),
        included: None,
        decided_by: None,
        deficiency: None,
        certificate: None,
        circulant_kernel: None,
        notes: Vec::new(),
    };
    if opts.method != CheckMethod::Lp {
        analytic_screens(k1, k2, opts, &mut rep)?;
    }
    if rep.included.is_none() && opts.method != CheckMethod::Analytic {
        lp_check(k1, k2, opts, &mut rep)?;
    }
    if rep.included.is_none() {
        rep.notes.push("no screen was conclusive".into());
    }
    Ok(rep)
}

fn analytic_screens(k1: &Channel, k2: &Channel, opts: &CheckOptions, rep: &mut CheckReport) -> Result<()> {
    let tol = opts.tol_inclusion;
    let same_shape = k1.shape() == k2.shape();
    let ds = same_shape && k1.is_doubly_stochastic() && k2.is_doubly_stochastic();

    if ds {
        let forward = order::doubly_stochastic_necessary(k1, k2)?;
        if !forward.holds {
            rep.notes.push(format!(
                "flattened entries of K2 are not majorized by those of K1 (first violation at k = {})",
                forward.first_violation_k.map_or_else(|| "sum".to_string(), |k| k.to_string())
            ));
            rep.decide(false, DecidedBy::Majorization);
            return Ok(());
        }
    }

    if same_shape && k1.is_circulant() && k2.is_circulant() {
        let circ = order::circulant_conditions(k1, k2)?;
        if !circ.necessary_holds {
            rep.notes.push("first row of K2 is not majorized by the first row of K1".into());
            rep.decide(false, DecidedBy::Circulant);
            return Ok(());
        }
        if let Some(x) = circ.x {
            let kernel = order::degradation_kernel(&x)?;
            let n = k1.rows();
            rep.circulant_kernel = Some(x.into_inner());
            rep.certificate = Some(certificate_report("circulant", single_term(Channel::identity(n), kernel), k1, k2, tol)?);
            rep.decide(true, DecidedBy::Circulant);
            return Ok(());
        }
        rep.notes.push("circulant pair: majorization holds but no circulant degradation kernel exists".into());
    }

    if let Some(included) = bsc_bec_screen(k1, k2)? {
        rep.decide(included, DecidedBy::BscBec);
        return Ok(());
    }

    if ds {
        let backward = order::doubly_stochastic_necessary(k2, k1)?;
        let eq = equivalence::decide_equivalence(k1, k2)?;
        if eq.equivalent {
            let (r, t) = (eq.r.expect("equivalent verdict has R"), eq.t.expect("equivalent verdict has T"));
            rep.certificate = Some(certificate_report("equivalence", single_term(r.to_channel(), t.to_channel()), k1, k2, tol)?);
            rep.decide(true, DecidedBy::Equivalence);
        } else if backward.holds {
            rep.notes.push(format!(
                "mutual majorization holds but the channels are not equivalent ({})",
                mismatch_text(&eq)
            ));
        }
    }
    Ok(())
}

fn mismatch_text(eq: &EquivalenceVerdict) -> &'static str {
    match eq.mismatch {
        Some(equivalence::Mismatch::Shape) => "shapes differ",
        Some(equivalence::Mismatch::RowSpectrum) => "eigenvalues of K Kᵀ differ",
        Some(equivalence::Mismatch::ColumnSpectrum) => "eigenvalues of Kᵀ K differ",
        Some(equivalence::Mismatch::NoPermutation) | None => "no permutation pair maps one onto the other",
    }
}

/// BSC crossovers above 1/2 are folded by swapping the outputs, which is an
/// equivalence.
fn bsc_bec_screen(k1: &Channel, k2: &Channel) -> Result<Option<bool>> {
    let fold = |p: f64| p.min(1.0 - p);
    if let (Some(eps), Some(p)) = (order::as_bec(k1), order::as_bsc(k2)) {
        return Ok(Some(order::bsc_bec_inclusion(fold(p), eps)?.bsc_in_bec));
    }
    if let (Some(p), Some(eps)) = (order::as_bsc(k1), order::as_bec(k2)) {
        return Ok(Some(order::bsc_bec_inclusion(fold(p), eps)?.bec_in_bsc));
    }
    Ok(None)
}

fn lp_check(k1: &Channel, k2: &Channel, opts: &CheckOptions, rep: &mut CheckReport) -> Result<()> {
    let full = experiment::Shape::new(k1.rows(), k1.cols(), k2.rows(), k2.cols()).atom_count();
    let ds = k1.shape() == k2.shape() && k1.is_doubly_stochastic() && k2.is_doubly_stochastic();
    let atoms = if opts.doubly_stochastic_atoms || (ds && full > ENUMERATION_CAP) { AtomSet::Permutation } else { AtomSet::Full };
    if atoms == AtomSet::Permutation && !opts.doubly_stochastic_atoms {
        rep.notes.push(format!("{full} pure atoms exceed the cap; using permutation atoms"));
    }
    let build = || match atoms {
        AtomSet::Full => AtomSystem::build(k1, k2, true),
        AtomSet::Permutation => AtomSystem::build_permutation_restricted(k1, k2, true),
    };
    let mut sys = match (&opts.atoms_cache, atoms) {
        (Some(path), AtomSet::Full) => AtomSystem::load_or_build(path, k1, k2, true, build)?,
        _ => build()?,
    };
    if opts.atoms_cache.is_some() && atoms == AtomSet::Permutation {
        rep.notes.push("atoms cache is only used for the full atom set".into());
    }
    if let Some(seed) = opts.shuffle_atoms {
        sys = sys.shuffled(seed);
    }

    let lp_opts = LpOptions { tol_inclusion: opts.tol_inclusion, ..LpOptions::default() };
    let res = lp::shannon_deficiency_with(&sys, &lp_opts)?;
    rep.deficiency = Some(DeficiencyReport {
        value: res.value,
        label: match atoms {
            AtomSet::Full => "deficiency over pure-atom polytope".into(),
            AtomSet::Permutation => "deficiency over permutation-atom polytope".into(),
        },
        atoms,
        columns: sys.num_columns(),
        iterations: res.iterations,
    });
    if !res.included {
        if atoms == AtomSet::Permutation {
            rep.notes.push("positive value refutes inclusion through permutation pairs only".into());
        }
        rep.decide(false, DecidedBy::Lp);
        return Ok(());
    }
    rep.decide(true, DecidedBy::Lp);

    let s = atoms::caratheodory_bound(k2.rows(), k2.cols(), atoms == AtomSet::Permutation)?;
    let mut cfg = OmpConfig::with_sparsity(s);
    cfg.epsilon = opts.epsilon;
    if let Some(cap) = opts.max_iters {
        cfg.max_actual_iters = cap;
    }
    let sparse = sparse_certificate(&sys, &cfg)?;
    let (solver, cert) = match sparse {
        Some(found) => found,
        None => ("lp", res.certificate(&sys)),
    };
    rep.certificate = Some(certificate_report(solver, cert.to_explicit(&sys)?, k1, k2, opts.tol_inclusion)?);
    Ok(())
}

/// Algorithm 1, then Algorithm 2 when the first fails.
fn sparse_certificate(sys: &AtomSystem, cfg: &OmpConfig) -> Result<Option<(&'static str, InclusionCertificate)>> {
    let first = omp::run_alg1(sys, cfg)?;
    if first.f {
        return Ok(Some(("alg1", first.certificate(sys))));
    }
    match omp::run_alg2(sys, cfg) {
        Ok(out) if out.f => Ok(Some(("alg2", out.certificate(sys)))),
        Ok(_) | Err(Error::IterationLimit(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivReport {
    pub assumptions_k1: Option<AssumptionReport>,
    pub assumptions_k2: Option<AssumptionReport>,
    pub verdict: EquivalenceVerdict,
    /// Set when the assumptions under which a negative verdict is exact could
    /// not all be verified. A positive verdict is never conditional.
    pub conditional: bool,
    pub reason: Option<String>,
}

impl EquivReport {
    pub fn exit_code(&self) -> i32 {
        if self.verdict.equivalent {
            EXIT_DECIDED
        } else {
            EXIT_REFUTED
        }
    }
}

/// Equivalence `K2 = R · K1 · T` with permutations, plus the assumption report
/// for both channels.
pub fn cmd_equiv(k1: &Channel, k2: &Channel) -> Result<EquivReport> {
    let assumptions_k1 = Some(equivalence::check_assumptions(k1)?);
    let assumptions_k2 = Some(equivalence::check_assumptions(k2)?);
    let verdict = equivalence::decide_equivalence(k1, k2)?;
    let all_hold = [&assumptions_k1, &assumptions_k2].iter().all(|a| a.as_ref().is_some_and(AssumptionReport::all_hold));
    let conditional = !verdict.equivalent && !all_hold;
    let reason = (!verdict.equivalent).then(|| mismatch_text(&verdict).to_string());
    Ok(EquivReport { assumptions_k1, assumptions_k2, verdict, conditional, reason })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KronReport {
    pub order: usize,
    pub base_terms: usize,
    pub base_residual: f64,
    pub base_verified: bool,
    pub terms: Option<usize>,
    pub weight_sum: Option<f64>,
    pub residual_inf: Option<f64>,
    pub verified: Option<bool>,
}

impl KronReport {
    pub fn exit_code(&self) -> i32 {
        if self.verified == Some(true) {
            EXIT_DECIDED
        } else {
            EXIT_REFUTED
        }
    }
}

/// Lifts a certificate of `K2 ⊆ K1` to order `n` and checks it against the
/// Kronecker powers. Nothing is lifted when the base certificate fails.
pub fn cmd_kron(k1: &Channel, k2: &Channel, n: usize, cert: &ExplicitCertificate, tol: f64) -> Result<KronReport> {
    let base_residual = cert.residual(k1, k2)?;
    let base_verified = cert.verify(k1, k2, tol)?;
    let mut rep = KronReport {
        order: n,
        base_terms: cert.terms.len(),
        base_residual,
        base_verified,
        terms: None,
        weight_sum: None,
        residual_inf: None,
        verified: None,
    };
    if !base_verified {
        return Ok(rep);
    }
    let lifted = atoms::kron_lift_certificate(cert, n)?;
    let (p1, p2) = (kron_power(k1, n)?, kron_power(k2, n)?);
    rep.terms = Some(lifted.terms.len());
    rep.weight_sum = Some(lifted.terms.iter().map(|t| t.weight).sum());
    rep.residual_inf = Some(lifted.residual(&p1, &p2)?);
    rep.verified = Some(lifted.verify(&p1, &p2, tol)?);
    Ok(rep)
}

/// Everything `random-instance` writes, in one file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub shape: Shape,
    pub beta: usize,
    pub seed: u64,
    pub trial: u64,
    pub k1: Channel,
    pub k2: Channel,
    pub certificate: ExplicitCertificate,
}

/// Planted instance of trial `trial` under `seed`, identical to the one the
/// failure-rate sweep draws.
pub fn cmd_random_instance(shape: Shape, beta: usize, seed: u64, trial: u64) -> Result<InstanceFile> {
    let PlantedInstance { k1, k2, certificate } = experiment::planted_trial(shape, beta, seed, trial)?;
    Ok(InstanceFile { shape, beta, seed, trial, k1, k2, certificate })
}

/// Writes `k1.json`, `k2.json`, `certificate.json` and `instance.json` into
/// `dir`.
pub fn write_instance(inst: &InstanceFile, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("k1.json"), pretty(&inst.k1)?)?;
    fs::write(dir.join("k2.json"), pretty(&inst.k2)?)?;
    fs::write(dir.join("certificate.json"), pretty(&inst.certificate)?)?;
    fs::write(dir.join("instance.json"), pretty(inst)?)?;
    Ok(())
}

pub fn cmd_failure_rate(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    experiment::failure_rate(spec)
}

pub fn cmd_capacity(k: &Channel, max_iters: usize) -> Result<Capacity> {
    equivalence::blahut_arimoto_capacity(k, max_iters, 1e-12)
}

pub fn read_certificate(path: &Path) -> Result<ExplicitCertificate> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn pretty<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Parser, Debug)]
#[command(name = "chanincl", version, about = "Decide, certify and quantify inclusion between discrete memoryless channels")]
pub struct Cli {
    /// Worker threads for experiment sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether K2 is included in K1.
    Check(CheckArgs),
    /// Decide whether K2 is K1 up to input and output permutations.
    Equiv(PairArgs),
    /// Lift a certificate of K2 ⊆ K1 to Kronecker powers.
    Kron(KronArgs),
    /// Write a planted instance (K1, K2 and the certificate).
    RandomInstance(RandomInstanceArgs),
    /// Run planted trials and report per-β failure rates as CSV.
    FailureRate(FailureRateArgs),
    /// Blahut–Arimoto capacity in bits.
    Capacity(CapacityArgs),
}

#[derive(Args, Debug)]
pub struct PairArgs {
    /// Including channel (JSON or CSV).
    pub k1: PathBuf,
    /// Included channel (JSON or CSV).
    pub k2: PathBuf,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t = CheckMethod::Auto)]
    pub method: CheckMethod,
    /// Restrict the LP to permutation pairs.
    #[arg(long)]
    pub doubly_stochastic_atoms: bool,
    #[arg(long, default_value_t = lp::TAU_INC)]
    pub tol_inclusion: f64,
    #[arg(long, default_value_t = omp::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub atoms_cache: Option<PathBuf>,
    #[arg(long)]
    pub shuffle_atoms: Option<u64>,
    /// Also write the certificate, when one is found, to this file.
    #[arg(long)]
    pub cert_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KronArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Kronecker order.
    #[arg(long, short = 'n')]
    pub order: usize,
    /// Certificate JSON as written by `check --cert-out` or `random-instance`.
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_inclusion: f64,
}

fn parse_shape(s: &str) -> std::result::Result<Shape, String> {
    let v: Vec<usize> = s.split([',', 'x']).map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string())).collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [n1, m1, n2, m2] => Ok(Shape::new(n1, m1, n2, m2)),
        [n, m] => Ok(Shape::square(n, m)),
        _ => Err("expected n1,m1,n2,m2 or n,m".into()),
    }
}

#[derive(Args, Debug)]
pub struct RandomInstanceArgs {
    /// `n1,m1,n2,m2`, or `n,m` for equal shapes.
    #[arg(long, value_parser = parse_shape)]
    pub shape: Shape,
    #[arg(long)]
    pub beta: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Output directory.
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FailureRateArgs {
    #[arg(long, value_parser = parse_shape)]
    pub shape: Shape,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub betas: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Algorithm::Alg1)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = omp::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = lp::TAU_INC)]
    pub tol_inclusion: f64,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub shuffle_atoms: Option<u64>,
    /// Per-trial CSV output.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Include wall-clock times in the per-trial CSV.
    #[arg(long)]
    pub timing: bool,
    /// Summary CSV output; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    pub k: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iters: usize,
}

/// Parses `args` and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_DECIDED };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

fn dispatch(cli: Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Check(a) => {
            let (k1, k2) = (read_channel(&a.pair.k1)?, read_channel(&a.pair.k2)?);
            let opts = CheckOptions {
                method: a.method,
                doubly_stochastic_atoms: a.doubly_stochastic_atoms,
                tol_inclusion: a.tol_inclusion,
                epsilon: a.epsilon,
                max_iters: a.max_iters,
                atoms_cache: a.atoms_cache,
                shuffle_atoms: a.shuffle_atoms,
            };
            let rep = cmd_check(&k1, &k2, &opts)?;
            if let (Some(path), Some(cert)) = (&a.cert_out, &rep.certificate) {
                fs::write(path, pretty(&cert.certificate)?)?;
            }
            print!("{}", pretty(&rep)?);
            Ok(rep.exit_code())
        }
        Command::Equiv(a) => {
            let rep = cmd_equiv(&read_channel(&a.k1)?, &read_channel(&a.k2)?)?;
            print!("{}", pretty(&rep)?);
            Ok(rep.exit_code())
        }
        Command::Kron(a) => {
            let (k1, k2) = (read_channel(&a.pair.k1)?, read_channel(&a.pair.k2)?);
            let rep = cmd_kron(&k1, &k2, a.order, &read_certificate(&a.cert)?, a.tol_inclusion)?;
            print!("{}", pretty(&rep)?);
            Ok(rep.exit_code())
        }
        Command::RandomInstance(a) => {
            let inst = cmd_random_instance(a.shape, a.beta, a.seed, a.trial)?;
            write_instance(&inst, &a.out)?;
            Ok(EXIT_DECIDED)
        }
        Command::FailureRate(a) => {
            let spec = ExperimentSpec {
                shape: a.shape,
                beta_values: a.betas,
                trials: a.trials,
                seed: a.seed,
                algorithm: a.algorithm,
                epsilon: a.epsilon,
                tol_inclusion: a.tol_inclusion,
                max_iters: a.max_iters,
                shuffle_atoms: a.shuffle_atoms,
            };
            let rep = cmd_failure_rate(&spec)?;
            if let Some(path) = &a.records {
                experiment::write_records_csv(&rep.records, a.timing, fs::File::create(path)?)?;
            }
            match &a.summary {
                Some(path) => experiment::write_summary_csv(&rep.summary, fs::File::create(path)?)?,
                None => experiment::write_summary_csv(&rep.summary, std::io::stdout().lock())?,
            }
            Ok(EXIT_DECIDED)
        }
        Command::Capacity(a) => {
            let cap = cmd_capacity(&read_channel(&a.k)?, a.max_iters)?;
            print!("{}", pretty(&cap)?);
            Ok(EXIT_DECIDED)
        }
    }
}
