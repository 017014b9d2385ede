//! Acceptance run: one PASS/FAIL line per criterion. Non-gating criteria are
//! reported but never fail the run.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use channel_inclusion::atoms::{caratheodory_bound, kron_lift_certificate, AtomSystem};
use channel_inclusion::channel::{kron_power, validate, Channel, PureChannel};
use channel_inclusion::equivalence::{blahut_arimoto_capacity, decide_equivalence, Mismatch};
use channel_inclusion::experiment::{failure_rate, planted_trial, Algorithm, ExperimentReport, ExperimentSpec, Shape, TrialStatus};
use channel_inclusion::lp::shannon_deficiency;
use channel_inclusion::omp::{projection_cone_probe, positive_ip_necessity_probe, run_alg2, OmpConfig};
use channel_inclusion::order::doubly_stochastic_necessary;
use channel_inclusion::Error;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHAPES: [Shape; 2] = [Shape::square(3, 3), Shape::square(4, 3)];
const BETAS: [usize; 5] = [1, 2, 3, 4, 5];

struct Outcome {
    pass: bool,
    gating: bool,
    detail: String,
}

impl Outcome {
    fn gate(pass: bool, detail: String) -> Self {
        Outcome { pass, gating: true, detail }
    }
}

fn sweep(shape: Shape, trials: usize, seed: u64, algorithm: Algorithm) -> ExperimentReport {
    failure_rate(&ExperimentSpec::new(shape, BETAS.to_vec(), trials, seed, algorithm)).expect("sweep runs")
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn random_permutation(n: usize, rng: &mut impl Rng) -> PureChannel {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    PureChannel::new(n, map).unwrap()
}

/// Planted inclusion: 1,000 trials per shape and β, LP value ≤ 1e−7 everywhere.
fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = 0;
    let mut total = 0;
    for shape in SHAPES {
        let rep = sweep(shape, 1000, 101, Algorithm::Lp);
        for r in &rep.records {
            total += 1;
            let v = r.value.unwrap_or(f64::INFINITY);
            worst = worst.max(v);
            if v > 1e-7 || r.certificate_ok != Some(true) {
                bad += 1;
            }
        }
    }
    Outcome::gate(bad == 0, format!("{total} planted LPs, {bad} above 1e-7 or unverified, worst value {worst:.2e}"))
}

/// Backtracking solver: 10⁴ trials per shape and β without a failure, and
/// mean passes within twice the mean sparsity.
fn criterion_2(reports: &[ExperimentReport], elapsed: Duration) -> Outcome {
    let mut detail = String::new();
    let mut pass = true;
    for rep in reports {
        for s in &rep.summary {
            let ok = s.failures == 0 && s.mean_t_act.unwrap_or(f64::INFINITY) <= 2.0 * s.mean_s1.unwrap_or(0.0);
            pass &= ok;
            if !ok || s.beta == 1 {
                let _ = write!(
                    detail,
                    "[{} beta {}: {} failures, mean t_act {:.4}, mean s1 {:.4}, max t_act {}] ",
                    rep.spec.shape,
                    s.beta,
                    s.failures,
                    s.mean_t_act.unwrap_or(f64::NAN),
                    s.mean_s1.unwrap_or(f64::NAN),
                    s.max_t_act.unwrap_or(0)
                );
            }
        }
    }
    let trials: usize = reports.iter().flat_map(|r| &r.summary).map(|s| s.trials).sum();
    Outcome::gate(pass, format!("{trials} trials in {elapsed:.1?} (desk-scale stand-in for 5e6 per case); {detail}"))
}

/// Greedy solver: rates recorded, every success verified, factor-3 band as a
/// warning only.
fn criterion_3(reports: &[ExperimentReport], elapsed: Duration) -> Outcome {
    let mut detail = String::new();
    let mut unverified = 0;
    for rep in reports {
        unverified += rep.records.iter().filter(|r| r.status == TrialStatus::Success && r.certificate_ok != Some(true)).count();
        let rates: Vec<f64> = rep.summary.iter().map(|s| s.rate).collect();
        let (lo, hi) = rates.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        let band = if hi == 0.0 || hi <= 3.0 * lo { "within factor 3" } else { "WARNING: outside factor-3 band" };
        let failures: Vec<String> = rep.summary.iter().map(|s| format!("{}", s.failures)).collect();
        let _ = write!(detail, "[{}: failures per beta {} of {} trials, {band}] ", rep.spec.shape, failures.join("/"), rep.spec.trials);
    }
    Outcome::gate(unverified == 0, format!("{unverified} unverified successes in {elapsed:.1?}; {detail}"))
}

/// BSC/BEC boundary sweep.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst_inside = 0.0f64;
    let mut best_outside = f64::INFINITY;
    for k in 1..=9 {
        let p = 0.05 * k as f64;
        let k2 = Channel::bsc(p).unwrap();
        for (eps, inside) in [(2.0 * p - 0.01, true), (2.0 * p + 0.01, false)] {
            let k1 = Channel::bec(eps).unwrap();
            let v = shannon_deficiency(&AtomSystem::build(&k1, &k2, true).unwrap()).unwrap().value;
            if inside {
                worst_inside = worst_inside.max(v);
            } else {
                best_outside = best_outside.min(v);
            }
        }
    }
    let pass = worst_inside <= 1e-7 && best_outside >= 1e-3;
    Outcome::gate(
        pass,
        format!("max value inside {worst_inside:.2e}, min value outside {best_outside:.4e}, {:.2?}", start.elapsed()),
    )
}

fn mutual_majorization_pair() -> (Channel, Channel) {
    let f = |rows: [[u32; 5]; 5]| validate(&rows.iter().map(|r| r.iter().map(|&v| v as f64 / 15.0).collect()).collect::<Vec<_>>()).unwrap();
    (
        f([[1, 2, 3, 4, 5], [5, 1, 2, 3, 4], [4, 5, 1, 2, 3], [3, 4, 5, 1, 2], [2, 3, 4, 5, 1]]),
        f([[1, 2, 3, 4, 5], [5, 1, 2, 3, 4], [3, 4, 1, 5, 2], [2, 5, 4, 1, 3], [4, 3, 5, 2, 1]]),
    )
}

/// Golden pair: mutual majorization but no equivalence.
fn criterion_5() -> Outcome {
    let (k1, k2) = mutual_majorization_pair();
    let start = Instant::now();
    let fwd = doubly_stochastic_necessary(&k1, &k2).unwrap().holds;
    let bwd = doubly_stochastic_necessary(&k2, &k1).unwrap().holds;
    let eq = decide_equivalence(&k1, &k2).unwrap();
    let elapsed = start.elapsed();
    let pass = fwd && bwd && !eq.equivalent && eq.mismatch == Some(Mismatch::RowSpectrum) && elapsed < Duration::from_secs(1);
    Outcome::gate(pass, format!("majorization both ways {}, equivalent {}, mismatch {:?}, {elapsed:.2?}", fwd && bwd, eq.equivalent, eq.mismatch))
}

/// Planted permutation pairs are recovered.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut missed = 0;
    let mut worst = 0.0f64;
    let mut exhaustive = 0;
    let mut total = 0;
    for n in [3, 4, 5] {
        for _ in 0..1000 {
            let k1 = channel_inclusion::experiment::random_stochastic(n, n, &mut rng);
            let (p, q) = (random_permutation(n, &mut rng), random_permutation(n, &mut rng));
            let k2 = q.apply_cols(&p.apply_rows(&k1).unwrap()).unwrap();
            let v = decide_equivalence(&k1, &k2).unwrap();
            total += 1;
            exhaustive += (v.method == channel_inclusion::equivalence::Method::Exhaustive) as usize;
            match v.residual {
                Some(r) if v.equivalent && r < 1e-9 => worst = worst.max(r),
                _ => missed += 1,
            }
        }
    }
    Outcome::gate(missed == 0, format!("{total} pairs, {missed} missed, worst residual {worst:.1e}, {exhaustive} via exhaustive search"))
}

/// Blahut–Arimoto against closed forms.
fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=49 {
        let p = k as f64 / 100.0;
        let c = blahut_arimoto_capacity(&Channel::bsc(p).unwrap(), 1_000_000, 1e-12).unwrap().capacity;
        worst = worst.max((c - (1.0 - h2(p))).abs());
    }
    let id = blahut_arimoto_capacity(&Channel::identity(4), 1_000_000, 1e-12).unwrap().capacity;
    let pass = worst <= 1e-6 && (id - 2.0).abs() <= 1e-9;
    Outcome::gate(pass, format!("max BSC error {worst:.2e}, identity(4) {id}"))
}

/// Kronecker lift of planted certificates.
fn criterion_8() -> Outcome {
    let mut bad = 0;
    let mut worst = 0.0f64;
    let mut total = 0;
    for shape in [Shape::square(2, 2), Shape::square(3, 3)] {
        for trial in 0..100u64 {
            let beta = 1 + (trial % 3) as usize;
            let inst = planted_trial(shape, beta, 808, trial).unwrap();
            let lifted = kron_lift_certificate(&inst.certificate, 2).unwrap();
            let r = lifted.residual(&kron_power(&inst.k1, 2).unwrap(), &kron_power(&inst.k2, 2).unwrap()).unwrap();
            total += 1;
            worst = worst.max(r);
            if r >= 1e-9 || lifted.terms.len() != beta * beta {
                bad += 1;
            }
        }
    }
    Outcome::gate(bad == 0, format!("{total} lifts, {bad} bad, worst residual {worst:.1e}"))
}

/// Doubly stochastic channel as a random mixture of permutation matrices.
fn random_doubly_stochastic(n: usize, rng: &mut impl Rng) -> Channel {
    let mut m = vec![0.0; n * n];
    let w: Vec<f64> = (0..n + 2).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = w.iter().sum();
    for wk in w {
        let p = random_permutation(n, rng);
        for i in 0..n {
            m[i * n + p.target(i)] += wk / total;
        }
    }
    Channel::from_row_major(n, n, m).unwrap()
}

/// Carathéodory bounds for greedy successes, general and permutation-restricted.
fn criterion_9(reports: &[ExperimentReport]) -> Outcome {
    let mut violations = 0;
    let mut successes = 0;
    for rep in reports {
        let bound = caratheodory_bound(rep.spec.shape.n2, rep.spec.shape.m2, false).unwrap();
        for r in rep.records.iter().filter(|r| r.status == TrialStatus::Success) {
            successes += 1;
            violations += (r.s1.unwrap_or(usize::MAX) > bound) as usize;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut ds_runs = 0;
    let mut ds_success = 0;
    let mut ds_violations = 0;
    let mut ds_max = 0;
    let mut ds_capped = 0;
    for n in [3, 4] {
        let bound = (n - 1) * (n - 1) + 1;
        let cfg = OmpConfig::with_sparsity(caratheodory_bound(n, n, true).unwrap());
        for _ in 0..200 {
            let k1 = random_doubly_stochastic(n, &mut rng);
            let beta = rng.gen_range(1..=4);
            let w: Vec<f64> = (0..beta).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = w.iter().sum();
            let mut k2 = vec![0.0; n * n];
            for wk in &w {
                let (p, q) = (random_permutation(n, &mut rng), random_permutation(n, &mut rng));
                let term = q.apply_cols(&p.apply_rows(&k1).unwrap()).unwrap();
                k2.iter_mut().zip(term.as_slice()).for_each(|(a, v)| *a += wk / total * v);
            }
            let k2 = Channel::from_row_major(n, n, k2).unwrap();
            let sys = AtomSystem::build_permutation_restricted(&k1, &k2, false).unwrap();
            ds_runs += 1;
            match run_alg2(&sys, &cfg) {
                Ok(out) if out.f => {
                    ds_success += 1;
                    ds_max = ds_max.max(out.s1);
                    ds_violations += (out.s1 > bound) as usize;
                }
                Ok(_) => {}
                Err(Error::IterationLimit(_)) => ds_capped += 1,
                Err(e) => panic!("{e}"),
            }
        }
    }
    Outcome::gate(
        violations == 0 && ds_violations == 0,
        format!(
            "{successes} general successes, {violations} over n2(m2-1)+1; permutation-restricted {ds_success}/{ds_runs} successes ({ds_capped} stopped at the 50*s pass cap), max s1 {ds_max}, {ds_violations} over (n-1)^2+1"
        ),
    )
}

/// Sign law and monotone residue over at least 10⁴ accepted steps.
fn criterion_10() -> Outcome {
    const TAU: f64 = 1e-9;
    let shape = Shape::square(3, 3);
    let mut cfg = OmpConfig::for_shape(3, 3).unwrap();
    cfg.record_trace = true;
    let (mut steps, mut attempts, mut sign_bad, mut mono_bad) = (0usize, 0usize, 0usize, 0usize);
    let mut trial = 0u64;
    while steps < 10_000 {
        let inst = planted_trial(shape, 1 + (trial % 5) as usize, 1010, trial).unwrap();
        let sys = AtomSystem::build(&inst.k1, &inst.k2, false).unwrap();
        let trace = run_alg2(&sys, &cfg).unwrap().trace.unwrap();
        for a in &trace.attempts {
            if let Some(c) = a.new_coefficient {
                attempts += 1;
                if a.inner_product.abs() > TAU && (c > 0.0) != (a.inner_product > 0.0) {
                    sign_bad += 1;
                }
            }
        }
        for s in &trace.steps {
            steps += 1;
            mono_bad += (s.residue_l2_after >= s.residue_l2_before) as usize;
        }
        trial += 1;
    }
    // every candidate, including negative inner products, at random partial selections
    let mut rng = ChaCha8Rng::seed_from_u64(1011);
    let (mut probed, mut probe_bad) = (0usize, 0usize);
    for t in 0..200u64 {
        let inst = planted_trial(shape, 3, 1012, t).unwrap();
        let sys = AtomSystem::build(&inst.k1, &inst.k2, false).unwrap();
        let out = run_alg2(&sys, &OmpConfig::for_shape(3, 3).unwrap()).unwrap();
        let k = rng.gen_range(0..out.lambda.len());
        let rep = positive_ip_necessity_probe(&sys, &out.lambda[..k], cfg.epsilon, TAU).unwrap();
        probed += rep.candidates.len();
        probe_bad += rep.sign_violations + (!rep.terminal && !rep.has_positive) as usize;
    }
    Outcome::gate(
        sign_bad == 0 && mono_bad == 0 && probe_bad == 0,
        format!(
            "{steps} steps over {trial} runs, {attempts} attempts: {sign_bad} sign violations, {mono_bad} non-decreasing residues; {probed} probed candidates, {probe_bad} violations"
        ),
    )
}

/// Projection-cone probe on random non-negative matrices; counterexamples are
/// written out and do not fail the run.
fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let mut found = Vec::new();
    let mut by_size = std::collections::BTreeMap::<(usize, usize), (usize, usize)>::new();
    let mut tested = 0;
    while tested < 10_000 {
        let p = rng.gen_range(2..=8);
        let k = rng.gen_range(2..=p.min(5));
        let g = DMatrix::from_fn(p, k, |_, _| rng.gen::<f64>());
        match projection_cone_probe(&g) {
            Ok(probe) => {
                tested += 1;
                let e = by_size.entry((p, k)).or_default();
                e.0 += 1;
                if !probe.found {
                    e.1 += 1;
                    found.push(g.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>());
                }
            }
            Err(Error::RankDeficient) => {}
            Err(e) => panic!("{e}"),
        }
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("projection_cone_counterexamples.json");
    std::fs::write(&path, serde_json::to_string_pretty(&found).unwrap()).unwrap();
    let worst: Vec<String> = by_size
        .iter()
        .filter(|(_, (_, bad))| *bad > 0)
        .map(|((p, k), (n, bad))| format!("{p}x{k}: {bad}/{n}"))
        .collect();
    Outcome {
        pass: found.is_empty(),
        gating: false,
        detail: format!("{} counterexamples in {tested} matrices ({}), written to {}", found.len(), worst.join(", "), path.display()),
    }
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut run = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let mut o = f();
        let _ = write!(o.detail, " [{:.1?}]", t.elapsed());
        let status = match (o.pass, o.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-gating)",
        };
        println!("criterion {n:>2} {name}: {status} {}", o.detail);
        results.push((n, name, o));
    };

    run(1, "planted-inclusion soundness", &mut criterion_1);
    let t = Instant::now();
    let alg2: Vec<ExperimentReport> = SHAPES.iter().map(|&s| sweep(s, 10_000, 202, Algorithm::Alg2)).collect();
    let alg2_time = t.elapsed();
    let t = Instant::now();
    let alg1: Vec<ExperimentReport> = SHAPES.iter().map(|&s| sweep(s, 10_000, 303, Algorithm::Alg1)).collect();
    let alg1_time = t.elapsed();
    run(2, "backtracking no-failure replication", &mut || criterion_2(&alg2, alg2_time));
    run(3, "greedy failure rate", &mut || criterion_3(&alg1, alg1_time));
    run(4, "BSC/BEC boundary", &mut criterion_4);
    run(5, "golden doubly stochastic pair", &mut criterion_5);
    run(6, "equivalence recovery", &mut criterion_6);
    run(7, "Blahut-Arimoto capacity", &mut criterion_7);
    run(8, "Kronecker lift", &mut criterion_8);
    let both: Vec<ExperimentReport> = alg1.into_iter().chain(alg2).collect();
    run(9, "Caratheodory sparsity", &mut || criterion_9(&both));
    run(10, "greedy micro-laws", &mut criterion_10);
    run(11, "non-negative projection column", &mut criterion_11);

    let failed: Vec<usize> = results.iter().filter(|(_, _, o)| o.gating && !o.pass).map(|(n, _, _)| *n).collect();
    println!("acceptance finished in {:.1?}", start.elapsed());
    if !failed.is_empty() {
        eprintln!("gating criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
