//! Collects planted instances on which Algorithm 1 fails and re-runs them
//! through the backtracking solver.
//!
//! cargo run --release --example harvest_failures -- [trials] [beta] [seed]

use channel_inclusion::atoms::AtomSystem;
use channel_inclusion::experiment::{planted_trial, Shape};
use channel_inclusion::omp::{run_alg1, run_alg2, OmpConfig};
use rayon::prelude::*;

fn main() -> channel_inclusion::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let trials = args.first().copied().unwrap_or(100_000);
    let beta = args.get(1).copied().unwrap_or(1) as usize;
    let seed = args.get(2).copied().unwrap_or(2024);
    let shape = Shape::square(3, 3);
    let cfg = OmpConfig::for_shape(shape.n2, shape.m2)?;

    let failed: Vec<u64> = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let inst = planted_trial(shape, beta, seed, t).expect("valid shape");
            let sys = AtomSystem::build(&inst.k1, &inst.k2, false).expect("small system");
            !run_alg1(&sys, &cfg).expect("alg1 has no error path here").f
        })
        .collect();
    println!("alg1 failed on {} of {trials} trials (beta {beta}, seed {seed})", failed.len());

    for t in failed {
        let inst = planted_trial(shape, beta, seed, t)?;
        let sys = AtomSystem::build(&inst.k1, &inst.k2, false)?;
        let one = run_alg1(&sys, &cfg)?;
        let two = run_alg2(&sys, &cfg)?;
        println!(
            "trial {t}: alg1 s1={} residue={:.3e} | alg2 f={} s1={} t_act={} residue={:.3e}",
            one.s1, one.residue_inf, two.f, two.s1, two.t_act, two.residue_inf
        );
    }
    Ok(())
}
