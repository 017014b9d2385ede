//! Greedy sparse certificates on a planted instance.

use channel_inclusion::atoms::{verify_certificate, AtomSystem};
use channel_inclusion::experiment::{planted_trial, Shape};
use channel_inclusion::omp::{run_alg1, run_alg2, OmpConfig};

fn main() -> channel_inclusion::Result<()> {
    let inst = planted_trial(Shape::square(3, 3), 3, 7, 0)?;
    let sys = AtomSystem::build(&inst.k1, &inst.k2, false)?;
    let mut cfg = OmpConfig::for_shape(3, 3)?;
    cfg.record_trace = true;
    println!("{} columns, sparsity cap {}", sys.num_columns(), cfg.s);

    let out = run_alg1(&sys, &cfg)?;
    println!("greedy: f={} s1={} residue {:.1e}", out.f, out.s1, out.residue_inf);
    for step in &out.trace.as_ref().expect("trace requested").steps {
        println!("  depth {} residue {:.3e} -> {:.3e}", step.depth, step.residue_l2_before, step.residue_l2_after);
    }
    let cert = out.certificate(&sys);
    println!("verified: {}", verify_certificate(&sys, &cert, 1e-7)?);
    for (&alpha, w) in cert.atom_indices.iter().zip(&cert.weights) {
        let (r, t) = sys.atom(alpha)?;
        println!("  {w:.4} · R{:?} K1 T{:?}", r.map(), t.map());
    }

    let out = run_alg2(&sys, &cfg)?;
    println!("backtracking: f={} s1={} passes {}", out.f, out.s1, out.t_act);
    println!("{}", serde_json::to_string(&out)?);
    Ok(())
}
