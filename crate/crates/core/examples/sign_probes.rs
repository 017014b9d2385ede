//! Probes for the sign structure behind the backtracking solver: the
//! positive inner product check at a partial selection, and the search for
//! a column whose projection onto the others is a conic combination.

use channel_inclusion::atoms::AtomSystem;
use channel_inclusion::experiment::{planted_trial, Shape};
use channel_inclusion::omp::{projection_cone_probe, positive_ip_necessity_probe, run_alg1, OmpConfig};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> channel_inclusion::Result<()> {
    let inst = planted_trial(Shape::square(3, 3), 2, 3, 0)?;
    let sys = AtomSystem::build(&inst.k1, &inst.k2, false)?;
    let out = run_alg1(&sys, &OmpConfig::for_shape(3, 3)?)?;
    let rep = positive_ip_necessity_probe(&sys, &out.lambda[..2], 1e-8, 1e-9)?;
    println!(
        "after 2 selections: {} candidates, {} sign violations, positive candidate present: {}",
        rep.candidates.len(),
        rep.sign_violations,
        rep.has_positive
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (p, k) in [(3, 2), (5, 3), (4, 4), (6, 4), (8, 5)] {
        let trials = 500;
        let misses = (0..trials)
            .filter(|_| {
                let g = DMatrix::from_fn(p, k, |_, _| rng.gen::<f64>());
                projection_cone_probe(&g).is_ok_and(|probe| !probe.found)
            })
            .count();
        println!("{p}x{k}: {misses}/{trials} random matrices have no non-negative projection column");
    }
    Ok(())
}
