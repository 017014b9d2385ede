//! A certificate of K2 ⊆ K1 lifts to the Kronecker powers.

use channel_inclusion::atoms::kron_lift_certificate;
use channel_inclusion::channel::kron_power;
use channel_inclusion::experiment::{planted_trial, Shape};

fn main() -> channel_inclusion::Result<()> {
    let inst = planted_trial(Shape::square(2, 2), 3, 1, 0)?;
    for n in 1..=3 {
        let lifted = kron_lift_certificate(&inst.certificate, n)?;
        let (p1, p2) = (kron_power(&inst.k1, n)?, kron_power(&inst.k2, n)?);
        let sum: f64 = lifted.terms.iter().map(|t| t.weight).sum();
        println!(
            "N={n}: {} terms, weights sum {sum:.12}, residual {:.1e}",
            lifted.terms.len(),
            lifted.residual(&p1, &p2)?
        );
    }
    Ok(())
}
