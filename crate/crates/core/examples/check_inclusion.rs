//! End-to-end inclusion check: structural screens first, then the LP and a
//! sparse certificate.

use channel_inclusion::channel::Channel;
use channel_inclusion::cli::{cmd_check, CheckOptions};

fn main() -> channel_inclusion::Result<()> {
    let pairs = [
        ("BSC(0.1) vs BSC(0.2)", Channel::bsc(0.1)?, Channel::bsc(0.2)?),
        ("BEC(0.15) vs BSC(0.1)", Channel::bec(0.15)?, Channel::bsc(0.1)?),
        (
            "3x2 vs 2x2",
            Channel::from_row_major(3, 2, vec![0.95, 0.05, 0.5, 0.5, 0.1, 0.9])?,
            Channel::from_row_major(2, 2, vec![0.8, 0.2, 0.3, 0.7])?,
        ),
    ];
    for (name, k1, k2) in pairs {
        let rep = cmd_check(&k1, &k2, &CheckOptions::default())?;
        println!("{name}: included {:?} by {:?}", rep.included, rep.decided_by);
        if let Some(d) = &rep.deficiency {
            println!("  {} = {:.3e} over {} columns", d.label, d.value, d.columns);
        }
        if let Some(c) = &rep.certificate {
            println!("  certificate from {} with {} terms, residual {:.1e}", c.solver, c.certificate.terms.len(), c.residual_inf);
        }
    }
    Ok(())
}
