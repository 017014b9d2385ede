//! Deficiency LPs over the pure-atom polytope, and basis pursuit.

use channel_inclusion::atoms::AtomSystem;
use channel_inclusion::channel::Channel;
use channel_inclusion::lp::{basis_pursuit, shannon_deficiency, total_variation_deficiency};

fn main() -> channel_inclusion::Result<()> {
    let k1 = Channel::bec(0.3)?;
    let k2 = Channel::bsc(0.1)?;
    let sys = AtomSystem::build(&k1, &k2, true)?;
    println!("{} atoms, {} distinct columns", sys.atom_count(), sys.num_columns());
    let row = shannon_deficiency(&sys)?;
    let tv = total_variation_deficiency(&sys)?;
    println!("row-bound deficiency {:.6}, total-variation deficiency {:.6}", row.value, tv.value);

    let k1 = Channel::bec(0.15)?;
    let sys = AtomSystem::build(&k1, &k2, true)?;
    let res = shannon_deficiency(&sys)?;
    let cert = res.certificate(&sys);
    println!("BEC(0.15) includes BSC(0.1): {} with {} atoms, residual {:.1e}", res.included, cert.len(), cert.residual_inf);
    let bp = basis_pursuit(&sys)?;
    println!("basis pursuit support {:?}, objective {:.6}", bp.support, bp.objective);
    Ok(())
}
