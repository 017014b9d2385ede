//! BSC(p) is included in BEC(ε) exactly when ε ≤ 2p; the LP agrees.

use channel_inclusion::atoms::AtomSystem;
use channel_inclusion::channel::Channel;
use channel_inclusion::lp::shannon_deficiency;
use channel_inclusion::order::bsc_bec_inclusion;

fn main() -> channel_inclusion::Result<()> {
    let p = 0.1;
    let bsc = Channel::bsc(p)?;
    println!("{:>6} {:>12} {:>12}", "eps", "closed form", "LP value");
    for k in 0..=10 {
        let eps = 0.05 * k as f64;
        let closed = bsc_bec_inclusion(p, eps)?.bsc_in_bec;
        let value = shannon_deficiency(&AtomSystem::build(&Channel::bec(eps)?, &bsc, true)?)?.value;
        println!("{eps:>6.2} {closed:>12} {value:>12.3e}");
    }
    Ok(())
}
