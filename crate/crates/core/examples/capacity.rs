//! Blahut–Arimoto capacity against the BSC closed form.

use channel_inclusion::channel::Channel;
use channel_inclusion::equivalence::blahut_arimoto_capacity;

fn main() -> channel_inclusion::Result<()> {
    for p in [0.01, 0.1, 0.25, 0.4] {
        let c = blahut_arimoto_capacity(&Channel::bsc(p)?, 1_000_000, 1e-12)?;
        let closed = 1.0 + p * p.log2() + (1.0 - p) * (1.0 - p).log2();
        println!("BSC({p}): {:.9} bits (closed form {closed:.9})", c.capacity);
    }
    let z = Channel::from_row_major(2, 2, vec![1.0, 0.0, 0.5, 0.5])?;
    let c = blahut_arimoto_capacity(&z, 1_000_000, 1e-12)?;
    println!("Z channel: {:.6} bits with input {:?} after {} iterations", c.capacity, c.input_dist, c.iterations);
    Ok(())
}
