//! Majorization screens for doubly stochastic channels.

use channel_inclusion::channel::validate;
use channel_inclusion::equivalence::decide_equivalence;
use channel_inclusion::order::{doubly_stochastic_necessary, majorizes};

fn main() -> channel_inclusion::Result<()> {
    let v = majorizes(&[0.6, 0.3, 0.1], &[0.4, 0.4, 0.2])?;
    println!("[0.6,0.3,0.1] majorizes [0.4,0.4,0.2]: {}", v.holds);
    let v = majorizes(&[0.4, 0.4, 0.2], &[0.6, 0.3, 0.1])?;
    println!("reverse: {} (first failing prefix {:?})", v.holds, v.first_violation_k);

    // Two 5x5 doubly stochastic channels whose entries majorize each other,
    // yet no permutation pair maps one onto the other.
    let f = |rows: [[u32; 5]; 5]| validate(&rows.iter().map(|r| r.iter().map(|&v| v as f64 / 15.0).collect()).collect::<Vec<_>>());
    let k1 = f([[1, 2, 3, 4, 5], [5, 1, 2, 3, 4], [4, 5, 1, 2, 3], [3, 4, 5, 1, 2], [2, 3, 4, 5, 1]])?;
    let k2 = f([[1, 2, 3, 4, 5], [5, 1, 2, 3, 4], [3, 4, 1, 5, 2], [2, 5, 4, 1, 3], [4, 3, 5, 2, 1]])?;
    println!("K2 entries majorized by K1: {}", doubly_stochastic_necessary(&k1, &k2)?.holds);
    println!("K1 entries majorized by K2: {}", doubly_stochastic_necessary(&k2, &k1)?.holds);
    let eq = decide_equivalence(&k1, &k2)?;
    println!("equivalent: {} ({:?})", eq.equivalent, eq.mismatch);
    Ok(())
}
