//! Equivalence up to input and output permutations, with the assumption
//! report that makes a negative verdict exact.

use channel_inclusion::channel::{Channel, PureChannel};
use channel_inclusion::equivalence::{check_assumptions, decide_equivalence};

fn main() -> channel_inclusion::Result<()> {
    let k1 = Channel::from_row_major(3, 3, vec![0.6, 0.3, 0.1, 0.2, 0.5, 0.3, 0.1, 0.1, 0.8])?;
    let r = PureChannel::new(3, vec![2, 0, 1])?;
    let t = PureChannel::new(3, vec![1, 2, 0])?;
    let k2 = t.apply_cols(&r.apply_rows(&k1)?)?;

    let report = check_assumptions(&k1)?;
    println!("capacity {:.6} bits, row-drop capacities {:?}", report.as1.capacity, report.as1.row_drop_capacities);
    println!("assumptions hold: {}", report.all_hold());

    let v = decide_equivalence(&k1, &k2)?;
    println!(
        "equivalent {} via {:?}: R {:?}, T {:?}, residual {:?}",
        v.equivalent,
        v.method,
        v.r.as_ref().map(PureChannel::map),
        v.t.as_ref().map(PureChannel::map),
        v.residual
    );
    let v = decide_equivalence(&Channel::bsc(0.1)?, &Channel::bsc(0.2)?)?;
    println!("BSC(0.1) vs BSC(0.2): equivalent {} ({:?})", v.equivalent, v.mismatch);
    Ok(())
}
