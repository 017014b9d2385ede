//! Reading, writing and combining channels.

use channel_inclusion::channel::{compose, kron_power, parse_csv, parse_json, to_json, Channel, PureChannel};

fn main() -> channel_inclusion::Result<()> {
    let k = parse_csv("0.9, 0.1\n0.2, 0.8\n")?;
    println!("from CSV: {}", to_json(&k));
    let same = parse_json(r#"{"rows":2,"cols":2,"p":[[0.9,0.1],[0.2,0.8]]}"#)?;
    assert_eq!(k, same);

    // rows that miss 1 by more than the validation tolerance are rejected
    match parse_csv("0.5,0.6\n0.5,0.5\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let swap = PureChannel::new(2, vec![1, 0])?;
    println!("outputs swapped: {:?}", swap.apply_cols(&k)?.to_rows());

    let erase = Channel::bec(0.2)?;
    let r = Channel::uniform(3, 2);
    println!("R·BEC·T = {:?}", compose(&r, &erase, &Channel::from_row_major(3, 2, vec![1.0, 0.0, 0.5, 0.5, 0.0, 1.0])?)?.to_rows());

    let k2 = kron_power(&k, 2)?;
    println!("K⊗K is {}x{}; first row {:?}", k2.rows(), k2.cols(), k2.row(0));
    Ok(())
}
