//! Atom systems: enumeration, dedup, permutation restriction and the
//! on-disk cache.

use channel_inclusion::atoms::{caratheodory_bound, AtomSystem};
use channel_inclusion::channel::Channel;

fn main() -> channel_inclusion::Result<()> {
    let k1 = Channel::from_row_major(3, 3, vec![0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5])?;
    let k2 = Channel::uniform(3, 3);
    let raw = AtomSystem::build(&k1, &k2, false)?;
    let dedup = AtomSystem::build(&k1, &k2, true)?;
    println!("{} atoms, {} distinct columns", raw.atom_count(), dedup.num_columns());
    let perm = AtomSystem::build_permutation_restricted(&k1, &k2, true)?;
    println!("{} permutation atoms, {} distinct", perm.atom_count(), perm.num_columns());
    println!(
        "sparsity bounds: general {}, doubly stochastic {}",
        caratheodory_bound(3, 3, false)?,
        caratheodory_bound(3, 3, true)?
    );

    let path = std::env::temp_dir().join("chanincl-example-atoms.bin");
    let built = AtomSystem::load_or_build(&path, &k1, &k2, true, || AtomSystem::build(&k1, &k2, true))?;
    let loaded = AtomSystem::load(&path)?;
    println!("cache at {} round-trips: {}", path.display(), loaded.a() == built.a());
    std::fs::remove_file(&path)?;
    Ok(())
}
