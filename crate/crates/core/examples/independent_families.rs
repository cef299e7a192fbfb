//! Independent families: every choice of sets and complements meets infinitely often.

use padic_zoo::families::{cell, generate_family, isolating_cell, Ground};

fn main() -> padic_zoo::Result<()> {
    let family = generate_family(3, Ground::Naturals)?;
    for (i, set) in family.iter().enumerate() {
        let head: Vec<u64> = set.iter().take(8).collect();
        println!("N_{i}: {head:?} ...");
    }
    for mask in 0..8u32 {
        let signature: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
        let c = cell(&family, &signature)?;
        println!("{signature:?} -> {:?}", c.members_up_to(40));
    }
    let lead = isolating_cell(&family, 1)?;
    println!("in N_1 only: {:?}", lead.members_up_to(60));
    Ok(())
}
