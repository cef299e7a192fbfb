//! Runs every claim of every registry entry with small budgets.

use padic_zoo::padic::Prime;
use padic_zoo::zoo::{registry, ClaimContext, ZooConfig};

fn main() -> padic_zoo::Result<()> {
    let cfg = ZooConfig::new(Prime::new(3)?);
    let ctx = ClaimContext {
        steps: 12,
        samples: 2000,
        n_max: 500,
        ..Default::default()
    };
    let mut failed = 0;
    for entry in registry(&cfg)? {
        println!("{}: {}", entry.name, entry.description);
        for claim in &entry.claims {
            let r = claim.run(&ctx)?;
            failed += usize::from(!r.passed);
            println!("  {} {}: {}", if r.passed { "PASS" } else { "FAIL" }, claim.name, r.summary);
        }
    }
    println!("{failed} claims failed");
    Ok(())
}
