//! Haar measure estimates with a reproducible counter-based RNG.

use padic_zoo::haar::{e_prefix_series, estimate_y0, SIGMAS};
use padic_zoo::padic::Prime;

fn main() -> padic_zoo::Result<()> {
    for p in [2, 3, 5] {
        let prime = Prime::new(p)?;
        let y0 = estimate_y0(prime, 100_000, 7)?;
        println!("p = {p}: P(Y_0) ~ {:.5} (target {:.5}, z = {:.2})", y0.estimate, y0.target, y0.z_score);
        for r in e_prefix_series(prime, 6, 100_000, 7)? {
            let mark = if r.within(SIGMAS) { "ok" } else { "off" };
            println!("  k = {}: {:.5} vs {:.5} {mark}", r.k, r.estimate, r.target);
        }
    }
    Ok(())
}
