//! Truncation at the first zero digit pair: continuous, and nowhere differentiable on a null set.

use padic_zoo::padic::{text, Prime};
use padic_zoo::zoo::pairs::{e_deviation, e_prefix_member, random_e_prefix_point, truncation_function};

fn main() -> padic_zoo::Result<()> {
    let p = Prime::new(2)?;
    let f = truncation_function(64);
    for s in ["0", "1 + p + p^4", "1/(1-p)", "3 + p^2 + p^6"] {
        let x = text::parse(s, p, 32)?;
        println!("f({s}) = {}", f.eval(&x)?);
    }
    for i in 0..4 {
        let x = random_e_prefix_point(p, 1, i, 8);
        println!("{x}: in E prefix {}, deviation {}", e_prefix_member(&x, 8)?, e_deviation(&f, &x, 8)?);
    }
    Ok(())
}
