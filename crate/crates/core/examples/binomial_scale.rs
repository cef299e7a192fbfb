//! The binomial scale function: a derivative that blows up along p^-n + y.

use padic_zoo::padic::{PadicNumber, Prime};
use padic_zoo::zoo::binomial::{derivative_trace, kink_function, kink_trace, scale_derivative, scale_sequence};

fn main() -> padic_zoo::Result<()> {
    let p = Prime::new(3)?;
    let beta = PadicNumber::from_integer(2, p, 64);
    let df = scale_derivative(beta.clone(), 64)?;
    let y = PadicNumber::one(p, 64);
    let trace = derivative_trace(&*df, scale_sequence(p, &y, 8)?)?;
    for r in &trace.rows {
        println!("n = {}  |f'(p^-n + 1)| = {}", r.index, r.norm);
    }

    let a = PadicNumber::zero(p);
    let kink = kink_function(PadicNumber::from_rational(1, 2, p, 64)?, a.clone(), 64)?;
    for r in &kink_trace(&*kink, &a, 5)?.rows {
        println!("kink n = {}  |Phi_1| = {}", r.index, r.norm);
    }
    Ok(())
}
