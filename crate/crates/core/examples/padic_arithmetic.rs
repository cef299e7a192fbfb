//! Exact p-adic arithmetic: parsing, norms, digits and precision.

use padic_zoo::padic::{pow_one_plus, text, PadicNumber, Prime};

fn main() -> padic_zoo::Result<()> {
    let p = Prime::new(5)?;
    let x = text::parse("3/(1-p)", p, 16)?;
    let y = text::parse("p^-2 + 7", p, 16)?;
    println!("x = {x}");
    println!("y = {y}");
    println!("|x| = {}, |y| = {}", x.norm()?, y.norm()?);
    println!("x * y = {}", x.mul(&y)?);
    println!("x / y = {}", x.div(&y)?);
    println!("digits of x: {:?}", x.digits());

    // (1 + p)^(1/2) squared gives back 1 + p
    let half = PadicNumber::from_rational(1, 2, p, 20)?;
    let root = pow_one_plus(&PadicNumber::p_power(p, 1, 20), &half, 20)?;
    println!("sqrt(1 + p) = {root}");
    println!("squared = {}", root.mul(&root)?);

    // a precision-bounded value
    let z = text::parse("0 (mod p^3)", p, 16)?;
    println!("{z} has no norm: {}", z.norm().unwrap_err());
    Ok(())
}
