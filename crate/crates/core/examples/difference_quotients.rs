//! Difference quotients of a spike function, probed along witness sequences.

use padic_zoo::families::{cell, Ground, IndexSet};
use padic_zoo::padic::{PadicNumber, Prime};
use padic_zoo::quotient::{phi_r, probe_derivative, probe_strict};
use padic_zoo::zoo::spikes::{spike_function, spike_pairs};

fn main() -> padic_zoo::Result<()> {
    let p = Prime::new(3)?;
    let set = IndexSet::new(1, 0, Ground::Naturals)?;
    let f = spike_function(set);
    let zero = PadicNumber::zero(p);

    // along p^n with n in N the quotient is p^n; off N it is exactly 0
    let towards_zero = set.iter().map(|n| (n, PadicNumber::p_power(p, n as i64, 1)));
    let trace = probe_derivative(&*f, &zero, towards_zero, 10)?;
    println!("Phi_1 f(p^n, 0) for n in N:");
    for r in &trace.rows {
        println!("  n = {:>2}  |q| = {}", r.index, r.norm);
    }
    println!("verdict: {}", serde_json::to_string(&trace.verdict).unwrap());

    // pairs straddling the spike edges keep a unit quotient, so f is not strictly differentiable at 0
    let members = cell(&[set], &[true])?;
    let strict = probe_strict(&*f, spike_pairs(p, &members, 8), 8)?;
    for r in &strict.rows {
        println!("  n = {:>2}  Phi_1 = {}", r.index, r.quotient);
    }
    println!("strict verdict: {}", serde_json::to_string(&strict.verdict).unwrap());

    let q2 = phi_r(&*f, &[PadicNumber::from_integer(1, p, 8), PadicNumber::from_integer(2, p, 8), PadicNumber::from_integer(4, p, 8)])?;
    println!("Phi_2 f(1, 2, 4) = {q2}");
    Ok(())
}
