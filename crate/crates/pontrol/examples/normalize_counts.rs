//! Head counts to fractions: normalize a raw population snapshot and
//! rescale the per-person transmission rates to the fraction-valued
//! system.
//!
//! A city of 10^7 with 1500 infections seeded (500 exposed, 800
//! asymptomatic, 200 symptomatic) becomes the initial state used by all
//! other examples.

use pontrol::model::{normalize, r0_basic, EpidemicParams, RawPopulation};

fn main() -> pontrol::Result<()> {
    let raw = RawPopulation::new(
        1.0e7 - 1500.0, // susceptible
        500.0,          // exposed
        800.0,          // infectious, asymptomatic
        200.0,          // infectious, symptomatic
        0.0,            // recovered
        1.0e7,          // total
        2.5817e-8,      // per-person transmission from asymptomatic
        2.5817e-9,      // per-person transmission from symptomatic
    )?;

    let (state, (beta1, beta2)) = normalize(&raw)?;
    println!("normalized initial state:");
    println!("  s = {:.6}", state.s);
    println!("  e = {:.6e}", state.e);
    println!("  i = {:.6e}", state.i);
    println!("  j = {:.6e}", state.j);
    println!("  r = {:.6}", state.r);
    println!("  n = {:.6}", state.n);
    println!("  conservation residual = {:.3e}", state.conservation_residual());

    println!("\nscaled transmission rates (1/day):");
    println!("  beta1 = {beta1:.6}");
    println!("  beta2 = {beta2:.6}");

    let params = EpidemicParams::covid(beta1, beta2)?;
    println!("\nbasic reproduction number: {:.4}", r0_basic(&params)?);
    Ok(())
}
