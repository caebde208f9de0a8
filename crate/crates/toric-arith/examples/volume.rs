//! Arithmetic volumes of the canonical family on the projective line and
//! plane, closed form against independent quadrature.

use toric_arith::divisor::{theta_region, vol_hat, ToricArithDivisor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for a in [
        vec![1.0, 1.0],
        vec![2.0, 2.0],
        vec![0.25, 2.0],
        vec![0.25, 0.25],
        vec![1.0, 2.0, 4.0],
    ] {
        let d = ToricArithDivisor::canonical(&a)?;
        let theta = theta_region(&d)?;
        let r = vol_hat(&d)?;
        println!(
            "a = {a:?}: max G = {:.6}, Θ empty = {}, vol = {:.9} (quadrature {:.9})",
            theta.max_g(),
            theta.is_empty(),
            r.value,
            r.quadrature
        );
        if let Some((lo, hi)) = theta.interval() {
            println!("    Θ = [{lo:.6}, {hi:.6}]");
        }
    }
    Ok(())
}
