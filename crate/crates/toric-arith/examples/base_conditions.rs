//! Volumes with base conditions: a hyperplane cut, a torus-fixed point and a
//! vertical fiber, each against the unconstrained volume.

use toric_arith::divisor::{vol_hat, vol_hat_base, BaseCondition, Center, ToricArithDivisor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = ToricArithDivisor::canonical(&[2.0, 2.0])?;
    let full = vol_hat(&d)?.value;
    println!("vol = {full:.9}");
    for (center, mu) in [
        (Center::Hyperplane(1), 0.5),
        (Center::Hyperplane(0), 0.25),
        (Center::TorusFixedPoint(0), 0.5),
        (Center::VerticalFiber(2), 0.5),
    ] {
        let cut = vol_hat_base(&d, &[BaseCondition::new(center, mu)?])?.value;
        println!(
            "{center:?} with μ = {mu}: {cut:.9} (drop {:.9})",
            full - cut
        );
    }
    let plane = ToricArithDivisor::canonical(&[1.0, 1.0, 1.0])?;
    let cut = vol_hat_base(
        &plane,
        &[BaseCondition::new(Center::TorusFixedPoint(0), 0.5)?],
    )?
    .value;
    println!(
        "P^2, a = (1,1,1): vol = {:.9}, at the origin with μ = ½: {cut:.9}",
        vol_hat(&plane)?.value
    );
    Ok(())
}
