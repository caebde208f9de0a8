//! The counting oracle against the closed-form volume at growing levels.

use toric_arith::divisor::{vol_hat, vol_hat_base, BaseCondition, Center, ToricArithDivisor};
use toric_arith::oracle::volume_estimate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = ToricArithDivisor::canonical(&[2.0, 2.0])?;
    let exact = vol_hat(&d)?.value;
    let cond = [BaseCondition::new(Center::VerticalFiber(2), 0.5)?];
    let exact_cut = vol_hat_base(&d, &cond)?.value;
    println!("closed form: {exact:.6}, with ½ F_2: {exact_cut:.6}");
    for n in [50, 100, 200, 400] {
        println!(
            "n = {n:3}: oracle {:.6}, with ½ F_2 {:.6}",
            volume_estimate(&d, n, &[])?,
            volume_estimate(&d, n, &cond)?
        );
    }
    let plane = ToricArithDivisor::canonical(&[1.0, 2.0, 4.0])?;
    println!(
        "P^2, a = (1,2,4): closed form {:.6}, oracle n = 60 {:.6}",
        vol_hat(&plane)?.value,
        volume_estimate(&plane, 60, &[])?
    );
    Ok(())
}
