//! Asymptotic multiplicities: the closed form over Θ, the oracle's finite
//! level approximants, and the profile along a twist.

use toric_arith::divisor::{
    discrete_lipschitz, mu_monotone_continuity_profile, mu_r, Center, ToricArithDivisor,
};
use toric_arith::oracle::mu_q_approx;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = ToricArithDivisor::canonical(&[0.25, 2.0])?;
    for center in [
        Center::Hyperplane(1),
        Center::Hyperplane(0),
        Center::VerticalFiber(2),
    ] {
        println!("μ_R at {center:?} = {:.6}", mu_r(&d, center)?);
    }
    let approx = mu_q_approx(&d, Center::Hyperplane(1), &[10, 25, 50, 100, 200])?;
    for (n, v) in &approx.levels {
        println!("    level {n}: {v:?}");
    }
    let lambdas: Vec<f64> = (0..15).map(|k| -0.5 + 0.25 * k as f64).collect();
    let profile = mu_monotone_continuity_profile(&d, Center::Hyperplane(1), &lambdas)?;
    for (l, m) in &profile {
        println!("λ = {l:5.2}: μ = {m:.6}");
    }
    println!(
        "discrete Lipschitz constant {:.4}",
        discrete_lipschitz(&profile)
    );
    Ok(())
}
