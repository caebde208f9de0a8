//! Zariski decomposition of a non-nef divisor on the arithmetic surface, with
//! its verification reports.

use toric_arith::divisor::ToricArithDivisor;
use toric_arith::zariski::{
    check_multiplicity_identity, greatest_nef_minorant, verify_zariski, SolverConfig, VOLUME_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for a in [[0.25, 2.0], [0.6, 0.6], [2.0, 2.0]] {
        let d = ToricArithDivisor::canonical(&a)?;
        let dec = greatest_nef_minorant(&d, &SolverConfig::default())?;
        let report = verify_zariski(&d, &dec, VOLUME_TOL)?;
        let mu = check_multiplicity_identity(&d, &dec, 1e-3)?;
        println!(
            "a = {a:?}: N = {:.6} H_0 + {:.6} H_1, vol D = {:.6}, vol P = {:.6}, verified {}, μ identity {}",
            dec.negative.e0, dec.negative.e1, report.vol_input, report.vol_positive, report.pass, mu.pass
        );
        for c in &mu.checks {
            println!(
                "    {:?}: μ_R = {:.6}, coefficient {:.6}",
                c.center, c.mu_r, c.coefficient
            );
        }
    }
    Ok(())
}
