//! Okounkov bodies of monomial series: the full series on the plane, a series
//! with a base condition on the line, and the volume against dimension counts.

use toric_arith::okounkov::{
    okounkov_body, semigroup_points, volume_vs_dimension, MonomialSeries, ValuationFlag,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let series: Vec<MonomialSeries> = (1..=3)
        .map(|m| MonomialSeries::full(m, vec![1, 0, 0]))
        .collect::<Result<_, _>>()?;
    let body = okounkov_body(&semigroup_points(&series, &ValuationFlag::origin(2))?, 3)?;
    println!(
        "full series of H_0 on P^2, levels <= 3: vertices {:?}",
        body.vertices()
    );

    let cut: Vec<MonomialSeries> = (1..=6)
        .map(|m| MonomialSeries::full(m, vec![1, 0]).map(|s| s.with_hyperplane_condition(1, 0.5)))
        .collect::<Result<_, _>>()?;
    let body = okounkov_body(&semigroup_points(&cut, &ValuationFlag::origin(1))?, 6)?;
    println!(
        "P^1 with mult along H_1 >= m/2: {:?}",
        body.bounding_box()[0]
    );

    for (d, m) in [(1, 10), (1, 30), (2, 5), (2, 15), (2, 40)] {
        let (vol, dim) = volume_vs_dimension(d, m)?;
        println!(
            "d = {d}, m = {m}: vol Δ = {vol:.4}, dim V_m / m^d = {dim:.4}, gap {:.4}",
            (vol - dim).abs()
        );
    }
    Ok(())
}
