//! Near envy-free division of [0, 1] into three pieces among groups of
//! agents with piecewise-constant valuations.

use monoroot::cake::{solve_three_groups, verify_near_envy_free, CakeInstance, Valuation};
use monoroot::Dyadic;
use num_bigint::BigInt;
use num_rational::BigRational;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn main() -> monoroot::Result<()> {
    let agents = vec![
        Valuation::uniform(),
        Valuation::piecewise_constant(&[q(0, 1), q(1, 2), q(1, 1)], &[q(3, 1), q(1, 1)])?,
        Valuation::piecewise_constant(&[q(0, 1), q(1, 4), q(3, 4), q(1, 1)], &[q(0, 1), q(1, 1), q(5, 1)])?,
        Valuation::piecewise_constant(&[q(0, 1), q(1, 3), q(1, 1)], &[q(1, 1), q(2, 1)])?,
        Valuation::uniform(),
    ];
    // two agents share the first piece, two the second, one the third
    let inst = CakeInstance::new(agents, vec![2, 2, 1], &Dyadic::pow2(-12).to_rational())?;
    let alloc = solve_three_groups(&inst)?;
    let cuts: Vec<String> = alloc.cuts.iter().map(|c| format!("{:.5}", c.to_f64())).collect();
    println!("cuts {cuts:?}, assignment {:?}", alloc.assignment);
    println!("{} solver evaluations, {} valuation queries", alloc.evaluations, alloc.queries);
    let report = verify_near_envy_free(&alloc, &inst);
    for a in &report.agents {
        println!(
            "agent {} gets piece {}: certificate corner shifted by {:.2e} (r = {}), weakly best there: {}",
            a.agent, a.piece, a.shift, alloc.r, a.maximal
        );
    }
    println!("near envy-free: {}", report.ok);
    Ok(())
}
