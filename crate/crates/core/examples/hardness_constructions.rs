//! The two lifts showing which hypotheses cannot be dropped. A 3D lift of a
//! 2D map keeps every diagonal condition but only some cross conditions; a
//! 2D lift of a 1D map keeps every monotonicity condition but loses
//! switching in one component. Roots of either lift project to roots of the
//! original map.

use monoroot::discretize::{check_monotonicity, check_positive_switching, discretize, CheckConfig};
use monoroot::domain::{enumerate_roots, MonotoneProfile};
use monoroot::reductions::{
    make_dd_insufficient_instance, make_switching_necessary_instance, recover_1d_root, recover_2d_root,
    symmetric_cube, PlantedPair, DD_INSUFFICIENT_LIPSCHITZ, SWITCHING_NECESSARY_LIPSCHITZ,
};
use monoroot::{Dyadic, GridSpec, RealOracle};
use rand::SeedableRng;

fn main() -> monoroot::Result<()> {
    let cfg = CheckConfig::default();

    let planted = PlantedPair::random(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
    let g = planted.oracle();
    let f = make_dd_insufficient_instance(&g, 3)?;
    let delta = Dyadic::pow2(-6);
    let eps = DD_INSUFFICIENT_LIPSCHITZ * delta.to_f64();
    let grid = GridSpec::new(symmetric_cube(3), delta)?;
    let signs = discretize(&f, eps, &grid);
    let mono = check_monotonicity(&signs, &MonotoneProfile::canonical(3), &cfg)?;
    let switching = check_positive_switching(&signs, &cfg)?;
    println!(
        "3D lift: {}/9 canonical monotonicity conditions, {}/3 switching conditions",
        mono.holding_count(),
        switching.holding_count()
    );
    for c in mono.conditions.iter().filter(|c| !c.holds) {
        println!("  fails: f{} monotone in x{} ({} violating pairs)", c.component + 1, c.variable.unwrap() + 1, c.violations);
    }
    let roots = enumerate_roots(&signs, 1 << 22)?;
    let mut recovered = 0;
    for r in &roots {
        if recover_2d_root(&g, &grid.coords_f64(&r.0), eps).is_ok() {
            recovered += 1;
        }
    }
    println!(
        "  {} grid eps-roots, {recovered} project to 3eps-roots of g; planted root {:?}",
        roots.len(),
        planted.root
    );

    let g1 = RealOracle::new(1, |x: &[f64]| vec![-0.5 * (x[0] - 0.25)]);
    let f = make_switching_necessary_instance(&g1)?;
    let delta = Dyadic::pow2(-8);
    let eps = SWITCHING_NECESSARY_LIPSCHITZ * delta.to_f64();
    let grid = GridSpec::new(symmetric_cube(2), delta)?;
    let signs = discretize(&f, eps, &grid);
    let mono = check_monotonicity(&signs, &MonotoneProfile::canonical(2), &cfg)?;
    let switching = check_positive_switching(&signs, &cfg)?;
    let roots = enumerate_roots(&signs, 1 << 22)?;
    let recovered = roots
        .iter()
        .filter(|r| recover_1d_root(&g1, &grid.coords_f64(&r.0), eps).is_ok())
        .count();
    println!(
        "2D lift of -0.5 (x - 0.25): {}/4 monotonicity, {}/2 switching; {} eps-roots, {recovered} project to 3eps-roots",
        mono.holding_count(),
        switching.holding_count(),
        roots.len()
    );
    Ok(())
}
