//! A map of the square into itself and its dual `x - f(x)`: the dual is
//! positive-switching, and a root of the dual is a fixed point of the map.

use monoroot::discretize::discretize;
use monoroot::reductions::{check_brouwer_to_miranda, dual};
use monoroot::root2d::find_root_diag;
use monoroot::{BoxDomain, Dyadic, GridSpec, RealOracle};

fn main() -> monoroot::Result<()> {
    // maps [0,1]^2 into itself; each coordinate depends only on the other
    let f = RealOracle::new(2, |x: &[f64]| vec![0.5 + 0.4 * (3.0 * x[1]).sin(), 0.2 + 0.6 * x[0] * x[0]]);
    let domain = BoxDomain::unit(2);
    let report = check_brouwer_to_miranda(&f, &domain, 2000, 1)?;
    println!(
        "escapes {}, dual switching {:?}, slope of f {:.3}, slope of dual {:.3}",
        report.escapes, report.dual_switching, report.lipschitz_f, report.lipschitz_dual
    );
    let h = dual(&f);
    // the dual is increasing in its own variable, with max-norm slope <= 1 + 1.2 + 1.2
    let delta = Dyadic::pow2(-16);
    let eps = 3.4 * delta.to_f64();
    let grid = GridSpec::new(domain, delta)?;
    let root = find_root_diag(&discretize(&h, eps, &grid))?;
    let x = grid.coords_f64(&root.point.0);
    let fx = f.eval(&x)?;
    println!(
        "fixed point ({:.5}, {:.5}), |f(x) - x| = {:.1e}, {} evaluations",
        x[0],
        x[1],
        (fx[0] - x[0]).abs().max((fx[1] - x[1]).abs()),
        root.trace.evaluations
    );
    Ok(())
}
