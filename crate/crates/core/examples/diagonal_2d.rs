//! Nested bisection for a map increasing in its own variable, with no
//! condition on the cross terms.

use monoroot::families::random_monotone_2d;
use monoroot::root2d::find_root_diag;
use monoroot::Dyadic;

fn main() -> monoroot::Result<()> {
    for seed in 0..4 {
        let inst = random_monotone_2d(seed);
        let delta = Dyadic::pow2(-14);
        let grid = inst.grid(delta)?;
        let root = find_root_diag(&inst.signs(delta)?)?;
        let x = grid.coords_f64(&root.point.0);
        let v = inst.oracle.eval(&x)?;
        println!(
            "seed {seed}: x = ({:.5}, {:.5}), |f| = {:.1e} <= eps {:.1e}, {} evaluations, {} outer probes, ended {:?}",
            x[0],
            x[1],
            v[0].abs().max(v[1].abs()),
            inst.epsilon_for(delta),
            root.trace.evaluations,
            root.trace.outer_probes.len(),
            root.trace.terminal
        );
    }
    Ok(())
}
