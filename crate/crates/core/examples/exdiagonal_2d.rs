//! The ex-diagonal solver on linear maps whose first component falls as the
//! second variable grows. The trace shows which terminal case was taken.

use monoroot::families::{linear, rotated_linear};
use monoroot::root2d::{find_root_exdiag, Mode2D};
use monoroot::{BoxDomain, Dyadic};

fn main() -> monoroot::Result<()> {
    let delta = Dyadic::pow2(-12);
    let mut cases = vec![(
        "hand-written".to_string(),
        linear(vec![vec![1.0, -0.5], vec![0.8, 1.0]], vec![-0.2, -0.7], BoxDomain::unit(2)),
    )];
    for seed in 0..3 {
        cases.push((format!("rotated seed {seed}"), rotated_linear(Mode2D::Exdiag, seed)));
    }
    for (name, inst) in &cases {
        let root = find_root_exdiag(&inst.signs(delta)?)?;
        let x = inst.grid(delta)?.coords_f64(&root.point.0);
        println!(
            "{name}: x = ({:.4}, {:.4}), {:?}, {} evaluations",
            x[0], x[1], root.trace.terminal, root.trace.evaluations
        );
    }
    Ok(())
}
