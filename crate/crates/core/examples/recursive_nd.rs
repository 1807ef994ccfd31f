//! Recursive solver in dimensions 2 to 5, with both base cases.

use monoroot::families::random_exdiag;
use monoroot::rootnd::{find_root_recursive, BaseCase};
use monoroot::Dyadic;

fn main() -> monoroot::Result<()> {
    for d in 2..=5 {
        let inst = random_exdiag(d, 7);
        let k = if d <= 3 { 10 } else { 6 };
        let delta = Dyadic::pow2(-k);
        let signs = inst.signs(delta)?;
        for base in [BaseCase::Exdiag2d, BaseCase::Bisection1d] {
            let r = find_root_recursive(&signs, base)?;
            let bound = (k as f64 + 2.0).powi(d as i32);
            println!(
                "d={d} delta=2^-{k} {base:?}: root {:?}, {} evaluations, (log2 N + 2)^d = {bound}",
                r.point.0, r.evaluations
            );
        }
    }
    Ok(())
}
