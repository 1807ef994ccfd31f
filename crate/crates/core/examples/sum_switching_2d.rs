//! A map that is not positive-switching on the top edge but whose partial
//! sum `f_1 + f_2` is; the sum solver still finds a root.

use monoroot::discretize::{check_positive_switching, check_sum_switching, CheckConfig};
use monoroot::families::random_sum_2d;
use monoroot::root2d::find_root_sum;
use monoroot::Dyadic;

fn main() -> monoroot::Result<()> {
    let cfg = CheckConfig::default();
    for seed in 0..3 {
        let inst = random_sum_2d(seed);
        let delta = Dyadic::pow2(-10);
        let signs = inst.signs(delta)?;
        let positive = check_positive_switching(&signs, &cfg)?;
        let sum = check_sum_switching(&signs, &cfg)?;
        let root = find_root_sum(&signs)?;
        let x = inst.grid(delta)?.coords_f64(&root.point.0);
        println!(
            "seed {seed}: positive-switching {}, sum-switching {}; root ({:.4}, {:.4}) in {} evaluations",
            positive.passed(),
            sum.passed(),
            x[0],
            x[1],
            root.trace.evaluations
        );
    }
    Ok(())
}
