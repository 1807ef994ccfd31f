//! Bisection on a sign sequence and on a discretized real function.

use monoroot::bisection::{bisect_slice, solve_field_1d, Orientation};
use monoroot::discretize::discretize;
use monoroot::{Dyadic, GridSpec, RealOracle, Sign};

fn main() -> monoroot::Result<()> {
    let seq: Vec<Sign> = [-1, -1, -1, 0, 1, 1, 0, 1, 1].iter().map(|&v| Sign::of_i8(v)).collect();
    let b = bisect_slice(&seq, Orientation::Positive)?;
    println!("sequence root at index {} after {} probes", b.root, b.evaluations());

    // cos(3x) - x has a single crossing in [0, 1]; its slope is at most 4
    let f = RealOracle::new(1, |x: &[f64]| vec![x[0] - (3.0 * x[0]).cos()]);
    let delta = Dyadic::pow2(-16);
    let eps = 4.0 * delta.to_f64();
    let grid = GridSpec::unit(1, delta)?;
    let signs = discretize(&f, eps, &grid);
    let b = solve_field_1d(&signs, Orientation::Positive)?;
    let x = grid.coords_f64(&[b.root])[0];
    println!("x = {x:.6}, f(x) = {:+.2e}, {} evaluations on {} cells", f.eval(&[x])?[0], signs.evaluations(), 1 << 16);
    Ok(())
}
