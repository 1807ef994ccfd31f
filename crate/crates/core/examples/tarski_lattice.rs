//! The lattice map `p -> p - s(p)` of an ex-diagonal decreasing sign field:
//! order-preserving, grid to grid, with fixed points exactly at the roots.

use monoroot::domain::enumerate_roots;
use monoroot::families::random_exdiag;
use monoroot::rootnd::{check_lattice_claims, find_tarski_fixed_point, tarski_map, BaseCase};
use monoroot::Dyadic;

fn main() -> monoroot::Result<()> {
    let inst = random_exdiag(3, 1);
    let signs = inst.signs(Dyadic::pow2(-4))?;
    let map = tarski_map(&signs);
    let report = check_lattice_claims(&map, 1 << 16)?;
    let roots = enumerate_roots(&signs, 1 << 16)?;
    println!(
        "{} points, {} adjacent pairs, {} order violations, {} escapes",
        report.points_checked,
        report.pairs_checked,
        report.order_violations.len(),
        report.escapes.len()
    );
    let same = roots.len() == report.fixed_points.len() && roots.iter().zip(&report.fixed_points).all(|(r, p)| &r.0 == p);
    println!("{} fixed points, {} roots, same set: {same}", report.fixed_points.len(), roots.len());
    let fp = find_tarski_fixed_point(&map, BaseCase::Exdiag2d)?;
    println!("solver fixed point {:?}, image {:?}", fp.0, map.apply(&fp.0)?);
    Ok(())
}
