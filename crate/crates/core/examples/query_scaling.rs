//! Evaluation counts against grid spacing for the planar and recursive
//! solvers, with fitted growth exponents in log(1/delta).

use monoroot::bench::{log_log_slope, parse_sweep, run_bench, BenchConfig};
use monoroot::families::Family;
use monoroot::root2d::Mode2D;

fn main() -> monoroot::Result<()> {
    for (family, dim, sweep) in [
        (Family::RandomMonotone2d, 2, "2^-4..2^-20"),
        (Family::RandomExdiag, 2, "2^-4..2^-20"),
        (Family::Recursive3d, 3, "2^-3..2^-10"),
    ] {
        let cfg = BenchConfig {
            family,
            dim,
            mode: Mode2D::Diag,
            deltas: parse_sweep(sweep)?,
            seeds: (0..50).collect(),
            timing: false,
        };
        let rows = run_bench(&cfg)?;
        let mut worst = Vec::new();
        println!("{family} (worst over {} seeds)", cfg.seeds.len());
        for delta in &cfg.deltas {
            let k = -delta.log2().unwrap();
            let w = rows.iter().filter(|r| r.delta == *delta).map(|r| r.evaluations).max().unwrap();
            worst.push((k as f64, w as f64));
            println!("  delta 2^-{k:<2} {w:>6}");
        }
        println!("  exponent {:.2}", log_log_slope(&worst));
    }
    Ok(())
}
