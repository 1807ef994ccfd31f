//! Solver dispatch and evaluation-count sweeps over instance families.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bisection::{solve_field_1d, Orientation};
use crate::domain::{Counted, GridPoint, SignField};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::families::Family;
use crate::instance::{Instance, InstanceFile};
use crate::root2d::{solve_2d, Mode2D};
use crate::rootnd::{find_root_recursive, BaseCase};

/// Which solver to run on a sign field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Bisection,
    Planar(Mode2D),
    Recursive(BaseCase),
}

/// A root together with how it was found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub index: GridPoint,
    pub evaluations: u64,
    pub trace: serde_json::Value,
}

impl Solver {
    /// The solver whose hypotheses the family is built to satisfy.
    pub fn for_family(family: Family, dim: usize, mode: Mode2D) -> Solver {
        match family {
            Family::Switching1d => Solver::Bisection,
            Family::RandomMonotone2d => Solver::Planar(Mode2D::Diag),
            Family::RandomSum2d => Solver::Planar(Mode2D::Sum),
            Family::RotatedLinear | Family::Staircase => Solver::Planar(mode),
            Family::Recursive3d => Solver::Recursive(BaseCase::Exdiag2d),
            Family::RandomExdiag | Family::Separable => match dim {
                1 => Solver::Bisection,
                2 => Solver::Planar(Mode2D::Exdiag),
                _ => Solver::Recursive(BaseCase::Exdiag2d),
            },
        }
    }

    pub fn run<F: SignField + ?Sized>(self, field: &F) -> Result<SolveOutcome> {
        let want = match self {
            Solver::Bisection => Some(1),
            Solver::Planar(_) => Some(2),
            Solver::Recursive(_) => None,
        };
        if let Some(d) = want {
            if field.dim() != d {
                return Err(Error::Input(format!(
                    "this solver needs a {d}-dimensional instance, got dimension {}",
                    field.dim()
                )));
            }
        }
        Ok(match self {
            Solver::Bisection => {
                let c = Counted::new(field);
                let b = solve_field_1d(&c, Orientation::Positive)?;
                SolveOutcome {
                    index: GridPoint(vec![b.root]),
                    evaluations: c.count(),
                    trace: to_json(&b.probes),
                }
            }
            Solver::Planar(mode) => {
                let r = solve_2d(field, mode)?;
                SolveOutcome {
                    evaluations: r.trace.evaluations,
                    trace: to_json(&r.trace),
                    index: r.point,
                }
            }
            Solver::Recursive(base) => {
                let r = find_root_recursive(field, base)?;
                SolveOutcome {
                    evaluations: r.evaluations,
                    trace: to_json(&r.outer_probes),
                    index: r.point,
                }
            }
        })
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: String,
    pub d: usize,
    pub delta: Dyadic,
    pub seed: u64,
    pub evaluations: u64,
    /// Seconds; the only column that varies between identical runs.
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub family: Family,
    pub dim: usize,
    pub mode: Mode2D,
    pub deltas: Vec<Dyadic>,
    pub seeds: Vec<u64>,
    /// Record wall time; when off the column is written as 0.
    pub timing: bool,
}

/// Solves every `(seed, delta)` member of the family once. Rows are
/// ordered by seed, then by decreasing delta.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let solver = Solver::for_family(cfg.family, cfg.dim, cfg.mode);
    let mut deltas = cfg.deltas.clone();
    deltas.sort_by(|a, b| b.cmp(a));
    let mut rows = Vec::new();
    for &seed in &cfg.seeds {
        for &delta in &deltas {
            let cells = cells_for(delta)?;
            let inst: Instance = InstanceFile::from_family(cfg.family, cfg.dim, cfg.mode, cells, seed).build()?;
            let field = inst.signs(delta)?;
            let start = Instant::now();
            let out = solver.run(&*field)?;
            let elapsed = start.elapsed().as_secs_f64();
            rows.push(BenchRow {
                family: cfg.family.name().to_string(),
                d: inst.dim(),
                delta,
                seed,
                evaluations: out.evaluations,
                wall_time: if cfg.timing { elapsed } else { 0.0 },
            });
        }
    }
    Ok(rows)
}

fn cells_for(delta: Dyadic) -> Result<u64> {
    match delta.log2() {
        Some(k) if (-40..0).contains(&k) => Ok(1u64 << -k),
        _ => Err(Error::Input(format!("delta must be 2^-k with 1 <= k <= 40, got {delta}"))),
    }
}

/// Parses `2^-a..2^-b` (inclusive, either order) or a comma-separated list.
pub fn parse_sweep(s: &str) -> Result<Vec<Dyadic>> {
    let deltas: Vec<Dyadic> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (Dyadic, Dyadic) = (a.parse()?, b.parse()?);
        let (ka, kb) = match (a.log2(), b.log2()) {
            (Some(x), Some(y)) => (x.min(y), x.max(y)),
            _ => return Err(Error::Input(format!("sweep ends must be powers of two: {s:?}"))),
        };
        (ka..=kb).rev().map(Dyadic::pow2).collect()
    } else {
        s.split(',').map(|p| p.parse()).collect::<Result<_>>()?
    };
    for d in &deltas {
        cells_for(*d)?;
    }
    Ok(deltas)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("family,d,delta,seed,evaluations,wall_time\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.family, r.d, r.delta, r.seed, r.evaluations, r.wall_time
        );
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let d = parse_sweep("2^-4..2^-20").unwrap();
        assert_eq!(d.len(), 17);
        assert_eq!(d[0], Dyadic::pow2(-4));
        assert_eq!(parse_sweep("2^-3,2^-5").unwrap(), vec![Dyadic::pow2(-3), Dyadic::pow2(-5)]);
        assert!(parse_sweep("0.3..2^-4").is_err());
        assert!(parse_sweep("2").is_err());
    }

    #[test]
    fn bench_is_deterministic() {
        let cfg = BenchConfig {
            family: Family::RandomMonotone2d,
            dim: 2,
            mode: Mode2D::Diag,
            deltas: parse_sweep("2^-4..2^-10").unwrap(),
            seeds: vec![1, 2],
            timing: false,
        };
        let a = rows_to_csv(&run_bench(&cfg).unwrap());
        let b = rows_to_csv(&run_bench(&cfg).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 1 + 14);
        assert!(a.starts_with("family,d,delta,seed,evaluations,wall_time\nrandom-monotone-2d,2,2^-4,1,"));
    }

    #[test]
    fn solver_dimension_mismatch() {
        let inst = InstanceFile::from_family(Family::Separable, 3, Mode2D::Diag, 0, 0).build().unwrap();
        let field = inst.signs(Dyadic::pow2(-3)).unwrap();
        assert_eq!(Solver::Planar(Mode2D::Diag).run(&*field).unwrap_err().kind(), "input");
        assert!(Solver::Recursive(BaseCase::Bisection1d).run(&*field).is_ok());
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|k| (k as f64, 3.0 * (k as f64).powi(2))).collect();
        assert!((log_log_slope(&pts) - 2.0).abs() < 1e-12);
    }
}
