//! JSON instance files.
//!
//! ```json
//! {"family": "linear", "matrix": [[1, 0], [0, 1]], "offset": [-0.3, -0.6]}
//! {"family": "random-exdiag", "dim": 3, "seed": 4}
//! {"family": "signs", "cells": [2, 2], "values": [[-1, -1], [-1, 0], ...]}
//! ```
//!
//! Real-valued instances are discretized at the requested spacing with
//! `ε = L·δ` unless the file sets `epsilon`. Cake instances use their own
//! format, see [`crate::cake::CakeSpec`].

use std::path::Path;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::domain::{BoxDomain, GridSpec, MonotoneProfile, RealOracle, SignField, SignOracle, SignVector};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::families::{self, Family, Generated, RealInstance};
use crate::reductions::{self, PlantedPair};
use crate::root2d::Mode2D;

fn default_seed() -> u64 {
    0
}

fn default_dim() -> usize {
    2
}

fn default_cells() -> u64 {
    64
}

fn default_mode() -> Mode2D {
    Mode2D::Diag
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceKind {
    /// `f(x) = A x + b`, by default on the unit cube.
    Linear {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
        #[serde(default)]
        lower: Option<Vec<Dyadic>>,
        #[serde(default)]
        upper: Option<Vec<Dyadic>>,
    },
    Switching1d {
        #[serde(default = "default_cells")]
        cells: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    RandomMonotone2d {
        #[serde(default = "default_seed")]
        seed: u64,
    },
    RandomSum2d {
        #[serde(default = "default_seed")]
        seed: u64,
    },
    RandomExdiag {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    Separable {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    RotatedLinear {
        #[serde(default = "default_mode")]
        mode: Mode2D,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    Staircase {
        #[serde(default = "default_mode")]
        mode: Mode2D,
        #[serde(default = "default_cells")]
        cells: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    Recursive3d {
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// The 3-dimensional lift of a planted 2-dimensional map on `[-1,1]^d`.
    DdInsufficient {
        #[serde(default = "dd_dim")]
        dim: usize,
        #[serde(default)]
        planted: Option<PlantedPair>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// The 2-dimensional lift of `g(t) = slope · (t - root)` on `[-1,1]^2`.
    SwitchingNecessary { slope: f64, root: f64 },
    /// An explicit sign table over a grid with `cells[j]` cells per axis,
    /// in lexicographic order with the last axis fastest.
    Signs { cells: Vec<u64>, values: Vec<Vec<i8>> },
}

fn dd_dim() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub kind: InstanceKind,
    /// Overrides the sign threshold `L·δ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// A parsed instance ready to be discretized.
pub struct Instance {
    pub source: InstanceFile,
    pub generated: Generated,
    /// Monotonicity conditions the instance is constructed to satisfy.
    pub declared: MonotoneProfile,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("instance JSON: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_family(family: Family, dim: usize, mode: Mode2D, cells: u64, seed: u64) -> Self {
        let kind = match family {
            Family::Switching1d => InstanceKind::Switching1d { cells, seed },
            Family::RandomMonotone2d => InstanceKind::RandomMonotone2d { seed },
            Family::RandomSum2d => InstanceKind::RandomSum2d { seed },
            Family::RandomExdiag => InstanceKind::RandomExdiag { dim, seed },
            Family::Separable => InstanceKind::Separable { dim, seed },
            Family::RotatedLinear => InstanceKind::RotatedLinear { mode, seed },
            Family::Staircase => InstanceKind::Staircase { mode, cells, seed },
            Family::Recursive3d => InstanceKind::Recursive3d { seed },
        };
        InstanceFile { kind, epsilon: None }
    }

    pub fn build(&self) -> Result<Instance> {
        let gen = |family, dim, mode, cells, seed| families::generate(family, dim, mode, cells, seed);
        let (generated, declared) = match &self.kind {
            InstanceKind::Linear {
                matrix,
                offset,
                lower,
                upper,
            } => {
                let d = offset.len();
                if d == 0 || matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
                    return Err(Error::Input(format!("linear instance needs a {d}x{d} matrix")));
                }
                if matrix.iter().flatten().chain(offset).any(|v| !v.is_finite()) {
                    return Err(Error::Input("linear instance has non-finite entries".into()));
                }
                let domain = match (lower, upper) {
                    (None, None) => BoxDomain::unit(d),
                    (Some(l), Some(u)) => BoxDomain::new(l.clone(), u.clone())?,
                    _ => return Err(Error::Input("give both lower and upper, or neither".into())),
                };
                let profile = linear_profile(matrix);
                (
                    Generated::Real(families::linear(matrix.clone(), offset.clone(), domain)),
                    profile,
                )
            }
            InstanceKind::Switching1d { cells, seed } => (
                gen(Family::Switching1d, 1, Mode2D::Diag, *cells, *seed)?,
                MonotoneProfile::empty(1),
            ),
            InstanceKind::RandomMonotone2d { seed } => (
                gen(Family::RandomMonotone2d, 2, Mode2D::Diag, 0, *seed)?,
                Family::RandomMonotone2d.profile(2),
            ),
            InstanceKind::RandomSum2d { seed } => (
                gen(Family::RandomSum2d, 2, Mode2D::Sum, 0, *seed)?,
                Family::RandomSum2d.profile(2),
            ),
            InstanceKind::RandomExdiag { dim, seed } => {
                check_dim(*dim)?;
                (
                    gen(Family::RandomExdiag, *dim, Mode2D::Exdiag, 0, *seed)?,
                    Family::RandomExdiag.profile(*dim),
                )
            }
            InstanceKind::Separable { dim, seed } => {
                check_dim(*dim)?;
                (
                    gen(Family::Separable, *dim, Mode2D::Diag, 0, *seed)?,
                    Family::Separable.profile(*dim),
                )
            }
            InstanceKind::RotatedLinear { mode, seed } => (
                gen(Family::RotatedLinear, 2, *mode, 0, *seed)?,
                mode_profile(*mode),
            ),
            InstanceKind::Staircase { mode, cells, seed } => (
                gen(Family::Staircase, 2, *mode, *cells, *seed)?,
                mode_profile(*mode),
            ),
            InstanceKind::Recursive3d { seed } => (
                gen(Family::Recursive3d, 3, Mode2D::Exdiag, 0, *seed)?,
                Family::Recursive3d.profile(3),
            ),
            InstanceKind::DdInsufficient { dim, planted, seed } => {
                let p = planted.unwrap_or_else(|| PlantedPair::random(&mut rand_chacha::ChaCha8Rng::seed_from_u64(*seed)));
                let oracle = reductions::make_dd_insufficient_instance(p.oracle(), *dim)?;
                (
                    Generated::Real(RealInstance {
                        oracle,
                        domain: reductions::symmetric_cube(*dim),
                        lipschitz: reductions::DD_INSUFFICIENT_LIPSCHITZ,
                    }),
                    reductions::dd_insufficient_profile(*dim),
                )
            }
            InstanceKind::SwitchingNecessary { slope, root } => {
                if !(slope.abs() <= 1.0 && root.is_finite()) {
                    return Err(Error::Input(format!("need |slope| <= 1, got {slope}")));
                }
                let (a, r) = (*slope, *root);
                let g = RealOracle::new(1, move |t: &[f64]| vec![a * (t[0] - r)]);
                (
                    Generated::Real(RealInstance {
                        oracle: reductions::make_switching_necessary_instance(g)?,
                        domain: reductions::symmetric_cube(2),
                        lipschitz: reductions::SWITCHING_NECESSARY_LIPSCHITZ,
                    }),
                    reductions::switching_necessary_profile(),
                )
            }
            InstanceKind::Signs { cells, values } => {
                let grid = sign_table_grid(cells)?;
                let d = cells.len();
                let expected = grid.point_count();
                if values.len() as u128 != expected || values.iter().any(|v| v.len() != d || v.iter().any(|s| !(-1..=1).contains(s))) {
                    return Err(Error::Input(format!(
                        "sign table needs {expected} vectors of {d} entries in -1, 0, 1"
                    )));
                }
                let values = values.clone();
                let sizes: Vec<i64> = cells.iter().map(|&c| c as i64 + 1).collect();
                let oracle = SignOracle::new(grid, move |i: &[i64]| {
                    let flat = i.iter().zip(&sizes).fold(0i64, |acc, (&x, &n)| acc * n + x);
                    SignVector::from_i8(&values[flat as usize])
                });
                (Generated::Grid(oracle), MonotoneProfile::empty(d))
            }
        };
        if let Some(e) = self.epsilon {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::Input(format!("epsilon must be non-negative, got {e}")));
            }
        }
        Ok(Instance {
            source: self.clone(),
            generated,
            declared,
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if !(1..=8).contains(&dim) {
        return Err(Error::Input(format!("dimension must be between 1 and 8, got {dim}")));
    }
    Ok(())
}

fn sign_table_grid(cells: &[u64]) -> Result<GridSpec> {
    if cells.is_empty() || cells.iter().any(|c| !c.is_power_of_two()) {
        return Err(Error::Input(format!("sign table cells must be powers of two, got {cells:?}")));
    }
    let finest = *cells.iter().max().unwrap();
    let delta = Dyadic::pow2(-(finest.trailing_zeros() as i32));
    let upper: Vec<Dyadic> = cells.iter().map(|&c| delta.mul_int(c as i64)).collect();
    GridSpec::new(BoxDomain::new(vec![Dyadic::ZERO; cells.len()], upper)?, delta)
}

fn mode_profile(mode: Mode2D) -> MonotoneProfile {
    use crate::domain::Monotonicity::*;
    let p = MonotoneProfile::empty(2).with(0, 0, Increasing);
    match mode {
        Mode2D::Exdiag => p.with(0, 1, Decreasing),
        _ => p,
    }
}

/// Sign pattern of the matrix as a profile: positive diagonal entries are
/// increasing conditions, non-positive off-diagonal ones decreasing.
fn linear_profile(matrix: &[Vec<f64>]) -> MonotoneProfile {
    use crate::domain::Monotonicity::*;
    let d = matrix.len();
    let mut p = MonotoneProfile::empty(d);
    for (i, row) in matrix.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            if i == j && a >= 0.0 {
                p = p.with(i, j, Increasing);
            } else if i != j && a <= 0.0 {
                p = p.with(i, j, Decreasing);
            }
        }
    }
    p
}

impl Instance {
    pub fn dim(&self) -> usize {
        self.generated.dim()
    }

    /// Sign threshold at spacing `delta`: the file's `epsilon` or `L·δ`.
    pub fn epsilon_for(&self, delta: Dyadic) -> Option<f64> {
        match &self.generated {
            Generated::Real(r) => Some(self.source.epsilon.unwrap_or_else(|| r.epsilon_for(delta))),
            Generated::Grid(_) => None,
        }
    }

    /// The sign field at spacing `delta`. Grid instances carry their own
    /// grid and ignore `delta`.
    pub fn signs(&self, delta: Dyadic) -> Result<Box<dyn SignField + '_>> {
        match &self.generated {
            Generated::Real(r) => {
                let grid = r.grid(delta)?;
                let eps = self.epsilon_for(delta).expect("real instance");
                Ok(Box::new(crate::discretize::discretize(&r.oracle, eps, &grid)))
            }
            Generated::Grid(g) => Ok(Box::new(g)),
        }
    }

    /// Grid used by [`signs`](Self::signs) at spacing `delta`.
    pub fn grid(&self, delta: Dyadic) -> Result<GridSpec> {
        match &self.generated {
            Generated::Real(r) => r.grid(delta),
            Generated::Grid(g) => Ok(g.grid().clone()),
        }
    }
}
