//! Near envy-free division of a cake `[0, 1]` among three groups.
//!
//! A point `x ∈ [0,1]^d` describes the partition with cuts
//! `c_i = max_{j<=i} x_j`. On the `r`-grid, `g_i(x)` counts the agents whose
//! preferred piece is `i`; between grid points `g` is interpolated on the
//! standard triangulation. With `f_i = g_i - k_i`, any point where every
//! `|f_i| <= 1/(2d²)` can be turned into an assignment by matching agents to
//! pieces they prefer at some corner of the surrounding simplex, and each
//! agent then envies nobody after moving the cuts by at most `r`.
//!
//! Pieces and groups are indexed from 0.

pub mod interp;
pub mod matching;
pub mod valuation;

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::discretize::discretize;
use crate::domain::{GridSpec, RealOracle};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::root2d::{find_root_sum, Root2DTrace};

pub use interp::{decompose, locate, SimplexPoint};
pub use matching::capacity_matching;
pub use valuation::{rational_to_f64, Rational, Valuation};

/// An agent with a query counter on its valuation.
#[derive(Debug)]
pub struct CakeAgent {
    valuation: Valuation,
    queries: AtomicU64,
}

impl Clone for CakeAgent {
    fn clone(&self) -> Self {
        CakeAgent::new(self.valuation.clone())
    }
}

impl CakeAgent {
    pub fn new(valuation: Valuation) -> Self {
        CakeAgent {
            valuation,
            queries: AtomicU64::new(0),
        }
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    /// One counted query: the value of `[a, b]`.
    pub fn value(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.valuation.value(a, b)
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }
}

/// On-disk form of an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CakeSpec {
    pub agents: Vec<Valuation>,
    pub groups: Vec<u64>,
    pub r: Rational,
}

#[derive(Debug, Clone)]
pub struct CakeInstance {
    agents: Vec<CakeAgent>,
    groups: Vec<u64>,
    r: Dyadic,
}

impl CakeInstance {
    /// Validates the instance. `r` is rounded down to a power of two so that
    /// finer grids nest inside the `r`-grid.
    pub fn new(agents: Vec<Valuation>, groups: Vec<u64>, r: &BigRational) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::Input("need at least two groups".into()));
        }
        if groups.contains(&0) {
            return Err(Error::Input(format!("every group needs at least one agent, got {groups:?}")));
        }
        let n: u64 = groups.iter().sum();
        if n != agents.len() as u64 {
            return Err(Error::Input(format!(
                "group sizes {groups:?} sum to {n} but there are {} agents",
                agents.len()
            )));
        }
        let zero = BigRational::zero();
        let one = BigRational::from_integer(BigInt::from(1));
        if r <= &zero || r >= &one {
            return Err(Error::Input(format!("r must lie in (0, 1), got {}", Rational(r.clone()))));
        }
        let r = pow2_at_most(r);
        for (i, v) in agents.iter().enumerate() {
            v.validate().map_err(|e| Error::Input(format!("agent {i}: {e}")))?;
            if !v.value(&zero, &one).is_positive() {
                return Err(Error::Input(format!("agent {i} values the whole cake at zero")));
            }
        }
        Ok(CakeInstance {
            agents: agents.into_iter().map(CakeAgent::new).collect(),
            groups,
            r,
        })
    }

    pub fn from_spec(spec: &CakeSpec) -> Result<Self> {
        CakeInstance::new(spec.agents.clone(), spec.groups.clone(), &spec.r.0)
    }

    pub fn to_spec(&self) -> CakeSpec {
        CakeSpec {
            agents: self.agents.iter().map(|a| a.valuation.clone()).collect(),
            groups: self.groups.clone(),
            r: Rational(self.r.to_rational()),
        }
    }

    pub fn agents(&self) -> &[CakeAgent] {
        &self.agents
    }

    pub fn groups(&self) -> &[u64] {
        &self.groups
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    /// Number of pieces.
    pub fn m(&self) -> usize {
        self.groups.len()
    }

    /// Dimension of the point space, one less than the number of pieces.
    pub fn d(&self) -> usize {
        self.groups.len() - 1
    }

    pub fn r(&self) -> Dyadic {
        self.r
    }

    /// Number of `r`-cells per axis.
    pub fn cells(&self) -> i64 {
        1i64 << -self.r.log2().expect("r is a power of two")
    }

    pub fn total_queries(&self) -> u64 {
        self.agents.iter().map(CakeAgent::queries).sum()
    }

    pub fn reset_queries(&self) {
        self.agents.iter().for_each(CakeAgent::reset_queries);
    }

    /// Agent counts per preferred piece at an arbitrary point, using
    /// `n · m` queries.
    pub fn g_at(&self, x: &[BigRational]) -> Vec<i64> {
        let pieces = partition_from_point(x);
        let mut g = vec![0i64; self.m()];
        for agent in &self.agents {
            g[preferred_piece(agent, &pieces)] += 1;
        }
        g
    }

    /// [`g_at`](Self::g_at) at the `r`-grid point with the given indices.
    pub fn g_on_grid(&self, index: &[i64]) -> Vec<i64> {
        let r = self.r.to_rational();
        let x: Vec<BigRational> = index.iter().map(|&i| &r * BigRational::from_integer(BigInt::from(i))).collect();
        self.g_at(&x)
    }

    /// `g` extended affinely over the standard triangulation of the
    /// `r`-grid. Costs at most `(d+1) · n · m` queries.
    pub fn interpolate_g(&self, x: &[BigRational]) -> Vec<BigRational> {
        let s = locate(x, &self.r.to_rational(), self.cells());
        s.interpolate(|corner| self.g_on_grid(corner))
    }

    /// `f_i = g_i - k_i` for the first `d` pieces.
    pub fn f_from_g(&self, g: &[BigRational]) -> Vec<BigRational> {
        g.iter()
            .zip(&self.groups)
            .take(self.d())
            .map(|(gi, &k)| gi - BigRational::from_integer(BigInt::from(k)))
            .collect()
    }

    /// The interpolated `f` as a real oracle on `[0,1]^d`. Points must be
    /// exactly representable; the values returned are exact whenever they
    /// are dyadic, which holds on every grid finer than `r`.
    pub fn real_oracle(&self) -> RealOracle<'_> {
        RealOracle::new(self.d(), move |x: &[f64]| {
            let point: Option<Vec<BigRational>> = x
                .iter()
                .map(|&xi| {
                    (0.0..=1.0)
                        .contains(&xi)
                        .then(|| Dyadic::from_f64(xi).map(Dyadic::to_rational))
                        .flatten()
                })
                .collect();
            match point {
                Some(p) => self.f_from_g(&self.interpolate_g(&p)).iter().map(rational_to_f64).collect(),
                None => vec![f64::NAN; x.len()],
            }
        })
    }

    /// Sign threshold for the solver, `1 / (2d²)`.
    pub fn epsilon(&self) -> f64 {
        1.0 / (2.0 * (self.d() * self.d()) as f64)
    }

    /// Lipschitz constant of `f` with respect to the ℓ1 norm.
    pub fn lipschitz(&self) -> f64 {
        self.n() as f64 / self.r.to_f64()
    }

    /// Grid step for the solver: the largest power of two at most
    /// `ε / L = r / (2d² n)`.
    pub fn solver_delta(&self) -> Dyadic {
        let denom = (2 * self.d() * self.d() * self.n()) as u64;
        let shift = 64 - (denom - 1).leading_zeros() as i32;
        Dyadic::pow2(self.r.log2().unwrap() - shift)
    }
}

fn pow2_at_most(r: &BigRational) -> Dyadic {
    // r in (0, 1): find k with 2^-k <= r < 2^-(k-1)
    let mut k = 1;
    let two = BigRational::from_integer(BigInt::from(2));
    let mut p = BigRational::from_integer(BigInt::from(1)) / &two;
    while &p > r {
        p /= &two;
        k += 1;
    }
    Dyadic::pow2(-k)
}

/// Cut positions `c_i = max_{j<=i} x_j`.
pub fn cuts_from_point(x: &[BigRational]) -> Vec<BigRational> {
    let mut cuts: Vec<BigRational> = Vec::with_capacity(x.len());
    for xi in x {
        let c = match cuts.last() {
            Some(prev) if prev > xi => prev.clone(),
            _ => xi.clone(),
        };
        cuts.push(c);
    }
    cuts
}

/// The `d + 1` pieces `[0, c_1], [c_1, c_2], ..., [c_d, 1]`, possibly empty.
pub fn partition_from_point(x: &[BigRational]) -> Vec<(BigRational, BigRational)> {
    pieces_from_cuts(&cuts_from_point(x))
}

pub fn pieces_from_cuts(cuts: &[BigRational]) -> Vec<(BigRational, BigRational)> {
    let mut ends = vec![BigRational::zero()];
    ends.extend(cuts.iter().cloned());
    ends.push(BigRational::from_integer(BigInt::from(1)));
    ends.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
}

/// Lowest-index non-empty piece of maximum value, using one query per
/// piece.
pub fn preferred_piece(agent: &CakeAgent, pieces: &[(BigRational, BigRational)]) -> usize {
    let values: Vec<BigRational> = pieces.iter().map(|(a, b)| agent.value(a, b)).collect();
    let mut best: Option<usize> = None;
    for (j, (a, b)) in pieces.iter().enumerate() {
        if a >= b {
            continue;
        }
        if best.is_none_or(|i| values[j] > values[i]) {
            best = Some(j);
        }
    }
    best.expect("the pieces cover the whole cake")
}

/// An agent's assigned piece and the simplex corner where it prefers it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub agent: usize,
    pub piece: usize,
    /// Point whose partition the agent weakly prefers its piece in.
    pub corner: Vec<Dyadic>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    /// Root of the discretized `f` in cake coordinates.
    pub point: Vec<Dyadic>,
    pub cuts: Vec<Dyadic>,
    /// Piece index per agent.
    pub assignment: Vec<usize>,
    pub certificates: Vec<Certificate>,
    pub r: Dyadic,
    pub delta: Dyadic,
    /// Oracle evaluations made by the root solver.
    pub evaluations: u64,
    /// Valuation queries for the whole solve, matching included.
    pub queries: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Root2DTrace>,
}

/// Assigns each agent to a piece it prefers at some corner of the simplex
/// around `x`, with exactly `k_j` agents on piece `j`.
pub fn hall_assignment(x: &[Dyadic], instance: &CakeInstance) -> Result<(Vec<usize>, Vec<Certificate>)> {
    let point: Vec<BigRational> = x.iter().map(|d| d.to_rational()).collect();
    let r = instance.r();
    let s = locate(&point, &r.to_rational(), instance.cells());
    // prefs[c][a]: agent a's preferred piece at corner c
    let prefs: Vec<Vec<usize>> = s
        .corners
        .iter()
        .map(|c| {
            let y: Vec<BigRational> = c.iter().map(|&i| r.mul_int(i).to_rational()).collect();
            let pieces = partition_from_point(&y);
            instance.agents.iter().map(|a| preferred_piece(a, &pieces)).collect()
        })
        .collect();
    let acceptable: Vec<Vec<usize>> = (0..instance.n())
        .map(|a| {
            let mut p: Vec<usize> = prefs.iter().map(|row| row[a]).collect();
            p.sort_unstable();
            p.dedup();
            p
        })
        .collect();
    let capacity: Vec<usize> = instance.groups.iter().map(|&k| k as usize).collect();
    let assignment = capacity_matching(&acceptable, &capacity).ok_or_else(|| {
        Error::ReductionViolation(format!(
            "no capacity matching at {:?}; corner preferences {prefs:?}",
            x.iter().map(Dyadic::to_string).collect::<Vec<_>>()
        ))
    })?;
    let certificates = assignment
        .iter()
        .enumerate()
        .map(|(a, &piece)| {
            let c = prefs.iter().position(|row| row[a] == piece).expect("matched along an edge");
            Certificate {
                agent: a,
                piece,
                corner: s.corners[c].iter().map(|&i| r.mul_int(i)).collect(),
            }
        })
        .collect();
    Ok((assignment, certificates))
}

/// Finds an `r`-near envy-free allocation for three groups.
pub fn solve_three_groups(instance: &CakeInstance) -> Result<Allocation> {
    if instance.m() != 3 {
        return Err(Error::Input(format!("expected 3 groups, got {}", instance.m())));
    }
    let before = instance.total_queries();
    let delta = instance.solver_delta();
    let grid = GridSpec::unit(instance.d(), delta)?;
    let oracle = instance.real_oracle();
    let signs = discretize(&oracle, instance.epsilon(), &grid);
    let root = find_root_sum(&signs)?;
    let point = grid.to_coords(&root.point)?;
    let (assignment, certificates) = hall_assignment(&point, instance)?;
    let rational: Vec<BigRational> = point.iter().map(|d| d.to_rational()).collect();
    let cuts = cuts_from_point(&rational)
        .iter()
        .map(exact_dyadic)
        .collect::<Result<Vec<_>>>()?;
    Ok(Allocation {
        point,
        cuts,
        assignment,
        certificates,
        r: instance.r(),
        delta,
        evaluations: root.trace.evaluations,
        queries: instance.total_queries() - before,
        trace: Some(root.trace),
    })
}

fn exact_dyadic(q: &BigRational) -> Result<Dyadic> {
    Dyadic::from_f64(rational_to_f64(q))
        .filter(|d| &d.to_rational() == q)
        .ok_or_else(|| Error::Input(format!("{} is not a dyadic rational", Rational(q.clone()))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentCheck {
    pub agent: usize,
    pub piece: usize,
    /// Largest cut movement from the allocation to the certificate corner.
    pub shift: f64,
    pub within_r: bool,
    /// The assigned piece has maximum value at the certificate corner.
    pub maximal: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvyReport {
    pub ok: bool,
    pub capacities_ok: bool,
    pub cuts_ok: bool,
    pub agents: Vec<AgentCheck>,
}

impl EnvyReport {
    pub fn violators(&self) -> Vec<usize> {
        self.agents.iter().filter(|a| !a.ok).map(|a| a.agent).collect()
    }
}

/// Checks that every agent's certificate corner is within `r` of the cuts
/// (per cut) and that the agent's piece is a best piece at that corner.
/// Uses the valuations directly, so no queries are counted.
pub fn verify_near_envy_free(alloc: &Allocation, instance: &CakeInstance) -> EnvyReport {
    let n = instance.n();
    let r = alloc.r.to_rational();
    let cuts: Vec<BigRational> = alloc.cuts.iter().map(|d| d.to_rational()).collect();
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    let cuts_ok = cuts.len() == instance.d()
        && cuts.windows(2).all(|w| w[0] <= w[1])
        && cuts.iter().all(|c| c >= &zero && c <= &one);
    let mut used = vec![0u64; instance.m()];
    let assignment_ok = alloc.assignment.len() == n && alloc.assignment.iter().all(|&p| p < instance.m());
    if assignment_ok {
        for &p in &alloc.assignment {
            used[p] += 1;
        }
    }
    let capacities_ok = assignment_ok && used == instance.groups;

    let mut agents = Vec::with_capacity(n);
    for a in 0..n {
        let piece = alloc.assignment.get(a).copied().unwrap_or(usize::MAX);
        let cert = alloc.certificates.iter().find(|c| c.agent == a);
        let (shift, maximal) = match cert {
            Some(c) if c.corner.len() == instance.d() && piece < instance.m() => {
                let y: Vec<BigRational> = c.corner.iter().map(|d| d.to_rational()).collect();
                let corner_cuts = cuts_from_point(&y);
                let shift = if cuts.len() == corner_cuts.len() {
                    corner_cuts.iter().zip(&cuts).map(|(p, q)| (p - q).abs()).max().unwrap_or_default()
                } else {
                    one.clone() + one.clone()
                };
                let v = instance.agents[a].valuation();
                let values: Vec<BigRational> = pieces_from_cuts(&corner_cuts).iter().map(|(x, y)| v.value(x, y)).collect();
                let maximal = values.iter().all(|w| w <= &values[piece]);
                (shift, maximal)
            }
            _ => (one.clone() + one.clone(), false),
        };
        let within_r = shift <= r;
        agents.push(AgentCheck {
            agent: a,
            piece,
            shift: rational_to_f64(&shift),
            within_r,
            maximal,
            ok: within_r && maximal,
        });
    }
    EnvyReport {
        ok: cuts_ok && capacities_ok && agents.iter().all(|a| a.ok),
        capacities_ok,
        cuts_ok,
        agents,
    }
}

/// Random piecewise-constant valuation with `pieces` equal-width steps and
/// integer densities in `0..=9`, at least one of them positive.
pub fn random_piecewise_constant<R: rand::Rng>(rng: &mut R, pieces: usize) -> Valuation {
    let breakpoints: Vec<BigRational> = (0..=pieces)
        .map(|i| BigRational::new(BigInt::from(i), BigInt::from(pieces)))
        .collect();
    let mut densities: Vec<BigRational> =
        (0..pieces).map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(0..=9)))).collect();
    if densities.iter().all(Zero::is_zero) {
        densities[rng.gen_range(0..pieces)] = BigRational::from_integer(BigInt::from(1));
    }
    Valuation::piecewise_constant(&breakpoints, &densities).expect("valid by construction")
}

/// `n` random agents split into three groups as evenly as possible.
pub fn random_three_group_instance<R: rand::Rng>(rng: &mut R, n: usize, r: Dyadic) -> Result<CakeInstance> {
    let agents: Vec<Valuation> = (0..n)
        .map(|_| {
            let steps = rng.gen_range(2..=8);
            random_piecewise_constant(rng, steps)
        })
        .collect();
    let base = (n / 3) as u64;
    let mut groups = vec![base; 3];
    for g in groups.iter_mut().take(n % 3) {
        *g += 1;
    }
    CakeInstance::new(agents, groups, &r.to_rational())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn uniform(n: usize, r: BigRational) -> CakeInstance {
        let base = (n / 3) as u64;
        CakeInstance::new(vec![Valuation::uniform(); n], vec![base; 3], &r).unwrap()
    }

    fn interval_agent(a: BigRational, b: BigRational) -> Valuation {
        let zero = BigRational::zero();
        let one = q(1, 1);
        let mut bp = vec![zero.clone()];
        let mut dens = Vec::new();
        if a > zero {
            bp.push(a.clone());
            dens.push(zero.clone());
        }
        dens.push(one.clone());
        if b < one {
            bp.push(b.clone());
            dens.push(zero.clone());
        }
        bp.push(one);
        Valuation::piecewise_constant(&bp, &dens).unwrap()
    }

    #[test]
    fn partitions() {
        let p = partition_from_point(&[q(3, 5), q(1, 5)]);
        assert_eq!(p, vec![(q(0, 1), q(3, 5)), (q(3, 5), q(3, 5)), (q(3, 5), q(1, 1))]);
        let p = partition_from_point(&[q(0, 1), q(0, 1)]);
        assert_eq!(p[2], (q(0, 1), q(1, 1)));
        let p = partition_from_point(&[q(1, 1), q(1, 1)]);
        assert_eq!(p[0], (q(0, 1), q(1, 1)));
    }

    #[test]
    fn preference_rule() {
        let agent = CakeAgent::new(Valuation::uniform());
        let pieces = pieces_from_cuts(&[q(1, 2), q(3, 4)]);
        assert_eq!(preferred_piece(&agent, &pieces), 0);
        assert_eq!(agent.queries(), 3);
        // empty first piece, tie between the others
        assert_eq!(preferred_piece(&agent, &pieces_from_cuts(&[q(0, 1), q(1, 2)])), 1);
        assert_eq!(preferred_piece(&agent, &pieces_from_cuts(&[q(1, 1), q(1, 1)])), 0);
    }

    #[test]
    fn counts_on_the_grid() {
        let inst = uniform(3, q(1, 16));
        assert_eq!(inst.g_at(&[q(1, 3), q(2, 3)]), vec![3, 0, 0]);
        assert_eq!(inst.g_on_grid(&[0, 0]), vec![0, 0, 3]);
        assert_eq!(inst.g_on_grid(&[16, 16]), vec![3, 0, 0]);
        inst.reset_queries();
        inst.g_on_grid(&[5, 9]);
        assert_eq!(inst.total_queries(), 9);
        assert_eq!(inst.f_from_g(&[q(3, 1), q(0, 1), q(0, 1)]), vec![q(2, 1), q(-1, 1)]);
    }

    #[test]
    fn interpolation_matches_grid_and_sums_to_n() {
        let inst = uniform(3, q(1, 16));
        let g = inst.interpolate_g(&[q(5, 16), q(9, 16)]);
        assert_eq!(g, inst.g_on_grid(&[5, 9]).into_iter().map(|v| q(v, 1)).collect::<Vec<_>>());
        inst.reset_queries();
        let g = inst.interpolate_g(&[q(11, 64), q(37, 128)]);
        assert_eq!(g.iter().sum::<BigRational>(), q(3, 1));
        assert!(inst.total_queries() <= 27);
    }

    #[test]
    fn instance_validation() {
        let r = q(1, 16);
        assert!(CakeInstance::new(vec![Valuation::uniform(); 3], vec![3, 0, 0], &r).is_err());
        assert!(CakeInstance::new(vec![Valuation::uniform(); 3], vec![1, 1], &r).is_err());
        assert!(CakeInstance::new(vec![Valuation::uniform(); 3], vec![1, 1, 1], &q(1, 1)).is_err());
        let dead = Valuation::piecewise_constant(&[q(0, 1), q(1, 1)], &[q(0, 1)]).unwrap();
        assert!(CakeInstance::new(vec![dead, Valuation::uniform(), Valuation::uniform()], vec![1, 1, 1], &r).is_err());
        let inst = CakeInstance::new(vec![Valuation::uniform(); 3], vec![1, 1, 1], &q(1, 10)).unwrap();
        assert_eq!(inst.r(), Dyadic::pow2(-4));
        assert_eq!(inst.solver_delta(), Dyadic::pow2(-9));
    }

    #[test]
    fn uniform_agents_are_certified() {
        let inst = uniform(3, q(1, 16));
        let alloc = solve_three_groups(&inst).unwrap();
        let report = verify_near_envy_free(&alloc, &inst);
        assert!(report.ok, "{report:?}");
        // the interpolated counts at the root are within ε of (1, 1, 1)
        let x: Vec<BigRational> = alloc.point.iter().map(|d| d.to_rational()).collect();
        let f = inst.f_from_g(&inst.interpolate_g(&x));
        assert!(f.iter().all(|fi| fi.abs() <= q(1, 8)), "{f:?}");
    }

    #[test]
    fn disjoint_interests_get_their_own_interval() {
        let agents = vec![
            interval_agent(q(0, 1), q(1, 3)),
            interval_agent(q(1, 3), q(2, 3)),
            interval_agent(q(2, 3), q(1, 1)),
        ];
        let inst = CakeInstance::new(agents, vec![1, 1, 1], &q(1, 64)).unwrap();
        let alloc = solve_three_groups(&inst).unwrap();
        assert_eq!(alloc.assignment, vec![0, 1, 2]);
        // the returned cuts are envy-free outright for these agents
        let cuts: Vec<BigRational> = alloc.cuts.iter().map(|d| d.to_rational()).collect();
        let envy_free = |cuts: &[BigRational], assignment: &[usize]| {
            let pieces = pieces_from_cuts(cuts);
            inst.agents().iter().zip(assignment).all(|(a, &p)| {
                let v: Vec<BigRational> = pieces.iter().map(|(x, y)| a.valuation().value(x, y)).collect();
                v.iter().all(|w| w <= &v[p])
            })
        };
        assert!(envy_free(&cuts, &alloc.assignment));
        // and a coarse search finds envy-free cuts only with this assignment
        for i in 0..=16 {
            for j in i..=16 {
                let c = [q(i, 16), q(j, 16)];
                for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                    assert!(!envy_free(&c, &perm), "{c:?} {perm:?}");
                }
            }
        }
        assert!(verify_near_envy_free(&alloc, &inst).ok);
    }

    fn exact_allocation(inst: &CakeInstance) -> Allocation {
        let point = vec![Dyadic::pow2(-1), Dyadic::new(3, -2)];
        Allocation {
            cuts: point.clone(),
            assignment: vec![0, 1, 2],
            certificates: (0..3).map(|a| Certificate { agent: a, piece: a, corner: point.clone() }).collect(),
            point,
            r: inst.r(),
            delta: inst.r(),
            evaluations: 0,
            queries: 0,
            trace: None,
        }
    }

    #[test]
    fn verification_boundaries() {
        let agents = vec![
            interval_agent(q(0, 1), q(1, 2)),
            interval_agent(q(1, 2), q(3, 4)),
            interval_agent(q(3, 4), q(1, 1)),
        ];
        let inst = CakeInstance::new(agents, vec![1, 1, 1], &q(1, 16)).unwrap();
        let mut alloc = exact_allocation(&inst);
        assert!(verify_near_envy_free(&alloc, &inst).ok);

        // certificate exactly r away still passes
        alloc.certificates[2].corner = vec![Dyadic::pow2(-1), Dyadic::new(11, -4)];
        let report = verify_near_envy_free(&alloc, &inst);
        assert!(report.agents[2].within_r && report.ok, "{report:?}");

        // swapping two agents breaks both
        let mut tampered = exact_allocation(&inst);
        tampered.assignment.swap(0, 1);
        tampered.certificates[0].piece = 1;
        tampered.certificates[1].piece = 0;
        let report = verify_near_envy_free(&tampered, &inst);
        assert!(!report.ok);
        assert_eq!(report.violators(), vec![0, 1]);
    }

    #[test]
    fn random_instances_are_certified() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [3, 4, 5] {
            let inst = random_three_group_instance(&mut rng, n, Dyadic::pow2(-5)).unwrap();
            let alloc = solve_three_groups(&inst).unwrap();
            assert!(verify_near_envy_free(&alloc, &inst).ok);
        }
    }
}
