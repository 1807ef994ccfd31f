//! Capacity-respecting bipartite matching of agents to pieces.

/// Assigns every agent to one of its acceptable pieces so that piece `j`
/// receives exactly `capacity[j]` agents. `acceptable[a]` lists the pieces
/// agent `a` may take. Returns `None` when no such assignment exists.
///
/// Plain augmenting paths over piece slots; instances here have a handful of
/// pieces and at most a few dozen agents.
pub fn capacity_matching(acceptable: &[Vec<usize>], capacity: &[usize]) -> Option<Vec<usize>> {
    let n = acceptable.len();
    if capacity.iter().sum::<usize>() != n {
        return None;
    }
    // holders[j] lists agents currently on piece j
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); capacity.len()];
    let mut assigned: Vec<Option<usize>> = vec![None; n];

    fn augment(
        agent: usize,
        acceptable: &[Vec<usize>],
        capacity: &[usize],
        holders: &mut Vec<Vec<usize>>,
        assigned: &mut Vec<Option<usize>>,
        seen: &mut Vec<bool>,
    ) -> bool {
        for &p in &acceptable[agent] {
            if p >= capacity.len() || seen[p] {
                continue;
            }
            seen[p] = true;
            if holders[p].len() < capacity[p] {
                holders[p].push(agent);
                assigned[agent] = Some(p);
                return true;
            }
            for slot in 0..holders[p].len() {
                let other = holders[p][slot];
                if augment(other, acceptable, capacity, holders, assigned, seen) {
                    // `other` moved elsewhere; take its slot
                    holders[p][slot] = agent;
                    assigned[agent] = Some(p);
                    return true;
                }
            }
        }
        false
    }

    for a in 0..n {
        let mut seen = vec![false; capacity.len()];
        if !augment(a, acceptable, capacity, &mut holders, &mut assigned, &mut seen) {
            return None;
        }
    }
    assigned.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(acceptable: &[Vec<usize>], capacity: &[usize]) -> bool {
        let n = acceptable.len();
        let m = capacity.len();
        let total = m.pow(n as u32);
        (0..total).any(|mut code| {
            let mut used = vec![0; m];
            for a in 0..n {
                let p = code % m;
                code /= m;
                if !acceptable[a].contains(&p) {
                    return false;
                }
                used[p] += 1;
            }
            used == capacity
        })
    }

    fn valid(acceptable: &[Vec<usize>], capacity: &[usize], assignment: &[usize]) -> bool {
        let mut used = vec![0; capacity.len()];
        for (a, &p) in assignment.iter().enumerate() {
            if !acceptable[a].contains(&p) {
                return false;
            }
            used[p] += 1;
        }
        used == capacity
    }

    #[test]
    fn identity_when_preferences_are_distinct() {
        let acc = vec![vec![0], vec![1], vec![2]];
        assert_eq!(capacity_matching(&acc, &[1, 1, 1]), Some(vec![0, 1, 2]));
    }

    #[test]
    fn needs_an_augmenting_path() {
        let acc = vec![vec![0, 1], vec![0], vec![1, 2], vec![2]];
        let m = capacity_matching(&acc, &[1, 1, 2]).unwrap();
        assert!(valid(&acc, &[1, 1, 2], &m));
        assert_eq!(capacity_matching(&[vec![0], vec![0]], &[1, 1]), None);
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(1..=6);
            let mut cap = vec![0usize; 3];
            for _ in 0..n {
                cap[rng.gen_range(0..3)] += 1;
            }
            let acc: Vec<Vec<usize>> = (0..n)
                .map(|_| (0..3).filter(|_| rng.gen_bool(0.5)).collect())
                .collect();
            let got = capacity_matching(&acc, &cap);
            assert_eq!(got.is_some(), brute_force(&acc, &cap), "{acc:?} {cap:?}");
            if let Some(m) = got {
                assert!(valid(&acc, &cap, &m));
            }
        }
    }
}
