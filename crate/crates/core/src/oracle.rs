//! Brute-force ground truth. Nothing here uses the matching graph or the PEG:
//! semigroup points come from a box scan, generators from subtraction,
//! relations from fiber connectivity, and semi-invariant membership from the
//! weight equations read literally.

use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{ColoredQuiver, Coloring, Quiver};
use crate::error::{Error, Result};
use crate::matching::{presentation, MatchingSystem};
use crate::rank::DimensionVector;
use crate::si::PartitionMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleConfig {
    pub coordinate_cap: u32,
    /// Largest number of generators on one side of a relation.
    pub relation_degree_cap: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            coordinate_cap: 3,
            relation_degree_cap: 4,
            seed: 0x5eed,
        }
    }
}

fn satisfies(sys: &MatchingSystem, u: &[u32]) -> bool {
    let m = sys.num_equations();
    (0..m).all(|i| {
        let lhs: u32 = sys.form(i).iter().map(|&j| u[j]).sum();
        let rhs: u32 = sys.form(i + m).iter().map(|&j| u[j]).sum();
        lhs == rhs
    })
}

/// Advances `u` to the next vector of the box `[0, bound]` in lex order
/// over positions `from..`; false once it wraps.
fn odometer(u: &mut [u32], bound: &[u32], from: usize) -> bool {
    for j in (from..u.len()).rev() {
        if u[j] < bound[j] {
            u[j] += 1;
            return true;
        }
        u[j] = 0;
    }
    false
}

/// Every solution with all coordinates at most `cap`, in lex order.
pub fn enumerate_points(sys: &MatchingSystem, cap: u32) -> Vec<Vec<u32>> {
    let l = sys.num_vars();
    if l == 0 {
        return vec![Vec::new()];
    }
    let bound = vec![cap; l];
    (0..=cap)
        .into_par_iter()
        .flat_map_iter(|lead| {
            let mut u = vec![0; l];
            u[0] = lead;
            let mut out = Vec::new();
            loop {
                if satisfies(sys, &u) {
                    out.push(u.clone());
                }
                if !odometer(&mut u, &bound, 1) {
                    break;
                }
            }
            out
        })
        .collect()
}

/// True iff some solution `p` with `0 < p < x` exists.
fn decomposable(sys: &MatchingSystem, x: &[u32]) -> bool {
    let mut p = vec![0; x.len()];
    while odometer(&mut p, x, 0) {
        if p.as_slice() != x && satisfies(sys, &p) {
            return true;
        }
    }
    false
}

/// Nonzero solutions in the box that are not a sum of two nonzero solutions.
/// Fails if any of them has a form value above 2.
pub fn minimal_generators_bruteforce(sys: &MatchingSystem, cap: u32) -> Result<Vec<Vec<u32>>> {
    let points = enumerate_points(sys, cap);
    let gens: Vec<Vec<u32>> = points
        .into_par_iter()
        .filter(|x| x.iter().any(|&c| c > 0) && !decomposable(sys, x))
        .collect();
    for g in &gens {
        for i in 0..sys.num_forms() {
            let v: u32 = sys.form(i).iter().map(|&j| g[j]).sum();
            if v > 2 {
                return Err(Error::Invariant(format!(
                    "minimal generator {g:?} has f{} = {v}",
                    i + 1
                )));
            }
        }
    }
    Ok(gens)
}

fn vsum(m: &[usize], gens: &[Vec<u32>]) -> Vec<u32> {
    let l = gens.first().map_or(0, Vec::len);
    let mut v = vec![0; l];
    for &g in m {
        for (x, y) in v.iter_mut().zip(&gens[g]) {
            *x += y;
        }
    }
    v
}

/// All sorted multisets of generator indices summing to `v`.
fn fiber_of(v: &[u32], gens: &[Vec<u32>]) -> Vec<Vec<usize>> {
    fn rec(
        start: usize,
        rest: &mut [u32],
        gens: &[Vec<u32>],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rest.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        for g in start..gens.len() {
            if gens[g].iter().zip(rest.iter()).all(|(a, b)| a <= b)
                && gens[g].iter().any(|&a| a > 0)
            {
                for (r, a) in rest.iter_mut().zip(&gens[g]) {
                    *r -= a;
                }
                cur.push(g);
                rec(g, rest, gens, cur, out);
                cur.pop();
                for (r, a) in rest.iter_mut().zip(&gens[g]) {
                    *r += a;
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(0, &mut v.to_vec(), gens, &mut Vec::new(), &mut out);
    out
}

/// `m − from + to` if `from ⊆ m`.
fn apply(m: &[usize], from: &[usize], to: &[usize]) -> Option<Vec<usize>> {
    let mut rest = m.to_vec();
    for g in from {
        let pos = rest.iter().position(|x| x == g)?;
        rest.remove(pos);
    }
    rest.extend_from_slice(to);
    rest.sort_unstable();
    Some(rest)
}

/// Elements reachable from `start` by the moves `lhs ↔ rhs`.
fn reachable(start: &[usize], moves: &[(Vec<usize>, Vec<usize>)]) -> HashSet<Vec<usize>> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.to_vec());
    queue.push_back(start.to_vec());
    while let Some(m) = queue.pop_front() {
        for (a, b) in moves {
            for (from, to) in [(a, b), (b, a)] {
                if let Some(n) = apply(&m, from, to) {
                    if seen.insert(n.clone()) {
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    seen
}

/// True iff `lhs` and `rhs` are joined by a chain of moves.
pub fn derivable(lhs: &[usize], rhs: &[usize], moves: &[(Vec<usize>, Vec<usize>)]) -> bool {
    let mut r = rhs.to_vec();
    r.sort_unstable();
    let mut l = lhs.to_vec();
    l.sort_unstable();
    l == r || reachable(&l, moves).contains(&r)
}

fn cancel_common(a: Vec<usize>, b: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    let (mut a, mut b) = (a, b);
    let mut i = 0;
    while i < a.len() {
        if let Some(j) = b.iter().position(|&x| x == a[i]) {
            a.remove(i);
            b.remove(j);
        } else {
            i += 1;
        }
    }
    (a, b)
}

/// Moves connecting every fiber whose vector is a sum of at most
/// `degree_cap` generators, in increasing order of vectors. A move is added
/// exactly when a fiber is not yet connected by earlier moves; it joins the
/// shortest elements of the two pieces.
fn kernel_moves(gens: &[Vec<u32>], degree_cap: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = gens.len();
    let mut vectors: BTreeMap<(u32, Vec<u32>), ()> = BTreeMap::new();
    let mut stack: Vec<(usize, Vec<usize>)> = (0..n).map(|g| (g, vec![g])).collect();
    while let Some((last, m)) = stack.pop() {
        let v = vsum(&m, gens);
        vectors.insert((v.iter().sum(), v), ());
        if m.len() < degree_cap {
            for g in last..n {
                let mut next = m.clone();
                next.push(g);
                stack.push((g, next));
            }
        }
    }
    let mut moves: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for (_, v) in vectors.into_keys() {
        let mut fiber = fiber_of(&v, gens);
        fiber.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let mut covered: HashSet<Vec<usize>> = HashSet::new();
        let mut reps: Vec<Vec<usize>> = Vec::new();
        for m in &fiber {
            if covered.contains(m) {
                continue;
            }
            covered.extend(reachable(m, &moves));
            reps.push(m.clone());
        }
        for r in reps.iter().skip(1) {
            moves.push(cancel_common(reps[0].clone(), r.clone()));
        }
    }
    moves
}

/// A minimal set of binomials `lhs = rhs` among generators with at most
/// `degree_cap` generators on either side.
pub fn toric_relations_bruteforce(
    gens: &[Vec<u32>],
    degree_cap: usize,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    kernel_moves(gens, degree_cap)
        .into_iter()
        .filter(|(a, b)| a.len().max(b.len()) <= degree_cap)
        .collect()
}

/// The weight equations literally: at a coupled vertex
/// `λ(x,s1)_i + λ(x,s2)_{β_x+1−i}` is independent of `i`; at a lonely vertex
/// `λ(x,s)_i` is.
pub fn verify_si_equations(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
    lambda: &PartitionMap,
) -> bool {
    let q = cq.quiver();
    for x in 0..q.vertex_count() {
        let b = beta.at(x);
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for &i in cq.incidences_at(x) {
            let inc = cq.incidence(i);
            let mut row = vec![0i64; b];
            if let Some(a) = inc.outgoing {
                for (k, &p) in lambda.parts[a].iter().enumerate() {
                    row[k] += p as i64;
                }
            }
            if let Some(a) = inc.incoming {
                let p = &lambda.parts[a];
                for k in 0..p.len() {
                    row[b - p.len() + k] -= p[p.len() - 1 - k] as i64;
                }
            }
            rows.push(row);
        }
        let sums: Vec<i64> = match rows.as_slice() {
            [] => continue,
            [r] => r.clone(),
            [r1, r2] => (0..b).map(|i| r1[i] + r2[b - 1 - i]).collect(),
            _ => return false,
        };
        if sums.windows(2).any(|w| w[0] != w[1]) {
            return false;
        }
    }
    true
}

/// Result of checking the walk algorithm against the box scan.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub cap: u32,
    pub relation_degree_cap: usize,
    pub generators_match: bool,
    pub relations_match: bool,
    /// Presentation relations with a side above the relation cap.
    pub relations_beyond_cap: usize,
    pub witnesses: Vec<String>,
}

/// Compares generators as sets and relations as congruences.
pub fn verify(sys: &MatchingSystem, config: &OracleConfig) -> Result<VerifyReport> {
    let pres = presentation(sys)?;
    let brute = minimal_generators_bruteforce(sys, config.coordinate_cap)?;
    let mut witnesses = Vec::new();
    let walk_set: HashSet<&Vec<u32>> = pres.generators.iter().map(|g| &g.vector).collect();
    let brute_set: HashSet<&Vec<u32>> = brute.iter().collect();
    for g in walk_set.difference(&brute_set) {
        witnesses.push(format!("walk generator {g:?} not minimal in the box"));
    }
    for g in brute_set.difference(&walk_set) {
        witnesses.push(format!("minimal point {g:?} missing from walk generators"));
    }
    let generators_match = witnesses.is_empty() && pres.generators.len() == brute.len();

    let vectors: Vec<Vec<u32>> = pres.generators.iter().map(|g| g.vector.clone()).collect();
    let cap = config.relation_degree_cap;
    let all_kernel = kernel_moves(&vectors, cap);
    let oracle_moves: Vec<_> = all_kernel
        .iter()
        .filter(|(a, b)| a.len().max(b.len()) <= cap)
        .cloned()
        .collect();
    let main_moves: Vec<(Vec<usize>, Vec<usize>)> = pres
        .relations
        .iter()
        .map(|r| (r.lhs.clone(), r.rhs.clone()))
        .collect();
    let beyond = main_moves
        .iter()
        .filter(|(a, b)| a.len().max(b.len()) > cap)
        .count();
    let mut relations_match = generators_match;
    for (a, b) in &oracle_moves {
        if !derivable(a, b, &main_moves) {
            relations_match = false;
            witnesses.push(format!("kernel relation {a:?} = {b:?} not derivable"));
        }
    }
    for (a, b) in main_moves
        .iter()
        .filter(|(a, b)| a.len().max(b.len()) <= cap)
    {
        if !derivable(a, b, &all_kernel) {
            relations_match = false;
            witnesses.push(format!(
                "relation {a:?} = {b:?} not in the kernel congruence"
            ));
        }
    }
    Ok(VerifyReport {
        cap: config.coordinate_cap,
        relation_degree_cap: cap,
        generators_match,
        relations_match,
        relations_beyond_cap: beyond,
        witnesses,
    })
}

/// A valid system with `1 ≤ m ≤ max_m` equations and `1 ≤ l ≤ max_l`
/// variables, each variable in at most two forms, never both sides of one
/// equation.
pub fn random_system<R: Rng>(rng: &mut R, max_m: usize, max_l: usize) -> MatchingSystem {
    let m = rng.gen_range(1..=max_m);
    let l = rng.gen_range(1..=max_l);
    let mut eqs = vec![(Vec::new(), Vec::new()); m];
    for j in 0..l {
        // Mostly two occurrences: those are the solid non-loop edges.
        let k = [0, 1, 1, 1, 2, 2, 2, 2][rng.gen_range(0..8)];
        let mut forms: Vec<usize> = (0..2 * m).collect();
        forms.shuffle(rng);
        let mut chosen: Vec<usize> = Vec::new();
        for f in forms {
            if chosen.len() == k {
                break;
            }
            if chosen.iter().all(|&c| c % m != f % m) {
                chosen.push(f);
            }
        }
        for f in chosen {
            if f < m {
                eqs[f].0.push(j);
            } else {
                eqs[f - m].1.push(j);
            }
        }
    }
    let names = (1..=l).map(|j| format!("x{j}")).collect();
    MatchingSystem::new(names, eqs).expect("indices in range")
}

/// A colored quiver on up to `max_vertices` vertices: each color is a path
/// along increasing vertices, and no vertex meets more than two colors.
pub fn random_colored_quiver<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_colors: usize,
) -> ColoredQuiver {
    loop {
        let n = rng.gen_range(2..=max_vertices.max(2));
        let colors = rng.gen_range(1..=max_colors.max(1));
        let mut usage = vec![0u8; n];
        let mut arrows: Vec<(String, String, String)> = Vec::new();
        let mut labels = Vec::new();
        for s in 0..colors {
            let open: Vec<usize> = (0..n).filter(|&v| usage[v] < 2).collect();
            if open.len() < 2 {
                break;
            }
            let len = rng.gen_range(2..=open.len().min(4));
            let mut path: Vec<usize> = open.choose_multiple(rng, len).copied().collect();
            path.sort_unstable();
            for &v in &path {
                usage[v] += 1;
            }
            for w in path.windows(2) {
                arrows.push((
                    format!("a{}", arrows.len() + 1),
                    w[0].to_string(),
                    w[1].to_string(),
                ));
                labels.push(s);
            }
        }
        if arrows.is_empty() {
            continue;
        }
        let Ok(q) = Quiver::new((0..n).map(|v| v.to_string()), arrows) else {
            continue;
        };
        let Ok(c) = Coloring::from_labels(&q, &labels) else {
            continue;
        };
        if let Ok(cq) = ColoredQuiver::new(q, c) {
            return cq;
        }
    }
}

/// Partition maps with parts at most `max_part`, one per arrow of length `r(a)`.
pub fn random_partition_map<R: Rng>(rng: &mut R, r: &[usize], max_part: u32) -> PartitionMap {
    PartitionMap {
        parts: r
            .iter()
            .map(|&n| {
                let mut p: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=max_part)).collect();
                p.sort_unstable_by(|a, b| b.cmp(a));
                p
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::fixtures::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_system_box() {
        let sys = MatchingSystem::from_named(&["p", "q"], &[]).unwrap();
        assert_eq!(
            enumerate_points(&sys, 1),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }

    #[test]
    fn forced_zero_has_no_support() {
        let sys = MatchingSystem::from_named(&["p", "q"], &[(&["p"], &[])]).unwrap();
        assert!(enumerate_points(&sys, 2).iter().all(|u| u[0] == 0));
    }

    #[test]
    fn closing_minimal_generators() {
        let sys = closing();
        let mut gens = minimal_generators_bruteforce(&sys, 2).unwrap();
        gens.sort();
        assert_eq!(gens.len(), 8);
        let support = |js: &[usize]| unit(10, js);
        for s in [
            support(&[0, 4]),
            support(&[5, 9]),
            support(&[0, 3, 8, 5]),
            support(&[4, 1, 6, 9]),
            support(&[1, 7, 3]),
            support(&[6, 2, 8]),
            support(&[1, 6, 8, 3]),
            support(&[2, 7]),
        ] {
            assert!(gens.contains(&s), "{s:?}");
        }
    }

    #[test]
    fn single_free_variable() {
        let sys = MatchingSystem::from_named(&["p"], &[]).unwrap();
        assert_eq!(
            minimal_generators_bruteforce(&sys, 2).unwrap(),
            vec![vec![1]]
        );
    }

    #[test]
    fn toric_examples() {
        assert!(toric_relations_bruteforce(&[vec![1, 0]], 3).is_empty());
        assert_eq!(
            toric_relations_bruteforce(&[vec![1], vec![1]], 3),
            vec![(vec![0], vec![1])]
        );
        let gens = vec![
            vec![1, 1, 0, 0],
            vec![0, 0, 1, 1],
            vec![1, 0, 0, 1],
            vec![0, 1, 1, 0],
        ];
        assert_eq!(toric_relations_bruteforce(&gens, 3).len(), 1);
    }

    #[test]
    fn closing_verifies() {
        let report = verify(&closing(), &OracleConfig::default()).unwrap();
        assert!(report.generators_match, "{:?}", report.witnesses);
        assert!(report.relations_match, "{:?}", report.witnesses);
    }

    #[test]
    fn eleven_verifies() {
        let report = verify(&eleven(), &OracleConfig::default()).unwrap();
        assert!(report.generators_match, "{:?}", report.witnesses);
        assert!(report.relations_match, "{:?}", report.witnesses);
    }

    #[test]
    fn weight_equations_literal() {
        let cq = crate::peg::fixtures::single_arrow();
        let beta = DimensionVector(vec![2, 2]);
        let ok = PartitionMap {
            parts: vec![vec![3, 3]],
        };
        let bad = PartitionMap {
            parts: vec![vec![3, 2]],
        };
        assert!(verify_si_equations(&cq, &beta, &ok));
        assert!(!verify_si_equations(&cq, &beta, &bad));
        assert!(verify_si_equations(
            &cq,
            &beta,
            &PartitionMap {
                parts: vec![vec![0, 0]]
            }
        ));
    }

    #[test]
    fn random_systems_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            assert!(random_system(&mut rng, 4, 8).validate().ok);
        }
        for _ in 0..50 {
            let cq = random_colored_quiver(&mut rng, 6, 3);
            assert!(cq.quiver().arrow_count() >= 1);
        }
    }
}
