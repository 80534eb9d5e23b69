//! Binomial relations among walk generators.
//!
//! Candidates come from X-configurations (two partial strings on each side of
//! a dotted edge) and H-configurations (two connectors on each side of a pair
//! of dotted edges). Candidates are then thinned to a minimal generating set
//! degree by degree: within the fiber of a degree, multisets sharing a
//! generator are already identified by lower-degree relations, and a
//! candidate is kept only if it joins two classes that are still apart.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::graph::{build_graph, MatchingGraph};
use super::walks::{enumerate_irreducible_walks, le, sub, Generator, WalkSet, VISIT_CAP};
use super::MatchingSystem;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Provenance {
    /// About the dotted edge joining the two forms.
    X {
        edge: (usize, usize),
    },
    /// About a pair of dotted edges.
    H {
        first: (usize, usize),
        second: (usize, usize),
    },
    ToricKernel,
}

/// `lhs = rhs` as multisets of generator indices, each sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Binomial {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
    pub provenance: Provenance,
}

impl Binomial {
    /// Generators on each side, by name.
    pub fn render(&self, gens: &[Generator]) -> String {
        let side = |s: &[usize]| {
            s.iter()
                .map(|&g| gens[g].name.as_str())
                .collect::<Vec<_>>()
                .join(" + ")
        };
        format!("{} = {}", side(&self.lhs), side(&self.rhs))
    }

    /// Common vector sum of either side.
    pub fn degree(&self, gens: &[Generator]) -> Vec<u32> {
        multiset_sum(&self.lhs, gens)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Presentation {
    pub generators: Vec<Generator>,
    pub relations: Vec<Binomial>,
    pub forced: Vec<usize>,
    pub free: Vec<usize>,
}

pub(crate) fn multiset_sum(side: &[usize], gens: &[Generator]) -> Vec<u32> {
    let l = gens.first().map_or(0, |g| g.vector.len());
    let mut v = vec![0; l];
    for &g in side {
        for (x, y) in v.iter_mut().zip(&gens[g].vector) {
            *x += y;
        }
    }
    v
}

/// A relation before minimization.
#[derive(Clone, Debug)]
struct Candidate {
    lhs: Vec<usize>,
    rhs: Vec<usize>,
    provenance: Provenance,
}

/// Writes semigroup elements as multisets of generators.
struct Splitter<'a> {
    gens: &'a [Generator],
    memo: HashMap<Vec<u32>, Option<Vec<usize>>>,
}

impl<'a> Splitter<'a> {
    fn new(gens: &'a [Generator]) -> Self {
        Splitter {
            gens,
            memo: HashMap::new(),
        }
    }

    /// Some multiset of generators summing to `x`, smallest indices first.
    fn split(&mut self, x: &[u32]) -> Option<Vec<usize>> {
        let Some(first) = x.iter().position(|&c| c > 0) else {
            return Some(Vec::new());
        };
        if let Some(r) = self.memo.get(x) {
            return r.clone();
        }
        let mut found = None;
        for (k, g) in self.gens.iter().enumerate() {
            if g.vector[first] == 0 || !le(&g.vector, x) {
                continue;
            }
            if let Some(mut rest) = self.split(&sub(x, &g.vector)) {
                rest.push(k);
                rest.sort_unstable();
                found = Some(rest);
                break;
            }
        }
        self.memo.insert(x.to_vec(), found.clone());
        found
    }
}

/// Loop-started walks ending in a solid edge, grouped by final vertex and
/// deduplicated by vector.
fn partial_strings(g: &MatchingGraph) -> HashMap<usize, Vec<Vec<u32>>> {
    let mut out: HashMap<usize, HashSet<Vec<u32>>> = HashMap::new();
    let mut count = vec![0u8; g.num_vertices()];
    let mut u = vec![0u32; g.num_vars()];

    #[allow(clippy::too_many_arguments)]
    fn extend(
        g: &MatchingGraph,
        at: usize,
        count: &mut [u8],
        u: &mut [u32],
        out: &mut HashMap<usize, HashSet<Vec<u32>>>,
    ) {
        let c = g.partner(at);
        for &e in g.incident(c) {
            let edge = *g.solid_edge(e);
            if edge.is_loop() {
                continue;
            }
            let other = edge.other(c);
            if count[c] >= VISIT_CAP || count[other] >= VISIT_CAP {
                continue;
            }
            count[c] += 1;
            count[other] += 1;
            u[edge.var] += 1;
            out.entry(other).or_default().insert(u.to_vec());
            extend(g, other, count, u, out);
            u[edge.var] -= 1;
            count[c] -= 1;
            count[other] -= 1;
        }
    }

    for e in g.loops().collect::<Vec<_>>() {
        let edge = *g.solid_edge(e);
        let v = edge.ends.0;
        count[v] += 1;
        u[edge.var] += 1;
        out.entry(v).or_default().insert(u.clone());
        extend(g, v, &mut count, &mut u, &mut out);
        u[edge.var] -= 1;
        count[v] -= 1;
    }
    out.into_iter()
        .map(|(k, s)| {
            let mut v: Vec<Vec<u32>> = s.into_iter().collect();
            v.sort();
            (k, v)
        })
        .collect()
}

/// Loop-free alternating walks that start and end with a solid edge, keyed
/// by `(first vertex, last vertex)` and deduplicated by vector.
fn connectors(g: &MatchingGraph) -> HashMap<(usize, usize), Vec<Vec<u32>>> {
    let mut out: HashMap<(usize, usize), HashSet<Vec<u32>>> = HashMap::new();
    let mut count = vec![0u8; g.num_vertices()];
    let mut u = vec![0u32; g.num_vars()];

    fn extend(
        g: &MatchingGraph,
        start: usize,
        c: usize,
        count: &mut [u8],
        u: &mut [u32],
        out: &mut HashMap<(usize, usize), HashSet<Vec<u32>>>,
    ) {
        for &e in g.incident(c) {
            let edge = *g.solid_edge(e);
            if edge.is_loop() {
                continue;
            }
            let other = edge.other(c);
            if count[c] >= VISIT_CAP || count[other] >= VISIT_CAP {
                continue;
            }
            count[c] += 1;
            count[other] += 1;
            u[edge.var] += 1;
            out.entry((start, other)).or_default().insert(u.to_vec());
            extend(g, start, g.partner(other), count, u, out);
            u[edge.var] -= 1;
            count[c] -= 1;
            count[other] -= 1;
        }
    }

    for p in 0..g.num_vertices() {
        extend(g, p, p, &mut count, &mut u, &mut out);
    }
    out.into_iter()
        .map(|(k, s)| {
            let mut v: Vec<Vec<u32>> = s.into_iter().collect();
            v.sort();
            (k, v)
        })
        .collect()
}

fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Removes the common part of two sorted multisets.
fn cancel(mut a: Vec<usize>, mut b: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (Vec::new(), Vec::new());
    a.sort_unstable();
    b.sort_unstable();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                ra.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                rb.push(b[j]);
                j += 1;
            }
        }
    }
    ra.extend_from_slice(&a[i..]);
    rb.extend_from_slice(&b[j..]);
    (ra, rb)
}

/// `{A1 + B1, A2 + B2}` against `{A1 + B2, A2 + B1}` for all distinct pairs.
fn recombine(
    left: &[Vec<u32>],
    right: &[Vec<u32>],
    provenance: &Provenance,
    split: &mut Splitter,
    out: &mut Vec<Candidate>,
) -> Result<()> {
    for i1 in 0..left.len() {
        for i2 in i1 + 1..left.len() {
            for k1 in 0..right.len() {
                for k2 in k1 + 1..right.len() {
                    let (a1, a2, b1, b2) = (&left[i1], &left[i2], &right[k1], &right[k2]);
                    let mut sides = Vec::with_capacity(4);
                    for w in [add(a1, b1), add(a2, b2), add(a1, b2), add(a2, b1)] {
                        sides.push(split.split(&w).ok_or_else(|| {
                            Error::Invariant(format!(
                                "walk vector {w:?} is not a sum of generators"
                            ))
                        })?);
                    }
                    let lhs = [sides[0].clone(), sides[1].clone()].concat();
                    let rhs = [sides[2].clone(), sides[3].clone()].concat();
                    let (lhs, rhs) = cancel(lhs, rhs);
                    if lhs.is_empty() && rhs.is_empty() {
                        continue;
                    }
                    out.push(Candidate {
                        lhs,
                        rhs,
                        provenance: provenance.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn x_candidates(g: &MatchingGraph, split: &mut Splitter) -> Result<Vec<Candidate>> {
    let partials = partial_strings(g);
    let empty = Vec::new();
    let mut out = Vec::new();
    for (p, q) in g.dotted_edges() {
        let sp = partials.get(&p).unwrap_or(&empty);
        let sq = partials.get(&q).unwrap_or(&empty);
        recombine(sp, sq, &Provenance::X { edge: (p, q) }, split, &mut out)?;
    }
    Ok(out)
}

fn h_candidates(g: &MatchingGraph, split: &mut Splitter) -> Result<Vec<Candidate>> {
    let conn = connectors(g);
    let empty = Vec::new();
    let get = |a: usize, b: usize| conn.get(&(a, b)).unwrap_or(&empty);
    let dotted = g.dotted_edges();
    let mut out = Vec::new();
    for (i, &(p, p2)) in dotted.iter().enumerate() {
        for &(q, q2) in &dotted[i + 1..] {
            let prov = Provenance::H {
                first: (p, p2),
                second: (q, q2),
            };
            recombine(get(p, q), get(p2, q2), &prov, split, &mut out)?;
            recombine(get(p, q2), get(p2, q), &prov, split, &mut out)?;
        }
    }
    Ok(out)
}

/// All multisets of generators summing to `v`, each sorted ascending.
pub(crate) fn fiber(v: &[u32], gens: &[Generator]) -> Vec<Vec<usize>> {
    let n = gens.len();
    let l = v.len();
    // reach[i][j]: some generator at index ≥ i touches coordinate j.
    let mut reach = vec![vec![false; l]; n + 1];
    for i in (0..n).rev() {
        reach[i] = reach[i + 1]
            .iter()
            .zip(&gens[i].vector)
            .map(|(&r, &c)| r || c > 0)
            .collect();
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();

    fn rec(
        i: usize,
        rest: &mut Vec<u32>,
        gens: &[Generator],
        reach: &[Vec<bool>],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rest.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        if i == gens.len() || rest.iter().enumerate().any(|(j, &c)| c > 0 && !reach[i][j]) {
            return;
        }
        let g = &gens[i].vector;
        let max = g
            .iter()
            .zip(rest.iter())
            .filter(|(&a, _)| a > 0)
            .map(|(&a, &r)| r / a)
            .min()
            .unwrap_or(0);
        for k in (0..=max).rev() {
            for _ in 0..k {
                cur.push(i);
            }
            for (r, &a) in rest.iter_mut().zip(g) {
                *r -= a * k;
            }
            rec(i + 1, rest, gens, reach, cur, out);
            for (r, &a) in rest.iter_mut().zip(g) {
                *r += a * k;
            }
            for _ in 0..k {
                cur.pop();
            }
        }
    }

    let mut rest = v.to_vec();
    rec(0, &mut rest, gens, &reach, &mut cur, &mut out);
    for m in out.iter_mut() {
        m.sort_unstable();
    }
    out.sort();
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// Keeps the candidates that join classes of their fiber not already joined
/// by a shared generator or an earlier candidate. With `fill`, classes that
/// remain apart are joined by toric-kernel relations between class minima.
fn minimize(cands: Vec<Candidate>, gens: &[Generator], fill: bool) -> Vec<Binomial> {
    let mut by_degree: BTreeMap<(u32, Vec<u32>), Vec<Candidate>> = BTreeMap::new();
    for c in cands {
        let v = multiset_sum(&c.lhs, gens);
        by_degree.entry((v.iter().sum(), v)).or_default().push(c);
    }
    let mut out = Vec::new();
    for ((_, v), mut cands) in by_degree {
        let elems = fiber(&v, gens);
        let index: HashMap<&Vec<usize>, usize> =
            elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut uf = UnionFind::new(elems.len());
        let mut holder: HashMap<usize, usize> = HashMap::new();
        for (i, e) in elems.iter().enumerate() {
            for &g in e {
                if let Some(&first) = holder.get(&g) {
                    uf.union(first, i);
                } else {
                    holder.insert(g, i);
                }
            }
        }
        cands.sort_by(|a, b| {
            (a.provenance.clone(), &a.lhs, &a.rhs).cmp(&(b.provenance.clone(), &b.lhs, &b.rhs))
        });
        for c in cands {
            let (Some(&a), Some(&b)) = (index.get(&c.lhs), index.get(&c.rhs)) else {
                continue;
            };
            if uf.union(a, b) {
                out.push(Binomial {
                    lhs: c.lhs,
                    rhs: c.rhs,
                    provenance: c.provenance,
                });
            }
        }
        if fill {
            for i in 1..elems.len() {
                if uf.union(0, i) {
                    out.push(Binomial {
                        lhs: elems[0].clone(),
                        rhs: elems[i].clone(),
                        provenance: Provenance::ToricKernel,
                    });
                }
            }
        }
    }
    out
}

fn prepare(sys: &MatchingSystem) -> Result<(WalkSet, MatchingGraph)> {
    let ws = enumerate_irreducible_walks(sys)?;
    let g = build_graph(&sys.presolve().system)?;
    Ok((ws, g))
}

/// Irredundant relations arising from X-configurations alone.
pub fn find_x_configurations(sys: &MatchingSystem, ws: &WalkSet) -> Result<Vec<Binomial>> {
    let g = build_graph(&sys.presolve().system)?;
    let mut split = Splitter::new(&ws.generators);
    let cands = x_candidates(&g, &mut split)?;
    Ok(minimize(cands, &ws.generators, false))
}

/// Irredundant relations arising from H-configurations alone.
pub fn find_h_configurations(sys: &MatchingSystem, ws: &WalkSet) -> Result<Vec<Binomial>> {
    let g = build_graph(&sys.presolve().system)?;
    let mut split = Splitter::new(&ws.generators);
    let cands = h_candidates(&g, &mut split)?;
    Ok(minimize(cands, &ws.generators, false))
}

/// Generators and a minimal set of binomial relations.
pub fn presentation(sys: &MatchingSystem) -> Result<Presentation> {
    let (ws, g) = prepare(sys)?;
    let mut split = Splitter::new(&ws.generators);
    let mut cands = x_candidates(&g, &mut split)?;
    cands.extend(h_candidates(&g, &mut split)?);
    let relations = minimize(cands, &ws.generators, true);
    for r in &relations {
        if multiset_sum(&r.lhs, &ws.generators) != multiset_sum(&r.rhs, &ws.generators) {
            return Err(Error::Invariant(format!(
                "relation {} is unbalanced",
                r.render(&ws.generators)
            )));
        }
    }
    Ok(Presentation {
        generators: ws.generators,
        relations,
        forced: ws.forced,
        free: ws.free,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn named(p: &Presentation, sys: &MatchingSystem) -> HashMap<String, Vec<String>> {
        p.generators
            .iter()
            .map(|g| {
                let mut s = g.support(sys);
                s.sort();
                (g.name.clone(), s)
            })
            .collect()
    }

    fn side(p: &Presentation, sys: &MatchingSystem, s: &[usize]) -> Vec<Vec<String>> {
        let n = named(p, sys);
        let mut v: Vec<Vec<String>> = s
            .iter()
            .map(|&g| n[&p.generators[g].name].clone())
            .collect();
        v.sort();
        v
    }

    fn sorted(xs: &[&str]) -> Vec<String> {
        let mut v: Vec<String> = xs.iter().map(|s| s.to_string()).collect();
        v.sort();
        v
    }

    type Sides = Vec<Vec<String>>;

    #[test]
    fn closing_example_relations() {
        let sys = closing();
        let p = presentation(&sys).unwrap();
        assert_eq!(p.generators.len(), 8);
        assert_eq!(p.relations.len(), 2);
        let y1 = sorted(&["a1", "a4", "b4", "b1"]);
        let y2 = sorted(&["a5", "a2", "b2", "b5"]);
        let x1 = sorted(&["a1", "a5"]);
        let x2 = sorted(&["b1", "b5"]);
        let b1 = sorted(&["a2", "b2", "b4", "a4"]);
        let b2 = sorted(&["a3", "b3"]);
        let z1 = sorted(&["a2", "b3", "a4"]);
        let z2 = sorted(&["b2", "a3", "b4"]);
        let norm = |(a, b): (Vec<Vec<String>>, Vec<Vec<String>>)| {
            if (a.len(), &a) <= (b.len(), &b) {
                (a, b)
            } else {
                (b, a)
            }
        };
        let mut want: Vec<_> = vec![
            {
                let mut l = vec![y1, y2];
                l.sort();
                let mut r = vec![x1, x2, b1.clone()];
                r.sort();
                (l, r)
            },
            {
                let mut l = vec![z1, z2];
                l.sort();
                let mut r = vec![b1, b2];
                r.sort();
                (l, r)
            },
        ]
        .into_iter()
        .map(norm)
        .collect();
        let mut got: Vec<(Sides, Sides)> = p
            .relations
            .iter()
            .map(|r| {
                let (a, b) = (side(&p, &sys, &r.lhs), side(&p, &sys, &r.rhs));
                if (a.len(), &a) <= (b.len(), &b) {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert!(p
            .relations
            .iter()
            .all(|r| r.provenance != Provenance::ToricKernel));
        assert!(p
            .relations
            .iter()
            .any(|r| matches!(r.provenance, Provenance::X { .. })));
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        let h = find_h_configurations(&sys, &ws).unwrap();
        assert!(h.iter().any(|r| {
            let (a, b) = (side(&p, &sys, &r.lhs), side(&p, &sys, &r.rhs));
            a.iter().chain(&b).any(|s| s == &sorted(&["a3", "b3"]))
        }));
    }

    #[test]
    fn free_only_system_has_no_relations() {
        let sys = MatchingSystem::from_named(&["p", "q", "r"], &[]).unwrap();
        let p = presentation(&sys).unwrap();
        assert_eq!(p.generators.len(), 3);
        assert!(p.relations.is_empty());
    }

    #[test]
    fn single_string_has_no_x_relation() {
        let sys = MatchingSystem::from_named(&["x", "y"], &[(&["x"], &["y"])]).unwrap();
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        assert_eq!(ws.generators.len(), 1);
        assert!(find_x_configurations(&sys, &ws).unwrap().is_empty());
        assert!(find_h_configurations(&sys, &ws).unwrap().is_empty());
    }

    #[test]
    fn symmetric_double_string_swap_is_trivial() {
        // x + y = z + w: strings x z, x w, y z, y w with xz + yw = xw + yz.
        let sys = MatchingSystem::from_named(&["x", "y", "z", "w"], &[(&["x", "y"], &["z", "w"])])
            .unwrap();
        let p = presentation(&sys).unwrap();
        assert_eq!(p.generators.len(), 4);
        assert_eq!(p.relations.len(), 1);
        // With one partial string per side the recombination is the identity.
        let one = MatchingSystem::from_named(&["x", "z"], &[(&["x"], &["z"])]).unwrap();
        let ws = enumerate_irreducible_walks(&one).unwrap();
        assert!(find_x_configurations(&one, &ws).unwrap().is_empty());
    }

    #[test]
    fn fiber_enumeration() {
        let sys = MatchingSystem::from_named(&["x", "y", "z", "w"], &[(&["x", "y"], &["z", "w"])])
            .unwrap();
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        let all = vec![1, 1, 1, 1];
        assert_eq!(fiber(&all, &ws.generators).len(), 2);
        assert_eq!(
            fiber(&[0, 0, 0, 0], &ws.generators),
            vec![Vec::<usize>::new()]
        );
    }

    #[test]
    fn relations_are_balanced_and_disjoint() {
        for sys in [closing(), eleven()] {
            let p = presentation(&sys).unwrap();
            for r in &p.relations {
                assert_eq!(
                    multiset_sum(&r.lhs, &p.generators),
                    multiset_sum(&r.rhs, &p.generators)
                );
                assert!(r.lhs.iter().all(|g| !r.rhs.contains(g)));
            }
        }
    }
}
