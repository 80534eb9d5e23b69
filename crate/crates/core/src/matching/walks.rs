//! Alternating strings and bands on the matching graph, and the irreducible
//! ones that generate the semigroup.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::graph::{build_graph, MatchingGraph};
use super::MatchingSystem;
use crate::error::{Error, Result};

/// One edge of a walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Step {
    Solid(usize),
    Dotted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum WalkKind {
    String,
    Band,
}

/// `vertices[k]` and `vertices[k + 1]` are the ends of `steps[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Walk {
    pub kind: WalkKind,
    pub vertices: Vec<usize>,
    pub steps: Vec<Step>,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Vertices and edges interleaved; dotted edges encode as 0, variable `j`
    /// as `j + 1`.
    pub fn encoding(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.steps.len() + 1);
        for (k, s) in self.steps.iter().enumerate() {
            out.push(self.vertices[k]);
            out.push(match s {
                Step::Dotted => 0,
                Step::Solid(j) => j + 1,
            });
        }
        if let Some(&v) = self.vertices.last() {
            out.push(v);
        }
        out
    }

    fn reversed(&self) -> Walk {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        let mut steps = self.steps.clone();
        steps.reverse();
        Walk {
            kind: self.kind,
            vertices,
            steps,
        }
    }

    /// Strings up to reversal; bands up to rotation and reversal, always
    /// starting with a solid edge.
    pub fn canonical(&self) -> Walk {
        match self.kind {
            WalkKind::String => {
                let r = self.reversed();
                if r.encoding() < self.encoding() {
                    r
                } else {
                    self.clone()
                }
            }
            WalkKind::Band => {
                let n = self.steps.len();
                let mut best: Option<(Vec<usize>, Walk)> = None;
                for base in [self.clone(), self.reversed()] {
                    for k in 0..n {
                        if base.steps[k] == Step::Dotted {
                            continue;
                        }
                        let steps: Vec<Step> = (0..n).map(|i| base.steps[(k + i) % n]).collect();
                        let vertices: Vec<usize> =
                            (0..=n).map(|i| base.vertices[(k + i) % n]).collect();
                        let w = Walk {
                            kind: WalkKind::Band,
                            vertices,
                            steps,
                        };
                        let enc = w.encoding();
                        if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                            best = Some((enc, w));
                        }
                    }
                }
                best.map(|(_, w)| w).unwrap_or_else(|| self.clone())
            }
        }
    }

    /// Consecutive edges differ in type.
    pub fn is_alternating(&self) -> bool {
        self.steps.windows(2).all(|w| {
            matches!(
                w,
                [Step::Dotted, Step::Solid(_)] | [Step::Solid(_), Step::Dotted]
            )
        })
    }

    /// Parses `3 E 8 x9 7 E 2 x3 3` with 1-based vertices and `E` for a
    /// dotted edge. The kind is inferred from the shape.
    pub fn from_text(sys: &MatchingSystem, text: &str) -> Result<Walk> {
        let g = build_graph(sys)?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() || tokens.len().is_multiple_of(2) {
            return Err(Error::Input(format!("malformed walk `{text}`")));
        }
        let mut vertices = Vec::new();
        let mut steps = Vec::new();
        for (k, t) in tokens.iter().enumerate() {
            if k % 2 == 0 {
                let v: usize = t
                    .parse()
                    .ok()
                    .filter(|&v| v >= 1 && v <= g.num_vertices())
                    .ok_or_else(|| Error::Input(format!("bad vertex `{t}`")))?;
                vertices.push(v - 1);
            } else if *t == "E" {
                steps.push(Step::Dotted);
            } else {
                let j = sys
                    .var_names()
                    .iter()
                    .position(|n| n == t)
                    .ok_or_else(|| Error::Input(format!("unknown variable `{t}`")))?;
                steps.push(Step::Solid(j));
            }
        }
        for (k, s) in steps.iter().enumerate() {
            let (a, b) = (vertices[k], vertices[k + 1]);
            let ok = match s {
                Step::Dotted => g.partner(a) == b,
                Step::Solid(j) => g
                    .solid_edges()
                    .iter()
                    .any(|e| e.var == *j && (e.ends == (a, b) || e.ends == (b, a))),
            };
            if !ok {
                return Err(Error::Input(format!(
                    "step {} of `{text}` is not an edge",
                    k + 1
                )));
            }
        }
        let is_loop =
            |k: usize| matches!(steps[k], Step::Solid(_)) && vertices[k] == vertices[k + 1];
        let n = steps.len();
        let kind = if n >= 1 && is_loop(0) && is_loop(n - 1) {
            WalkKind::String
        } else if vertices[0] == vertices[n] && (0..n).all(|k| !is_loop(k)) {
            WalkKind::Band
        } else {
            return Err(Error::Input(format!(
                "`{text}` is neither a string nor a band"
            )));
        };
        let w = Walk {
            kind,
            vertices,
            steps,
        };
        let closing_ok = kind == WalkKind::String
            || matches!(
                (w.steps[0], w.steps[n - 1]),
                (Step::Dotted, Step::Solid(_)) | (Step::Solid(_), Step::Dotted)
            );
        if !w.is_alternating() || !closing_ok {
            return Err(Error::Input(format!("`{text}` is not alternating")));
        }
        Ok(w)
    }

    /// `v E v' x v''` rendering with 1-based vertices.
    pub fn to_text(&self, sys: &MatchingSystem) -> String {
        let mut parts = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            parts.push((self.vertices[k] + 1).to_string());
            parts.push(match s {
                Step::Dotted => "E".to_string(),
                Step::Solid(j) => sys.var_name(*j).to_string(),
            });
        }
        if let Some(v) = self.vertices.last() {
            parts.push((v + 1).to_string());
        }
        parts.join(" ")
    }
}

/// Occurrence count of each variable along `w`.
pub fn walk_vector(w: &Walk, num_vars: usize) -> Vec<u32> {
    let mut u = vec![0; num_vars];
    for s in &w.steps {
        if let Step::Solid(j) = s {
            u[*j] += 1;
        }
    }
    u
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GeneratorKind {
    String,
    Band,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub vector: Vec<u32>,
    pub kind: GeneratorKind,
    pub walk: Option<Walk>,
}

impl Generator {
    /// Variable names in the support, with multiplicity suffixes above one.
    pub fn support(&self, sys: &MatchingSystem) -> Vec<String> {
        self.vector
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, &c)| {
                if c == 1 {
                    sys.var_name(j).to_string()
                } else {
                    format!("{}^{c}", sys.var_name(j))
                }
            })
            .collect()
    }
}

/// Output of the walk search.
#[derive(Clone, Debug)]
pub struct WalkSet {
    /// Irreducible walk vectors followed by unit vectors of free variables.
    pub generators: Vec<Generator>,
    /// Every string and band vector found within the visit cap, with its
    /// shortest walk.
    pub admissible: Vec<(Walk, Vec<u32>)>,
    /// Variables every member sets to zero.
    pub forced: Vec<usize>,
    /// Variables occurring in no equation; each is a unit generator.
    pub free: Vec<usize>,
}

/// Each form may be touched by at most this many solid edges along a walk.
pub const VISIT_CAP: u8 = 2;

struct Search<'g> {
    g: &'g MatchingGraph,
    count: Vec<u8>,
    vertices: Vec<usize>,
    steps: Vec<Step>,
    out: Vec<Walk>,
}

impl<'g> Search<'g> {
    fn new(g: &'g MatchingGraph) -> Self {
        Search {
            g,
            count: vec![0; g.num_vertices()],
            vertices: Vec::new(),
            steps: Vec::new(),
            out: Vec::new(),
        }
    }

    fn push_solid(&mut self, from: usize, var: usize, to: usize) {
        self.count[from] += 1;
        if to != from {
            self.count[to] += 1;
        }
        if self.vertices.is_empty() {
            self.vertices.push(from);
        }
        self.steps.push(Step::Solid(var));
        self.vertices.push(to);
    }

    fn pop_solid(&mut self) {
        self.steps.pop();
        let to = self.vertices.pop().unwrap();
        let from = *self.vertices.last().unwrap();
        self.count[from] -= 1;
        if to != from {
            self.count[to] -= 1;
        }
        if self.steps.is_empty() {
            self.vertices.clear();
        }
    }

    fn push_dotted(&mut self) -> usize {
        let at = *self.vertices.last().unwrap();
        let next = self.g.partner(at);
        self.steps.push(Step::Dotted);
        self.vertices.push(next);
        next
    }

    fn pop_dotted(&mut self) {
        self.steps.pop();
        self.vertices.pop();
    }

    fn fits(&self, a: usize, b: usize) -> bool {
        if a == b {
            self.count[a] < VISIT_CAP
        } else {
            self.count[a] < VISIT_CAP && self.count[b] < VISIT_CAP
        }
    }

    /// Strings starting with the loop `e`.
    fn strings_from(&mut self, e: usize) {
        let edge = *self.g.solid_edge(e);
        let v = edge.ends.0;
        self.push_solid(v, edge.var, v);
        let c = self.push_dotted();
        self.extend_string(c);
        self.pop_dotted();
        self.pop_solid();
    }

    fn extend_string(&mut self, c: usize) {
        for &e in self.g.incident(c) {
            let edge = *self.g.solid_edge(e);
            let other = edge.other(c);
            if !self.fits(c, other) {
                continue;
            }
            self.push_solid(c, edge.var, other);
            if edge.is_loop() {
                self.out.push(Walk {
                    kind: WalkKind::String,
                    vertices: self.vertices.clone(),
                    steps: self.steps.clone(),
                });
            } else {
                let next = self.push_dotted();
                self.extend_string(next);
                self.pop_dotted();
            }
            self.pop_solid();
        }
    }

    /// Bands whose first edge is `e` traversed from `start`.
    fn bands_from(&mut self, e: usize, start: usize) {
        let edge = *self.g.solid_edge(e);
        let other = edge.other(start);
        self.push_solid(start, edge.var, other);
        let c = self.push_dotted();
        self.extend_band(start, c);
        self.pop_dotted();
        self.pop_solid();
    }

    fn extend_band(&mut self, start: usize, c: usize) {
        if c == start {
            self.out.push(Walk {
                kind: WalkKind::Band,
                vertices: self.vertices.clone(),
                steps: self.steps.clone(),
            });
            return;
        }
        for &e in self.g.incident(c) {
            let edge = *self.g.solid_edge(e);
            if edge.is_loop() {
                continue;
            }
            let other = edge.other(c);
            if !self.fits(c, other) {
                continue;
            }
            self.push_solid(c, edge.var, other);
            let next = self.push_dotted();
            self.extend_band(start, next);
            self.pop_dotted();
            self.pop_solid();
        }
    }
}

/// All strings and bands within the visit cap, canonicalized, one per
/// vector (the shortest, then the smallest encoding).
pub fn enumerate_walks(g: &MatchingGraph) -> Vec<(Walk, Vec<u32>)> {
    #[derive(Clone, Copy)]
    enum Seed {
        Loop(usize),
        Edge(usize, usize),
    }
    let mut seeds = Vec::new();
    for (e, edge) in g.solid_edges().iter().enumerate() {
        if edge.is_loop() {
            seeds.push(Seed::Loop(e));
        } else {
            seeds.push(Seed::Edge(e, edge.ends.0));
            seeds.push(Seed::Edge(e, edge.ends.1));
        }
    }
    let found: Vec<Vec<Walk>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut s = Search::new(g);
            match seed {
                Seed::Loop(e) => s.strings_from(e),
                Seed::Edge(e, start) => s.bands_from(e, start),
            }
            s.out
        })
        .collect();
    let mut best: HashMap<Vec<u32>, Walk> = HashMap::new();
    for w in found.into_iter().flatten() {
        let w = w.canonical();
        let u = walk_vector(&w, g.num_vars());
        match best.get(&u) {
            Some(old) if (old.len(), old.encoding()) <= (w.len(), w.encoding()) => {}
            _ => {
                best.insert(u, w);
            }
        }
    }
    let mut out: Vec<(Walk, Vec<u32>)> = best.into_iter().map(|(u, w)| (w, u)).collect();
    out.sort_by_key(|a| walk_order(&a.0));
    out
}

fn walk_order(w: &Walk) -> (WalkKind, usize, Vec<usize>) {
    (w.kind, w.len(), w.encoding())
}

/// Decides whether vectors are sums of members of a fixed finite set.
pub(crate) struct Decomposer<'a> {
    parts: &'a [Vec<u32>],
    memo: HashMap<Vec<u32>, bool>,
}

impl<'a> Decomposer<'a> {
    pub(crate) fn new(parts: &'a [Vec<u32>]) -> Self {
        Decomposer {
            parts,
            memo: HashMap::new(),
        }
    }

    /// True iff `x` is a (possibly empty) sum of parts.
    pub(crate) fn representable(&mut self, x: &[u32]) -> bool {
        let Some(first) = x.iter().position(|&c| c > 0) else {
            return true;
        };
        if let Some(&r) = self.memo.get(x) {
            return r;
        }
        let mut ok = false;
        for p in self.parts {
            // Some part must cover the first nonzero coordinate.
            if p[first] == 0 || !le(p, x) {
                continue;
            }
            let rest = sub(x, p);
            if self.representable(&rest) {
                ok = true;
                break;
            }
        }
        self.memo.insert(x.to_vec(), ok);
        ok
    }

    /// True iff `x` is a sum of two nonzero representable vectors.
    pub(crate) fn reducible(&mut self, x: &[u32]) -> bool {
        let parts = self.parts;
        parts.iter().any(|p| {
            p.as_slice() != x && le(p, x) && {
                let rest = sub(x, p);
                rest.iter().any(|&c| c > 0) && self.representable(&rest)
            }
        })
    }
}

pub(crate) fn le(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn sub(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Irreducible generators of the matching semigroup: irreducible walk vectors
/// plus one unit vector per free variable.
pub fn enumerate_irreducible_walks(sys: &MatchingSystem) -> Result<WalkSet> {
    let report = sys.validate();
    if !report.ok {
        return Err(Error::Invalid(report));
    }
    let pre = sys.presolve();
    let g = build_graph(&pre.system)?;
    let admissible = enumerate_walks(&g);
    for (w, u) in &admissible {
        if !sys.is_member(u)? {
            return Err(Error::Invariant(format!(
                "walk {} leaves the semigroup",
                w.to_text(sys)
            )));
        }
    }
    let vectors: Vec<Vec<u32>> = admissible.iter().map(|(_, u)| u.clone()).collect();
    let mut dec = Decomposer::new(&vectors);
    let mut generators = Vec::new();
    for (w, u) in &admissible {
        if !dec.reducible(u) {
            let kind = match w.kind {
                WalkKind::String => GeneratorKind::String,
                WalkKind::Band => GeneratorKind::Band,
            };
            generators.push(Generator {
                name: String::new(),
                vector: u.clone(),
                kind,
                walk: Some(w.clone()),
            });
        }
    }
    let free: Vec<usize> = g
        .free_vars()
        .iter()
        .copied()
        .filter(|j| !pre.forced.contains(j))
        .collect();
    for &j in &free {
        let mut u = vec![0; sys.num_vars()];
        u[j] = 1;
        generators.push(Generator {
            name: String::new(),
            vector: u,
            kind: GeneratorKind::Free,
            walk: None,
        });
    }
    for (k, gen) in generators.iter_mut().enumerate() {
        gen.name = format!("g{}", k + 1);
    }
    Ok(WalkSet {
        generators,
        admissible,
        forced: pre.forced,
        free,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn supports(ws: &WalkSet, sys: &MatchingSystem) -> Vec<Vec<String>> {
        let mut s: Vec<Vec<String>> = ws
            .generators
            .iter()
            .map(|g| {
                let mut v = g.support(sys);
                v.sort();
                v
            })
            .collect();
        s.sort();
        s
    }

    #[test]
    fn string_vector_from_text() {
        let sys = eleven();
        let w = Walk::from_text(&sys, "5 x6 5 E 10 x11 9 E 4 x5 4").unwrap();
        assert_eq!(w.kind, WalkKind::String);
        assert_eq!(walk_vector(&w, 11), unit(11, &[4, 5, 10]));
    }

    #[test]
    fn band_vector_from_text() {
        let sys = eleven();
        let w = Walk::from_text(&sys, "3 E 8 x9 7 E 2 x3 3").unwrap();
        assert_eq!(w.kind, WalkKind::Band);
        let u = walk_vector(&w, 11);
        assert_eq!(u, unit(11, &[2, 8]));
        assert!(sys.is_member(&u).unwrap());
    }

    #[test]
    fn empty_walk_vector() {
        let w = Walk {
            kind: WalkKind::String,
            vertices: vec![],
            steps: vec![],
        };
        assert_eq!(walk_vector(&w, 3), vec![0, 0, 0]);
    }

    #[test]
    fn non_edges_rejected() {
        let sys = eleven();
        assert!(Walk::from_text(&sys, "3 E 7 x9 8").is_err());
        assert!(Walk::from_text(&sys, "3 x3 2").is_err());
    }

    #[test]
    fn closing_example_generators() {
        let sys = closing();
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        let want: Vec<Vec<&str>> = vec![
            vec!["a1", "a5"],
            vec!["b1", "b5"],
            vec!["a1", "a4", "b4", "b1"],
            vec!["a5", "a2", "b2", "b5"],
            vec!["a2", "b3", "a4"],
            vec!["b2", "a3", "b4"],
            vec!["a2", "b2", "b4", "a4"],
            vec!["a3", "b3"],
        ];
        let mut want: Vec<Vec<String>> = want
            .into_iter()
            .map(|v| {
                let mut v: Vec<String> = v.into_iter().map(String::from).collect();
                v.sort();
                v
            })
            .collect();
        want.sort();
        assert_eq!(supports(&ws, &sys), want);
        let strings = ws
            .generators
            .iter()
            .filter(|g| g.kind == GeneratorKind::String)
            .count();
        assert_eq!(strings, 4);
    }

    #[test]
    fn eleven_contains_both_walks() {
        let sys = eleven();
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        let vecs: Vec<&Vec<u32>> = ws.admissible.iter().map(|(_, u)| u).collect();
        assert!(vecs.contains(&&unit(11, &[4, 5, 10])));
        assert!(vecs.contains(&&unit(11, &[2, 8])));
        assert_eq!(ws.forced, vec![0, 1]);
        for g in &ws.generators {
            assert_eq!(g.vector[0] + g.vector[1], 0);
        }
    }

    #[test]
    fn loop_against_zero_form_is_forced() {
        let sys = MatchingSystem::from_named(&["x1"], &[(&["x1"], &[])]).unwrap();
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        assert!(ws.generators.is_empty());
        assert_eq!(ws.forced, vec![0]);
    }

    #[test]
    fn free_variables_are_unit_generators() {
        let sys = MatchingSystem::from_named(&["p", "q"], &[]).unwrap();
        let ws = enumerate_irreducible_walks(&sys).unwrap();
        assert_eq!(ws.generators.len(), 2);
        assert!(ws.generators.iter().all(|g| g.kind == GeneratorKind::Free));
        assert_eq!(ws.free, vec![0, 1]);
    }

    #[test]
    fn band_canonical_form_is_rotation_invariant() {
        let sys = closing();
        // a3 joins forms 3 and 4, b3 joins forms 7 and 8.
        let w = Walk::from_text(&sys, "3 a3 4 E 8 b3 7 E 3").unwrap();
        let c = w.canonical();
        let n = w.len();
        let rotated = Walk {
            kind: WalkKind::Band,
            vertices: (0..=n).map(|i| w.vertices[(i + 2) % n]).collect(),
            steps: (0..n).map(|i| w.steps[(i + 2) % n]).collect(),
        };
        assert_eq!(rotated.canonical(), c);
        let mut rev = w.clone();
        rev.vertices.reverse();
        rev.steps.reverse();
        assert_eq!(rev.canonical(), c);
    }

    #[test]
    fn generators_respect_degree_bound() {
        for sys in [closing(), eleven()] {
            let ws = enumerate_irreducible_walks(&sys).unwrap();
            for g in &ws.generators {
                assert!(sys.evaluate_all(&g.vector).iter().all(|&f| f <= 2));
                assert!(sys.is_member(&g.vector).unwrap());
            }
        }
    }
}
