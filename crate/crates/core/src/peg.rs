//! The partition equivalence graph.
//!
//! Vertices are labeled simple roots `α_k^{(x,s)}` for each incidence `(x, s)`
//! and `1 ≤ k ≤ β_x − 1`. A vertex edge joins `α_k^{(x,s1)}` and
//! `α_{β_x−k}^{(x,s2)}` at a coupled vertex; a colored edge for `a: x → y` of
//! color `s` joins `α_k^{(x,s)}` and `α_{β_y−k}^{(y,s)}` for `k < r(a)`.
//! Every root carries at most one edge of each type, so components are
//! alternating paths, even cycles or single roots.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::{ColoredQuiver, Incidence};
use crate::error::{Error, Result};
use crate::matching::MatchingSystem;
use crate::rank::{is_rank_sequence, rank_violation, DimensionVector, RankSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Root {
    pub vertex: usize,
    pub color: usize,
    /// The `k` of `α_k`, at least 1.
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct Peg {
    cq: ColoredQuiver,
    beta: DimensionVector,
    r: RankSequence,
    roots: Vec<Root>,
    /// First root of each incidence, in incidence order.
    offsets: Vec<usize>,
    vertex_edge: Vec<Option<usize>>,
    colored_edge: Vec<Option<(usize, usize)>>,
}

/// Builds the graph. `r` must satisfy the rank inequalities for `beta`.
pub fn build_peg(cq: &ColoredQuiver, beta: &DimensionVector, r: &RankSequence) -> Result<Peg> {
    if !is_rank_sequence(cq, beta, r)? {
        let inc = rank_violation(cq, beta, r).expect("violation exists");
        return Err(Error::Precondition(format!(
            "not a rank sequence: r(in) + r(out) exceeds β at vertex `{}`",
            cq.quiver().vertex_id(inc.vertex)
        )));
    }
    let mut roots = Vec::new();
    let mut offsets = Vec::with_capacity(cq.incidences().len());
    for inc in cq.incidences() {
        offsets.push(roots.len());
        for k in 1..beta.at(inc.vertex) {
            roots.push(Root {
                vertex: inc.vertex,
                color: inc.color,
                index: k,
            });
        }
    }
    let mut peg = Peg {
        cq: cq.clone(),
        beta: beta.clone(),
        r: r.clone(),
        vertex_edge: vec![None; roots.len()],
        colored_edge: vec![None; roots.len()],
        roots,
        offsets,
    };
    let q = cq.quiver();
    for x in 0..q.vertex_count() {
        if let [i1, i2] = *cq.incidences_at(x) {
            let b = beta.at(x);
            for k in 1..b {
                let (p, t) = (peg.offsets[i1] + k - 1, peg.offsets[i2] + b - k - 1);
                peg.vertex_edge[p] = Some(t);
                peg.vertex_edge[t] = Some(p);
            }
        }
    }
    for (a, arrow) in q.arrows().iter().enumerate() {
        let s = cq.coloring().color(a);
        let ti = cq.find_incidence(arrow.tail, s).expect("tail incidence");
        let hi = cq.find_incidence(arrow.head, s).expect("head incidence");
        let by = beta.at(arrow.head);
        for k in 1..r.at(a) {
            let p = peg.offsets[ti] + k - 1;
            let t = peg.offsets[hi] + by - k - 1;
            if peg.colored_edge[p].is_some() || peg.colored_edge[t].is_some() {
                return Err(Error::Invariant(format!(
                    "root carries two colored edges at arrow `{}`",
                    arrow.id
                )));
            }
            peg.colored_edge[p] = Some((t, a));
            peg.colored_edge[t] = Some((p, a));
        }
    }
    Ok(peg)
}

impl Peg {
    pub fn colored_quiver(&self) -> &ColoredQuiver {
        &self.cq
    }

    pub fn beta(&self) -> &DimensionVector {
        &self.beta
    }

    pub fn ranks(&self) -> &RankSequence {
        &self.r
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> Root {
        self.roots[i]
    }

    /// Index of `α_k^{(x,s)}`, if that root exists.
    pub fn root_index(&self, vertex: usize, color: usize, k: usize) -> Option<usize> {
        let inc = self.cq.find_incidence(vertex, color)?;
        (k >= 1 && k < self.beta.at(vertex)).then(|| self.offsets[inc] + k - 1)
    }

    /// `vertex/color/k` with the color 1-based.
    pub fn label(&self, i: usize) -> String {
        let r = self.roots[i];
        format!(
            "{}/{}/{}",
            self.cq.quiver().vertex_id(r.vertex),
            r.color + 1,
            r.index
        )
    }

    pub fn incidence_of(&self, i: usize) -> &Incidence {
        let r = self.roots[i];
        let inc = self
            .cq
            .find_incidence(r.vertex, r.color)
            .expect("root incidence");
        self.cq.incidence(inc)
    }

    pub fn vertex_partner(&self, i: usize) -> Option<usize> {
        self.vertex_edge[i]
    }

    /// Colored neighbor and the arrow of the edge.
    pub fn colored_partner(&self, i: usize) -> Option<(usize, usize)> {
        self.colored_edge[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.vertex_edge[i].is_some() as usize + self.colored_edge[i].is_some() as usize
    }

    /// Vertex edges `(p, q)` with `p < q`, sorted.
    pub fn vertex_edges(&self) -> Vec<(usize, usize)> {
        (0..self.roots.len())
            .filter_map(|p| self.vertex_edge[p].filter(|&q| p < q).map(|q| (p, q)))
            .collect()
    }

    /// Colored edges `(p, q, arrow)` with `p < q`, sorted.
    pub fn colored_edges(&self) -> Vec<(usize, usize, usize)> {
        (0..self.roots.len())
            .filter_map(|p| {
                self.colored_edge[p]
                    .filter(|&(q, _)| p < q)
                    .map(|(q, a)| (p, q, a))
            })
            .collect()
    }

    /// Walks from `start` leaving through an edge of the given type first,
    /// alternating types, until the walk ends or returns to `start`.
    fn walk(&self, start: usize, vertex_first: bool) -> (Vec<usize>, bool) {
        let mut seq = vec![start];
        let mut cur = start;
        let mut use_vertex = vertex_first;
        loop {
            let next = if use_vertex {
                self.vertex_edge[cur]
            } else {
                self.colored_edge[cur].map(|(q, _)| q)
            };
            match next {
                None => return (seq, false),
                Some(n) if n == start => return (seq, true),
                Some(n) => {
                    seq.push(n);
                    cur = n;
                    use_vertex = !use_vertex;
                }
            }
        }
    }

    /// Connected components ordered by smallest root.
    pub fn components(&self) -> Vec<Component> {
        let n = self.roots.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let comp = match self.degree(i) {
                0 => Component {
                    kind: ComponentKind::Isolated,
                    roots: vec![i],
                },
                _ => {
                    let (fwd, closed) = self.walk(i, true);
                    if closed {
                        Component {
                            kind: ComponentKind::Band,
                            roots: self.canonical_band(&fwd),
                        }
                    } else {
                        let (back, _) = self.walk(i, false);
                        let mut seq: Vec<usize> = back.into_iter().rev().collect();
                        seq.extend_from_slice(&fwd[1..]);
                        if seq[0] > seq[seq.len() - 1] {
                            seq.reverse();
                        }
                        Component {
                            kind: ComponentKind::String,
                            roots: seq,
                        }
                    }
                }
            };
            for &r in &comp.roots {
                seen[r] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Minimal root sequence over rotations and reflections whose first step
    /// is a vertex edge.
    fn canonical_band(&self, cycle: &[usize]) -> Vec<usize> {
        let n = cycle.len();
        let mut best: Option<Vec<usize>> = None;
        for start in 0..n {
            for dir in [1isize, -1] {
                let seq: Vec<usize> = (0..n as isize)
                    .map(|t| cycle[(start as isize + dir * t).rem_euclid(n as isize) as usize])
                    .collect();
                if self.vertex_edge[seq[0]] != Some(seq[1]) {
                    continue;
                }
                if best.as_ref().is_none_or(|b| seq < *b) {
                    best = Some(seq);
                }
            }
        }
        best.expect("band has a vertex edge")
    }

    /// The other endpoint of the string through endpoint `root`.
    pub fn theta(&self, root: usize) -> Result<usize> {
        match self.degree(root) {
            0 => Err(Error::Domain(format!("Θ at {}", self.label(root)))),
            1 => {
                let (seq, _) = self.walk(root, self.vertex_edge[root].is_some());
                Ok(*seq.last().unwrap())
            }
            _ => Err(Error::Input(format!(
                "{} is not an endpoint",
                self.label(root)
            ))),
        }
    }

    /// Classifies every root of degree at most one.
    pub fn endpoints(&self) -> Vec<Endpoint> {
        (0..self.roots.len())
            .filter(|&i| self.degree(i) <= 1)
            .map(|i| self.classify(i))
            .collect()
    }

    /// Endpoint data of root `i`, whatever its degree.
    pub fn classify(&self, i: usize) -> Endpoint {
        let root = self.roots[i];
        let inc = *self.incidence_of(i);
        let b = self.beta.at(root.vertex);
        let ro = self.r.of(inc.outgoing);
        let ri = self.r.of(inc.incoming);
        let k = root.index;
        let (subtype, phi) = if k == ro && k + ri == b {
            (
                Subtype::A,
                vec![inc.outgoing.unwrap(), inc.incoming.unwrap()],
            )
        } else if k == ro {
            (Subtype::B, vec![inc.outgoing.unwrap()])
        } else if k + ri == b {
            (Subtype::C, vec![inc.incoming.unwrap()])
        } else {
            (Subtype::D, Vec::new())
        };
        let mut phi = phi;
        phi.sort_unstable();
        Endpoint {
            root: i,
            coupled: self.cq.is_coupled(root.vertex),
            subtype,
            phi,
        }
    }

    /// DOT text: vertex edges solid, colored edges dashed and labeled.
    pub fn to_dot(&self) -> String {
        let q = self.cq.quiver();
        let mut s = String::from("digraph peg {\n  edge [dir=none];\n");
        for i in 0..self.roots.len() {
            let _ = writeln!(s, "  \"{}\";", self.label(i));
        }
        for (p, t) in self.vertex_edges() {
            let _ = writeln!(s, "  \"{}\" -> \"{}\";", self.label(p), self.label(t));
        }
        for (p, t, a) in self.colored_edges() {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [style=dashed, label=\"{}\"];",
                self.label(p),
                self.label(t),
                q.arrow_id(a)
            );
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    String,
    Band,
    Isolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub kind: ComponentKind,
    /// Roots in walk order.
    pub roots: Vec<usize>,
}

impl Component {
    pub fn endpoints(&self) -> Option<(usize, usize)> {
        match self.kind {
            ComponentKind::String => Some((self.roots[0], *self.roots.last().unwrap())),
            _ => None,
        }
    }

    pub fn min_root(&self) -> usize {
        *self.roots.iter().min().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Subtype {
    A,
    B,
    C,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Endpoint {
    pub root: usize,
    /// Type I when the vertex is coupled, type II when lonely.
    pub coupled: bool,
    pub subtype: Subtype,
    /// Arrows with coefficient 1 in `φ`, sorted.
    pub phi: Vec<usize>,
}

impl Endpoint {
    /// `Ia`, `IIc` and so on.
    pub fn type_name(&self) -> String {
        let t = if self.coupled { "I" } else { "II" };
        let s = match self.subtype {
            Subtype::A => "a",
            Subtype::B => "b",
            Subtype::C => "c",
            Subtype::D => "d",
        };
        format!("{t}{s}")
    }

    /// Arrows on this endpoint's side of a string equation: `φ` for type I,
    /// nothing for type II since lonely roots carry the value 0.
    pub fn side(&self) -> &[usize] {
        if self.coupled {
            &self.phi
        } else {
            &[]
        }
    }

    pub fn phi_value(&self, u: &[u32]) -> u32 {
        self.phi.iter().map(|&a| u[a]).sum()
    }
}

pub fn components(peg: &Peg) -> Vec<Component> {
    peg.components()
}

pub fn classify_endpoints(peg: &Peg) -> Vec<Endpoint> {
    peg.endpoints()
}

pub fn theta(peg: &Peg, root: usize) -> Result<usize> {
    peg.theta(root)
}

pub fn export_dot(peg: &Peg) -> String {
    peg.to_dot()
}

/// Why an equation of the extracted system exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum EquationSource {
    /// `φ(e) = φ(Θe)` along the string with this component index.
    String {
        component: usize,
        ends: (usize, usize),
    },
    /// An isolated root at a lonely vertex has value 0.
    LonelyRoot { root: usize },
    /// An arrow of rank 0 has no parts.
    ZeroRank { arrow: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct PegExtract {
    pub system: MatchingSystem,
    /// Source of equation `i`.
    pub sources: Vec<EquationSource>,
    pub components: Vec<Component>,
    /// Component indices of the bands.
    pub bands: Vec<usize>,
    /// Arrows in no equation.
    pub free_arrows: Vec<usize>,
    /// Component of each root.
    pub component_of: Vec<usize>,
}

impl PegExtract {
    /// The endpoint of string component `c` that carries its value: the
    /// first root of its canonical walk.
    pub fn string_endpoint(&self, peg: &Peg, c: usize) -> Endpoint {
        peg.classify(self.components[c].roots[0])
    }
}

/// The matching system cut out by the PEG: one equation per string, plus
/// equations forcing zero where a value is pinned to 0.
pub fn extract_matching_system(peg: &Peg) -> Result<PegExtract> {
    let q = peg.colored_quiver().quiver();
    let comps = peg.components();
    let mut component_of = vec![usize::MAX; peg.num_roots()];
    for (c, comp) in comps.iter().enumerate() {
        for &r in &comp.roots {
            component_of[r] = c;
        }
    }
    let mut equations = Vec::new();
    let mut sources = Vec::new();
    let mut push = |lhs: Vec<usize>, rhs: Vec<usize>, src: EquationSource| {
        let l: BTreeSet<usize> = lhs.iter().copied().collect();
        let r: BTreeSet<usize> = rhs.iter().copied().collect();
        let lhs: Vec<usize> = l.difference(&r).copied().collect();
        let rhs: Vec<usize> = r.difference(&l).copied().collect();
        if lhs.is_empty() && rhs.is_empty() {
            return;
        }
        equations.push((lhs, rhs));
        sources.push(src);
    };
    for (c, comp) in comps.iter().enumerate() {
        match comp.kind {
            ComponentKind::String => {
                let (e, f) = comp.endpoints().unwrap();
                let (ce, cf) = (peg.classify(e), peg.classify(f));
                push(
                    ce.side().to_vec(),
                    cf.side().to_vec(),
                    EquationSource::String {
                        component: c,
                        ends: (e, f),
                    },
                );
            }
            ComponentKind::Isolated => {
                let root = comp.roots[0];
                let ep = peg.classify(root);
                if !ep.coupled {
                    push(
                        ep.phi.clone(),
                        Vec::new(),
                        EquationSource::LonelyRoot { root },
                    );
                }
            }
            ComponentKind::Band => {}
        }
    }
    for a in 0..q.arrow_count() {
        if peg.ranks().at(a) == 0 {
            push(vec![a], Vec::new(), EquationSource::ZeroRank { arrow: a });
        }
    }
    let names = q.arrows().iter().map(|a| a.id.clone()).collect();
    let system = MatchingSystem::new(names, equations)?;
    let report = system.validate();
    if !report.ok {
        return Err(Error::Invariant(format!(
            "extracted system violates axioms: {report}"
        )));
    }
    let bands = (0..comps.len())
        .filter(|&c| comps[c].kind == ComponentKind::Band)
        .collect();
    Ok(PegExtract {
        free_arrows: system.unused_vars(),
        system,
        sources,
        bands,
        components: comps,
        component_of,
    })
}
