//! Quivers, colorings and length-2 relation ideals.
//!
//! Vertex and arrow ids are opaque strings on the outside and dense indices
//! on the inside. Every public output that names an arrow or a vertex uses the
//! external id.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::report::ValidationReport;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// A finite acyclic quiver without loops.
#[derive(Clone, Debug)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
    out_arrows: Vec<Vec<usize>>,
    in_arrows: Vec<Vec<usize>>,
}

impl Quiver {
    /// Builds a quiver from vertex ids and `(arrow, tail, head)` triples.
    pub fn new<V, A>(vertices: V, arrows: A) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        A: IntoIterator<Item = (String, String, String)>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut arrow_list = Vec::new();
        let mut arrow_index = HashMap::new();
        for (id, tail, head) in arrows {
            if arrow_index.contains_key(&id) || vertex_index.contains_key(&id) {
                return Err(Error::DuplicateId(id));
            }
            let t = *vertex_index
                .get(&tail)
                .ok_or_else(|| Error::UnknownVertex(tail.clone()))?;
            let h = *vertex_index
                .get(&head)
                .ok_or_else(|| Error::UnknownVertex(head.clone()))?;
            if t == h {
                return Err(Error::Loop(id));
            }
            arrow_index.insert(id.clone(), arrow_list.len());
            arrow_list.push(Arrow {
                id,
                tail: t,
                head: h,
            });
        }
        let mut out_arrows = vec![Vec::new(); vertices.len()];
        let mut in_arrows = vec![Vec::new(); vertices.len()];
        for (i, a) in arrow_list.iter().enumerate() {
            out_arrows[a.tail].push(i);
            in_arrows[a.head].push(i);
        }
        let q = Quiver {
            vertices,
            arrows: arrow_list,
            vertex_index,
            arrow_index,
            out_arrows,
            in_arrows,
        };
        q.topological_order()?;
        Ok(q)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_id(&self, a: usize) -> &str {
        &self.arrows[a].id
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrow_index.get(id).copied()
    }

    pub fn arrows_out_of(&self, v: usize) -> &[usize] {
        &self.out_arrows[v]
    }

    pub fn arrows_into(&self, v: usize) -> &[usize] {
        &self.in_arrows[v]
    }

    /// Arrow indices sorted by external id.
    pub fn arrows_by_id(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.arrows.len()).collect();
        order.sort_by(|&a, &b| self.arrows[a].id.cmp(&self.arrows[b].id));
        order
    }

    /// Kahn's algorithm; fails on an oriented cycle.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = self.in_arrows.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &a in self.out_arrows[v].iter().rev() {
                let h = self.arrows[a].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.push(h);
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&v| indeg[v] > 0).unwrap_or(0);
            return Err(Error::Cycle(self.vertices[stuck].clone()));
        }
        Ok(order)
    }
}

/// Assignment of a color to every arrow. Colors are numbered `0..k` in order
/// of the smallest arrow id carrying them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    color_of: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    /// Canonicalizes arbitrary labels, one per arrow index.
    pub fn from_labels<L: Ord + Clone>(q: &Quiver, labels: &[L]) -> Result<Self> {
        if labels.len() != q.arrow_count() {
            return Err(Error::Input(format!(
                "coloring covers {} arrows, quiver has {}",
                labels.len(),
                q.arrow_count()
            )));
        }
        let mut rename: HashMap<usize, usize> = HashMap::new();
        let mut label_ids: Vec<L> = Vec::new();
        let mut color_of = vec![0; labels.len()];
        for a in q.arrows_by_id() {
            let pos = match label_ids.iter().position(|l| *l == labels[a]) {
                Some(p) => p,
                None => {
                    label_ids.push(labels[a].clone());
                    label_ids.len() - 1
                }
            };
            let next = rename.len();
            color_of[a] = *rename.entry(pos).or_insert(next);
        }
        Ok(Coloring {
            color_of,
            num_colors: rename.len(),
        })
    }

    /// Builds a coloring from an `arrow id -> color label` map.
    pub fn from_map(q: &Quiver, map: &HashMap<String, String>) -> Result<Self> {
        for id in map.keys() {
            if q.arrow_index(id).is_none() {
                return Err(Error::UnknownArrow(id.clone()));
            }
        }
        let mut labels = Vec::with_capacity(q.arrow_count());
        for a in q.arrows() {
            match map.get(&a.id) {
                Some(l) => labels.push(l.clone()),
                None => {
                    return Err(Error::Input(format!("arrow `{}` has no color", a.id)));
                }
            }
        }
        Coloring::from_labels(q, &labels)
    }

    pub fn color(&self, a: usize) -> usize {
        self.color_of[a]
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn class(&self, s: usize) -> Vec<usize> {
        (0..self.color_of.len())
            .filter(|&a| self.color_of[a] == s)
            .collect()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.color_of
    }
}

/// Length-2 paths `(b, a)` with `head(a) = tail(b)`, read as `ba ∈ I`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationSet {
    pairs: BTreeSet<(usize, usize)>,
}

impl RelationSet {
    pub fn new(q: &Quiver, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (b, a) in pairs {
            if a >= q.arrow_count() || b >= q.arrow_count() {
                return Err(Error::Input(format!("relation ({b},{a}) out of range")));
            }
            if q.arrow(a).head != q.arrow(b).tail {
                return Err(Error::Input(format!(
                    "relation {}{} is not a path",
                    q.arrow_id(b),
                    q.arrow_id(a)
                )));
            }
            set.insert((b, a));
        }
        Ok(RelationSet { pairs: set })
    }

    pub fn from_ids<'a>(
        q: &Quiver,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self> {
        let mut idx = Vec::new();
        for (b, a) in pairs {
            let bi = q
                .arrow_index(b)
                .ok_or_else(|| Error::UnknownArrow(b.to_string()))?;
            let ai = q
                .arrow_index(a)
                .ok_or_else(|| Error::UnknownArrow(a.to_string()))?;
            idx.push((bi, ai));
        }
        RelationSet::new(q, idx)
    }

    pub fn contains(&self, b: usize, a: usize) -> bool {
        self.pairs.contains(&(b, a))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn difference(&self, other: &RelationSet) -> RelationSet {
        RelationSet {
            pairs: self.pairs.difference(&other.pairs).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &RelationSet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// Relations rendered as `ba` words, sorted.
    pub fn words(&self, q: &Quiver) -> Vec<String> {
        let mut w: Vec<String> = self
            .pairs
            .iter()
            .map(|&(b, a)| format!("{}{}", q.arrow_id(b), q.arrow_id(a)))
            .collect();
        w.sort();
        w
    }
}

/// Checks that every color class is a single directed path.
pub fn validate_coloring(q: &Quiver, c: &Coloring) -> ValidationReport {
    let mut report = ValidationReport::new();
    for s in 0..c.num_colors() {
        let class = c.class(s);
        let mut out_count: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut in_count: HashMap<usize, Vec<usize>> = HashMap::new();
        for &a in &class {
            out_count.entry(q.arrow(a).tail).or_default().push(a);
            in_count.entry(q.arrow(a).head).or_default().push(a);
        }
        let mut bad: Vec<usize> = out_count
            .values()
            .chain(in_count.values())
            .filter(|v| v.len() > 1)
            .flatten()
            .copied()
            .collect();
        if bad.is_empty() {
            // Branch-free classes are disjoint unions of paths; require one.
            let starts: Vec<usize> = class
                .iter()
                .copied()
                .filter(|&a| !in_count.contains_key(&q.arrow(a).tail))
                .collect();
            if starts.len() != 1 {
                bad = class.clone();
            }
        }
        if !bad.is_empty() {
            bad.sort();
            bad.dedup();
            let mut witnesses = vec![format!("color {}", s + 1)];
            witnesses.extend(bad.iter().map(|&a| q.arrow_id(a).to_string()));
            report.push("coloring", witnesses);
        }
    }
    report
}

/// All monochromatic composable pairs.
pub fn monochromatic_ideal(q: &Quiver, c: &Coloring) -> RelationSet {
    let mut pairs = Vec::new();
    for (a, arrow) in q.arrows().iter().enumerate() {
        for &b in q.arrows_out_of(arrow.head) {
            if c.color(a) == c.color(b) {
                pairs.push((b, a));
            }
        }
    }
    RelationSet::new(q, pairs).expect("composable by construction")
}

fn string_axioms(q: &Quiver, rel: &RelationSet, report: &mut ValidationReport) {
    for v in 0..q.vertex_count() {
        if q.arrows_into(v).len() > 2 || q.arrows_out_of(v).len() > 2 {
            report.push("a", vec![q.vertex_id(v).to_string()]);
        }
    }
    for (b, arrow) in q.arrows().iter().enumerate() {
        let after: Vec<usize> = q.arrows_out_of(arrow.head).to_vec();
        let before: Vec<usize> = q.arrows_into(arrow.tail).to_vec();
        let free_after: Vec<usize> = after
            .iter()
            .copied()
            .filter(|&a| !rel.contains(a, b))
            .collect();
        let free_before: Vec<usize> = before
            .iter()
            .copied()
            .filter(|&c| !rel.contains(b, c))
            .collect();
        for group in [free_after, free_before] {
            if group.len() > 1 {
                let mut w = vec![arrow.id.clone()];
                w.extend(group.iter().map(|&x| q.arrow_id(x).to_string()));
                report.push("b", w);
            }
        }
    }
}

/// Axioms (a) and (b): the presentation defines a string algebra.
pub fn is_string_algebra(q: &Quiver, rel: &RelationSet) -> ValidationReport {
    let mut report = ValidationReport::new();
    string_axioms(q, rel, &mut report);
    report
}

/// Axioms (a)-(d) of a gentle string algebra.
pub fn is_gentle(q: &Quiver, rel: &RelationSet) -> ValidationReport {
    let mut report = ValidationReport::new();
    string_axioms(q, rel, &mut report);
    for (b, arrow) in q.arrows().iter().enumerate() {
        let rel_after: Vec<usize> = q
            .arrows_out_of(arrow.head)
            .iter()
            .copied()
            .filter(|&a| rel.contains(a, b))
            .collect();
        let rel_before: Vec<usize> = q
            .arrows_into(arrow.tail)
            .iter()
            .copied()
            .filter(|&c| rel.contains(b, c))
            .collect();
        for group in [rel_after, rel_before] {
            if group.len() > 1 {
                let mut w = vec![arrow.id.clone()];
                w.extend(group.iter().map(|&x| q.arrow_id(x).to_string()));
                report.push("c", w);
            }
        }
    }
    // (d) holds by construction of RelationSet; recheck in case of misuse.
    for (b, a) in rel.iter() {
        if q.arrow(a).head != q.arrow(b).tail {
            report.push(
                "d",
                vec![q.arrow_id(b).to_string(), q.arrow_id(a).to_string()],
            );
        }
    }
    report
}

/// The coloring whose monochromatic ideal is the given gentle ideal.
pub fn coloring_from_gentle(q: &Quiver, rel: &RelationSet) -> Result<Coloring> {
    let report = is_gentle(q, rel);
    if !report.ok {
        return Err(Error::Invalid(report));
    }
    let n = q.arrow_count();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for a in 0..n {
        let has_predecessor = q
            .arrows_into(q.arrow(a).tail)
            .iter()
            .any(|&b| rel.contains(a, b));
        if has_predecessor {
            continue;
        }
        let mut cur = a;
        loop {
            label[cur] = next;
            let succ = q
                .arrows_out_of(q.arrow(cur).head)
                .iter()
                .copied()
                .find(|&b| rel.contains(b, cur));
            match succ {
                Some(b) => cur = b,
                None => break,
            }
        }
        next += 1;
    }
    if label.contains(&usize::MAX) {
        return Err(Error::Invariant("arrow left uncolored".into()));
    }
    let c = Coloring::from_labels(q, &label)?;
    if monochromatic_ideal(q, &c) != *rel {
        return Err(Error::Invariant(
            "derived coloring does not reproduce the ideal".into(),
        ));
    }
    Ok(c)
}

/// Gentle cover of a string algebra: a coloring `c` with `I_c ⊆ I`, and the
/// relations of `I` outside `I_c` that generate the kernel of `kQ/I_c → kQ/I`.
#[derive(Clone, Debug)]
pub struct GentleCover {
    pub coloring: Coloring,
    pub kernel: RelationSet,
    /// Steps where the extension rule did not single out an arrow.
    pub notes: Vec<String>,
}

pub fn gentle_cover(q: &Quiver, rel: &RelationSet) -> Result<GentleCover> {
    let report = is_string_algebra(q, rel);
    if !report.ok {
        return Err(Error::Invalid(report));
    }
    let n = q.arrow_count();
    let mut remaining = vec![true; n];
    let mut label = vec![0usize; n];
    let mut notes = Vec::new();
    let by_id = |xs: &mut Vec<usize>| xs.sort_by(|&x, &y| q.arrow_id(x).cmp(q.arrow_id(y)));
    let mut color = 0;
    while remaining.iter().any(|&r| r) {
        let source = (0..q.vertex_count())
            .find(|&v| {
                q.arrows_out_of(v).iter().any(|&a| remaining[a])
                    && !q.arrows_into(v).iter().any(|&a| remaining[a])
            })
            .ok_or_else(|| Error::Invariant("no source among remaining arrows".into()))?;
        let mut outs: Vec<usize> = q
            .arrows_out_of(source)
            .iter()
            .copied()
            .filter(|&a| remaining[a])
            .collect();
        by_id(&mut outs);
        let mut path = vec![outs[0]];
        loop {
            let cur = *path.last().unwrap();
            let mut cands: Vec<usize> = q
                .arrows_out_of(q.arrow(cur).head)
                .iter()
                .copied()
                .filter(|&b| remaining[b] && rel.contains(b, cur) && !path.contains(&b))
                .collect();
            by_id(&mut cands);
            let next = match cands.len() {
                0 => break,
                1 => cands[0],
                _ => {
                    let other_in: Vec<usize> = q
                        .arrows_into(q.arrow(cur).head)
                        .iter()
                        .copied()
                        .filter(|&a| a != cur && remaining[a])
                        .collect();
                    match other_in.first() {
                        None => cands[0],
                        Some(&a2) => {
                            let related: Vec<usize> = cands
                                .iter()
                                .copied()
                                .filter(|&b| rel.contains(b, a2))
                                .collect();
                            match related.len() {
                                1 => *cands.iter().find(|&&b| b != related[0]).unwrap(),
                                _ => {
                                    notes.push(format!(
                                        "after {}: {} and {} both {} with {}; took {}",
                                        q.arrow_id(cur),
                                        q.arrow_id(cands[0]),
                                        q.arrow_id(cands[1]),
                                        if related.is_empty() {
                                            "unrelated"
                                        } else {
                                            "related"
                                        },
                                        q.arrow_id(a2),
                                        q.arrow_id(cands[0])
                                    ));
                                    cands[0]
                                }
                            }
                        }
                    }
                }
            };
            path.push(next);
        }
        for &a in &path {
            remaining[a] = false;
            label[a] = color;
        }
        color += 1;
    }
    let coloring = Coloring::from_labels(q, &label)?;
    let ic = monochromatic_ideal(q, &coloring);
    if !ic.is_subset(rel) {
        return Err(Error::Invariant("cover ideal is not contained in I".into()));
    }
    let gentle = is_gentle(q, &ic);
    if !gentle.ok {
        return Err(Error::Invariant(format!("cover is not gentle: {gentle}")));
    }
    Ok(GentleCover {
        coloring,
        kernel: rel.difference(&ic),
        notes,
    })
}

/// A pair `(x, s)`: color `s` passes through vertex `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Incidence {
    pub vertex: usize,
    pub color: usize,
    pub incoming: Option<usize>,
    pub outgoing: Option<usize>,
}

/// A quiver together with a validated coloring and the derived incidence data.
#[derive(Clone, Debug)]
pub struct ColoredQuiver {
    quiver: Quiver,
    coloring: Coloring,
    paths: Vec<Vec<usize>>,
    incidences: Vec<Incidence>,
    by_vertex: Vec<Vec<usize>>,
}

impl ColoredQuiver {
    pub fn new(quiver: Quiver, coloring: Coloring) -> Result<Self> {
        let report = validate_coloring(&quiver, &coloring);
        if !report.ok {
            return Err(Error::Invalid(report));
        }
        let mut paths = Vec::with_capacity(coloring.num_colors());
        for s in 0..coloring.num_colors() {
            let class = coloring.class(s);
            let start = class
                .iter()
                .copied()
                .find(|&a| {
                    !class
                        .iter()
                        .any(|&b| quiver.arrow(b).head == quiver.arrow(a).tail)
                })
                .expect("validated path has a first arrow");
            let mut path = vec![start];
            while let Some(&next) = class
                .iter()
                .find(|&&b| quiver.arrow(b).tail == quiver.arrow(*path.last().unwrap()).head)
            {
                path.push(next);
            }
            paths.push(path);
        }
        let mut incidences = Vec::new();
        for (s, path) in paths.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &a in path {
                incidences.push(Incidence {
                    vertex: quiver.arrow(a).tail,
                    color: s,
                    incoming: prev,
                    outgoing: Some(a),
                });
                prev = Some(a);
            }
            let last = *path.last().unwrap();
            incidences.push(Incidence {
                vertex: quiver.arrow(last).head,
                color: s,
                incoming: Some(last),
                outgoing: None,
            });
        }
        incidences.sort();
        let mut by_vertex = vec![Vec::new(); quiver.vertex_count()];
        for (i, inc) in incidences.iter().enumerate() {
            by_vertex[inc.vertex].push(i);
        }
        if by_vertex.iter().any(|v| v.len() > 2) {
            return Err(Error::Precondition(
                "more than two colors pass through a vertex".into(),
            ));
        }
        Ok(ColoredQuiver {
            quiver,
            coloring,
            paths,
            incidences,
            by_vertex,
        })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    /// Arrows of color `s` in path order.
    pub fn path(&self, s: usize) -> &[usize] {
        &self.paths[s]
    }

    pub fn num_colors(&self) -> usize {
        self.paths.len()
    }

    pub fn incidences(&self) -> &[Incidence] {
        &self.incidences
    }

    pub fn incidence(&self, i: usize) -> &Incidence {
        &self.incidences[i]
    }

    /// Incidence indices at vertex `x` (at most two).
    pub fn incidences_at(&self, x: usize) -> &[usize] {
        &self.by_vertex[x]
    }

    pub fn is_lonely(&self, x: usize) -> bool {
        self.by_vertex[x].len() == 1
    }

    pub fn is_coupled(&self, x: usize) -> bool {
        self.by_vertex[x].len() == 2
    }

    /// The incidence `(x, s)` if color `s` passes through `x`.
    pub fn find_incidence(&self, x: usize, s: usize) -> Option<usize> {
        self.by_vertex[x]
            .iter()
            .copied()
            .find(|&i| self.incidences[i].color == s)
    }
}
