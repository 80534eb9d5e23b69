//! Dimension vectors, rank sequences and irreducible components.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{ColoredQuiver, Incidence, Quiver};
use crate::error::{Error, Result};

/// Dimension of the space at each vertex, indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DimensionVector(pub Vec<usize>);

impl DimensionVector {
    pub fn from_map(q: &Quiver, map: &HashMap<String, usize>) -> Result<Self> {
        for id in map.keys() {
            if q.vertex_index(id).is_none() {
                return Err(Error::UnknownVertex(id.clone()));
            }
        }
        let mut beta = Vec::with_capacity(q.vertex_count());
        for v in q.vertex_ids() {
            match map.get(v) {
                Some(&n) => beta.push(n),
                None => return Err(Error::Input(format!("vertex `{v}` has no dimension"))),
            }
        }
        Ok(DimensionVector(beta))
    }

    pub fn at(&self, x: usize) -> usize {
        self.0[x]
    }
}

/// Rank bound for each arrow, indexed by arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RankSequence(pub Vec<usize>);

impl RankSequence {
    pub fn from_map(q: &Quiver, map: &HashMap<String, usize>) -> Result<Self> {
        for id in map.keys() {
            if q.arrow_index(id).is_none() {
                return Err(Error::UnknownArrow(id.clone()));
            }
        }
        let mut r = Vec::with_capacity(q.arrow_count());
        for a in q.arrows() {
            match map.get(&a.id) {
                Some(&n) => r.push(n),
                None => return Err(Error::Input(format!("arrow `{}` has no rank", a.id))),
            }
        }
        Ok(RankSequence(r))
    }

    pub fn at(&self, a: usize) -> usize {
        self.0[a]
    }

    /// `r` of an optional arrow, with `r(∅) = 0`.
    pub fn of(&self, a: Option<usize>) -> usize {
        a.map_or(0, |a| self.0[a])
    }

    /// Coordinate-wise order.
    pub fn le(&self, other: &RankSequence) -> bool {
        self.0.iter().zip(&other.0).all(|(x, y)| x <= y)
    }

    /// Ranks keyed by arrow id.
    pub fn to_map(&self, q: &Quiver) -> Vec<(String, usize)> {
        q.arrows()
            .iter()
            .zip(&self.0)
            .map(|(a, &r)| (a.id.clone(), r))
            .collect()
    }
}

/// The data of one colored path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorRestriction {
    pub color: usize,
    pub vertex_path: Vec<usize>,
    pub beta_s: Vec<usize>,
    pub r_s: Vec<usize>,
}

fn check_lengths(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
    r: Option<&RankSequence>,
) -> Result<()> {
    let q = cq.quiver();
    if beta.0.len() != q.vertex_count() {
        return Err(Error::Input(format!(
            "dimension vector has {} entries, quiver has {} vertices",
            beta.0.len(),
            q.vertex_count()
        )));
    }
    if let Some(r) = r {
        if r.0.len() != q.arrow_count() {
            return Err(Error::Input(format!(
                "rank sequence has {} entries, quiver has {} arrows",
                r.0.len(),
                q.arrow_count()
            )));
        }
    }
    Ok(())
}

fn admissible_at(inc: &Incidence, beta: &DimensionVector, r: &RankSequence) -> bool {
    r.of(inc.incoming) + r.of(inc.outgoing) <= beta.at(inc.vertex)
}

/// True iff `r(i(x,s)) + r(o(x,s)) ≤ β_x` at every incidence.
pub fn is_rank_sequence(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
    r: &RankSequence,
) -> Result<bool> {
    check_lengths(cq, beta, Some(r))?;
    Ok(cq
        .incidences()
        .iter()
        .all(|inc| admissible_at(inc, beta, r)))
}

/// The first incidence where `r` fails, if any.
pub fn rank_violation(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
    r: &RankSequence,
) -> Option<Incidence> {
    cq.incidences()
        .iter()
        .find(|inc| !admissible_at(inc, beta, r))
        .copied()
}

pub fn restrict_to_color(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
    r: &RankSequence,
    s: usize,
) -> Result<ColorRestriction> {
    check_lengths(cq, beta, Some(r))?;
    if s >= cq.num_colors() {
        return Err(Error::UnknownColor(s));
    }
    let q = cq.quiver();
    let path = cq.path(s);
    let mut vertex_path = vec![q.arrow(path[0]).tail];
    vertex_path.extend(path.iter().map(|&a| q.arrow(a).head));
    Ok(ColorRestriction {
        color: s,
        beta_s: vertex_path.iter().map(|&x| beta.at(x)).collect(),
        vertex_path,
        r_s: path.iter().map(|&a| r.at(a)).collect(),
    })
}

/// Maximal rank sequences along one path with vertex dimensions `dims`
/// (one more entry than arrows). Sorted descending lexicographically.
pub fn maximal_path_ranks(dims: &[usize]) -> Vec<Vec<usize>> {
    let k = dims.len().saturating_sub(1);
    let mut out = Vec::new();
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut cur = vec![0usize; k];
    // Box search: r_i ≤ min(β_{i}, β_{i+1}), pruned by the vertex inequality.
    fn rec(i: usize, dims: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = cur.len();
        if i == k {
            // A downward-closed set: maximal iff no single coordinate can grow.
            let saturated = (0..k).all(|j| {
                let before = if j == 0 { 0 } else { cur[j - 1] };
                let after = if j + 1 == k { 0 } else { cur[j + 1] };
                cur[j] + 1 + before > dims[j] || cur[j] + 1 + after > dims[j + 1]
            });
            if saturated {
                out.push(cur.clone());
            }
            return;
        }
        let prev = if i == 0 { 0 } else { cur[i - 1] };
        let hi = dims[i].saturating_sub(prev).min(dims[i + 1]);
        for v in (0..=hi).rev() {
            cur[i] = v;
            rec(i + 1, dims, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, dims, &mut cur, &mut out);
    out
}

/// All maximal rank sequences, one per irreducible component of the
/// representation variety. Each color is handled independently and the
/// results are combined as a product.
pub fn maximal_rank_sequences(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
) -> Result<Vec<RankSequence>> {
    check_lengths(cq, beta, None)?;
    let q = cq.quiver();
    let mut acc = vec![vec![0usize; q.arrow_count()]];
    for s in 0..cq.num_colors() {
        let path = cq.path(s);
        let mut dims = vec![beta.at(q.arrow(path[0]).tail)];
        dims.extend(path.iter().map(|&a| beta.at(q.arrow(a).head)));
        let choices = maximal_path_ranks(&dims);
        let mut next = Vec::with_capacity(acc.len() * choices.len());
        for base in &acc {
            for choice in &choices {
                let mut r = base.clone();
                for (&a, &v) in path.iter().zip(choice) {
                    r[a] = v;
                }
                next.push(r);
            }
        }
        acc = next;
    }
    let order = q.arrows_by_id();
    let key = |r: &Vec<usize>| order.iter().map(|&a| r[a]).collect::<Vec<_>>();
    acc.sort_by_key(|r| std::cmp::Reverse(key(r)));
    Ok(acc.into_iter().map(RankSequence).collect())
}
