//! Semi-invariants from the semigroup: partition maps `λ_{u,y}`, the weight
//! of a partition map, degrees and the assembled presentation.

use log::warn;
use serde::Serialize;

use crate::algebra::{ColoredQuiver, Incidence};
use crate::error::{Error, Result};
use crate::matching::{presentation, Binomial, GeneratorKind};
use crate::peg::{build_peg, extract_matching_system, ComponentKind, Peg, PegExtract};
use crate::rank::{is_rank_sequence, DimensionVector, RankSequence};

/// A weakly decreasing partition per arrow, of length `r(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PartitionMap {
    pub parts: Vec<Vec<u32>>,
}

impl PartitionMap {
    pub fn zero(r: &RankSequence) -> Self {
        PartitionMap {
            parts: r.0.iter().map(|&n| vec![0; n]).collect(),
        }
    }

    /// The rank sequence the partition lengths encode.
    pub fn ranks(&self) -> RankSequence {
        RankSequence(self.parts.iter().map(Vec::len).collect())
    }

    pub fn is_partition(&self) -> bool {
        self.parts
            .iter()
            .all(|p| p.windows(2).all(|w| w[0] >= w[1]))
    }

    /// `Σ_a |λ(a)|`.
    pub fn degree(&self) -> u64 {
        self.parts.iter().flatten().map(|&x| x as u64).sum()
    }
}

pub fn generator_degree(lambda: &PartitionMap) -> u64 {
    lambda.degree()
}

/// `(λ(o), 0, …, 0, −λ(i) reversed)`, of length `β_x`.
pub fn lambda_at(
    inc: &Incidence,
    beta: &DimensionVector,
    lambda: &PartitionMap,
) -> Result<Vec<i64>> {
    let b = beta.at(inc.vertex);
    let out: &[u32] = inc.outgoing.map_or(&[], |a| &lambda.parts[a]);
    let inn: &[u32] = inc.incoming.map_or(&[], |a| &lambda.parts[a]);
    if out.len() + inn.len() > b {
        return Err(Error::Input(format!(
            "partitions at vertex {} need {} rows, β is {b}",
            inc.vertex,
            out.len() + inn.len()
        )));
    }
    let mut v = vec![0i64; b];
    for (k, &x) in out.iter().enumerate() {
        v[k] = x as i64;
    }
    for (k, &x) in inn.iter().enumerate() {
        v[b - 1 - k] = -(x as i64);
    }
    Ok(v)
}

/// The semi-invariant weight: one exponent per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Weight {
    pub sigma: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Membership {
    Member(Weight),
    /// `α_index` at `vertex` breaks the flip condition, or is nonzero at a
    /// lonely vertex.
    Violation {
        vertex: usize,
        index: usize,
    },
}

impl Membership {
    pub fn weight(&self) -> Option<&Weight> {
        match self {
            Membership::Member(w) => Some(w),
            Membership::Violation { .. } => None,
        }
    }
}

fn check_shape(cq: &ColoredQuiver, beta: &DimensionVector, lambda: &PartitionMap) -> Result<()> {
    if lambda.parts.len() != cq.quiver().arrow_count() {
        return Err(Error::Input(format!(
            "partition map has {} arrows, quiver has {}",
            lambda.parts.len(),
            cq.quiver().arrow_count()
        )));
    }
    if !lambda.is_partition() {
        return Err(Error::Input(
            "partition parts must be weakly decreasing".into(),
        ));
    }
    if !is_rank_sequence(cq, beta, &lambda.ranks())? {
        return Err(Error::Input(
            "partition lengths exceed the dimension vector".into(),
        ));
    }
    Ok(())
}

/// Decides membership in the semi-invariant semigroup by comparing simple-root
/// values `λ_k − λ_{k+1}` across each coupled vertex, and requiring them to
/// vanish at lonely vertices.
#[allow(clippy::needless_range_loop)]
pub fn si_membership(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
    lambda: &PartitionMap,
) -> Result<Membership> {
    check_shape(cq, beta, lambda)?;
    let q = cq.quiver();
    let mut sigma = vec![0i64; q.vertex_count()];
    for x in 0..q.vertex_count() {
        let b = beta.at(x);
        let vs: Vec<Vec<i64>> = cq
            .incidences_at(x)
            .iter()
            .map(|&i| lambda_at(cq.incidence(i), beta, lambda))
            .collect::<Result<_>>()?;
        let alpha = |v: &[i64], k: usize| v[k - 1] - v[k];
        match vs.as_slice() {
            [] => {}
            [v] => {
                for k in 1..b {
                    if alpha(v, k) != 0 {
                        return Ok(Membership::Violation {
                            vertex: x,
                            index: k,
                        });
                    }
                }
                if b > 0 {
                    sigma[x] = v[0];
                }
            }
            [v1, v2] => {
                for k in 1..b {
                    if alpha(v1, k) != alpha(v2, b - k) {
                        return Ok(Membership::Violation {
                            vertex: x,
                            index: k,
                        });
                    }
                }
                if b > 0 {
                    sigma[x] = v1[0] + v2[b - 1];
                }
            }
            _ => unreachable!("at most two colors per vertex"),
        }
    }
    Ok(Membership::Member(Weight { sigma }))
}

/// `f_λ(α_k^{(x,s)})` for PEG root `root`.
pub fn f_lambda(peg: &Peg, lambda: &PartitionMap, root: usize) -> Result<i64> {
    let v = lambda_at(peg.incidence_of(root), peg.beta(), lambda)?;
    let k = peg.root(root).index;
    Ok(v[k - 1] - v[k])
}

/// The value every root of each component takes: `φ_u` at the string's
/// first endpoint (0 if that endpoint is lonely), `y` on bands, 0 on
/// isolated roots.
pub fn component_values(peg: &Peg, ex: &PegExtract, u: &[u32], y: &[u32]) -> Vec<u32> {
    let mut band_pos = 0;
    ex.components
        .iter()
        .enumerate()
        .map(|(c, comp)| match comp.kind {
            ComponentKind::String => {
                let e = ex.string_endpoint(peg, c);
                e.side().iter().map(|&a| u[a]).sum()
            }
            ComponentKind::Band => {
                band_pos += 1;
                y[band_pos - 1]
            }
            ComponentKind::Isolated => 0,
        })
        .collect()
}

/// `λ_{u,y}(a)_k = u(a) + Σ_{k ≤ j < r(a)} v(K_j)` where `K_j` is the
/// component of `α_j` at the tail of `a`.
pub fn lambda_from_uy(peg: &Peg, ex: &PegExtract, u: &[u32], y: &[u32]) -> Result<PartitionMap> {
    if !ex.system.is_member(u)? {
        return Err(Error::Precondition(format!(
            "{u:?} is not in the semigroup"
        )));
    }
    if y.len() != ex.bands.len() {
        return Err(Error::Input(format!(
            "{} band values given, the graph has {} bands",
            y.len(),
            ex.bands.len()
        )));
    }
    let values = component_values(peg, ex, u, y);
    let cq = peg.colored_quiver();
    let q = cq.quiver();
    let mut parts = Vec::with_capacity(q.arrow_count());
    for (a, arrow) in q.arrows().iter().enumerate() {
        let r = peg.ranks().at(a);
        let s = cq.coloring().color(a);
        let mut p = vec![0u32; r];
        let mut acc = u[a];
        for k in (1..=r).rev() {
            if k < r {
                let root = peg.root_index(arrow.tail, s, k).expect("root below rank");
                acc += values[ex.component_of[root]];
            }
            p[k - 1] = acc;
        }
        parts.push(p);
    }
    Ok(PartitionMap { parts })
}

/// Inverse of [`lambda_from_uy`] on the semi-invariant semigroup.
pub fn roundtrip_uy(
    peg: &Peg,
    ex: &PegExtract,
    lambda: &PartitionMap,
) -> Result<(Vec<u32>, Vec<u32>)> {
    let u: Vec<u32> = lambda
        .parts
        .iter()
        .map(|p| p.last().copied().unwrap_or(0))
        .collect();
    let mut y = Vec::with_capacity(ex.bands.len());
    for &b in &ex.bands {
        let roots = &ex.components[b].roots;
        let vals: Vec<i64> = roots
            .iter()
            .map(|&r| f_lambda(peg, lambda, r))
            .collect::<Result<_>>()?;
        if vals.iter().any(|&v| v != vals[0]) || vals[0] < 0 {
            return Err(Error::Invariant(format!(
                "band {b} carries values {vals:?}"
            )));
        }
        y.push(vals[0] as u32);
    }
    Ok((u, y))
}

/// `(2 Σ C(r(a)+1, 2), 8 Σ C(r(a)+1, 2))`: bounds on generator and relation
/// degrees.
pub fn degree_bounds(r: &RankSequence) -> (u64, u64) {
    let s: u64 = r.0.iter().map(|&n| (n as u64) * (n as u64 + 1) / 2).sum();
    (2 * s, 8 * s)
}

/// `f_λ` at the smallest root of each component.
pub fn multigrading(peg: &Peg, ex: &PegExtract, lambda: &PartitionMap) -> Result<Vec<i64>> {
    ex.components
        .iter()
        .map(|c| f_lambda(peg, lambda, c.min_root()))
        .collect()
}

/// True iff no single rank can be raised.
pub fn is_maximal(cq: &ColoredQuiver, beta: &DimensionVector, r: &RankSequence) -> Result<bool> {
    for a in 0..r.0.len() {
        let mut up = r.clone();
        up.0[a] += 1;
        if is_rank_sequence(cq, beta, &up)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiGeneratorKind {
    String,
    Band,
    Free,
    /// The polynomial variable of a PEG band.
    PegBand,
}

#[derive(Clone, Debug, Serialize)]
pub struct SiGenerator {
    pub name: String,
    pub kind: SiGeneratorKind,
    pub u: Vec<u32>,
    pub y: Vec<u32>,
    pub lambda: PartitionMap,
    pub degree: u64,
    pub sigma: Vec<i64>,
    pub grade: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SiPresentation {
    pub component_label: RankSequence,
    pub maximal: bool,
    /// Semigroup generators first, in matching order, then band variables.
    pub generators: Vec<SiGenerator>,
    /// Indices into `generators`; band variables satisfy no relation.
    pub relations: Vec<Binomial>,
    pub relation_degrees: Vec<u64>,
    pub band_vars: Vec<String>,
    /// Arrows every semi-invariant ignores.
    pub forced: Vec<usize>,
    pub degree_bound_gens: u64,
    pub degree_bound_rels: u64,
}

/// The whole pipeline for one irreducible component.
pub fn si_presentation(
    cq: &ColoredQuiver,
    beta: &DimensionVector,
    r: &RankSequence,
) -> Result<SiPresentation> {
    let peg = build_peg(cq, beta, r)?;
    let maximal = is_maximal(cq, beta, r)?;
    if !maximal {
        warn!("rank sequence {:?} is not maximal", r.0);
    }
    let ex = extract_matching_system(&peg)?;
    let pres = presentation(&ex.system)?;
    let (gen_bound, rel_bound) = degree_bounds(r);
    let nb = ex.bands.len();
    let mut generators = Vec::new();
    let mut assemble =
        |name: String, kind: SiGeneratorKind, u: Vec<u32>, y: Vec<u32>| -> Result<()> {
            let lambda = lambda_from_uy(&peg, &ex, &u, &y)?;
            let sigma = match si_membership(cq, beta, &lambda)? {
                Membership::Member(w) => w.sigma,
                Membership::Violation { vertex, index } => {
                    return Err(Error::Invariant(format!(
                        "generator {name} fails the weight condition at vertex `{}`, index {index}",
                        cq.quiver().vertex_id(vertex)
                    )))
                }
            };
            let degree = lambda.degree();
            if degree > gen_bound {
                return Err(Error::Invariant(format!(
                    "generator {name} has degree {degree} above the bound {gen_bound}"
                )));
            }
            let grade = multigrading(&peg, &ex, &lambda)?;
            generators.push(SiGenerator {
                name,
                kind,
                u,
                y,
                lambda,
                degree,
                sigma,
                grade,
            });
            Ok(())
        };
    for g in &pres.generators {
        let kind = match g.kind {
            GeneratorKind::String => SiGeneratorKind::String,
            GeneratorKind::Band => SiGeneratorKind::Band,
            GeneratorKind::Free => SiGeneratorKind::Free,
        };
        assemble(g.name.clone(), kind, g.vector.clone(), vec![0; nb])?;
    }
    let mut band_vars = Vec::with_capacity(nb);
    for b in 0..nb {
        let name = format!("y{}", b + 1);
        let mut y = vec![0; nb];
        y[b] = 1;
        assemble(
            name.clone(),
            SiGeneratorKind::PegBand,
            vec![0; r.0.len()],
            y,
        )?;
        band_vars.push(name);
    }
    let relation_degrees = pres
        .relations
        .iter()
        .map(|rel| rel.lhs.iter().map(|&g| generators[g].degree).sum())
        .collect();
    Ok(SiPresentation {
        component_label: r.clone(),
        maximal,
        generators,
        relations: pres.relations,
        relation_degrees,
        band_vars,
        forced: pres.forced,
        degree_bound_gens: gen_bound,
        degree_bound_rels: rel_bound,
    })
}
