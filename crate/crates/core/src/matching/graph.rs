//! The matching graph: one vertex per form, a solid edge per variable joining
//! the forms that contain it, and a dotted edge pairing the two sides of each
//! equation.

use serde::Serialize;

use super::MatchingSystem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolidEdge {
    pub var: usize,
    pub ends: (usize, usize),
}

impl SolidEdge {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    /// The endpoint opposite `v`; `v` itself for a loop.
    pub fn other(&self, v: usize) -> usize {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingGraph {
    m: usize,
    num_vars: usize,
    solid: Vec<SolidEdge>,
    incident: Vec<Vec<usize>>,
    free: Vec<usize>,
}

impl MatchingGraph {
    pub fn num_vertices(&self) -> usize {
        2 * self.m
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn partner(&self, v: usize) -> usize {
        if v < self.m {
            v + self.m
        } else {
            v - self.m
        }
    }

    pub fn solid_edges(&self) -> &[SolidEdge] {
        &self.solid
    }

    pub fn solid_edge(&self, e: usize) -> &SolidEdge {
        &self.solid[e]
    }

    /// Solid edges touching `v`, by index into [`solid_edges`](Self::solid_edges).
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn dotted_edges(&self) -> Vec<(usize, usize)> {
        (0..self.m).map(|i| (i, i + self.m)).collect()
    }

    /// Variables with no solid edge.
    pub fn free_vars(&self) -> &[usize] {
        &self.free
    }

    pub fn loops(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.solid.len()).filter(|&e| self.solid[e].is_loop())
    }
}

/// Builds the matching graph of a valid system.
pub fn build_graph(sys: &MatchingSystem) -> Result<MatchingGraph> {
    let report = sys.validate();
    if !report.ok {
        return Err(Error::Invalid(report));
    }
    let n = sys.num_forms();
    let mut solid = Vec::new();
    let mut incident = vec![Vec::new(); n];
    let mut free = Vec::new();
    for j in 0..sys.num_vars() {
        let occ = sys.occurrences(j);
        let ends = match occ.as_slice() {
            [] => {
                free.push(j);
                continue;
            }
            [i] => (*i, *i),
            [i, k] => (*i, *k),
            _ => unreachable!("validated system"),
        };
        if ends.0 != ends.1 && sys.partner(ends.0) == ends.1 {
            return Err(Error::Invariant(format!(
                "alternating two-cycle through {}",
                sys.var_name(j)
            )));
        }
        let e = solid.len();
        solid.push(SolidEdge { var: j, ends });
        incident[ends.0].push(e);
        if ends.1 != ends.0 {
            incident[ends.1].push(e);
        }
    }
    Ok(MatchingGraph {
        m: sys.num_equations(),
        num_vars: sys.num_vars(),
        solid,
        incident,
        free,
    })
}
