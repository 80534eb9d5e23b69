//! Matching semigroups: systems `f_i = f_{m+i}` of 0/1 linear forms in which
//! every variable occurs in at most two forms.

pub mod graph;
pub mod relations;
pub mod walks;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::ValidationReport;

pub use graph::{build_graph, MatchingGraph, SolidEdge};
pub use relations::{presentation, Binomial, Presentation, Provenance};
pub use walks::{
    enumerate_irreducible_walks, walk_vector, Generator, GeneratorKind, Step, Walk, WalkKind,
    WalkSet,
};

/// `2m` linear forms over `l` variables. Form `i` and form `i + m` are the two
/// sides of equation `i`. A form is stored as its list of variables, with
/// repetition standing for a coefficient above one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingSystem {
    m: usize,
    var_names: Vec<String>,
    forms: Vec<Vec<usize>>,
}

impl MatchingSystem {
    /// Builds a system from `(lhs, rhs)` variable lists.
    pub fn new(var_names: Vec<String>, equations: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        let l = var_names.len();
        let m = equations.len();
        let mut forms = vec![Vec::new(); 2 * m];
        for (i, (lhs, rhs)) in equations.into_iter().enumerate() {
            for (side, vars) in [(i, lhs), (i + m, rhs)] {
                if let Some(&bad) = vars.iter().find(|&&j| j >= l) {
                    return Err(Error::Input(format!("variable index {bad} out of range")));
                }
                let mut vars = vars;
                vars.sort_unstable();
                forms[side] = vars;
            }
        }
        Ok(MatchingSystem {
            m,
            var_names,
            forms,
        })
    }

    /// Builds a system from variable names. Unknown names are an input error.
    pub fn from_named(var_names: &[&str], equations: &[(&[&str], &[&str])]) -> Result<Self> {
        let index: HashMap<&str, usize> =
            var_names.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let lookup = |names: &[&str]| -> Result<Vec<usize>> {
            names
                .iter()
                .map(|n| {
                    index
                        .get(n)
                        .copied()
                        .ok_or_else(|| Error::Input(format!("unknown variable `{n}`")))
                })
                .collect()
        };
        let mut eqs = Vec::with_capacity(equations.len());
        for (lhs, rhs) in equations {
            eqs.push((lookup(lhs)?, lookup(rhs)?));
        }
        MatchingSystem::new(var_names.iter().map(|s| s.to_string()).collect(), eqs)
    }

    pub fn num_equations(&self) -> usize {
        self.m
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_forms(&self) -> usize {
        2 * self.m
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_name(&self, j: usize) -> &str {
        &self.var_names[j]
    }

    /// Variables of form `i`, sorted.
    pub fn form(&self, i: usize) -> &[usize] {
        &self.forms[i]
    }

    /// The form on the other side of the same equation.
    pub fn partner(&self, i: usize) -> usize {
        if i < self.m {
            i + self.m
        } else {
            i - self.m
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> usize {
        self.forms[i].iter().filter(|&&x| x == j).count()
    }

    /// Forms in which variable `j` occurs, ascending.
    pub fn occurrences(&self, j: usize) -> Vec<usize> {
        (0..self.num_forms())
            .filter(|&i| self.forms[i].contains(&j))
            .collect()
    }

    pub fn evaluate(&self, i: usize, u: &[u32]) -> u32 {
        self.forms[i].iter().map(|&j| u[j]).sum()
    }

    /// Values of all `2m` forms at `u`.
    pub fn evaluate_all(&self, u: &[u32]) -> Vec<u32> {
        (0..self.num_forms()).map(|i| self.evaluate(i, u)).collect()
    }

    pub fn is_member(&self, u: &[u32]) -> Result<bool> {
        if u.len() != self.num_vars() {
            return Err(Error::Input(format!(
                "vector has length {}, system has {} variables",
                u.len(),
                self.num_vars()
            )));
        }
        Ok((0..self.m).all(|i| self.evaluate(i, u) == self.evaluate(i + self.m, u)))
    }

    /// Checks axioms (a) 0/1 coefficients, (b) reduced equations and
    /// (c) at most two occurrences per variable.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        for (i, form) in self.forms.iter().enumerate() {
            for w in form.windows(2) {
                if w[0] == w[1] {
                    report.push(
                        "a",
                        vec![format!("f{}", i + 1), self.var_names[w[0]].clone()],
                    );
                }
            }
        }
        for i in 0..self.m {
            for &j in &self.forms[i] {
                if self.forms[i + self.m].contains(&j) {
                    report.push("b", vec![format!("f{}", i + 1), self.var_names[j].clone()]);
                }
            }
        }
        for j in 0..self.num_vars() {
            let occ = self.occurrences(j);
            if occ.len() > 2 {
                let mut w = vec![self.var_names[j].clone()];
                w.extend(occ.iter().map(|i| format!("f{}", i + 1)));
                report.push("c", w);
            }
        }
        report
    }

    /// Variables occurring in no form.
    pub fn unused_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.num_vars()];
        for f in &self.forms {
            for &j in f {
                used[j] = true;
            }
        }
        (0..self.num_vars()).filter(|&j| !used[j]).collect()
    }

    /// Removes variables that every member of the semigroup sets to zero:
    /// an equation with an empty side forces the other side to vanish, which
    /// may empty further sides.
    pub fn presolve(&self) -> Presolved {
        let mut forms = self.forms.clone();
        let mut forced = vec![false; self.num_vars()];
        loop {
            let mut changed = false;
            for i in 0..self.num_forms() {
                let p = self.partner(i);
                if forms[i].is_empty() && !forms[p].is_empty() {
                    for &j in &forms[p] {
                        forced[j] = true;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            for f in forms.iter_mut() {
                f.retain(|&j| !forced[j]);
            }
        }
        Presolved {
            system: MatchingSystem {
                m: self.m,
                var_names: self.var_names.clone(),
                forms,
            },
            forced: (0..self.num_vars()).filter(|&j| forced[j]).collect(),
        }
    }

    /// `lhs = rhs` rendering of equation `i`, `0` for an empty side.
    pub fn equation_text(&self, i: usize) -> String {
        let side = |f: &[usize]| {
            if f.is_empty() {
                "0".to_string()
            } else {
                f.iter()
                    .map(|&j| self.var_names[j].as_str())
                    .collect::<Vec<_>>()
                    .join(" + ")
            }
        };
        format!(
            "{} = {}",
            side(&self.forms[i]),
            side(&self.forms[i + self.m])
        )
    }
}

/// A system with forced-zero variables stripped from every form.
#[derive(Clone, Debug)]
pub struct Presolved {
    pub system: MatchingSystem,
    pub forced: Vec<usize>,
}

pub fn validate_system(sys: &MatchingSystem) -> ValidationReport {
    sys.validate()
}

pub fn is_member(sys: &MatchingSystem, u: &[u32]) -> Result<bool> {
    sys.is_member(u)
}
