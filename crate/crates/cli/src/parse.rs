//! Line-oriented input formats.
//!
//! Quiver models:
//!
//! ```text
//! vertex 1
//! vertex 2
//! arrow a 1 2 color s
//! rel b a
//! beta 1 2
//! rank a 2
//! ```
//!
//! Abstract matching systems use `var <name>` and `eq <j>: <lhs> = <rhs>`
//! lines, where a side is a `+`-separated list of variables or `0`.

use std::collections::{BTreeMap, HashMap, HashSet};

use gentle_core::algebra::{Coloring, Quiver, RelationSet};
use gentle_core::matching::MatchingSystem;
use gentle_core::rank::{DimensionVector, RankSequence};

use crate::CliError;

#[derive(Clone, Debug)]
pub struct ModelFile {
    pub quiver: Quiver,
    pub coloring: Option<Coloring>,
    pub relations: Option<RelationSet>,
    pub beta: Option<DimensionVector>,
    pub rank: Option<RankSequence>,
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Input {
    Model(ModelFile),
    System(MatchingSystem),
}

fn syntax(line: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Picks the format from the first keyword.
pub fn parse_input(text: &str) -> Result<Input, CliError> {
    let abstract_system = lines(text).any(|(_, l)| l.starts_with("eq ") || l.starts_with("var "));
    if abstract_system {
        parse_system(text).map(Input::System)
    } else {
        parse_model(text).map(Input::Model)
    }
}

fn number(line: usize, tok: &str) -> Result<usize, CliError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected a nonnegative integer, got `{tok}`")))
}

pub fn parse_model(text: &str) -> Result<ModelFile, CliError> {
    let mut vertices: Vec<String> = Vec::new();
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    let mut colors: Vec<Option<String>> = Vec::new();
    let mut rels: Vec<(usize, String, String)> = Vec::new();
    let mut beta: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut rank: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut seen_vertex = HashSet::new();
    let mut seen_arrow = HashSet::new();
    let mut seen_rel = HashSet::new();

    for (ln, line) in lines(text) {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["vertex", id] => {
                if !seen_vertex.insert(id.to_string()) {
                    return Err(syntax(ln, format!("duplicate vertex `{id}`")));
                }
                vertices.push(id.to_string());
            }
            ["arrow", id, tail, head, rest @ ..] => {
                if !seen_arrow.insert(id.to_string()) {
                    return Err(syntax(ln, format!("duplicate arrow `{id}`")));
                }
                let color = match rest {
                    [] => None,
                    ["color", c] => Some(c.to_string()),
                    _ => {
                        return Err(syntax(
                            ln,
                            "expected `arrow <id> <tail> <head> [color <c>]`",
                        ))
                    }
                };
                arrows.push((id.to_string(), tail.to_string(), head.to_string()));
                colors.push(color);
            }
            ["rel", b, a] => {
                if !seen_rel.insert((b.to_string(), a.to_string())) {
                    return Err(syntax(ln, format!("duplicate relation `{b} {a}`")));
                }
                rels.push((ln, b.to_string(), a.to_string()));
            }
            ["beta", v, n] => {
                if beta.insert(v.to_string(), (ln, number(ln, n)?)).is_some() {
                    return Err(syntax(ln, format!("duplicate beta for `{v}`")));
                }
            }
            ["rank", a, n] => {
                if rank.insert(a.to_string(), (ln, number(ln, n)?)).is_some() {
                    return Err(syntax(ln, format!("duplicate rank for `{a}`")));
                }
            }
            [kw, ..] => return Err(syntax(ln, format!("unexpected `{kw}` line"))),
            [] => unreachable!("blank lines are skipped"),
        }
    }
    if vertices.is_empty() {
        return Err(CliError::Input("no vertices".into()));
    }
    let quiver = Quiver::new(vertices, arrows)?;

    let coloring = match colors.iter().filter(|c| c.is_some()).count() {
        0 => None,
        n if n == colors.len() => {
            let labels: Vec<String> = colors.into_iter().map(Option::unwrap).collect();
            Some(Coloring::from_labels(&quiver, &labels)?)
        }
        _ => {
            return Err(CliError::Input(
                "either every arrow has a color or none does".into(),
            ))
        }
    };
    let relations = if rels.is_empty() {
        None
    } else {
        let mut pairs = Vec::with_capacity(rels.len());
        for (ln, b, a) in &rels {
            let bi = quiver
                .arrow_index(b)
                .ok_or_else(|| syntax(*ln, format!("unknown arrow `{b}`")))?;
            let ai = quiver
                .arrow_index(a)
                .ok_or_else(|| syntax(*ln, format!("unknown arrow `{a}`")))?;
            pairs.push((bi, ai));
        }
        Some(RelationSet::new(&quiver, pairs)?)
    };
    let beta = if beta.is_empty() {
        None
    } else {
        for (v, (ln, _)) in &beta {
            if quiver.vertex_index(v).is_none() {
                return Err(syntax(*ln, format!("unknown vertex `{v}`")));
            }
        }
        let map: HashMap<String, usize> = beta.into_iter().map(|(k, (_, n))| (k, n)).collect();
        Some(DimensionVector::from_map(&quiver, &map)?)
    };
    let rank = if rank.is_empty() {
        None
    } else {
        for (a, (ln, _)) in &rank {
            if quiver.arrow_index(a).is_none() {
                return Err(syntax(*ln, format!("unknown arrow `{a}`")));
            }
        }
        let map: HashMap<String, usize> = rank.into_iter().map(|(k, (_, n))| (k, n)).collect();
        Some(RankSequence::from_map(&quiver, &map)?)
    };
    Ok(ModelFile {
        quiver,
        coloring,
        relations,
        beta,
        rank,
    })
}

pub fn parse_system(text: &str) -> Result<MatchingSystem, CliError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut eqs: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    let mut intern = |name: &str, names: &mut Vec<String>| -> usize {
        *index.entry(name.to_string()).or_insert_with(|| {
            names.push(name.to_string());
            names.len() - 1
        })
    };
    for (ln, line) in lines(text) {
        if let Some(rest) = line.strip_prefix("var ") {
            for v in rest.split_whitespace() {
                if names.iter().any(|n| n == v) {
                    return Err(syntax(ln, format!("duplicate variable `{v}`")));
                }
                intern(v, &mut names);
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("eq ") else {
            return Err(syntax(ln, "expected `var` or `eq` line"));
        };
        let (label, body) = rest
            .split_once(':')
            .ok_or_else(|| syntax(ln, "expected `eq <j>: <lhs> = <rhs>`"))?;
        let j = number(ln, label.trim())?;
        let (lhs, rhs) = body
            .split_once('=')
            .ok_or_else(|| syntax(ln, "missing `=`"))?;
        let mut side = |s: &str| -> Result<Vec<usize>, CliError> {
            let toks: Vec<&str> = s
                .split(|c: char| c == '+' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            if toks == ["0"] {
                return Ok(Vec::new());
            }
            if toks.is_empty() {
                return Err(syntax(ln, "empty side; write `0`"));
            }
            Ok(toks.iter().map(|t| intern(t, &mut names)).collect())
        };
        let eq = (side(lhs)?, side(rhs)?);
        if eqs.insert(j, eq).is_some() {
            return Err(syntax(ln, format!("duplicate equation {j}")));
        }
    }
    if eqs.is_empty() && names.is_empty() {
        return Err(CliError::Input("no equations".into()));
    }
    Ok(MatchingSystem::new(names, eqs.into_values().collect())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_round_trip() {
        let m = parse_model(
            "# path\nvertex 1\nvertex 2\nvertex 3\narrow a 1 2\narrow b 2 3 # second\nbeta 1 1\nbeta 2 1\nbeta 3 1\n",
        )
        .unwrap();
        assert_eq!(m.quiver.arrow_count(), 2);
        assert!(m.coloring.is_none() && m.relations.is_none() && m.rank.is_none());
        assert_eq!(m.beta.unwrap().0, vec![1, 1, 1]);
    }

    #[test]
    fn model_errors() {
        assert!(matches!(parse_model(""), Err(CliError::Input(m)) if m == "no vertices"));
        assert!(matches!(
            parse_model("vertex 1\nvertex 1\n"),
            Err(CliError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_model("vertex 1\nvertex 2\narrow a 1 2\nrank b 1\n"),
            Err(CliError::Syntax { line: 4, .. })
        ));
        assert!(matches!(
            parse_model("vertex 1\nfoo\n"),
            Err(CliError::Syntax { line: 2, .. })
        ));
        assert!(
            parse_model("vertex 1\nvertex 2\nvertex 3\narrow a 1 2 color s\narrow b 2 3\n")
                .is_err()
        );
    }

    #[test]
    fn system_format() {
        let s = parse_system("var p q\neq 1: p + q = r\neq 2: r = 0\n").unwrap();
        assert_eq!(s.num_vars(), 3);
        assert_eq!(s.equation_text(0), "p + q = r");
        assert_eq!(s.equation_text(1), "r = 0");
        assert!(matches!(
            parse_system("eq 1: p =\n"),
            Err(CliError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn format_detection() {
        assert!(matches!(
            parse_input("eq 1: x = y").unwrap(),
            Input::System(_)
        ));
        assert!(matches!(parse_input("vertex 1").unwrap(), Input::Model(_)));
    }
}
