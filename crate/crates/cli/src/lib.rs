//! Driver for the `gentle-si` binary: parses model or system files, runs one
//! pipeline stage and renders the result as JSON with sorted keys, or as DOT.

pub mod parse;

use std::collections::BTreeMap;

use clap::ValueEnum;
use gentle_core::algebra::{
    coloring_from_gentle, gentle_cover, is_gentle, is_string_algebra, monochromatic_ideal,
    validate_coloring, ColoredQuiver, Coloring, Quiver, RelationSet,
};
use gentle_core::matching::{presentation, Binomial, Generator, MatchingSystem, Presentation};
use gentle_core::oracle::{verify, verify_si_equations, OracleConfig};
use gentle_core::peg::{build_peg, extract_matching_system, ComponentKind, Peg, PegExtract};
use gentle_core::rank::{is_rank_sequence, maximal_rank_sequences, DimensionVector, RankSequence};
use gentle_core::si::{
    degree_bounds, is_maximal, lambda_from_uy, roundtrip_uy, si_presentation, SiPresentation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

pub use parse::{parse_input, parse_model, parse_system, Input, ModelFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] gentle_core::Error),
}

impl CliError {
    /// 1 for bad input, 2 for a violated internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_internal() => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let kind = match self {
            CliError::Syntax { .. } => "syntax",
            CliError::Input(_) => "input",
            CliError::Core(e) if e.is_internal() => "internal",
            CliError::Core(_) => "input",
        };
        let mut err = json!({ "kind": kind, "message": self.to_string() });
        if let CliError::Syntax { line, .. } = self {
            err["line"] = json!(line);
        }
        render(&json!({ "error": err }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Color,
    Cover,
    Components,
    Peg,
    Generators,
    Relations,
    Presentation,
    Degrees,
    Verify,
}

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub dot: bool,
    pub cap: Option<u32>,
    pub seed: Option<u64>,
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Runs `cmd` on the text of an input file.
pub fn run(cmd: Command, text: &str, config: &Config) -> Result<String, CliError> {
    match parse_input(text)? {
        Input::Model(m) => run_model(cmd, &m, config),
        Input::System(s) => run_system(cmd, &s, config),
    }
}

fn need<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    x.as_ref()
        .ok_or_else(|| CliError::Input(format!("the model has no {what}")))
}

fn colored(m: &ModelFile) -> Result<ColoredQuiver, CliError> {
    let coloring = match &m.coloring {
        Some(c) => c.clone(),
        None => coloring_from_gentle(&m.quiver, &relations(m))?,
    };
    Ok(ColoredQuiver::new(m.quiver.clone(), coloring)?)
}

/// Declared relations; a model without relations or colors has none.
fn relations(m: &ModelFile) -> RelationSet {
    m.relations.clone().unwrap_or_default()
}

fn colors_json(q: &Quiver, c: &Coloring) -> Value {
    let map: BTreeMap<&str, usize> = (0..q.arrow_count())
        .map(|a| (q.arrow_id(a), c.color(a) + 1))
        .collect();
    json!(map)
}

fn by_arrow<T: serde::Serialize>(q: &Quiver, xs: &[T]) -> Value {
    let map: BTreeMap<&str, &T> = (0..q.arrow_count())
        .map(|a| (q.arrow_id(a), &xs[a]))
        .collect();
    json!(map)
}

fn by_vertex<T: serde::Serialize>(q: &Quiver, xs: &[T]) -> Value {
    let map: BTreeMap<&str, &T> = (0..q.vertex_count())
        .map(|v| (q.vertex_id(v), &xs[v]))
        .collect();
    json!(map)
}

fn run_model(cmd: Command, m: &ModelFile, config: &Config) -> Result<String, CliError> {
    let q = &m.quiver;
    match cmd {
        Command::Validate => {
            let mut out = json!({});
            let mut ok = true;
            if let Some(c) = &m.coloring {
                let r = validate_coloring(q, c);
                ok &= r.ok;
                out["coloring"] = json!(r);
            }
            if let Some(rel) = &m.relations {
                let s = is_string_algebra(q, rel);
                let g = is_gentle(q, rel);
                out["string_algebra"] = json!(s);
                ok &= s.ok && g.ok;
                out["gentle"] = json!(g);
            }
            if let (Some(beta), Some(r)) = (&m.beta, &m.rank) {
                let cq = colored(m)?;
                let rank_ok = is_rank_sequence(&cq, beta, r)?;
                ok &= rank_ok;
                out["rank"] = json!({
                    "is_rank_sequence": rank_ok,
                    "maximal": rank_ok && is_maximal(&cq, beta, r)?,
                });
            }
            out["ok"] = json!(ok);
            Ok(render(&out))
        }
        Command::Color => {
            let (coloring, source) = match &m.coloring {
                Some(c) => (c.clone(), "given"),
                None => (coloring_from_gentle(q, &relations(m))?, "derived"),
            };
            Ok(render(&json!({
                "colors": colors_json(q, &coloring),
                "ideal": monochromatic_ideal(q, &coloring).words(q),
                "num_colors": coloring.num_colors(),
                "source": source,
            })))
        }
        Command::Cover => {
            let rel = relations(m);
            let cover = gentle_cover(q, &rel)?;
            Ok(render(&json!({
                "colors": colors_json(q, &cover.coloring),
                "ideal": monochromatic_ideal(q, &cover.coloring).words(q),
                "kernel": cover.kernel.words(q),
                "notes": cover.notes,
            })))
        }
        Command::Components => {
            let cq = colored(m)?;
            let beta = need(&m.beta, "dimension vector")?;
            let comps = maximal_rank_sequences(&cq, beta)?;
            let arrows: Vec<&str> = (0..q.arrow_count()).map(|a| q.arrow_id(a)).collect();
            let list: Vec<Value> = comps.iter().map(|r| json!({ "r": r.0 })).collect();
            Ok(render(&json!({ "arrows": arrows, "components": list })))
        }
        Command::Peg => {
            let (peg, ex) = pipeline(m)?;
            if config.dot {
                return Ok(peg.to_dot());
            }
            Ok(render(&peg_json(&peg, &ex)))
        }
        Command::Generators | Command::Relations | Command::Presentation | Command::Degrees => {
            let cq = colored(m)?;
            let beta = need(&m.beta, "dimension vector")?;
            let r = need(&m.rank, "rank sequence")?;
            let si = si_presentation(&cq, beta, r)?;
            let (peg, ex) = pipeline(m)?;
            Ok(render(&si_json(cmd, q, &peg, &ex, &si)))
        }
        Command::Verify => {
            let (peg, ex) = pipeline(m)?;
            let oracle = oracle_config(config);
            let report = verify(&ex.system, &oracle)?;
            let si = si_presentation(peg.colored_quiver(), peg.beta(), peg.ranks())?;
            let generators_si_ok = si
                .generators
                .iter()
                .all(|g| verify_si_equations(peg.colored_quiver(), peg.beta(), &g.lambda));
            let roundtrip_ok = roundtrip_samples(&peg, &ex, &si, oracle.seed, 100)?;
            let mut v = json!(report);
            v["system"] = json!(equations(&ex.system));
            v["seed"] = json!(oracle.seed);
            v["si_equations_match"] = json!(generators_si_ok);
            v["roundtrip_match"] = json!(roundtrip_ok);
            Ok(render(&v))
        }
    }
}

fn oracle_config(config: &Config) -> OracleConfig {
    let mut oracle = OracleConfig::default();
    if let Some(cap) = config.cap {
        oracle.coordinate_cap = cap;
    }
    if let Some(seed) = config.seed {
        oracle.seed = seed;
    }
    oracle
}

/// Checks `(u, y) → λ → (u, y)` and the weight equations on random sums of
/// generators.
fn roundtrip_samples(
    peg: &Peg,
    ex: &PegExtract,
    si: &SiPresentation,
    seed: u64,
    n: usize,
) -> Result<bool, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let mut u = vec![0u32; ex.system.num_vars()];
        let mut y = vec![0u32; ex.bands.len()];
        for g in &si.generators {
            let k = rng.gen_range(0..=2);
            for (x, v) in u.iter_mut().zip(&g.u) {
                *x += k * v;
            }
            for (x, v) in y.iter_mut().zip(&g.y) {
                *x += k * v;
            }
        }
        let lambda = lambda_from_uy(peg, ex, &u, &y)?;
        if roundtrip_uy(peg, ex, &lambda)? != (u, y)
            || !verify_si_equations(peg.colored_quiver(), peg.beta(), &lambda)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

fn pipeline(m: &ModelFile) -> Result<(Peg, PegExtract), CliError> {
    let cq = colored(m)?;
    let beta: &DimensionVector = need(&m.beta, "dimension vector")?;
    let r: &RankSequence = need(&m.rank, "rank sequence")?;
    let peg = build_peg(&cq, beta, r)?;
    let ex = extract_matching_system(&peg)?;
    Ok((peg, ex))
}

fn equations(sys: &MatchingSystem) -> Vec<String> {
    (0..sys.num_equations())
        .map(|i| sys.equation_text(i))
        .collect()
}

fn peg_json(peg: &Peg, ex: &PegExtract) -> Value {
    let q = peg.colored_quiver().quiver();
    let labels: Vec<String> = (0..peg.num_roots()).map(|i| peg.label(i)).collect();
    let components: Vec<Value> = ex
        .components
        .iter()
        .map(|c| {
            let kind = match c.kind {
                ComponentKind::String => "string",
                ComponentKind::Band => "band",
                ComponentKind::Isolated => "isolated",
            };
            json!({ "kind": kind, "roots": c.roots.iter().map(|&r| &labels[r]).collect::<Vec<_>>() })
        })
        .collect();
    let endpoints: Vec<Value> = peg
        .endpoints()
        .iter()
        .map(|e| {
            json!({
                "root": labels[e.root],
                "type": e.type_name(),
                "phi": e.phi.iter().map(|&a| q.arrow_id(a)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "roots": labels,
        "vertex_edges": peg.vertex_edges().iter().map(|&(p, t)| [&labels[p], &labels[t]]).collect::<Vec<_>>(),
        "colored_edges": peg.colored_edges().iter().map(|&(p, t, a)| json!({
            "ends": [&labels[p], &labels[t]],
            "arrow": q.arrow_id(a),
        })).collect::<Vec<_>>(),
        "components": components,
        "endpoints": endpoints,
        "equations": equations(&ex.system),
        "free_arrows": ex.free_arrows.iter().map(|&a| q.arrow_id(a)).collect::<Vec<_>>(),
    })
}

fn relation_json(rel: &Binomial, names: &[String]) -> Value {
    let side = |s: &[usize]| s.iter().map(|&g| names[g].clone()).collect::<Vec<_>>();
    let (lhs, rhs) = (side(&rel.lhs), side(&rel.rhs));
    json!({
        "text": format!("{} = {}", lhs.join(" + "), rhs.join(" + ")),
        "lhs": lhs,
        "rhs": rhs,
        "provenance": rel.provenance,
    })
}

fn si_json(cmd: Command, q: &Quiver, peg: &Peg, ex: &PegExtract, si: &SiPresentation) -> Value {
    let names: Vec<String> = si.generators.iter().map(|g| g.name.clone()).collect();
    let generators: Vec<Value> = si
        .generators
        .iter()
        .map(|g| {
            json!({
                "name": g.name,
                "kind": g.kind,
                "u": by_arrow(q, &g.u),
                "y": g.y,
                "lambda": by_arrow(q, &g.lambda.parts),
                "degree": g.degree,
                "sigma": by_vertex(q, &g.sigma),
                "grade": g.grade,
            })
        })
        .collect();
    let relations: Vec<Value> = si
        .relations
        .iter()
        .zip(&si.relation_degrees)
        .map(|(r, d)| {
            let mut v = relation_json(r, &names);
            v["degree"] = json!(d);
            v
        })
        .collect();
    let bounds = json!({ "generators": si.degree_bound_gens, "relations": si.degree_bound_rels });
    match cmd {
        Command::Generators => json!({ "generators": generators, "band_vars": si.band_vars }),
        Command::Relations => json!({ "relations": relations }),
        Command::Degrees => {
            let (g, r) = degree_bounds(&si.component_label);
            json!({
                "bounds": { "generators": g, "relations": r },
                "generator_degrees": si.generators.iter().map(|g| (g.name.clone(), g.degree)).collect::<BTreeMap<_, _>>(),
                "relation_degrees": si.relation_degrees,
            })
        }
        _ => json!({
            "input": {
                "beta": by_vertex(q, &peg.beta().0),
                "rank": by_arrow(q, &si.component_label.0),
                "colors": colors_json(q, peg.colored_quiver().coloring()),
            },
            "maximal": si.maximal,
            "equations": equations(&ex.system),
            "forced": si.forced.iter().map(|&a| q.arrow_id(a)).collect::<Vec<_>>(),
            "generators": generators,
            "relations": relations,
            "band_vars": si.band_vars,
            "bounds": bounds,
            "components": ex.components.len(),
        }),
    }
}

fn generator_json(g: &Generator, sys: &MatchingSystem) -> Value {
    json!({
        "name": g.name,
        "kind": g.kind,
        "support": g.support(sys),
        "vector": g.vector,
        "walk": g.walk.as_ref().map(|w| w.to_text(sys)),
    })
}

fn run_system(cmd: Command, sys: &MatchingSystem, config: &Config) -> Result<String, CliError> {
    let names = |js: &[usize]| {
        js.iter()
            .map(|&j| sys.var_name(j).to_string())
            .collect::<Vec<_>>()
    };
    match cmd {
        Command::Validate => {
            let report = sys.validate();
            Ok(render(&json!({ "ok": report.ok, "system": report })))
        }
        Command::Generators | Command::Relations | Command::Presentation => {
            let p: Presentation = presentation(sys)?;
            let gen_names: Vec<String> = p.generators.iter().map(|g| g.name.clone()).collect();
            let generators: Vec<Value> = p
                .generators
                .iter()
                .map(|g| generator_json(g, sys))
                .collect();
            let relations: Vec<Value> = p
                .relations
                .iter()
                .map(|r| relation_json(r, &gen_names))
                .collect();
            let v = match cmd {
                Command::Generators => json!({
                    "generators": generators,
                    "forced": names(&p.forced),
                    "free": names(&p.free),
                }),
                Command::Relations => json!({ "relations": relations }),
                _ => json!({
                    "equations": equations(sys),
                    "variables": sys.var_names(),
                    "generators": generators,
                    "relations": relations,
                    "forced": names(&p.forced),
                    "free": names(&p.free),
                }),
            };
            Ok(render(&v))
        }
        Command::Verify => {
            let oracle = oracle_config(config);
            let report = verify(sys, &oracle)?;
            let mut v = json!(report);
            v["system"] = json!(equations(sys));
            v["seed"] = json!(oracle.seed);
            Ok(render(&v))
        }
        Command::Color | Command::Cover | Command::Components | Command::Peg | Command::Degrees => {
            Err(CliError::Input(format!(
                "`{}` needs a quiver model",
                cmd.to_possible_value().unwrap().get_name()
            )))
        }
    }
}
