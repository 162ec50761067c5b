use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use quadgenus::constructions::embed_shape;
use quadgenus::embedding::{euler_genus, trace_faces, validate, Embedding, EmbeddingCertificate};
use quadgenus::family::{build_family, parse_family_expr, Atom, ConstructionShape, FamilyExpr};
use quadgenus::formulas::{self, FormulaTag, GenusValue};
use quadgenus::graph::{is_bipartite, Graph, Label, VertexId};
use quadgenus::oracle::{
    exhaustive_min_genus, rotation_space_size, stochastic_search, OracleResult, SearchBudget,
};
use quadgenus::surgery::HandleRecord;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::files::{compact, json_lines, pretty, read_bytes, read_json, sibling, RunManifest};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildSummary {
    pub n: usize,
    pub m: usize,
    pub bipartite: bool,
}

pub fn cmd_build(expr: &str, out: Option<&Path>) -> Result<(Graph, BuildSummary)> {
    let started = Instant::now();
    let g = build_family(&parse_family_expr(expr)?)?;
    let summary = BuildSummary {
        n: g.n(),
        m: g.m(),
        bipartite: is_bipartite(&g).is_some(),
    };
    if let Some(out) = out {
        let mut manifest = RunManifest::new("build", json!({ "expr": expr }));
        manifest.emit(out, &compact(&g))?;
        manifest.finish(&sibling(out, "manifest.json"), started)?;
    }
    Ok((g, summary))
}

/// Output of a construction, with vertices numbered as in `build` of the
/// requested expression.
#[derive(Debug, Clone)]
pub struct EmbedOutput {
    pub embedding: Embedding,
    pub certificate: EmbeddingCertificate,
    pub handles: Vec<HandleRecord>,
    pub shape: ConstructionShape,
}

fn atom_order(a: Atom) -> u32 {
    match a {
        Atom::K(s, t) => s + t,
        Atom::C(n) | Atom::P(n) => n,
        Atom::Q(..) => unreachable!("expanded"),
    }
}

/// Position of every constructed vertex in the vertex order of the
/// requested expression, and the labels it has there.
fn original_numbering(
    expr: &FamilyExpr,
    shape: &ConstructionShape,
    labels: &[Label],
) -> (Vec<VertexId>, Vec<Label>) {
    let atoms: Vec<Atom> = expr.atoms().into_iter().flat_map(Atom::expand).collect();
    let sizes: Vec<u64> = atoms.iter().map(|&a| atom_order(a) as u64).collect();
    labels
        .iter()
        .map(|l| {
            let mut orig = vec![0u32; l.len()];
            for (k, &pos) in shape.order.iter().enumerate() {
                orig[pos] = l[k];
            }
            let index = orig
                .iter()
                .zip(&sizes)
                .fold(0u64, |acc, (&c, &s)| acc * s + c as u64);
            (VertexId(index as u32), orig)
        })
        .unzip()
}

pub fn embed_expr(expr: &str) -> Result<EmbedOutput> {
    let parsed = parse_family_expr(expr)?;
    let shape = ConstructionShape::from_expr(&parsed)?;
    let res = embed_shape(&shape)?;
    let tag = res.certificate.construction_tag.clone();
    let labels = res
        .embedding
        .graph()
        .labels()
        .ok_or_else(|| CliError::Verification("construction lost its labels".into()))?
        .to_vec();
    let (index, orig_labels) = original_numbering(&parsed, &shape, &labels);
    let identity = index.iter().enumerate().all(|(i, v)| v.index() == i);
    let (embedding, handles) = if identity {
        (res.embedding, res.trace)
    } else {
        let e = res.embedding.relabel(&index)?;
        let (graph, rotation) = e.into_parts();
        let mut moved = vec![Vec::new(); orig_labels.len()];
        for (v, l) in orig_labels.into_iter().enumerate() {
            moved[index[v].index()] = l;
        }
        let e = Embedding::new(graph.with_labels(moved)?, rotation)?;
        let map = |v: &VertexId| index[v.index()];
        let handles = res
            .trace
            .into_iter()
            .map(|mut h| {
                h.consumed = h
                    .consumed
                    .iter()
                    .map(|f| f.iter().map(map).collect())
                    .collect();
                h.created = h
                    .created
                    .iter()
                    .map(|f| f.iter().map(map).collect())
                    .collect();
                h.edges = h.edges.map(|[a, b]| [map(&a), map(&b)]);
                h
            })
            .collect();
        (e, handles)
    };
    if embedding.graph() != &build_family(&parsed)? {
        return Err(CliError::Verification(
            "embedded graph differs from the requested product".into(),
        ));
    }
    let mut certificate = euler_genus(&embedding)?;
    certificate.construction_tag = tag;
    if !(certificate.quadrilateral && certificate.minimal) {
        return Err(CliError::Verification(format!(
            "construction of {expr} is not a minimal quadrilateral embedding"
        )));
    }
    Ok(EmbedOutput {
        embedding,
        certificate,
        handles,
        shape,
    })
}

/// Writes `<out>`, `<out>.cert.json`, `<out>.handles.jsonl` and
/// `<out>.manifest.json` (with a trailing `.json` of `out` dropped).
pub fn cmd_embed(expr: &str, out: &Path) -> Result<EmbedOutput> {
    let started = Instant::now();
    let res = embed_expr(expr)?;
    let mut manifest = RunManifest::new(
        "embed",
        json!({
            "expr": expr,
            "normalized": res.shape.expr().to_string(),
            "order": res.shape.order,
        }),
    );
    manifest.emit(out, &compact(&res.embedding))?;
    manifest.emit(&sibling(out, "cert.json"), &pretty(&res.certificate))?;
    manifest.emit(&sibling(out, "handles.jsonl"), &json_lines(&res.handles))?;
    manifest.finish(&sibling(out, "manifest.json"), started)?;
    Ok(res)
}

/// Re-traces `embedding` from scratch and, if `stored` is given, compares the
/// serialized certificate with it byte for byte.
pub fn verify_embedding(
    embedding: &Embedding,
    stored: Option<&[u8]>,
) -> Result<EmbeddingCertificate> {
    let violations = validate(embedding);
    if let Some(v) = violations.first() {
        return Err(CliError::Verification(format!(
            "{} rotation violations, first: {v}",
            violations.len()
        )));
    }
    let mut cert = euler_genus(embedding)?;
    if let Some(bytes) = stored {
        let old: EmbeddingCertificate = serde_json::from_slice(bytes)
            .map_err(|e| CliError::Verification(format!("stored certificate unreadable: {e}")))?;
        cert.construction_tag = old.construction_tag.clone();
        if pretty(&cert) != bytes {
            return Err(CliError::Verification(format!(
                "certificate mismatch: stored genus {} f {} minimal {}, recomputed genus {} f {} minimal {}",
                old.genus, old.f, old.minimal, cert.genus, cert.f, cert.minimal
            )));
        }
    }
    Ok(cert)
}

/// Verifies an embedding file against `cert` or, failing that, the sibling
/// `.cert.json` when it exists.
pub fn cmd_verify(path: &Path, cert: Option<&Path>) -> Result<EmbeddingCertificate> {
    let e: Embedding = read_json(path)?;
    let cert_path = cert.map(Path::to_owned).or_else(|| {
        let p = sibling(path, "cert.json");
        p.exists().then_some(p)
    });
    let stored = cert_path.as_deref().map(read_bytes).transpose()?;
    verify_embedding(&e, stored.as_deref())
}

pub fn cmd_faces(path: &Path) -> Result<Vec<Vec<VertexId>>> {
    let e: Embedding = read_json(path)?;
    if let Some(v) = validate(&e).first() {
        return Err(CliError::Verification(v.to_string()));
    }
    Ok(trace_faces(&e)?.iter().map(|f| f.walk.clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusOutput {
    pub formula: String,
    pub params: BTreeMap<String, Vec<u32>>,
    pub genus: u64,
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, Vec<u32>>> {
    let mut out = BTreeMap::new();
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::Param(format!("expected key=value, got '{p}'")))?;
        let values = v
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| CliError::Param(format!("'{v}' is not a list of integers")))?;
        if out.insert(k.trim().to_owned(), values).is_some() {
            return Err(CliError::Param(format!("'{k}' given twice")));
        }
    }
    Ok(out)
}

struct Params<'a> {
    map: &'a BTreeMap<String, Vec<u32>>,
}

impl Params<'_> {
    fn list(&self, key: &str) -> Result<Vec<u32>> {
        self.map
            .get(key)
            .cloned()
            .ok_or_else(|| CliError::Param(format!("missing parameter '{key}'")))
    }

    fn one(&self, key: &str) -> Result<u32> {
        match self.list(key)?.as_slice() {
            [x] => Ok(*x),
            _ => Err(CliError::Param(format!("'{key}' takes a single value"))),
        }
    }

    fn half(key: &str, x: u32) -> Result<u32> {
        if !x.is_multiple_of(2) {
            return Err(CliError::Param(format!(
                "'{key}' must be an even vertex count, got {x}"
            )));
        }
        Ok(x / 2)
    }

    fn halves(&self, key: &str) -> Result<Vec<u32>> {
        self.list(key)?
            .into_iter()
            .map(|x| Self::half(key, x))
            .collect()
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Param(format!(
                "unknown parameter '{k}', expected {allowed:?}"
            ))),
            None => Ok(()),
        }
    }
}

/// Evaluates a formula. Parameters are vertex counts: `part` is the part
/// size `2r`, `cycle`/`cycles` and `path`/`paths` are numbers of vertices;
/// `i`, `j` and `n` are product dimensions.
pub fn cmd_genus(formula: &str, params: &[String]) -> Result<GenusOutput> {
    let tag = FormulaTag::from_name(formula).ok_or_else(|| {
        let names: Vec<&str> = FormulaTag::ALL.iter().map(|t| t.name()).collect();
        CliError::Param(format!(
            "unknown formula '{formula}', expected one of {names:?}"
        ))
    })?;
    let map = parse_params(params)?;
    let p = Params { map: &map };
    let keys: &[&str] = match tag {
        FormulaTag::WhitePath => &["paths"],
        FormulaTag::WhiteCycle => &["cycles"],
        FormulaTag::Cube => &["j", "part"],
        FormulaTag::Hypercube => &["n"],
        FormulaTag::Ringel => &["part"],
        FormulaTag::CubeCycle => &["i", "part", "cycle"],
        FormulaTag::MainCycles => &["i", "part", "cycles"],
        FormulaTag::BipartiteCycles => &["part", "cycles"],
        FormulaTag::CubePath => &["i", "part", "path"],
        FormulaTag::MainPaths => &["i", "part", "paths"],
    };
    p.check_keys(keys)?;
    let r = || Params::half("part", p.one("part")?);
    let value: GenusValue = match tag {
        FormulaTag::WhitePath => formulas::white_path_genus(&p.list("paths")?)?,
        FormulaTag::WhiteCycle => formulas::white_cycle_genus(&p.halves("cycles")?)?,
        FormulaTag::Cube => formulas::cube_genus(p.one("j")?, p.one("part")?)?,
        FormulaTag::Hypercube => formulas::hypercube_genus(p.one("n")?)?,
        FormulaTag::Ringel => formulas::ringel_genus(r()?)?,
        FormulaTag::CubeCycle => {
            formulas::cube_cycle_genus(p.one("i")?, r()?, Params::half("cycle", p.one("cycle")?)?)?
        }
        FormulaTag::MainCycles => {
            formulas::main_cycles_genus(p.one("i")?, r()?, &p.halves("cycles")?)?
        }
        FormulaTag::BipartiteCycles => {
            formulas::bipartite_cycles_genus(r()?, &p.halves("cycles")?)?
        }
        FormulaTag::CubePath => {
            formulas::cube_path_genus(p.one("i")?, r()?, Params::half("path", p.one("path")?)?)?
        }
        FormulaTag::MainPaths => {
            formulas::main_paths_genus(p.one("i")?, r()?, &p.halves("paths")?)?
        }
    };
    Ok(GenusOutput {
        formula: tag.name().to_owned(),
        params: map,
        genus: value.value,
    })
}

/// Exhaustive search when the rotation space fits the budget, stochastic
/// search otherwise. The witness is written to `out` when given.
pub fn cmd_oracle(graph: &Path, budget: SearchBudget, out: Option<&Path>) -> Result<OracleResult> {
    let started = Instant::now();
    let g: Graph = read_json(graph)?;
    let res = if rotation_space_size(&g) <= budget.max_rotation_systems as u128 {
        exhaustive_min_genus(&g, budget)?
    } else {
        stochastic_search(&g, budget)?
    };
    if let Some(out) = out {
        let mut manifest = RunManifest::new("oracle", json!({ "budget": budget }));
        manifest.inputs.push(graph.display().to_string());
        manifest.seed = Some(budget.seed);
        manifest.emit(out, &compact(&res.witness))?;
        manifest.emit(&sibling(out, "result.json"), &pretty(&res))?;
        manifest.finish(&sibling(out, "manifest.json"), started)?;
    }
    Ok(res)
}
