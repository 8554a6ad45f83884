//! Declarative model files (TOML) and the embedded fixtures.
//!
//! A reference to a model is either a fixture name (`so3`, `kdv_sl2`, ...) or
//! a path to a `.toml` file. References inside a file are resolved relative
//! to that file first, then against the fixtures.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use algebroid_core::algebroid::ClassicalAlgebroid;
use algebroid_core::gforms::GForm;
use algebroid_core::liealg::LieAlgebra;
use algebroid_core::symkernel::{parse, Coefficient, Context, DiffPolynomial, Parity, PdeSystem, Ranking};
use algebroid_core::zcr::{GaugeElement, Matrix, Representation};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name, ".toml")))),*]
    };
}

pub const FIXTURES: &[(&str, &str)] = fixtures!(
    "so3",
    "sl2",
    "bad_so3",
    "abelian1",
    "abelian2",
    "abelian3",
    "kdv",
    "heat",
    "transport",
    "kdv_sl2",
    "abelian_transport",
    "sl2_defining",
    "abelian1_nilpotent",
    "kdv_unipotent",
    "kdv_lower",
    "shift_x",
    "ce_so3",
    "de_rham_1",
    "de_rham_2",
    "de_rham_3",
    "poisson_const",
    "affine_line",
);

pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Raw text of a model file with its provenance.
#[derive(Clone, Debug)]
pub struct Source {
    pub label: String,
    pub text: String,
    pub sha256: String,
    pub dir: Option<PathBuf>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Source {
    pub fn load(reference: &str, relative_to: Option<&Path>) -> Result<Source, CliError> {
        let looks_like_path = reference.ends_with(".toml") || reference.contains('/');
        if looks_like_path {
            let mut path = PathBuf::from(reference);
            if let (true, Some(dir)) = (path.is_relative(), relative_to) {
                let candidate = dir.join(&path);
                if candidate.exists() {
                    path = candidate;
                }
            }
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let sha256 = hex(&Sha256::digest(text.as_bytes()));
            let dir = path.parent().map(Path::to_path_buf);
            return Ok(Source { label: path.display().to_string(), text, sha256, dir });
        }
        if let Some(dir) = relative_to {
            let candidate = dir.join(format!("{reference}.toml"));
            if candidate.exists() {
                return Source::load(&candidate.display().to_string(), None);
            }
        }
        let text = fixture(reference).ok_or_else(|| CliError::Usage(format!("unknown model `{reference}`")))?;
        Ok(Source {
            label: format!("fixture:{reference}"),
            text: text.to_string(),
            sha256: hex(&Sha256::digest(text.as_bytes())),
            dir: None,
        })
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T, CliError> {
        toml::from_str(&self.text).map_err(|e| CliError::Model { file: self.label.clone(), msg: e.to_string() })
    }

    fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::Model { file: self.label.clone(), msg: msg.into() }
    }
}

/// Inputs read so far, for the report.
#[derive(Default, Debug)]
pub struct Provenance {
    pub inputs: Vec<(String, String)>,
}

impl Provenance {
    fn note(&mut self, s: &Source) {
        if !self.inputs.iter().any(|(l, _)| *l == s.label) {
            self.inputs.push((s.label.clone(), s.sha256.clone()));
        }
    }
}

fn expr(src: &Source, what: &str, text: &str, ctx: &Context) -> Result<DiffPolynomial, CliError> {
    parse(text, ctx).map_err(|e| src.err(format!("{what}: `{text}`: {e}")))
}

fn constant(src: &Source, what: &str, text: &str) -> Result<Coefficient, CliError> {
    let ctx = Context::new(&[]).expect("empty context");
    expr(src, what, text, &ctx)?.as_constant().ok_or_else(|| src.err(format!("{what}: `{text}` is not a constant")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    name: Option<String>,
    dim: usize,
    basis: Option<Vec<String>>,
    #[serde(default)]
    brackets: Vec<String>,
    metric: Option<Vec<String>>,
}

/// `[a,b] = rhs` or `t(a,b) = rhs`, returning the two names and the right side.
fn split_pair<'a>(line: &'a str, open: &str, close: char) -> Option<(&'a str, &'a str, &'a str)> {
    let (lhs, rhs) = line.split_once('=')?;
    let inner = lhs.trim().strip_prefix(open)?.strip_suffix(close)?;
    let (a, b) = inner.split_once(',')?;
    Some((a.trim(), b.trim(), rhs.trim()))
}

pub fn load_algebra(reference: &str, rel: Option<&Path>, prov: &mut Provenance) -> Result<LieAlgebra, CliError> {
    let src = Source::load(reference, rel)?;
    prov.note(&src);
    let f: AlgebraFile = src.parse()?;
    let basis: Vec<String> = f.basis.clone().unwrap_or_else(|| (1..=f.dim).map(|i| format!("e{i}")).collect());
    if basis.len() != f.dim {
        return Err(src.err(format!("basis has {} names but dim = {}", basis.len(), f.dim)));
    }
    let mut ctx = Context::new(&[]).expect("empty context");
    let ids: Vec<_> = basis
        .iter()
        .map(|b| ctx.declare(b, Parity::Even).map_err(|e| src.err(format!("basis name `{b}`: {e}"))))
        .collect::<Result<_, _>>()?;
    let index = |name: &str| {
        basis.iter().position(|b| b == name).ok_or_else(|| src.err(format!("unknown basis element `{name}`")))
    };
    let mut entries = Vec::new();
    for (n, line) in f.brackets.iter().enumerate() {
        let (a, b, rhs) = split_pair(line, "[", ']')
            .ok_or_else(|| src.err(format!("brackets[{n}]: expected `[a,b] = combination`, got `{line}`")))?;
        let (i, j) = (index(a)?, index(b)?);
        let p = expr(&src, &format!("brackets[{n}]"), rhs, &ctx)?;
        for (m, c) in p.terms() {
            let v = m.vars().collect::<Vec<_>>();
            if v.len() != 1 || m.degree() != 1 {
                return Err(src.err(format!("brackets[{n}]: `{rhs}` is not a linear combination of the basis")));
            }
            let k = ids.iter().position(|&s| s == v[0].sym).expect("only basis symbols are declared");
            entries.push((k, i, j, c.clone()));
        }
    }
    let metric = match &f.metric {
        None => None,
        Some(lines) => {
            let mut m = Vec::new();
            for (n, line) in lines.iter().enumerate() {
                let (a, b, rhs) = split_pair(line, "t(", ')')
                    .ok_or_else(|| src.err(format!("metric[{n}]: expected `t(a,b) = value`, got `{line}`")))?;
                m.push((index(a)?, index(b)?, constant(&src, &format!("metric[{n}]"), rhs)?));
            }
            Some(m)
        }
    };
    let name = f.name.clone().unwrap_or_else(|| reference.to_string());
    let (g, conflicts) =
        LieAlgebra::from_entries(&name, f.dim, &entries, metric.as_deref()).map_err(|e| src.err(e.to_string()))?;
    if let Some(c) = conflicts.first() {
        return Err(src.err(format!(
            "brackets give two different values for c^{}_{}{} after antisymmetry",
            c.k + 1,
            c.i + 1,
            c.j + 1
        )));
    }
    Ok(g)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PdeFile {
    base: Vec<String>,
    #[serde(default)]
    fields: Vec<String>,
    #[serde(default)]
    odd_fields: Vec<String>,
    #[serde(default)]
    params: Vec<String>,
    weights: Option<Vec<u32>>,
    #[serde(default)]
    equations: Vec<(String, String)>,
}

#[derive(Debug)]
pub struct PdeModel {
    pub ctx: Context,
    pub system: PdeSystem,
}

fn base_chars(src: &Source, base: &[String]) -> Result<Vec<char>, CliError> {
    base.iter()
        .map(|b| {
            let mut it = b.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(src.err(format!("base coordinate `{b}` must be a single letter"))),
            }
        })
        .collect()
}

pub fn load_pde(
    reference: &str,
    rel: Option<&Path>,
    prov: &mut Provenance,
    max_jet_order: Option<u32>,
) -> Result<PdeModel, CliError> {
    let src = Source::load(reference, rel)?;
    prov.note(&src);
    let f: PdeFile = src.parse()?;
    let mut ctx = Context::new(&base_chars(&src, &f.base)?).map_err(|e| src.err(e.to_string()))?;
    if let Some(m) = max_jet_order {
        ctx.max_jet_order = m;
    }
    for u in &f.fields {
        ctx.declare(u, Parity::Even).map_err(|e| src.err(format!("field `{u}`: {e}")))?;
    }
    for u in &f.odd_fields {
        ctx.declare(u, Parity::Odd).map_err(|e| src.err(format!("field `{u}`: {e}")))?;
    }
    for p in &f.params {
        ctx.declare_param(p).map_err(|e| src.err(format!("parameter `{p}`: {e}")))?;
    }
    let rules: Vec<(&str, &str)> = f.equations.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let system = PdeSystem::parse(&rules, &ctx, Ranking { weights: f.weights.clone() })
        .map_err(|e| src.err(format!("equations: {e}")))?;
    Ok(PdeModel { ctx, system })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ZcrFile {
    algebra: String,
    pde: String,
    connection: BTreeMap<String, Vec<String>>,
}

#[derive(Debug)]
pub struct ZcrModel {
    pub algebra: LieAlgebra,
    pub pde: PdeModel,
    pub alpha: GForm,
    pub dir: Option<PathBuf>,
}

pub fn load_zcr(
    reference: &str,
    pde_override: Option<&str>,
    prov: &mut Provenance,
    max_jet_order: Option<u32>,
) -> Result<ZcrModel, CliError> {
    let src = Source::load(reference, None)?;
    prov.note(&src);
    let f: ZcrFile = src.parse()?;
    let rel = src.dir.as_deref();
    let algebra = load_algebra(&f.algebra, rel, prov)?;
    let pde = match pde_override {
        Some(p) => load_pde(p, None, prov, max_jet_order)?,
        None => load_pde(&f.pde, rel, prov, max_jet_order)?,
    };
    let base = pde.ctx.base_names();
    for key in f.connection.keys() {
        if !base.iter().any(|b| b.to_string() == *key) {
            return Err(src.err(format!("connection component `{key}` is not a base coordinate")));
        }
    }
    let mut rows = Vec::new();
    for b in base {
        let comps =
            f.connection.get(&b.to_string()).ok_or_else(|| src.err(format!("missing connection component `{b}`")))?;
        if comps.len() != algebra.dim() {
            return Err(src.err(format!(
                "connection.{b} has {} entries, algebra has dim {}",
                comps.len(),
                algebra.dim()
            )));
        }
        let row = comps
            .iter()
            .enumerate()
            .map(|(k, t)| expr(&src, &format!("connection.{b}[{k}]"), t, &pde.ctx))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let alpha = GForm::one_form(base.len(), algebra.dim(), &rows).map_err(|e| src.err(e.to_string()))?;
    Ok(ZcrModel { algebra, pde, alpha, dir: src.dir.clone() })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    algebra: String,
    matrices: Vec<Vec<Vec<String>>>,
}

pub fn load_rep(
    reference: &str,
    rel: Option<&Path>,
    prov: &mut Provenance,
) -> Result<(LieAlgebra, Representation), CliError> {
    let src = Source::load(reference, rel)?;
    prov.note(&src);
    let f: RepFile = src.parse()?;
    let g = load_algebra(&f.algebra, src.dir.as_deref(), prov)?;
    let ctx = Context::new(&[]).expect("empty context");
    let mats = f
        .matrices
        .iter()
        .enumerate()
        .map(|(k, m)| matrix(&src, &format!("matrices[{k}]"), m, &ctx))
        .collect::<Result<Vec<_>, _>>()?;
    let rep = Representation::new(&g, mats).map_err(|e| src.err(e.to_string()))?;
    Ok((g, rep))
}

fn matrix(src: &Source, what: &str, rows: &[Vec<String>], ctx: &Context) -> Result<Matrix, CliError> {
    let polys = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, t)| expr(src, &format!("{what}[{i}][{j}]"), t, ctx))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(polys).map_err(|e| src.err(format!("{what}: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeFile {
    rep: String,
    #[serde(default)]
    fields: Vec<String>,
    exp: Option<Vec<Vec<String>>>,
    g: Option<Vec<Vec<String>>>,
    g_inv: Option<Vec<Vec<String>>>,
}

/// A gauge file; its entries are parsed later in the context of the command.
pub struct GaugeModel {
    src: Source,
    file: GaugeFile,
}

impl GaugeModel {
    pub fn load(reference: &str, rel: Option<&Path>, prov: &mut Provenance) -> Result<GaugeModel, CliError> {
        let src = Source::load(reference, rel)?;
        prov.note(&src);
        let file: GaugeFile = src.parse()?;
        Ok(GaugeModel { src, file })
    }

    pub fn rep(&self, prov: &mut Provenance) -> Result<(LieAlgebra, Representation), CliError> {
        load_rep(&self.file.rep, self.src.dir.as_deref(), prov)
    }

    pub fn fields(&self) -> Vec<&str> {
        self.file.fields.iter().map(String::as_str).collect()
    }

    pub fn element(&self, ctx: &Context) -> Result<GaugeElement, CliError> {
        let f = &self.file;
        match (&f.exp, &f.g, &f.g_inv) {
            (Some(m), None, None) => {
                let m = matrix(&self.src, "exp", m, ctx)?;
                GaugeElement::exp_nilpotent(&m).map_err(|e| self.src.err(format!("exp: {e}")))
            }
            (None, Some(g), Some(gi)) => {
                let g = matrix(&self.src, "g", g, ctx)?;
                let gi = matrix(&self.src, "g_inv", gi, ctx)?;
                GaugeElement::new(g, gi, None).map_err(|e| self.src.err(e.to_string()))
            }
            _ => Err(self.src.err("give either `exp` or both `g` and `g_inv`")),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
enum AlgebroidFile {
    ChevalleyEilenberg { algebra: String },
    DeRham { m: usize },
    Poisson { bivector: Vec<Vec<String>> },
    General { m: usize, d: usize, anchor: Vec<Vec<String>>, brackets: Vec<String> },
}

pub fn load_algebroid(reference: &str, prov: &mut Provenance) -> Result<ClassicalAlgebroid, CliError> {
    let src = Source::load(reference, None)?;
    prov.note(&src);
    let f: AlgebroidFile = src.parse()?;
    match f {
        AlgebroidFile::ChevalleyEilenberg { algebra } => {
            let g = load_algebra(&algebra, src.dir.as_deref(), prov)?;
            Ok(ClassicalAlgebroid::chevalley_eilenberg(&g))
        }
        AlgebroidFile::DeRham { m } => Ok(ClassicalAlgebroid::de_rham(m)),
        AlgebroidFile::Poisson { bivector } => {
            let pi = bivector
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(|(j, t)| constant(&src, &format!("bivector[{i}][{j}]"), t))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            ClassicalAlgebroid::poisson_constant(&pi).map_err(|e| src.err(e.to_string()))
        }
        AlgebroidFile::General { m, d, anchor, brackets } => {
            let mut a = ClassicalAlgebroid::new(m, d).map_err(|e| src.err(e.to_string()))?;
            if anchor.len() != d {
                return Err(src.err(format!("anchor has {} rows, expected d = {d}", anchor.len())));
            }
            for (i, row) in anchor.iter().enumerate() {
                if row.len() != m {
                    return Err(src.err(format!("anchor[{i}] has {} entries, expected m = {m}", row.len())));
                }
                for (al, t) in row.iter().enumerate() {
                    a.anchor[i][al] = expr(&src, &format!("anchor[{i}][{al}]"), t, &a.ctx)?;
                }
            }
            // same declaration order as the algebroid context, plus the basis
            let mut ctx = a.ctx.clone();
            let basis: Vec<_> = (1..=d)
                .map(|k| ctx.declare(&format!("e{k}"), Parity::Even).map_err(|e| src.err(e.to_string())))
                .collect::<Result<_, _>>()?;
            for (n, line) in brackets.iter().enumerate() {
                let what = format!("brackets[{n}]");
                let (ea, eb, rhs) = split_pair(line, "[", ']')
                    .ok_or_else(|| src.err(format!("{what}: expected `[ei,ej] = combination`, got `{line}`")))?;
                let idx = |s: &str| {
                    s.strip_prefix('e')
                        .and_then(|k| k.parse::<usize>().ok())
                        .filter(|k| (1..=d).contains(k))
                        .map(|k| k - 1)
                        .ok_or_else(|| src.err(format!("{what}: unknown basis element `{s}`")))
                };
                let (i, j) = (idx(ea)?, idx(eb)?);
                let p = expr(&src, &what, rhs, &ctx)?;
                let mut coeffs = vec![DiffPolynomial::zero(); d];
                for (mono, c) in p.terms() {
                    let es: Vec<_> = mono.vars().filter(|v| basis.contains(&v.sym)).collect();
                    if es.len() != 1 || mono.exponent(&es[0]) != 1 {
                        return Err(src.err(format!("{what}: `{rhs}` is not linear in the basis")));
                    }
                    let k = basis.iter().position(|&s| s == es[0].sym).expect("basis symbol");
                    let rest = mono.without_even(&es[0]);
                    coeffs[k].add_term(rest, c.clone());
                }
                for (k, v) in coeffs.into_iter().enumerate() {
                    if !v.is_zero() {
                        a.set_c(k, i, j, v);
                    }
                }
            }
            Ok(a)
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalFile {
    parity: Option<String>,
    density: String,
}

/// A functional given inline as an expression or as a `.toml` file with
/// `density` and optional `parity`.
pub fn load_functional(reference: &str, ctx: &Context, prov: &mut Provenance) -> Result<DiffPolynomial, CliError> {
    if !reference.ends_with(".toml") {
        return parse(reference, ctx).map_err(|e| CliError::Model { file: "<inline>".into(), msg: e.to_string() });
    }
    let src = Source::load(reference, None)?;
    prov.note(&src);
    let f: FunctionalFile = src.parse()?;
    let p = expr(&src, "density", &f.density, ctx)?;
    if let Some(want) = &f.parity {
        let want = match want.as_str() {
            "even" => Parity::Even,
            "odd" => Parity::Odd,
            other => return Err(src.err(format!("parity must be `even` or `odd`, got `{other}`"))),
        };
        if !p.is_zero() && p.parity() != Some(want) {
            return Err(src.err(format!("density is not {want}")));
        }
    }
    Ok(p)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CochainFile {
    k: usize,
    #[serde(default)]
    value: Vec<CochainEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CochainEntry {
    at: Vec<usize>,
    f: String,
}

/// Values `(tuple, text)` of a cochain file; tuples are 1-based in the file.
pub fn load_cochain(
    reference: &str,
    a: &ClassicalAlgebroid,
    prov: &mut Provenance,
) -> Result<algebroid_core::algebroid::Cochain, CliError> {
    let src = Source::load(reference, None)?;
    prov.note(&src);
    let f: CochainFile = src.parse()?;
    let mut entries = Vec::new();
    for (n, e) in f.value.iter().enumerate() {
        if e.at.contains(&0) {
            return Err(src.err(format!("value[{n}]: indices start at 1")));
        }
        let at = e.at.iter().map(|i| i - 1).collect();
        entries.push((at, expr(&src, &format!("value[{n}]"), &e.f, &a.ctx)?));
    }
    algebroid_core::algebroid::Cochain::from_values(f.k, a.d(), &entries).map_err(|e| src.err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_match_builtins() {
        let mut p = Provenance::default();
        let so3 = load_algebra("so3", None, &mut p).unwrap();
        assert_eq!(so3.nonzero().collect::<Vec<_>>(), LieAlgebra::so3().nonzero().collect::<Vec<_>>());
        assert_eq!(so3.metric(), LieAlgebra::so3().metric());
        let sl2 = load_algebra("sl2", None, &mut p).unwrap();
        assert_eq!(sl2.nonzero().collect::<Vec<_>>(), LieAlgebra::sl2().nonzero().collect::<Vec<_>>());
        assert_eq!(sl2.metric(), LieAlgebra::sl2().metric());
        assert_eq!(p.inputs.len(), 2);
    }

    #[test]
    fn every_fixture_parses_as_toml() {
        for (name, text) in FIXTURES {
            assert!(text.parse::<toml::Table>().is_ok(), "{name}");
        }
    }

    #[test]
    fn bad_bracket_reports_location() {
        let src = Source {
            label: "t".into(),
            text: "dim = 2\nbrackets = [\"[e1,e2] = e1*e2\"]".into(),
            sha256: String::new(),
            dir: None,
        };
        let f: AlgebraFile = src.parse().unwrap();
        assert_eq!(f.brackets.len(), 1);
        let dir = std::env::temp_dir().join("algebroid-model-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.toml");
        fs::write(&path, &src.text).unwrap();
        let err = load_algebra(path.to_str().unwrap(), None, &mut Provenance::default()).unwrap_err();
        assert!(err.to_string().contains("brackets[0]"), "{err}");
    }
}
