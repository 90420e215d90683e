//! The JSON workspace format: named semilattices, lattices, monoids, homs,
//! retractions, diagrams and lift packages, with references by name.
//!
//! Loading has two phases. [`parse`] checks syntax, name uniqueness and
//! that every reference resolves, failing with a line and column.
//! [`WorkspaceFile::build`] then validates each object's axioms and
//! collects one issue per invalid object.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::marker::PhantomData;
use std::sync::Arc;

use retrolift_core::diagram::{IndexPoset, LatticeDiagram, Morphism, PosetDiagram, RetractedDiagram, SemilatticeDiagram};
use retrolift_core::lattice::{FiniteLattice, LatticeHom};
use retrolift_core::monoid::FiniteCommutativeMonoid;
use retrolift_core::retraction::Retraction;
use retrolift_core::semilattice::{FiniteJoinSemilattice, SemilatticeHom};
use retrolift_core::catalog;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A map that rejects repeated keys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Named<V>(pub BTreeMap<String, V>);

impl<V> Default for Named<V> {
    fn default() -> Self {
        Named(BTreeMap::new())
    }
}

impl<V> Named<V> {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: V) {
        self.0.insert(name.into(), value);
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Named<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct UniqueKeys<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for UniqueKeys<V> {
            type Value = Named<V>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object of named entries")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, V>()? {
                    if out.contains_key(&key) {
                        return Err(serde::de::Error::custom(format!("duplicate name \"{key}\"")));
                    }
                    out.insert(key, value);
                }
                Ok(Named(out))
            }
        }

        deserializer.deserialize_map(UniqueKeys(PhantomData))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SemilatticeSpec {
    Table {
        join: Vec<Vec<usize>>,
        zero: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unit: Option<usize>,
    },
    Chain {
        chain: usize,
    },
    Powerset {
        powerset: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Table { join: Vec<Vec<usize>>, meet: Vec<Vec<usize>> },
    Chain { chain: usize },
    Boolean { boolean: usize },
    /// `"m3"` or `"n5"`.
    Named { named: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidSpec {
    pub table: Vec<Vec<usize>>,
    pub zero: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSpec {
    pub source: String,
    pub target: String,
    pub map: Vec<usize>,
}

/// A hom given by name or as an inline table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HomRef {
    Name(String),
    Map(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub from: usize,
    pub to: usize,
    pub hom: HomRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetractionSpec {
    pub base: String,
    pub cover: String,
    pub eps: HomRef,
    pub mu: HomRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpec {
    pub nodes: usize,
    #[serde(default)]
    pub covers: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramRetractionSpec {
    pub hat_objects: Vec<String>,
    #[serde(default)]
    pub hat_arrows: Vec<ArrowSpec>,
    pub eps: Vec<HomRef>,
    pub mu: Vec<HomRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSpec {
    pub poset: PosetSpec,
    pub objects: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retraction: Option<DiagramRetractionSpec>,
}

/// A lifting along `Conc`: lattices at `(x, k)` in node order `x·depth + k`,
/// lattice homs on the covers of `I × {0..depth−1}`, and `η` tables indexed
/// `[x][k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftPackageSpec {
    pub diagram: String,
    pub depth: usize,
    pub objects: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
    pub eta: Vec<Vec<Vec<usize>>>,
}

/// Marks a workspace written by `unfold --out`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub diagram: String,
    pub depth: usize,
    /// `|D̂ⁿ(X)|` per node and level, for reference.
    #[serde(default)]
    pub sizes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub semilattices: Named<SemilatticeSpec>,
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub lattices: Named<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub monoids: Named<MonoidSpec>,
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub homs: Named<HomSpec>,
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub lattice_homs: Named<HomSpec>,
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub retractions: Named<RetractionSpec>,
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub diagrams: Named<DiagramSpec>,
    #[serde(default, skip_serializing_if = "Named::is_empty")]
    pub lift_packages: Named<LiftPackageSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleSpec>,
}

/// 1-based line and column of byte offset `at`.
fn position(text: &str, at: usize) -> (usize, usize) {
    let before = &text[..at.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |nl| before[nl + 1..].chars().count()) + 1;
    (line, column)
}

/// Where `"name"` first occurs as a key (`as_key`) or as a value.
fn locate(text: &str, name: &str, as_key: bool) -> (usize, usize) {
    let needle = format!("\"{name}\"");
    let mut from = 0;
    while let Some(offset) = text[from..].find(&needle) {
        let at = from + offset;
        let rest = text[at + needle.len()..].trim_start();
        if rest.starts_with(':') == as_key {
            return position(text, at);
        }
        from = at + needle.len();
    }
    (1, 1)
}

/// Parses and resolves every name; dangling references and names reused
/// across sections are parse errors.
pub fn parse(text: &str) -> Result<WorkspaceFile, ParseError> {
    let file: WorkspaceFile = serde_json::from_str(text).map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })?;
    let sections: [(&str, Vec<&String>); 8] = [
        ("semilattices", file.semilattices.0.keys().collect()),
        ("lattices", file.lattices.0.keys().collect()),
        ("monoids", file.monoids.0.keys().collect()),
        ("homs", file.homs.0.keys().collect()),
        ("lattice_homs", file.lattice_homs.0.keys().collect()),
        ("retractions", file.retractions.0.keys().collect()),
        ("diagrams", file.diagrams.0.keys().collect()),
        ("lift_packages", file.lift_packages.0.keys().collect()),
    ];
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    for (section, names) in &sections {
        for name in names {
            if let Some(first) = seen.insert(name.as_str(), section) {
                let (line, column) = locate(text, name, true);
                return Err(ParseError {
                    line,
                    column,
                    message: format!("name \"{name}\" is used in both {first} and {section}"),
                });
            }
        }
    }
    let check = |known: &dyn Fn(&str) -> bool, name: &str, what: &str| -> Result<(), ParseError> {
        if known(name) {
            return Ok(());
        }
        let (line, column) = locate(text, name, false);
        Err(ParseError {
            line,
            column,
            message: format!("unknown {what} \"{name}\""),
        })
    };
    let semilattice = |n: &str| file.semilattices.0.contains_key(n);
    let lattice = |n: &str| file.lattices.0.contains_key(n);
    let hom = |n: &str| file.homs.0.contains_key(n);
    let lattice_hom = |n: &str| file.lattice_homs.0.contains_key(n);
    let hom_ref = |r: &HomRef, known: &dyn Fn(&str) -> bool, what: &str| match r {
        HomRef::Name(n) => check(known, n, what),
        HomRef::Map(_) => Ok(()),
    };
    for h in file.homs.0.values() {
        check(&semilattice, &h.source, "semilattice")?;
        check(&semilattice, &h.target, "semilattice")?;
    }
    for h in file.lattice_homs.0.values() {
        check(&lattice, &h.source, "lattice")?;
        check(&lattice, &h.target, "lattice")?;
    }
    for r in file.retractions.0.values() {
        check(&semilattice, &r.base, "semilattice")?;
        check(&semilattice, &r.cover, "semilattice")?;
        hom_ref(&r.eps, &hom, "hom")?;
        hom_ref(&r.mu, &hom, "hom")?;
    }
    for d in file.diagrams.0.values() {
        for o in &d.objects {
            check(&semilattice, o, "semilattice")?;
        }
        for a in &d.arrows {
            hom_ref(&a.hom, &hom, "hom")?;
        }
        if let Some(r) = &d.retraction {
            for o in &r.hat_objects {
                check(&semilattice, o, "semilattice")?;
            }
            for a in &r.hat_arrows {
                hom_ref(&a.hom, &hom, "hom")?;
            }
            for h in r.eps.iter().chain(&r.mu) {
                hom_ref(h, &hom, "hom")?;
            }
        }
    }
    let diagram = |n: &str| file.diagrams.0.contains_key(n);
    for p in file.lift_packages.0.values() {
        check(&diagram, &p.diagram, "diagram")?;
        for o in &p.objects {
            check(&lattice, o, "lattice")?;
        }
        for a in &p.arrows {
            hom_ref(&a.hom, &lattice_hom, "lattice hom")?;
        }
    }
    if let Some(b) = &file.bundle {
        check(&diagram, &b.diagram, "diagram")?;
    }
    Ok(file)
}

/// One object that failed validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub kind: &'static str,
    pub name: String,
    pub detail: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} \"{}\": {}", self.kind, self.name, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct WorkspaceDiagram {
    pub diagram: SemilatticeDiagram,
    /// Present when the file supplies `D̂`, `ε` and `μ` explicitly.
    pub retracted: Option<RetractedDiagram>,
}

#[derive(Clone, Debug)]
pub struct LiftPackage {
    pub diagram: String,
    pub depth: usize,
    pub lift: LatticeDiagram,
    pub eta: Vec<Vec<Vec<usize>>>,
}

/// Validated objects; anything that failed is absent.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub semilattices: BTreeMap<String, Arc<FiniteJoinSemilattice>>,
    pub lattices: BTreeMap<String, Arc<FiniteLattice>>,
    pub monoids: BTreeMap<String, Arc<FiniteCommutativeMonoid>>,
    pub homs: BTreeMap<String, SemilatticeHom>,
    pub lattice_homs: BTreeMap<String, LatticeHom>,
    pub retractions: BTreeMap<String, Retraction>,
    pub diagrams: BTreeMap<String, WorkspaceDiagram>,
    pub lift_packages: BTreeMap<String, LiftPackage>,
    pub bundle: Option<BundleSpec>,
}

impl Workspace {
    pub fn counts(&self) -> BTreeMap<&'static str, usize> {
        BTreeMap::from([
            ("semilattices", self.semilattices.len()),
            ("lattices", self.lattices.len()),
            ("monoids", self.monoids.len()),
            ("homs", self.homs.len()),
            ("lattice_homs", self.lattice_homs.len()),
            ("retractions", self.retractions.len()),
            ("diagrams", self.diagrams.len()),
            ("lift_packages", self.lift_packages.len()),
        ])
    }
}

fn build_semilattice(spec: &SemilatticeSpec) -> Result<FiniteJoinSemilattice, String> {
    match spec {
        SemilatticeSpec::Table { join, zero, unit } => {
            FiniteJoinSemilattice::new(join.clone(), *zero, *unit).map_err(|e| e.to_string())
        }
        SemilatticeSpec::Chain { chain } if *chain >= 1 => Ok(FiniteJoinSemilattice::chain(*chain)),
        SemilatticeSpec::Powerset { powerset } if *powerset <= 6 => Ok(FiniteJoinSemilattice::powerset(*powerset)),
        SemilatticeSpec::Chain { .. } => Err("a chain needs at least one element".into()),
        SemilatticeSpec::Powerset { .. } => Err("powersets are limited to 6 generators".into()),
    }
}

fn build_lattice(spec: &LatticeSpec) -> Result<FiniteLattice, String> {
    match spec {
        LatticeSpec::Table { join, meet } => FiniteLattice::new(join.clone(), meet.clone()).map_err(|e| e.to_string()),
        LatticeSpec::Chain { chain } if *chain >= 1 => Ok(FiniteLattice::chain(*chain)),
        LatticeSpec::Chain { .. } => Err("a chain needs at least one element".into()),
        LatticeSpec::Boolean { boolean } if *boolean <= 6 => Ok(catalog::boolean(*boolean)),
        LatticeSpec::Boolean { .. } => Err("Boolean lattices are limited to 6 atoms".into()),
        LatticeSpec::Named { named } => match named.as_str() {
            "m3" => Ok(catalog::m3()),
            "n5" => Ok(catalog::n5()),
            other => Err(format!("unknown named lattice \"{other}\"")),
        },
    }
}

/// Resolves a hom reference with known endpoints.
fn resolve<M: Morphism>(
    r: &HomRef,
    named: &BTreeMap<String, M>,
    source: &Arc<M::Object>,
    target: &Arc<M::Object>,
) -> Result<M, String> {
    match r {
        HomRef::Name(n) => {
            let h = named.get(n).ok_or_else(|| format!("\"{n}\" is invalid"))?;
            if !M::same_object(h.source(), source) || !M::same_object(h.target(), target) {
                return Err(format!("\"{n}\" has the wrong endpoints"));
            }
            Ok(h.clone())
        }
        HomRef::Map(map) => M::from_table(source.clone(), target.clone(), map.clone()),
    }
}

fn poset(spec: &PosetSpec) -> Result<IndexPoset, String> {
    IndexPoset::new(spec.nodes, spec.covers.iter().map(|&[a, b]| (a, b)).collect()).map_err(|e| e.to_string())
}

fn objects<O>(names: &[String], known: &BTreeMap<String, Arc<O>>) -> Result<Vec<Arc<O>>, String> {
    names
        .iter()
        .map(|n| known.get(n).cloned().ok_or_else(|| format!("object \"{n}\" is invalid")))
        .collect()
}

fn arrows<M: Morphism>(
    specs: &[ArrowSpec],
    objects: &[Arc<M::Object>],
    named: &BTreeMap<String, M>,
) -> Result<BTreeMap<(usize, usize), M>, String> {
    let mut out = BTreeMap::new();
    for a in specs {
        if a.from >= objects.len() || a.to >= objects.len() {
            return Err(format!("arrow {}→{} leaves the index", a.from, a.to));
        }
        let h = resolve(&a.hom, named, &objects[a.from], &objects[a.to]).map_err(|e| format!("arrow {}→{}: {e}", a.from, a.to))?;
        if out.insert((a.from, a.to), h).is_some() {
            return Err(format!("arrow {}→{} is given twice", a.from, a.to));
        }
    }
    Ok(out)
}

fn build_diagram(spec: &DiagramSpec, ws: &Workspace) -> Result<WorkspaceDiagram, String> {
    let index = Arc::new(poset(&spec.poset)?);
    let objs = objects(&spec.objects, &ws.semilattices)?;
    let edges = arrows(&spec.arrows, &objs, &ws.homs)?;
    let diagram = PosetDiagram::new(index.clone(), objs.clone(), edges).map_err(|e| e.to_string())?;
    let report = diagram.validate();
    if !report.is_valid() {
        return Err(report.to_string());
    }
    let retracted = match &spec.retraction {
        None => None,
        Some(r) => {
            let hats = objects(&r.hat_objects, &ws.semilattices)?;
            let hat_edges = arrows(&r.hat_arrows, &hats, &ws.homs).map_err(|e| format!("hat {e}"))?;
            let hat = PosetDiagram::new(index, hats.clone(), hat_edges).map_err(|e| format!("hat diagram: {e}"))?;
            if r.eps.len() != objs.len() || r.mu.len() != objs.len() {
                return Err(format!("ε and μ need one entry per node ({})", objs.len()));
            }
            let eps = (0..objs.len())
                .map(|x| resolve(&r.eps[x], &ws.homs, &objs[x], &hats[x]).map_err(|e| format!("ε at {x}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            let mu = (0..objs.len())
                .map(|x| resolve(&r.mu[x], &ws.homs, &hats[x], &objs[x]).map_err(|e| format!("μ at {x}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            Some(RetractedDiagram::new(diagram.clone(), hat, eps, mu).map_err(|e| e.to_string())?)
        }
    };
    Ok(WorkspaceDiagram { diagram, retracted })
}

fn build_lift(spec: &LiftPackageSpec, ws: &Workspace) -> Result<LiftPackage, String> {
    let d = ws
        .diagrams
        .get(&spec.diagram)
        .ok_or_else(|| format!("diagram \"{}\" is invalid", spec.diagram))?;
    if spec.depth == 0 {
        return Err("depth must be at least 1".into());
    }
    let index = Arc::new(d.diagram.index().times_chain(spec.depth));
    let objs = objects(&spec.objects, &ws.lattices)?;
    let edges = arrows(&spec.arrows, &objs, &ws.lattice_homs)?;
    let lift = PosetDiagram::new(index, objs, edges).map_err(|e| e.to_string())?;
    let report = lift.validate();
    if !report.is_valid() {
        return Err(report.to_string());
    }
    Ok(LiftPackage {
        diagram: spec.diagram.clone(),
        depth: spec.depth,
        lift,
        eta: spec.eta.clone(),
    })
}

impl WorkspaceFile {
    /// Builds every object in dependency order; invalid objects are left out
    /// and reported, and so is anything depending on them.
    pub fn build(&self) -> (Workspace, Vec<ValidationIssue>) {
        let mut ws = Workspace {
            bundle: self.bundle.clone(),
            ..Workspace::default()
        };
        let mut issues = Vec::new();
        let mut report = |kind: &'static str, name: &str, detail: String| {
            issues.push(ValidationIssue {
                kind,
                name: name.to_string(),
                detail,
            })
        };
        for (name, spec) in &self.semilattices.0 {
            match build_semilattice(spec) {
                Ok(s) => {
                    ws.semilattices.insert(name.clone(), Arc::new(s));
                }
                Err(e) => report("semilattice", name, e),
            }
        }
        for (name, spec) in &self.lattices.0 {
            match build_lattice(spec) {
                Ok(l) => {
                    ws.lattices.insert(name.clone(), Arc::new(l));
                }
                Err(e) => report("lattice", name, e),
            }
        }
        for (name, spec) in &self.monoids.0 {
            match FiniteCommutativeMonoid::new(spec.table.clone(), spec.zero) {
                Ok(m) => {
                    ws.monoids.insert(name.clone(), Arc::new(m));
                }
                Err(e) => report("monoid", name, e.to_string()),
            }
        }
        for (name, spec) in &self.homs.0 {
            let built = match (ws.semilattices.get(&spec.source), ws.semilattices.get(&spec.target)) {
                (Some(s), Some(t)) => SemilatticeHom::new(s.clone(), t.clone(), spec.map.clone()).map_err(|e| e.to_string()),
                _ => Err("an endpoint is invalid".into()),
            };
            match built {
                Ok(h) => {
                    ws.homs.insert(name.clone(), h);
                }
                Err(e) => report("hom", name, e),
            }
        }
        for (name, spec) in &self.lattice_homs.0 {
            let built = match (ws.lattices.get(&spec.source), ws.lattices.get(&spec.target)) {
                (Some(s), Some(t)) => LatticeHom::new(s.clone(), t.clone(), spec.map.clone()).map_err(|e| e.to_string()),
                _ => Err("an endpoint is invalid".into()),
            };
            match built {
                Ok(h) => {
                    ws.lattice_homs.insert(name.clone(), h);
                }
                Err(e) => report("lattice hom", name, e),
            }
        }
        for (name, spec) in &self.retractions.0 {
            let built = match (ws.semilattices.get(&spec.base), ws.semilattices.get(&spec.cover)) {
                (Some(b), Some(c)) => resolve(&spec.eps, &ws.homs, b, c)
                    .and_then(|eps| Ok((eps, resolve(&spec.mu, &ws.homs, c, b)?)))
                    .and_then(|(eps, mu)| Retraction::new(eps, mu).map_err(|e| e.to_string())),
                _ => Err("an endpoint is invalid".into()),
            };
            match built {
                Ok(r) => {
                    ws.retractions.insert(name.clone(), r);
                }
                Err(e) => report("retraction", name, e),
            }
        }
        for (name, spec) in &self.diagrams.0 {
            match build_diagram(spec, &ws) {
                Ok(d) => {
                    ws.diagrams.insert(name.clone(), d);
                }
                Err(e) => report("diagram", name, e),
            }
        }
        for (name, spec) in &self.lift_packages.0 {
            match build_lift(spec, &ws) {
                Ok(p) => {
                    ws.lift_packages.insert(name.clone(), p);
                }
                Err(e) => report("lift package", name, e),
            }
        }
        (ws, issues)
    }
}

pub fn semilattice_spec(s: &FiniteJoinSemilattice) -> SemilatticeSpec {
    SemilatticeSpec::Table {
        join: s.rows(),
        zero: s.zero(),
        unit: s.unit(),
    }
}

pub fn lattice_spec(l: &FiniteLattice) -> LatticeSpec {
    LatticeSpec::Table {
        join: l.join_rows(),
        meet: l.meet_rows(),
    }
}

pub fn monoid_spec(m: &FiniteCommutativeMonoid) -> MonoidSpec {
    MonoidSpec {
        table: m.rows(),
        zero: m.zero(),
    }
}

fn inline_arrows<M: Morphism>(edges: &BTreeMap<(usize, usize), M>) -> Vec<ArrowSpec> {
    edges
        .iter()
        .map(|(&(from, to), h)| ArrowSpec {
            from,
            to,
            hom: HomRef::Map(h.table().to_vec()),
        })
        .collect()
}

/// Adds a retracted diagram under `name`, its objects as `name.xK` and
/// `name.hatK`, with inline arrows.
pub fn add_retracted_diagram(file: &mut WorkspaceFile, name: &str, rd: &RetractedDiagram) {
    let n = rd.nodes();
    let object_names: Vec<String> = (0..n).map(|x| format!("{name}.x{x}")).collect();
    let hat_names: Vec<String> = (0..n).map(|x| format!("{name}.hat{x}")).collect();
    for x in 0..n {
        file.semilattices.insert(object_names[x].clone(), semilattice_spec(rd.base().object(x)));
        file.semilattices.insert(hat_names[x].clone(), semilattice_spec(rd.hat().object(x)));
    }
    let index = rd.index();
    file.diagrams.insert(
        name,
        DiagramSpec {
            poset: PosetSpec {
                nodes: n,
                covers: index.covers().iter().map(|&(a, b)| [a, b]).collect(),
            },
            objects: object_names,
            arrows: inline_arrows(rd.base().edges()),
            retraction: Some(DiagramRetractionSpec {
                hat_objects: hat_names,
                hat_arrows: inline_arrows(rd.hat().edges()),
                eps: (0..n).map(|x| HomRef::Map(rd.eps(x).map().to_vec())).collect(),
                mu: (0..n).map(|x| HomRef::Map(rd.mu(x).map().to_vec())).collect(),
            }),
        },
    );
}

/// Adds a lift package with its lattices named `name.eK`.
pub fn add_lift_package(file: &mut WorkspaceFile, name: &str, diagram: &str, depth: usize, lift: &LatticeDiagram, eta: &[Vec<Vec<usize>>]) {
    let names: Vec<String> = (0..lift.objects().len()).map(|k| format!("{name}.e{k}")).collect();
    for (k, o) in lift.objects().iter().enumerate() {
        file.lattices.insert(names[k].clone(), lattice_spec(o));
    }
    file.lift_packages.insert(
        name,
        LiftPackageSpec {
            diagram: diagram.to_string(),
            depth,
            objects: names,
            arrows: inline_arrows(lift.edges()),
            eta: eta.to_vec(),
        },
    );
}

/// Pretty JSON with objects indented one key per line and arrays inline,
/// so tables stay readable.
struct TableFormatter {
    /// Whether each open object has written a key yet.
    open: Vec<bool>,
}

impl serde_json::ser::Formatter for TableFormatter {
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.open.push(false);
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        if self.open.pop() == Some(true) {
            w.write_all(b"\n")?;
            w.write_all("  ".repeat(self.open.len()).as_bytes())?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if let Some(has_key) = self.open.last_mut() {
            *has_key = true;
        }
        w.write_all(if first { b"\n" } else { b",\n" })?;
        w.write_all("  ".repeat(self.open.len()).as_bytes())
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }
}

/// Serializes with [`TableFormatter`].
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, TableFormatter { open: Vec::new() });
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}
