//! Command implementations. Each returns its exit code and report text.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use retrolift_core::congruence::{con_lattice, CongruenceError};
use retrolift_core::corpus::{generate_corpus, CorpusConfig};
use retrolift_core::diagram::{
    promote_to_retracted, BooleanProvider, IdentityProvider, ProductProvider, RetractedDiagram, RetractionProvider,
};
use retrolift_core::ledger::VerificationLedger;
use retrolift_core::lift::{
    conc_tower_fixture, replay, replay_identity, ConcFunctor, ConcTower, LiftError, LiftedUnfolding, ReplayOptions,
};
use retrolift_core::semilattice::FiniteJoinSemilattice;
use retrolift_core::unfold::{unfold, UnfoldBudget, UnfoldingBundle, DEFAULT_ELEMENT_BUDGET, DEFAULT_MAX_DEPTH};
use serde::Serialize;
use serde_json::json;

use crate::workspace::{
    self, add_lift_package, add_retracted_diagram, lattice_spec, monoid_spec, semilattice_spec, BundleSpec, HomRef,
    HomSpec, RetractionSpec, Workspace, WorkspaceDiagram, WorkspaceFile,
};
use crate::{read, write, Cli, CliError, Command, Format, FunctorChoice, RetractionChoice, TowerChoice, EXIT_CLEAN, EXIT_FAILURES};

type Report = Result<(i32, String), CliError>;

pub fn dispatch(cli: &Cli) -> Report {
    let budget = UnfoldBudget {
        max_elements: cli.budget.unwrap_or(DEFAULT_ELEMENT_BUDGET),
        max_depth: DEFAULT_MAX_DEPTH,
    };
    match &cli.command {
        Command::Check { path } => check(path, cli.format),
        Command::Conc { path, lattice } => conc(path, lattice, cli.format),
        Command::Unfold {
            path,
            diagram,
            depth,
            retraction,
            out,
        } => cmd_unfold(path, diagram, *depth, *retraction, out.as_deref(), budget, cli.format),
        Command::Replay {
            path,
            diagram,
            depth,
            functor,
            lift,
            retraction,
        } => cmd_replay(path, diagram.as_deref(), *depth, *functor, lift.as_deref(), *retraction, budget, cli.format),
        Command::GenCorpus { seed, max_size, out } => gen_corpus(*seed, *max_size, out.as_deref(), cli.format),
        Command::GenFixture {
            tower,
            nodes,
            depth,
            out,
        } => gen_fixture(*tower, *nodes, *depth, out.as_deref(), cli.format),
    }
}

fn load(path: &Path) -> Result<(Workspace, Vec<workspace::ValidationIssue>), CliError> {
    let text = read(path)?;
    let file = workspace::parse(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok(file.build())
}

/// The named object, or the reason it is unavailable.
fn missing(kind: &str, name: &str, issues: &[workspace::ValidationIssue]) -> CliError {
    match issues.iter().find(|i| i.name == name) {
        Some(issue) => CliError::Input(format!("{issue}")),
        None => CliError::Input(format!("no {kind} named \"{name}\"")),
    }
}

fn structured<T: Serialize>(value: &T) -> String {
    workspace::to_json(value)
}

fn check(path: &Path, format: Format) -> Report {
    let (ws, issues) = load(path)?;
    let counts = ws.counts();
    let valid: usize = counts.values().sum();
    let code = if issues.is_empty() { EXIT_CLEAN } else { EXIT_FAILURES };
    let out = match format {
        Format::Structured => structured(&json!({
            "counts": counts,
            "issues": issues,
            "clean": issues.is_empty(),
        })),
        Format::Text => {
            let mut s = String::new();
            for (kind, n) in &counts {
                writeln!(s, "{kind}: {n}").unwrap();
            }
            for issue in &issues {
                writeln!(s, "INVALID {issue}").unwrap();
            }
            writeln!(s, "{valid} valid, {} invalid", issues.len()).unwrap();
            s
        }
    };
    Ok((code, out))
}

fn conc(path: &Path, name: &str, format: Format) -> Report {
    let (ws, issues) = load(path)?;
    let lattice = ws.lattices.get(name).ok_or_else(|| missing("lattice", name, &issues))?;
    let c = con_lattice(lattice).map_err(|e| match e {
        CongruenceError::TooLarge { .. } => CliError::Input(format!("lattice \"{name}\": {e}")),
        other => CliError::Verification(other.to_string()),
    })?;
    let s = c.semilattice();
    let blocks: Vec<Vec<Vec<usize>>> = c.congruences().iter().map(|t| t.blocks()).collect();
    let out = match format {
        Format::Structured => structured(&json!({
            "lattice": name,
            "size": s.size(),
            "semilattice": semilattice_spec(s),
            "congruences": blocks,
        })),
        Format::Text => {
            let mut out = format!("Conc \"{name}\": {} elements, zero {}\n", s.size(), s.zero());
            for (i, b) in blocks.iter().enumerate() {
                let parts: Vec<String> = b
                    .iter()
                    .map(|block| format!("{{{}}}", block.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
                    .collect();
                writeln!(out, "{i}: {}", parts.join(" ")).unwrap();
            }
            out.push_str("join:\n");
            for row in s.rows() {
                writeln!(out, "  {}", row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")).unwrap();
            }
            out
        }
    };
    Ok((EXIT_CLEAN, out))
}

fn retracted(name: &str, d: &WorkspaceDiagram, choice: Option<RetractionChoice>) -> Result<(RetractedDiagram, RetractionChoice), CliError> {
    let choice = choice.unwrap_or(if d.retracted.is_some() {
        RetractionChoice::Given
    } else {
        RetractionChoice::Boolean
    });
    let provider: Box<dyn RetractionProvider> = match choice {
        RetractionChoice::Given => {
            return d
                .retracted
                .clone()
                .map(|rd| (rd, choice))
                .ok_or_else(|| CliError::Input(format!("diagram \"{name}\" stores no retraction")))
        }
        RetractionChoice::Boolean => Box::new(BooleanProvider::default()),
        RetractionChoice::Identity => Box::new(IdentityProvider),
        RetractionChoice::Product => Box::new(ProductProvider {
            factor: Arc::new(FiniteJoinSemilattice::chain(2)),
        }),
    };
    promote_to_retracted(&d.diagram, provider.as_ref())
        .map(|rd| (rd, choice))
        .map_err(|e| CliError::Input(format!("diagram \"{name}\" refused by the {} provider: {e}", provider.name())))
}

fn choice_name(c: RetractionChoice) -> &'static str {
    match c {
        RetractionChoice::Boolean => "boolean",
        RetractionChoice::Identity => "identity",
        RetractionChoice::Product => "product",
        RetractionChoice::Given => "given",
    }
}

fn sizes(b: &UnfoldingBundle) -> Vec<Vec<usize>> {
    (0..b.nodes())
        .map(|x| (1..=b.depth()).map(|n| b.power(x, n).size()).collect())
        .collect()
}

fn ledger_report(header: &str, details: serde_json::Value, ledger: &VerificationLedger, verdict: Option<&str>, format: Format) -> String {
    match format {
        Format::Structured => {
            let counts = ledger.counts();
            structured(&json!({
                "header": header,
                "details": details,
                "counts": counts,
                "clean": ledger.is_clean(),
                "verdict": verdict,
                "rows": ledger.rows,
            }))
        }
        Format::Text => {
            let mut s = format!("{header}\n{ledger}");
            if !s.ends_with('\n') {
                s.push('\n');
            }
            if let Some(v) = verdict {
                writeln!(s, "{v}").unwrap();
            }
            s
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_unfold(
    path: &Path,
    name: &str,
    depth: usize,
    choice: Option<RetractionChoice>,
    out: Option<&Path>,
    budget: UnfoldBudget,
    format: Format,
) -> Report {
    let (ws, issues) = load(path)?;
    let d = ws.diagrams.get(name).ok_or_else(|| missing("diagram", name, &issues))?;
    let (rd, choice) = retracted(name, d, choice)?;
    let bundle = unfold(&rd, depth, budget).map_err(|e| CliError::Input(e.to_string()))?;
    let ledger = bundle.verify();
    if let Some(out) = out {
        let mut file = WorkspaceFile::default();
        add_retracted_diagram(&mut file, name, &rd);
        file.bundle = Some(BundleSpec {
            diagram: name.to_string(),
            depth,
            sizes: sizes(&bundle),
        });
        write(out, &workspace::to_json(&file))?;
    }
    let header = format!("unfold \"{name}\" depth {depth} retraction {}", choice_name(choice));
    let details = json!({
        "diagram": name,
        "depth": depth,
        "retraction": choice_name(choice),
        "sizes": sizes(&bundle),
    });
    let code = if ledger.is_clean() { EXIT_CLEAN } else { EXIT_FAILURES };
    Ok((code, ledger_report(&header, details, &ledger, None, format)))
}

fn lift_error(e: LiftError) -> CliError {
    match e {
        LiftError::LiftPackageInvalid(_) | LiftError::Unfold(_) => CliError::Input(e.to_string()),
        other => CliError::Verification(other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_replay(
    path: &Path,
    diagram: Option<&str>,
    depth: Option<usize>,
    functor: FunctorChoice,
    lift: Option<&str>,
    choice: Option<RetractionChoice>,
    budget: UnfoldBudget,
    format: Format,
) -> Report {
    let (ws, issues) = load(path)?;
    let package = match (functor, lift) {
        (FunctorChoice::Conc, None) => return Err(CliError::Input("the conc functor needs --lift".into())),
        (_, Some(name)) => Some(ws.lift_packages.get(name).ok_or_else(|| missing("lift package", name, &issues))?),
        (FunctorChoice::Id, None) => None,
    };
    let name = diagram
        .map(str::to_string)
        .or_else(|| package.map(|p| p.diagram.clone()))
        .or_else(|| ws.bundle.as_ref().map(|b| b.diagram.clone()))
        .ok_or_else(|| CliError::Input("no diagram given and the workspace has no bundle".into()))?;
    if let Some(p) = package {
        if p.diagram != name {
            return Err(CliError::Input(format!(
                "lift package lifts \"{}\", not \"{name}\"",
                p.diagram
            )));
        }
    }
    let d = ws.diagrams.get(&name).ok_or_else(|| missing("diagram", &name, &issues))?;
    let (rd, choice) = retracted(&name, d, choice)?;
    let depth = match (depth, package) {
        (Some(n), Some(p)) if n != p.depth => {
            return Err(CliError::Input(format!("the lift package has depth {}, not {n}", p.depth)))
        }
        (_, Some(p)) => p.depth,
        (Some(n), None) => n,
        (None, None) => ws.bundle.as_ref().filter(|b| b.diagram == name).map_or(2, |b| b.depth),
    };
    let bundle = unfold(&rd, depth, budget).map_err(|e| CliError::Input(e.to_string()))?;
    let options = ReplayOptions::default();
    let (ledger, verdict, mode, stable_from, used_depth) = match (functor, package) {
        (FunctorChoice::Id, _) => {
            let r = replay_identity(&bundle, budget, options).map_err(lift_error)?;
            (r.ledger.clone(), r.summary(), r.mode, r.stable_from.clone(), r.depth)
        }
        (FunctorChoice::Conc, Some(p)) => {
            let f = ConcFunctor::new();
            let lifted = LiftedUnfolding::new(&f, bundle, p.lift.clone(), p.eta.clone()).map_err(lift_error)?;
            let r = replay(&f, &lifted, options).map_err(lift_error)?;
            (r.ledger.clone(), r.summary(), r.mode, r.stable_from.clone(), r.depth)
        }
        (FunctorChoice::Conc, None) => unreachable!("checked above"),
    };
    let tag = match functor {
        FunctorChoice::Id => "id",
        FunctorChoice::Conc => "conc",
    };
    let header = format!("replay \"{name}\" functor {tag} depth {used_depth} retraction {}", choice_name(choice));
    let details = json!({
        "diagram": name,
        "functor": tag,
        "depth": used_depth,
        "retraction": choice_name(choice),
        "mode": format!("{mode:?}"),
        "stable_from": stable_from,
    });
    let code = if ledger.is_clean() { EXIT_CLEAN } else { EXIT_FAILURES };
    Ok((code, ledger_report(&header, details, &ledger, Some(&verdict), format)))
}

/// The corpus as a workspace file.
pub fn corpus_workspace(seed: u64, max_size: usize) -> WorkspaceFile {
    let corpus = generate_corpus(CorpusConfig::new(seed, max_size));
    let mut file = WorkspaceFile::default();
    for (i, s) in corpus.semilattices.iter().enumerate() {
        file.semilattices.insert(format!("s{i:03}"), semilattice_spec(s));
    }
    for (i, s) in corpus.distributive.iter().enumerate() {
        file.semilattices.insert(format!("d{i:03}"), semilattice_spec(s));
    }
    for (i, f) in corpus.embeddings.iter().enumerate() {
        let target = corpus
            .distributive
            .iter()
            .position(|d| Arc::ptr_eq(d, f.target()))
            .expect("embeddings land in the distributive corpus");
        let source = format!("e{i:03}.src");
        file.semilattices.insert(source.clone(), semilattice_spec(f.source()));
        file.homs.insert(
            format!("e{i:03}"),
            HomSpec {
                source,
                target: format!("d{target:03}"),
                map: f.map().to_vec(),
            },
        );
    }
    for (i, r) in corpus.retractions.iter().enumerate() {
        let (base, cover) = (format!("r{i:03}.base"), format!("r{i:03}.cover"));
        file.semilattices.insert(base.clone(), semilattice_spec(&r.base));
        file.semilattices.insert(cover.clone(), semilattice_spec(&r.cover));
        file.retractions.insert(
            format!("r{i:03}"),
            RetractionSpec {
                base,
                cover,
                eps: HomRef::Map(r.eps.map().to_vec()),
                mu: HomRef::Map(r.mu.map().to_vec()),
            },
        );
    }
    for (i, rd) in corpus.diagrams.iter().enumerate() {
        add_retracted_diagram(&mut file, &format!("g{i:03}"), rd);
    }
    for (i, l) in corpus.lattices.iter().enumerate() {
        file.lattices.insert(format!("l{i:03}"), lattice_spec(l));
    }
    for (i, m) in corpus.monoids.iter().enumerate() {
        file.monoids.insert(format!("m{i:03}"), monoid_spec(m));
    }
    file
}

fn written(out: &Path, file: &WorkspaceFile, format: Format) -> Result<String, CliError> {
    write(out, &workspace::to_json(file))?;
    let (ws, _) = file.build();
    let counts = ws.counts();
    Ok(match format {
        Format::Structured => structured(&json!({ "path": out.display().to_string(), "counts": counts })),
        Format::Text => {
            let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
            format!("wrote {}: {}\n", out.display(), parts.join(", "))
        }
    })
}

fn gen_corpus(seed: u64, max_size: usize, out: Option<&Path>, format: Format) -> Report {
    if max_size == 0 {
        return Err(CliError::Input("--max-size must be at least 1".into()));
    }
    let file = corpus_workspace(seed, max_size);
    match out {
        Some(out) => Ok((EXIT_CLEAN, written(out, &file, format)?)),
        None => Ok((EXIT_CLEAN, workspace::to_json(&file))),
    }
}

fn gen_fixture(tower: TowerChoice, nodes: usize, depth: usize, out: Option<&Path>, format: Format) -> Report {
    let kind = match tower {
        TowerChoice::Stable => ConcTower::Stable,
        TowerChoice::Collapsing => ConcTower::Collapsing,
    };
    let (rd, package) = conc_tower_fixture(&ConcFunctor::new(), kind, nodes, depth).map_err(lift_error)?;
    let mut file = WorkspaceFile::default();
    add_retracted_diagram(&mut file, "tower", &rd);
    add_lift_package(&mut file, "tower.lift", "tower", depth, &package.lift, &package.eta);
    match out {
        Some(out) => Ok((EXIT_CLEAN, written(out, &file, format)?)),
        None => Ok((EXIT_CLEAN, workspace::to_json(&file))),
    }
}
