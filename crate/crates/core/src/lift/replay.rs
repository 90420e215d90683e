//! The replay verifier: from a lifting `E` of the unfolding with isos
//! `ηⁿ: F Eⁿ(X) ≅ D̂ⁿ(X)`, builds witnesses `⟨aⁿ, ζⁿ⟩`, the tower
//! `Qⁿ(X)` with chain maps `s̄ⁿ` and arrows `Qⁿ(f)`, the truncated colimit
//! `R` with legs `tⁿ`, and `δ: F R ≅ D`, recording every identity in a
//! ledger.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::colimit::idempotent_chain_colimit;
use super::functor::{IdentityFunctor, ObjectOf, ProjectableFunctor};
use super::LiftError;
use crate::diagram::{Morphism, PosetDiagram};
use crate::ledger::VerificationLedger;
use crate::semilattice::{enumerate_homs, find_isomorphism, same_semilattice, SemilatticeHom};
use crate::unfold::{unfold, UnfoldBudget, UnfoldingBundle};

fn loc(parts: &[(&str, usize)]) -> String {
    parts
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// `g ∘ f` on tables.
fn after(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&v| g[v]).collect()
}

fn identity_table(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn onto(table: &[usize], size: usize) -> bool {
    let mut seen = vec![false; size];
    for &v in table {
        seen[v] = true;
    }
    seen.into_iter().all(|s| s)
}

enum TransportFailure {
    NotWellDefined { q: usize, first: usize, second: usize },
    NotOnto(usize),
}

/// The map `q ↦ image(x)` for any `x` with `epi(x) = q`.
fn transport(epi: &[usize], quotient_size: usize, image: impl Fn(usize) -> usize) -> Result<Vec<usize>, TransportFailure> {
    let mut out = vec![usize::MAX; quotient_size];
    let mut witness = vec![usize::MAX; quotient_size];
    for (x, &q) in epi.iter().enumerate() {
        let v = image(x);
        if out[q] == usize::MAX {
            out[q] = v;
            witness[q] = x;
        } else if out[q] != v {
            return Err(TransportFailure::NotWellDefined {
                q,
                first: witness[q],
                second: x,
            });
        }
    }
    match out.iter().position(|&v| v == usize::MAX) {
        Some(q) => Err(TransportFailure::NotOnto(q)),
        None => Ok(out),
    }
}

fn transported(
    what: &str,
    node: usize,
    level: usize,
    result: Result<Vec<usize>, TransportFailure>,
) -> Result<Vec<usize>, LiftError> {
    result.map_err(|f| match f {
        TransportFailure::NotWellDefined { q, first, second } => LiftError::NotWellDefined {
            what: what.to_string(),
            node,
            level,
            q,
            first,
            second,
        },
        TransportFailure::NotOnto(q) => LiftError::WitnessFailure {
            node,
            level,
            detail: format!("{what}: element {q} of the quotient has no preimage"),
        },
    })
}

/// A lifting `E` of the unfolding over `I × {0..N−1}` with isos `ηⁿ`.
#[derive(Debug)]
pub struct LiftedUnfolding<M: Morphism> {
    bundle: UnfoldingBundle,
    lift: PosetDiagram<M>,
    eta: Vec<Vec<SemilatticeHom>>,
}

impl<M: Morphism> Clone for LiftedUnfolding<M> {
    fn clone(&self) -> Self {
        LiftedUnfolding {
            bundle: self.bundle.clone(),
            lift: self.lift.clone(),
            eta: self.eta.clone(),
        }
    }
}

impl LiftedUnfolding<SemilatticeHom> {
    /// The unfolding lifted along the identity functor by itself.
    pub fn identity(bundle: UnfoldingBundle) -> Self {
        let lift = bundle.unfolded().clone();
        let eta = (0..bundle.nodes())
            .map(|x| {
                (1..=bundle.depth())
                    .map(|n| SemilatticeHom::identity(bundle.power(x, n)))
                    .collect()
            })
            .collect();
        LiftedUnfolding { bundle, lift, eta }
    }
}

impl<M: Morphism> LiftedUnfolding<M> {
    /// Validates the lift against the bundle; any failed identity makes the
    /// package invalid.
    pub fn new<F: ProjectableFunctor<Arrow = M>>(
        functor: &F,
        bundle: UnfoldingBundle,
        lift: PosetDiagram<M>,
        eta_tables: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self, LiftError> {
        let depth = bundle.depth();
        let expected = bundle.index().times_chain(depth);
        if lift.index().as_ref() != &expected {
            return Err(LiftError::LiftPackageInvalid(vec![format!(
                "lift index must be the product of the diagram index with a {depth}-element chain"
            )]));
        }
        if eta_tables.len() != bundle.nodes() || eta_tables.iter().any(|row| row.len() != depth) {
            return Err(LiftError::LiftPackageInvalid(vec![format!(
                "η needs {depth} tables for each of {} nodes",
                bundle.nodes()
            )]));
        }
        let mut problems = Vec::new();
        let mut eta = Vec::new();
        for (x, row) in eta_tables.into_iter().enumerate() {
            let mut per_level = Vec::new();
            for (k, table) in row.into_iter().enumerate() {
                let n = k + 1;
                let source = functor.object(lift.object(x * depth + k))?;
                match SemilatticeHom::new(source.clone(), bundle.power(x, n).clone(), table) {
                    Ok(h) => per_level.push(h),
                    Err(e) => {
                        problems.push(format!("η at x={x} n={n}: {e}"));
                        per_level.push(SemilatticeHom::zero_map(&source, bundle.power(x, n)));
                    }
                }
            }
            eta.push(per_level);
        }
        if !problems.is_empty() {
            return Err(LiftError::LiftPackageInvalid(problems));
        }
        let lifted = LiftedUnfolding { bundle, lift, eta };
        let ledger = lifted.check(functor)?;
        if !ledger.is_clean() {
            return Err(LiftError::LiftPackageInvalid(
                ledger
                    .failures()
                    .map(|r| format!("{} [{}]: {}", r.tag, r.location, r.witness))
                    .collect(),
            ));
        }
        Ok(lifted)
    }

    pub fn bundle(&self) -> &UnfoldingBundle {
        &self.bundle
    }

    pub fn lift(&self) -> &PosetDiagram<M> {
        &self.lift
    }

    pub fn depth(&self) -> usize {
        self.bundle.depth()
    }

    fn node(&self, x: usize, n: usize) -> usize {
        x * self.depth() + n - 1
    }

    /// `Eⁿ(X)`.
    pub fn e_object(&self, x: usize, n: usize) -> &Arc<M::Object> {
        self.lift.object(self.node(x, n))
    }

    /// `sⁿ: Eⁿ(X) → Eⁿ⁺¹(X)`.
    pub fn s(&self, x: usize, n: usize) -> M {
        self.lift.arrow(self.node(x, n), self.node(x, n + 1)).expect("chain step")
    }

    /// `Eⁿ(f)` for `x ≤ y`.
    pub fn e_arrow(&self, x: usize, y: usize, n: usize) -> M {
        self.lift.arrow(self.node(x, n), self.node(y, n)).expect("comparable")
    }

    /// `ηⁿ: F Eⁿ(X) → D̂ⁿ(X)`.
    pub fn eta(&self, x: usize, n: usize) -> &SemilatticeHom {
        &self.eta[x][n - 1]
    }

    /// Functor laws of `E` and `F`, `η` isos, and the two `η` squares.
    pub fn check<F: ProjectableFunctor<Arrow = M>>(&self, functor: &F) -> Result<VerificationLedger, LiftError> {
        let mut l = VerificationLedger::new();
        let b = &self.bundle;
        let depth = self.depth();
        let report = self.lift.validate();
        l.record("lift-functor", "", if report.is_valid() { Ok(()) } else { Err(report.to_string()) });
        for x in 0..b.nodes() {
            for n in 1..=depth {
                let at = loc(&[("x", x), ("n", n)]);
                let obj = self.e_object(x, n);
                let fid = functor.arrow(&M::identity(obj))?;
                l.check_equal("functor-identity", &at, fid.map(), &identity_table(fid.source().size()));
                let eta = self.eta(x, n);
                l.record(
                    "eta-iso",
                    &at,
                    if eta.is_isomorphism() { Ok(()) } else { Err("η is not bijective".into()) },
                );
                if n < depth {
                    let fs = functor.arrow(&self.s(x, n))?;
                    l.check_equal(
                        "eta-chain-square",
                        &at,
                        &after(self.eta(x, n + 1).map(), fs.map()),
                        &after(b.sigma(x, n).map(), eta.map()),
                    );
                }
            }
        }
        for (x, y) in b.index().strict_pairs() {
            for n in 1..=depth {
                let at = loc(&[("x", x), ("y", y), ("n", n)]);
                let fe = functor.arrow(&self.e_arrow(x, y, n))?;
                l.check_equal(
                    "eta-arrow-square",
                    &at,
                    &after(self.eta(y, n).map(), fe.map()),
                    &after(b.hat_power(x, y, n).map(), self.eta(x, n).map()),
                );
            }
        }
        let index = self.lift.index().clone();
        for &(p, q) in index.covers() {
            for &r in index.successors(q) {
                let at = format!("from={p} via={q} to={r}");
                let f = self.lift.edge(p, q).expect("cover");
                let g = self.lift.edge(q, r).expect("cover");
                let fg = functor.arrow(&g.compose_unchecked(f))?;
                let (ff, fgg) = (functor.arrow(f)?, functor.arrow(g)?);
                l.check_equal("functor-composition", at, fg.map(), &after(fgg.map(), ff.map()));
            }
        }
        Ok(l)
    }
}

/// Bounds for the exhaustive uniqueness and factorization checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplayOptions {
    /// Uniqueness rows run when the codomain has at most this many elements.
    pub uniqueness_max: usize,
    /// Witness factorization rows run for sources up to this size.
    pub universal_max_source: usize,
    /// ... against every target up to this size.
    pub universal_max_target: usize,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions {
            uniqueness_max: 4,
            universal_max_source: 16,
            universal_max_target: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplayMode {
    /// Every node's chain stabilizes within the depth; `R` is the colimit.
    Stabilized,
    /// Some chain does not stabilize; `R = Q^N` and results hold relative
    /// to the truncation depth.
    DepthRelative,
}

/// Everything built by [`replay`].
pub struct LiftReplay<F: ProjectableFunctor> {
    pub mode: ReplayMode,
    /// Least level from which each node's chain is stable.
    pub stable_from: Vec<Option<usize>>,
    pub depth: usize,
    witnesses: Vec<Vec<F::Witness>>,
    sbar: Vec<Vec<F::Arrow>>,
    q_arrows: BTreeMap<(usize, usize), Vec<F::Arrow>>,
    r_objects: Vec<Arc<ObjectOf<F>>>,
    legs: Vec<Vec<F::Arrow>>,
    r_arrows: BTreeMap<(usize, usize), F::Arrow>,
    delta: Vec<SemilatticeHom>,
    pub ledger: VerificationLedger,
}

impl<F: ProjectableFunctor> LiftReplay<F> {
    pub fn witness(&self, x: usize, n: usize) -> &F::Witness {
        &self.witnesses[x][n - 1]
    }

    /// `s̄ⁿ: Qⁿ(X) → Qⁿ⁺¹(X)`.
    pub fn sbar(&self, x: usize, n: usize) -> &F::Arrow {
        &self.sbar[x][n - 1]
    }

    /// `Qⁿ(f)` for `x < y`.
    pub fn q_arrow(&self, x: usize, y: usize, n: usize) -> &F::Arrow {
        &self.q_arrows[&(x, y)][n - 1]
    }

    pub fn r_object(&self, x: usize) -> &Arc<ObjectOf<F>> {
        &self.r_objects[x]
    }

    /// `tⁿ: Qⁿ(X) → R(X)` for the levels where it is defined.
    pub fn leg(&self, x: usize, n: usize) -> &F::Arrow {
        &self.legs[x][n - 1]
    }

    pub fn leg_levels(&self) -> usize {
        self.legs.first().map_or(0, Vec::len)
    }

    pub fn r_arrow(&self, x: usize, y: usize) -> &F::Arrow {
        &self.r_arrows[&(x, y)]
    }

    pub fn delta(&self, x: usize) -> &SemilatticeHom {
        &self.delta[x]
    }

    /// `F R ≅ D` was established with a stabilized colimit and no failed row.
    pub fn certified(&self) -> bool {
        self.mode == ReplayMode::Stabilized && self.ledger.is_clean()
    }

    pub fn summary(&self) -> String {
        let c = self.ledger.counts();
        let verdict = match (self.mode, self.ledger.is_clean()) {
            (ReplayMode::Stabilized, true) => "certified: F R is naturally isomorphic to D".to_string(),
            (ReplayMode::Stabilized, false) => "not certified: verification failures".to_string(),
            (ReplayMode::DepthRelative, _) => {
                format!("depth-relative: results hold at truncation depth {}", self.depth)
            }
        };
        format!("{verdict} ({} passed, {} failed, {} skipped)", c.pass, c.fail, c.skipped)
    }
}

/// The identity-functor replay of a bundle, unfolded again to depth at
/// least 3 so that the `ρ`-chain can be seen to stabilize.
pub fn replay_identity(
    bundle: &UnfoldingBundle,
    budget: UnfoldBudget,
    options: ReplayOptions,
) -> Result<LiftReplay<IdentityFunctor>, LiftError> {
    let bundle = if bundle.depth() >= 3 {
        bundle.clone()
    } else {
        unfold(bundle.source(), 3, budget)?
    };
    replay(&IdentityFunctor, &LiftedUnfolding::identity(bundle), options)
}

/// Runs the full replay and records every identity.
pub fn replay<F: ProjectableFunctor>(
    functor: &F,
    lifted: &LiftedUnfolding<F::Arrow>,
    options: ReplayOptions,
) -> Result<LiftReplay<F>, LiftError> {
    let b = lifted.bundle();
    let rd = b.source();
    let depth = b.depth();
    let nodes = b.nodes();
    let pairs = b.index().strict_pairs();
    let triples = b.index().strict_triples();
    let mut l = lifted.check(functor)?;

    // witnesses ⟨aⁿ, ζⁿ⟩ for αⁿ∘ηⁿ
    let mut witnesses = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let mut row = Vec::with_capacity(depth);
        for n in 1..=depth {
            let at = loc(&[("x", x), ("n", n)]);
            let phi = b.alpha(x, n).compose_unchecked(lifted.eta(x, n));
            let w = functor
                .witness(lifted.e_object(x, n), &phi)
                .map_err(|detail| LiftError::WitnessFailure { node: x, level: n, detail })?;
            let a = functor.epi(&w);
            let zeta = functor.iso(&w);
            let fa = functor.arrow(a)?;
            l.record(
                "witness-epi",
                &at,
                if onto(a.table(), F::Arrow::object_size(a.target())) { Ok(()) } else { Err("a is not onto".into()) },
            );
            l.record(
                "witness-iso",
                &at,
                if zeta.is_isomorphism() { Ok(()) } else { Err("ζ is not bijective".into()) },
            );
            l.check_equal("witness-square", &at, &after(zeta.map(), fa.map()), phi.map());
            if let Some(result) =
                functor.check_universal(&w, options.universal_max_source, options.universal_max_target)
            {
                l.record("witness-universal", &at, result.map(|_| ()));
            }
            row.push(w);
        }
        witnesses.push(row);
    }
    let a = |x: usize, n: usize| functor.epi(&witnesses[x][n - 1]);
    let zeta = |x: usize, n: usize| functor.iso(&witnesses[x][n - 1]);
    let q_obj = |x: usize, n: usize| a(x, n).target().clone();
    let q_size = |x: usize, n: usize| F::Arrow::object_size(a(x, n).target());

    // chain maps s̄ⁿ
    let mut sbar = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let rho = b.rho(x);
        let mut row = Vec::new();
        for n in 1..depth {
            let at = loc(&[("x", x), ("n", n)]);
            let s = lifted.s(x, n);
            let (an, an1) = (a(x, n), a(x, n + 1));
            let table = transported(
                "s̄",
                x,
                n,
                transport(an.table(), q_size(x, n), |e| an1.apply(s.apply(e))),
            )?;
            let sb = F::Arrow::from_table(q_obj(x, n), q_obj(x, n + 1), table).map_err(LiftError::Construction)?;
            let fsb = functor.arrow(&sb)?;
            l.check_equal("sbar-epi-square", &at, &after(sb.table(), an.table()), &after(an1.table(), s.table()));
            let zeta_sq_left = after(zeta(x, n + 1).map(), fsb.map());
            let zeta_sq_right = after(rho.map(), zeta(x, n).map());
            l.check_equal("sbar-zeta-square", &at, &zeta_sq_left, &zeta_sq_right);
            if q_size(x, n + 1) <= options.uniqueness_max {
                let target_epi = after(an1.table(), s.table());
                let mut count = 0;
                for cand in functor.homs(&q_obj(x, n), &q_obj(x, n + 1)) {
                    if after(cand.table(), an.table()) != target_epi {
                        continue;
                    }
                    if after(zeta(x, n + 1).map(), functor.arrow(&cand)?.map()) == zeta_sq_right {
                        count += 1;
                    }
                }
                l.record(
                    "sbar-unique",
                    &at,
                    if count == 1 { Ok(()) } else { Err(format!("{count} arrows satisfy both squares")) },
                );
            }
            row.push(sb);
        }
        sbar.push(row);
    }

    // arrows Qⁿ(f)
    let mut q_arrows: BTreeMap<(usize, usize), Vec<F::Arrow>> = BTreeMap::new();
    for &(x, y) in &pairs {
        let hf = b.hat_power(x, y, 1);
        let mut row = Vec::new();
        for n in 1..=depth {
            let at = loc(&[("x", x), ("y", y), ("n", n)]);
            let ef = lifted.e_arrow(x, y, n);
            let (ax, ay) = (a(x, n), a(y, n));
            let table = transported(
                "Q(f)",
                x,
                n,
                transport(ax.table(), q_size(x, n), |e| ay.apply(ef.apply(e))),
            )?;
            let qf = F::Arrow::from_table(q_obj(x, n), q_obj(y, n), table).map_err(LiftError::Construction)?;
            let fqf = functor.arrow(&qf)?;
            l.check_equal("q-epi-square", &at, &after(qf.table(), ax.table()), &after(ay.table(), ef.table()));
            let right = after(hf.map(), zeta(x, n).map());
            l.check_equal("q-zeta-square", &at, &after(zeta(y, n).map(), fqf.map()), &right);
            if q_size(y, n) <= options.uniqueness_max {
                let target_epi = after(ay.table(), ef.table());
                let mut count = 0;
                for cand in functor.homs(&q_obj(x, n), &q_obj(y, n)) {
                    if after(cand.table(), ax.table()) != target_epi {
                        continue;
                    }
                    if after(zeta(y, n).map(), functor.arrow(&cand)?.map()) == right {
                        count += 1;
                    }
                }
                l.record(
                    "q-unique",
                    &at,
                    if count == 1 { Ok(()) } else { Err(format!("{count} arrows satisfy both squares")) },
                );
            }
            row.push(qf);
        }
        q_arrows.insert((x, y), row);
    }
    for x in 0..nodes {
        for n in 1..=depth {
            let at = loc(&[("x", x), ("n", n)]);
            let ax = a(x, n);
            let id = transported("Q(id)", x, n, transport(ax.table(), q_size(x, n), |e| ax.apply(e)))?;
            l.check_equal("q-identity", &at, &id, &identity_table(q_size(x, n)));
        }
    }
    for &(x, y, z) in &triples {
        for n in 1..=depth {
            let at = loc(&[("x", x), ("y", y), ("z", z), ("n", n)]);
            let (f, g, gf) = (&q_arrows[&(x, y)][n - 1], &q_arrows[&(y, z)][n - 1], &q_arrows[&(x, z)][n - 1]);
            l.check_equal("q-composition", &at, &after(g.table(), f.table()), gf.table());
        }
    }
    for &(x, y) in &pairs {
        for n in 1..depth {
            let at = loc(&[("x", x), ("y", y), ("n", n)]);
            let left = after(q_arrows[&(x, y)][n].table(), sbar[x][n - 1].table());
            let right = after(sbar[y][n - 1].table(), q_arrows[&(x, y)][n - 1].table());
            l.check_equal("q-mixed-square", &at, &left, &right);
        }
    }

    // stabilization: J¹ = Q¹, Jⁿ⁺¹ = s̄ⁿ(Jⁿ); stable from n₀ when every later
    // s̄ⁿ is injective on Jⁿ with s̄ⁿ(Jⁿ) = s̄ⁿ(Qⁿ)
    let mut images: Vec<Vec<Vec<usize>>> = Vec::with_capacity(nodes);
    let mut stable_from = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let mut j = vec![identity_table(q_size(x, 1))];
        let mut good = Vec::new();
        for n in 1..depth {
            let s = sbar[x][n - 1].table();
            let cur = &j[n - 1];
            let mut img: Vec<usize> = cur.iter().map(|&v| s[v]).collect();
            img.sort_unstable();
            img.dedup();
            let mut full: Vec<usize> = s.to_vec();
            full.sort_unstable();
            full.dedup();
            good.push(img.len() == cur.len() && img == full);
            j.push(img);
        }
        let n0 = (1..depth).find(|&n| good[n - 1..].iter().all(|&g| g));
        let at = loc(&[("x", x)]);
        match n0 {
            Some(n) => l.note("stabilization", &at, format!("stable from level {n}")),
            None => l.skip("stabilization", &at, format!("no stabilization within depth {depth}")),
        }
        stable_from.push(n0);
        images.push(j);
    }
    let mode = if stable_from.iter().all(Option::is_some) {
        ReplayMode::Stabilized
    } else {
        ReplayMode::DepthRelative
    };

    // R(X) and legs tⁿ
    let levels = match mode {
        ReplayMode::Stabilized => depth - 1,
        ReplayMode::DepthRelative => depth,
    };
    let mut r_objects = Vec::with_capacity(nodes);
    let mut legs: Vec<Vec<F::Arrow>> = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let mut tables: Vec<Vec<usize>> = vec![Vec::new(); levels];
        let r_obj: Arc<ObjectOf<F>> = match mode {
            ReplayMode::Stabilized => {
                let n0 = stable_from[x].expect("stabilized");
                let j = &images[x][n0 - 1];
                let r = Arc::new(F::Arrow::subobject(&q_obj(x, n0), j).map_err(LiftError::Construction)?);
                let mut position = vec![usize::MAX; q_size(x, n0)];
                for (i, &e) in j.iter().enumerate() {
                    position[e] = i;
                }
                for n in n0..=levels {
                    let mut back = vec![usize::MAX; q_size(x, n + 1)];
                    for &e in j {
                        let mut v = e;
                        for k in n0..=n {
                            v = sbar[x][k - 1].apply(v);
                        }
                        back[v] = position[e];
                    }
                    let s = sbar[x][n - 1].table();
                    tables[n - 1] = s.iter().map(|&v| back[v]).collect();
                }
                let restricted: Vec<usize> = j.iter().map(|&e| tables[n0 - 1][e]).collect();
                l.check_equal(
                    "colimit-restriction",
                    loc(&[("x", x), ("n", n0)]),
                    &restricted,
                    &identity_table(j.len()),
                );
                for n in (1..n0).rev() {
                    tables[n - 1] = after(&tables[n], sbar[x][n - 1].table());
                }
                r
            }
            ReplayMode::DepthRelative => {
                tables[depth - 1] = identity_table(q_size(x, depth));
                for n in (1..depth).rev() {
                    tables[n - 1] = after(&tables[n], sbar[x][n - 1].table());
                }
                q_obj(x, depth)
            }
        };
        let mut row = Vec::with_capacity(levels);
        for (k, table) in tables.into_iter().enumerate() {
            row.push(F::Arrow::from_table(q_obj(x, k + 1), r_obj.clone(), table).map_err(LiftError::Construction)?);
        }
        for n in 1..levels {
            l.check_equal(
                "colimit-leg",
                loc(&[("x", x), ("n", n)]),
                row[n - 1].table(),
                &after(row[n].table(), sbar[x][n - 1].table()),
            );
        }
        r_objects.push(r_obj);
        legs.push(row);
    }
    let r_size = |x: usize| F::Arrow::object_size(&r_objects[x]);

    // R(f) by transport through the top leg
    let mut r_arrows = BTreeMap::new();
    for &(x, y) in &pairs {
        let (tx, ty) = (&legs[x][levels - 1], &legs[y][levels - 1]);
        let qf = &q_arrows[&(x, y)][levels - 1];
        let table = transported("R(f)", x, levels, transport(tx.table(), r_size(x), |e| ty.apply(qf.apply(e))))?;
        let rf = F::Arrow::from_table(r_objects[x].clone(), r_objects[y].clone(), table).map_err(LiftError::Construction)?;
        for n in 1..=levels {
            l.check_equal(
                "r-arrow-square",
                loc(&[("x", x), ("y", y), ("n", n)]),
                &after(rf.table(), legs[x][n - 1].table()),
                &after(legs[y][n - 1].table(), q_arrows[&(x, y)][n - 1].table()),
            );
        }
        r_arrows.insert((x, y), rf);
    }
    for x in 0..nodes {
        let tx = &legs[x][levels - 1];
        let id = transported("R(id)", x, levels, transport(tx.table(), r_size(x), |e| tx.apply(e)))?;
        l.check_equal("r-identity", loc(&[("x", x)]), &id, &identity_table(r_size(x)));
    }
    for &(x, y, z) in &triples {
        l.check_equal(
            "r-composition",
            loc(&[("x", x), ("y", y), ("z", z)]),
            &after(r_arrows[&(y, z)].table(), r_arrows[&(x, y)].table()),
            r_arrows[&(x, z)].table(),
        );
    }

    // δ with δ∘F(tⁿ) = μ∘ζⁿ, transported through F(t) at the top level
    let mut delta = Vec::with_capacity(nodes);
    let mut f_legs: Vec<Vec<SemilatticeHom>> = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let fl: Vec<SemilatticeHom> = legs[x].iter().map(|t| functor.arrow(t)).collect::<Result<_, _>>()?;
        let fr = functor.object(&r_objects[x])?;
        let top = &fl[levels - 1];
        let mu = rd.mu(x);
        let z = zeta(x, levels);
        let table = transported("δ", x, levels, transport(top.map(), fr.size(), |u| mu.apply(z.apply(u))))?;
        let d = SemilatticeHom::new(fr.clone(), rd.base().object(x).clone(), table)
            .map_err(|e| LiftError::Construction(format!("δ at x={x}: {e}")))?;
        for n in 1..=levels {
            l.check_equal(
                "delta-triangle",
                loc(&[("x", x), ("n", n)]),
                &after(d.map(), fl[n - 1].map()),
                &after(mu.map(), zeta(x, n).map()),
            );
        }
        let at = loc(&[("x", x)]);
        match mode {
            ReplayMode::Stabilized => l.record(
                "delta-iso",
                &at,
                if d.is_isomorphism() { Ok(()) } else { Err(format!("δ = {:?} is not bijective", d.map())) },
            ),
            ReplayMode::DepthRelative => l.skip("delta-iso", &at, "colimit not certified at this depth"),
        }
        if rd.base().object(x).size() <= options.uniqueness_max {
            let count = enumerate_homs(&fr, rd.base().object(x))
                .into_iter()
                .filter(|cand| {
                    (1..=levels).all(|n| after(cand.map(), fl[n - 1].map()) == after(mu.map(), zeta(x, n).map()))
                })
                .count();
            l.record(
                "delta-unique",
                &at,
                if count == 1 { Ok(()) } else { Err(format!("{count} arrows satisfy every triangle")) },
            );
        }
        delta.push(d);
        f_legs.push(fl);
    }

    // naturality of δ, step by step
    for &(x, y) in &pairs {
        let frf = functor.arrow(&r_arrows[&(x, y)])?;
        let df = rd.base().arrow(x, y).expect("comparable");
        let hf = b.hat_power(x, y, 1);
        let (mx, my) = (rd.mu(x), rd.mu(y));
        for n in 1..=levels {
            let at = loc(&[("x", x), ("y", y), ("n", n)]);
            let fq = functor.arrow(&q_arrows[&(x, y)][n - 1])?;
            let (zx, zy) = (zeta(x, n).map(), zeta(y, n).map());
            let lhs = after(delta[y].map(), &after(frf.map(), f_legs[x][n - 1].map()));
            let e1 = after(delta[y].map(), &after(f_legs[y][n - 1].map(), fq.map()));
            let e2 = after(my.map(), &after(zy, fq.map()));
            let e3 = after(my.map(), &after(hf.map(), zx));
            let e4 = after(df.map(), &after(mx.map(), zx));
            let e5 = after(df.map(), &after(delta[x].map(), f_legs[x][n - 1].map()));
            l.check_equal("naturality-step1", &at, &lhs, &e1);
            l.check_equal("naturality-step2", &at, &e1, &e2);
            l.check_equal("naturality-step3", &at, &e2, &e3);
            l.check_equal("naturality-step4", &at, &e3, &e4);
            l.check_equal("naturality-step5", &at, &e4, &e5);
        }
        l.check_equal(
            "naturality",
            loc(&[("x", x), ("y", y)]),
            &after(delta[y].map(), frf.map()),
            &after(df.map(), delta[x].map()),
        );
    }

    // two routes to the colimit: R and the splitting of ρ
    for x in 0..nodes {
        let at = loc(&[("x", x)]);
        if mode == ReplayMode::DepthRelative {
            l.skip("colimit-crosscheck", &at, "colimit not certified at this depth");
            continue;
        }
        let split = idempotent_chain_colimit(b.rho(x))?;
        let fr = functor.object(&r_objects[x])?;
        let same = same_semilattice(&fr, &split.object) || find_isomorphism(&fr, &split.object).is_some();
        l.record(
            "colimit-crosscheck",
            &at,
            if same {
                Ok(())
            } else {
                Err(format!(
                    "F R has {} elements, the image of ρ has {}",
                    fr.size(),
                    split.object.size()
                ))
            },
        );
    }

    Ok(LiftReplay {
        mode,
        stable_from,
        depth,
        witnesses,
        sbar,
        q_arrows,
        r_objects,
        legs,
        r_arrows,
        delta,
        ledger: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{promote_to_retracted, BooleanProvider, IndexPoset, RetractedDiagram};
    use crate::ledger::Status;
    use crate::semilattice::FiniteJoinSemilattice;

    fn chain(n: usize) -> Arc<FiniteJoinSemilattice> {
        Arc::new(FiniteJoinSemilattice::chain(n))
    }

    fn retracted(index: IndexPoset, objects: Vec<Arc<FiniteJoinSemilattice>>, edges: Vec<((usize, usize), Vec<usize>)>) -> RetractedDiagram {
        let edges = edges
            .into_iter()
            .map(|((x, y), t)| ((x, y), SemilatticeHom::new(objects[x].clone(), objects[y].clone(), t).unwrap()))
            .collect();
        let d = PosetDiagram::new(Arc::new(index), objects, edges).unwrap();
        promote_to_retracted(&d, &BooleanProvider::default()).unwrap()
    }

    #[test]
    fn three_chain_identity_replay_is_certified() {
        let rd = retracted(IndexPoset::single(), vec![chain(3)], vec![]);
        let b = unfold(&rd, 2, UnfoldBudget::default()).unwrap();
        let r = replay_identity(&b, UnfoldBudget::default(), ReplayOptions::default()).unwrap();
        assert!(r.certified(), "{}", r.ledger);
        assert_eq!(r.depth, 3);
        // Q¹ = D̂ = 2², s̄ = ρ, R = Im ρ ≅ 3
        assert_eq!(r.sbar(0, 1).map(), &[0, 1, 3, 3]);
        assert_eq!(r.r_object(0).size(), 3);
        assert!(r.stable_from[0].unwrap() <= 2);
        assert!(r.delta(0).is_isomorphism());
    }

    #[test]
    fn two_chain_embedding_replay_is_natural() {
        let rd = retracted(IndexPoset::chain(2), vec![chain(2), chain(3)], vec![((0, 1), vec![0, 2])]);
        let b = unfold(&rd, 3, UnfoldBudget::default()).unwrap();
        let r = replay_identity(&b, UnfoldBudget::default(), ReplayOptions::default()).unwrap();
        assert!(r.certified(), "{}", r.ledger);
        assert_eq!(r.ledger.rows_tagged("naturality").count(), 1);
        let d = rd.base().edge(0, 1).unwrap();
        assert_eq!(
            after(r.delta(1).map(), r.r_arrow(0, 1).map()),
            after(d.map(), r.delta(0).map())
        );
    }

    #[test]
    fn zero_mu_breaks_exactly_the_rows_at_its_node() {
        let c3 = chain(3);
        let id = (0..3).collect::<Vec<_>>();
        let rd = retracted(IndexPoset::chain(3), vec![c3.clone(), c3.clone(), c3], vec![((0, 1), id.clone()), ((1, 2), id)]);
        let mut b = unfold(&rd, 3, UnfoldBudget::default()).unwrap();
        let y = 1;
        b.replace_mu(y, SemilatticeHom::zero_map(rd.hat().object(y), rd.base().object(y)));
        let r = replay_identity(&b, UnfoldBudget::default(), ReplayOptions::default()).unwrap();
        assert!(!r.ledger.is_clean());
        assert!(r.ledger.failures().all(|row| row.mentions_node(y)));
        for row in r.ledger.rows_tagged("naturality") {
            assert_eq!(row.status == Status::Fail, row.mentions_node(y), "{row:?}");
        }
    }

    #[test]
    fn identity_lift_passes_its_own_check() {
        let rd = retracted(IndexPoset::single(), vec![chain(4)], vec![]);
        let b = unfold(&rd, 2, UnfoldBudget::default()).unwrap();
        let lifted = LiftedUnfolding::identity(b);
        assert!(lifted.check(&IdentityFunctor).unwrap().is_clean());
    }

    #[test]
    fn transport_reports_clashing_preimages() {
        match transport(&[0, 0, 1], 2, |x| x) {
            Err(TransportFailure::NotWellDefined { q, first, second }) => assert_eq!((q, first, second), (0, 0, 1)),
            _ => panic!("expected a clash"),
        }
        assert!(matches!(transport(&[0, 0], 2, |_| 0), Err(TransportFailure::NotOnto(1))));
        assert_eq!(transport(&[0, 1, 1], 2, |x| x.min(1)).ok(), Some(vec![0, 1]));
    }
}
