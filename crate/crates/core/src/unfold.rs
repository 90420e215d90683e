//! The unfolding of a retracted diagram `(D, D̂, ε, μ)` over `I × {0..N−1}`:
//! vertices `D̂ⁿ⁺¹(X)` built as iterated products `D̂(X) Π D̂ⁿ(X)`, chain maps
//! `σⁿ = (ρ∘αⁿ) × id`, and power arrows `D̂ⁿ⁺¹(f) = D̂(f) Π D̂ⁿ(f)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::diagram::{tables_agree, IndexPoset, Morphism, PosetDiagram, RetractedDiagram, SemilatticeDiagram};
use crate::ledger::VerificationLedger;
use crate::semilattice::{product, FiniteJoinSemilattice, ProductDecomposition, SemilatticeHom};

pub const DEFAULT_ELEMENT_BUDGET: usize = 1024;
pub const DEFAULT_MAX_DEPTH: usize = 4;

/// Size guard for unfolding: `|D̂(X)|^N ≤ max_elements` at every node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnfoldBudget {
    pub max_elements: usize,
    pub max_depth: usize,
}

impl Default for UnfoldBudget {
    fn default() -> Self {
        UnfoldBudget {
            max_elements: DEFAULT_ELEMENT_BUDGET,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnfoldError {
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("depth {depth} exceeds the limit {limit}")]
    DepthTooLarge { depth: usize, limit: usize },
    #[error("node {node}: {base}^{depth} elements exceed the element budget {budget}")]
    BudgetExceeded {
        node: usize,
        base: usize,
        depth: usize,
        budget: usize,
    },
}

/// All data of the unfolding to depth `N`, indexed by node and by level
/// `n = 1..=N` (stored at position `n − 1`).
#[derive(Clone, Debug)]
pub struct UnfoldingBundle {
    source: RetractedDiagram,
    depth: usize,
    rho: Vec<SemilatticeHom>,
    powers: Vec<Vec<Arc<FiniteJoinSemilattice>>>,
    decomps: Vec<Vec<Option<ProductDecomposition>>>,
    alpha: Vec<Vec<SemilatticeHom>>,
    sigma: Vec<Vec<SemilatticeHom>>,
    hat_powers: BTreeMap<(usize, usize), Vec<SemilatticeHom>>,
    unfolded: SemilatticeDiagram,
}

/// Builds the unfolding to depth `depth`.
pub fn unfold(rd: &RetractedDiagram, depth: usize, budget: UnfoldBudget) -> Result<UnfoldingBundle, UnfoldError> {
    if depth == 0 {
        return Err(UnfoldError::ZeroDepth);
    }
    if depth > budget.max_depth {
        return Err(UnfoldError::DepthTooLarge {
            depth,
            limit: budget.max_depth,
        });
    }
    let nodes = rd.nodes();
    for x in 0..nodes {
        let base = rd.hat().object(x).size();
        let fits = u32::try_from(depth)
            .ok()
            .and_then(|d| base.checked_pow(d))
            .map_or(false, |e| e <= budget.max_elements);
        if !fits {
            return Err(UnfoldError::BudgetExceeded {
                node: x,
                base,
                depth,
                budget: budget.max_elements,
            });
        }
    }
    let mut powers = Vec::with_capacity(nodes);
    let mut decomps = Vec::with_capacity(nodes);
    let mut alpha = Vec::with_capacity(nodes);
    let mut sigma = Vec::with_capacity(nodes);
    let mut rho = Vec::with_capacity(nodes);
    for x in 0..nodes {
        let hat = rd.hat().object(x).clone();
        let r = rd.derived_rho(x);
        let mut p = vec![hat.clone()];
        let mut d: Vec<Option<ProductDecomposition>> = vec![None];
        let mut a = vec![SemilatticeHom::identity(&hat)];
        for n in 2..=depth {
            let dec = product(&hat, &p[n - 2]);
            p.push(dec.product().clone());
            a.push(dec.left_proj().clone());
            d.push(Some(dec));
        }
        let mut s = Vec::new();
        for n in 1..depth {
            let dec = d[n].as_ref().expect("level n+1 ≥ 2 is a product");
            let leg = r.compose_unchecked(&a[n - 1]);
            s.push(
                dec.pair(&leg, &SemilatticeHom::identity(&p[n - 1]))
                    .expect("both legs start at the same power"),
            );
        }
        powers.push(p);
        decomps.push(d);
        alpha.push(a);
        sigma.push(s);
        rho.push(r);
    }
    let mut hat_powers = BTreeMap::new();
    for (x, y) in rd.index().strict_pairs() {
        let f = rd.hat().arrow(x, y).expect("comparable pair");
        let mut v = vec![f.clone()];
        for n in 2..=depth {
            let (dx, dy) = (decomps[x][n - 1].as_ref(), decomps[y][n - 1].as_ref());
            let next = dy
                .expect("product")
                .parallel(&f, &v[n - 2], dx.expect("product"))
                .expect("factors match");
            v.push(next);
        }
        hat_powers.insert((x, y), v);
    }
    let mut bundle = UnfoldingBundle {
        source: rd.clone(),
        depth,
        rho,
        powers,
        decomps,
        alpha,
        sigma,
        hat_powers,
        unfolded: rd.hat().clone(),
    };
    bundle.rebuild_unfolded();
    Ok(bundle)
}

fn loc(parts: &[(&str, usize)]) -> String {
    parts
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl UnfoldingBundle {
    fn rebuild_unfolded(&mut self) {
        let len = self.depth;
        let index = Arc::new(self.source.index().times_chain(len));
        let mut objects = Vec::new();
        for x in 0..self.nodes() {
            objects.extend(self.powers[x].iter().cloned());
        }
        let mut edges = BTreeMap::new();
        for x in 0..self.nodes() {
            for k in 0..len {
                if k + 1 < len {
                    edges.insert((x * len + k, x * len + k + 1), self.sigma[x][k].clone());
                }
            }
        }
        for &(x, y) in self.source.index().covers() {
            for k in 0..len {
                edges.insert((x * len + k, y * len + k), self.hat_powers[&(x, y)][k].clone());
            }
        }
        self.unfolded = PosetDiagram::new(index, objects, edges).expect("unfolded arrows match their endpoints");
    }

    pub fn source(&self) -> &RetractedDiagram {
        &self.source
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> usize {
        self.source.nodes()
    }

    pub fn index(&self) -> &Arc<IndexPoset> {
        self.source.index()
    }

    pub fn rho(&self, x: usize) -> &SemilatticeHom {
        &self.rho[x]
    }

    /// `D̂ⁿ(X)` for `1 ≤ n ≤ N`.
    pub fn power(&self, x: usize, n: usize) -> &Arc<FiniteJoinSemilattice> {
        &self.powers[x][n - 1]
    }

    /// The decomposition `D̂ⁿ(X) = D̂(X) Π D̂ⁿ⁻¹(X)` for `2 ≤ n ≤ N`.
    pub fn decomposition(&self, x: usize, n: usize) -> Option<&ProductDecomposition> {
        self.decomps[x][n - 1].as_ref()
    }

    /// `αⁿ: D̂ⁿ(X) → D̂(X)`; the identity at `n = 1`.
    pub fn alpha(&self, x: usize, n: usize) -> &SemilatticeHom {
        &self.alpha[x][n - 1]
    }

    /// `πⁿ: D̂ⁿ(X) → D̂ⁿ⁻¹(X)` for `n ≥ 2`.
    pub fn pi(&self, x: usize, n: usize) -> Option<&SemilatticeHom> {
        self.decomposition(x, n).map(ProductDecomposition::right_proj)
    }

    /// `σⁿ: D̂ⁿ(X) → D̂ⁿ⁺¹(X)` for `1 ≤ n < N`.
    pub fn sigma(&self, x: usize, n: usize) -> &SemilatticeHom {
        &self.sigma[x][n - 1]
    }

    /// `D̂ⁿ(f)` for the arrow `x → y`; the identity when `x = y`.
    pub fn hat_power(&self, x: usize, y: usize, n: usize) -> SemilatticeHom {
        if x == y {
            return SemilatticeHom::identity(self.power(x, n));
        }
        self.hat_powers[&(x, y)][n - 1].clone()
    }

    /// The diagram over `I × {0..N−1}`; node `(x, k)` has index `x·N + k`
    /// and object `D̂ᵏ⁺¹(X)`.
    pub fn unfolded(&self) -> &SemilatticeDiagram {
        &self.unfolded
    }

    pub fn unfolded_node(&self, x: usize, level: usize) -> usize {
        x * self.depth + level
    }

    /// Replaces `σⁿ` at `x`; for fault injection.
    pub fn replace_sigma(&mut self, x: usize, n: usize, sigma: SemilatticeHom) {
        self.sigma[x][n - 1] = sigma;
        self.rebuild_unfolded();
    }

    /// Replaces `D̂ⁿ(f)` for `x → y`; for fault injection.
    pub fn replace_hat_power(&mut self, x: usize, y: usize, n: usize, arrow: SemilatticeHom) {
        if let Some(v) = self.hat_powers.get_mut(&(x, y)) {
            v[n - 1] = arrow;
        }
        self.rebuild_unfolded();
    }

    /// Replaces `μ_X` in the source diagram, keeping every derived table;
    /// for fault injection.
    pub fn replace_mu(&mut self, x: usize, mu: SemilatticeHom) {
        let (base, hat, eps, mut mus) = self.source.clone().into_parts();
        mus[x] = mu;
        self.source = RetractedDiagram::new_unchecked(base, hat, eps, mus).expect("shape is unchanged");
    }

    /// The composite `σ^Y_n ∘ ⋯ ∘ σ^Y_{i+1} ∘ D̂^{i+1}(f) ∘ σ^X_i ∘ ⋯ ∘ σ^X_{m+1}`
    /// from `D̂^{m+1}(X)` to `D̂^{n+1}(Y)`.
    pub fn unfolded_formula(&self, x: usize, y: usize, m: usize, n: usize, i: usize) -> SemilatticeHom {
        let mut acc = SemilatticeHom::identity(self.power(x, m + 1));
        for j in (m + 1)..=i {
            acc = self.sigma(x, j).compose_unchecked(&acc);
        }
        acc = self.hat_power(x, y, i + 1).compose_unchecked(&acc);
        for j in (i + 1)..=n {
            acc = self.sigma(y, j).compose_unchecked(&acc);
        }
        acc
    }

    /// Every identity of the construction as an exact table comparison.
    pub fn verify(&self) -> VerificationLedger {
        let mut l = VerificationLedger::new();
        let rd = &self.source;
        let nodes = self.nodes();
        let pairs = self.index().strict_pairs();
        let report = rd.base().validate();
        l.record("base-functor", "", if report.is_valid() { Ok(()) } else { Err(report.to_string()) });
        let report = rd.hat().validate();
        l.record("hat-functor", "", if report.is_valid() { Ok(()) } else { Err(report.to_string()) });
        for x in 0..nodes {
            let at = loc(&[("x", x)]);
            let id: Vec<usize> = (0..rd.base().object(x).size()).collect();
            l.check_equal("retraction-identity", &at, rd.mu(x).compose_unchecked(rd.eps(x)).map(), &id);
            l.check_equal("rho-definition", &at, self.rho[x].map(), rd.derived_rho(x).map());
            let r = &self.rho[x];
            l.check_equal("rho-idempotent", &at, r.compose_unchecked(r).map(), r.map());
        }
        for &(x, y) in &pairs {
            let at = loc(&[("x", x), ("y", y)]);
            l.record("retraction-eps-square", &at, rd.eps_square(x, y));
            l.record("retraction-mu-square", &at, rd.mu_square(x, y));
            let hf = rd.hat().arrow(x, y).expect("comparable pair");
            l.check_equal(
                "rho-natural",
                &at,
                hf.compose_unchecked(&self.rho[x]).map(),
                self.rho[y].compose_unchecked(&hf).map(),
            );
        }
        for x in 0..nodes {
            let hat_size = rd.hat().object(x).size();
            for n in 1..=self.depth {
                let at = loc(&[("x", x), ("n", n)]);
                let expected = hat_size.pow(n as u32);
                let got = self.power(x, n).size();
                l.record(
                    "power-size",
                    &at,
                    if got == expected { Ok(()) } else { Err(format!("{got} elements, expected {expected}")) },
                );
            }
            for n in 1..self.depth {
                let at = loc(&[("x", x), ("n", n)]);
                let s = self.sigma(x, n);
                l.check_equal(
                    "sigma-alpha",
                    &at,
                    self.alpha(x, n + 1).compose_unchecked(s).map(),
                    self.rho[x].compose_unchecked(self.alpha(x, n)).map(),
                );
                let pi = self.pi(x, n + 1).expect("level n+1 ≥ 2");
                let id: Vec<usize> = (0..self.power(x, n).size()).collect();
                l.check_equal("sigma-section", &at, pi.compose_unchecked(s).map(), &id);
                l.record("sigma-hom", &at, s.check_laws());
            }
        }
        for &(x, y) in &pairs {
            let hf = rd.hat().arrow(x, y).expect("comparable pair");
            for n in 1..=self.depth {
                let at = loc(&[("x", x), ("y", y), ("n", n)]);
                let fn_ = self.hat_power(x, y, n);
                l.record("power-arrow-hom", &at, fn_.check_laws());
                l.check_equal(
                    "alpha-natural",
                    &at,
                    self.alpha(y, n).compose_unchecked(&fn_).map(),
                    hf.compose_unchecked(self.alpha(x, n)).map(),
                );
                if n >= 2 {
                    let prev = self.hat_power(x, y, n - 1);
                    l.check_equal(
                        "power-arrow-right-leg",
                        &at,
                        self.pi(y, n).expect("n ≥ 2").compose_unchecked(&fn_).map(),
                        prev.compose_unchecked(self.pi(x, n).expect("n ≥ 2")).map(),
                    );
                }
                if n < self.depth {
                    let next = self.hat_power(x, y, n + 1);
                    l.check_equal(
                        "sigma-natural",
                        &at,
                        next.compose_unchecked(self.sigma(x, n)).map(),
                        self.sigma(y, n).compose_unchecked(&fn_).map(),
                    );
                }
            }
        }
        let report = self.unfolded.validate();
        l.record("unfold-functor", "", if report.is_valid() { Ok(()) } else { Err(report.to_string()) });
        for x in 0..nodes {
            for y in 0..nodes {
                if !self.index().leq(x, y) {
                    continue;
                }
                for m in 0..self.depth {
                    for n in m..self.depth {
                        if x == y && m == n {
                            continue;
                        }
                        let actual = self
                            .unfolded
                            .arrow(self.unfolded_node(x, m), self.unfolded_node(y, n))
                            .expect("comparable in the product order");
                        for i in m..=n {
                            let at = loc(&[("x", x), ("y", y), ("m", m), ("n", n), ("i", i)]);
                            let formula = self.unfolded_formula(x, y, m, n, i);
                            l.record("unfold-path", &at, tables_agree(formula.map(), actual.map()));
                        }
                    }
                }
            }
        }
        l
    }

    /// Every unfolded arrow is an embedding and every `σⁿ` is a section of
    /// `πⁿ⁺¹`.
    pub fn unfolded_arrows_are_embeddings(&self) -> bool {
        let sections = (0..self.nodes()).all(|x| {
            (1..self.depth).all(|n| {
                let pi = self.pi(x, n + 1).expect("level n+1 ≥ 2");
                let comp = pi.compose_unchecked(self.sigma(x, n));
                comp.map().iter().enumerate().all(|(i, &v)| i == v)
            })
        });
        sections && self.unfolded.edges().values().all(SemilatticeHom::is_embedding)
    }
}
