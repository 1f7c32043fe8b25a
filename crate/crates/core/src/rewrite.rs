//! Equivalence-preserving rewrites: factorization and defactorization.
//!
//! A factorization site is a gate `T` with two distinct children (terms)
//! `P1`, `P2` of the dual kind that each contain a structurally equal child
//! `ψ`. Applying it replaces both terms by `ψ ⋄ (P1' ⋆ P2')`, where `P1'`
//! and `P2'` are the terms without `ψ`, `⋆` is `T`'s connective and `⋄` is
//! its dual. The cost drops by at least `cost(ψ)`.
//!
//! A leaf term is treated as a one-element term, so `A | (A & B)` has a site
//! whose factor is the leaf `A` itself. Its remainder is empty (the neutral
//! element of the term's connective), which makes the whole `P1' ⋆ P2'`
//! neutral for `⋄` and collapses the result to `ψ`: this is absorption.
//!
//! A defactorization site is a gate `G` with a gate child `D`; applying it
//! distributes the other children of `G` over every child of `D`. Only
//! sites whose normalized result is strictly more expensive are reported.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;

use crate::formula::{Formula, Node, NodePath};

/// Which rewrite a site describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RewriteKind {
    /// Extract a common factor from two terms.
    Factorization,
    /// Distribute a gate over one compound child.
    Defactorization,
}

/// One side of a factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactorSide {
    /// Index of the term among the grandparent's children.
    pub term: usize,
    /// Index of the factor inside the term; `None` when the term is a leaf
    /// that is itself the factor.
    pub factor: Option<usize>,
}

/// Location of a rewrite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SiteTarget {
    /// `T1` and `T2` under a common grandparent.
    Factorization {
        /// Path of the common grandparent `T`.
        grandparent: NodePath,
        /// Side holding `T1`.
        first: FactorSide,
        /// Side holding `T2`.
        second: FactorSide,
    },
    /// Gate `G` distributed over its child `D`.
    Defactorization {
        /// Path of `G`.
        gate: NodePath,
        /// Index of `D` among `G`'s children.
        child: usize,
    },
}

/// An applicable rewrite in a specific formula.
///
/// Sites are stamped with the canonical hash of the formula they were
/// enumerated from and refuse to apply anywhere else.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RewriteSite {
    /// Where the rewrite applies.
    pub target: SiteTarget,
    /// Predicted cost change. For factorization this is `-cost(T2)`, and the
    /// actual change can only be lower (absorption, deduplication). For
    /// defactorization it is the exact change, always positive.
    pub delta: i64,
    stamp: u64,
}

impl RewriteSite {
    /// Kind of rewrite.
    pub fn kind(&self) -> RewriteKind {
        match self.target {
            SiteTarget::Factorization { .. } => RewriteKind::Factorization,
            SiteTarget::Defactorization { .. } => RewriteKind::Defactorization,
        }
    }

    /// Path of `T` (factorization) or `G` (defactorization).
    pub fn grandparent(&self) -> &NodePath {
        match &self.target {
            SiteTarget::Factorization { grandparent, .. } => grandparent,
            SiteTarget::Defactorization { gate, .. } => gate,
        }
    }

    /// Paths of `T1` and `T2` for a factorization.
    pub fn pair(&self) -> Option<(NodePath, NodePath)> {
        match &self.target {
            SiteTarget::Factorization {
                grandparent,
                first,
                second,
            } => Some((side_path(grandparent, first), side_path(grandparent, second))),
            SiteTarget::Defactorization { .. } => None,
        }
    }

    /// `(G, index of D)` for a defactorization.
    pub fn target(&self) -> Option<(NodePath, usize)> {
        match &self.target {
            SiteTarget::Defactorization { gate, child } => Some((gate.clone(), *child)),
            SiteTarget::Factorization { .. } => None,
        }
    }

    /// Canonical hash of the formula this site belongs to.
    pub fn stamp(&self) -> u64 {
        self.stamp
    }
}

fn side_path(gp: &NodePath, side: &FactorSide) -> NodePath {
    let term = gp.child(side.term);
    match side.factor {
        Some(i) => term.child(i),
        None => term,
    }
}

/// Rewrite application failure.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    /// The site was enumerated from a different formula.
    #[error("stale site: enumerated from formula {expected:#018x}, applied to {found:#018x}")]
    Stale {
        /// Stamp carried by the site.
        expected: u64,
        /// Canonical hash of the formula it was applied to.
        found: u64,
    },
    /// A factorization site passed to defactorization or vice versa.
    #[error("expected a {0:?} site")]
    WrongKind(RewriteKind),
    /// The site does not describe a valid rewrite of this formula.
    #[error("invalid site: {0}")]
    Invalid(&'static str),
}

fn check_stamp(f: &Formula, site: &RewriteSite) -> Result<(), RewriteError> {
    if site.stamp != f.canonical_hash() {
        return Err(RewriteError::Stale {
            expected: site.stamp,
            found: f.canonical_hash(),
        });
    }
    Ok(())
}

fn factor_of<'a>(term: &'a Arc<Node>, factor: Option<usize>) -> Option<&'a Arc<Node>> {
    match factor {
        None if term.is_leaf() => Some(term),
        None => None,
        Some(i) if !term.is_leaf() => term.children().get(i),
        Some(_) => None,
    }
}

/// Candidate factors under one grandparent, sorted by (hash, term, factor).
fn factor_entries(children: &[Arc<Node>]) -> Vec<(u64, usize, Option<usize>)> {
    let mut entries = Vec::new();
    for (i, term) in children.iter().enumerate() {
        if term.is_leaf() {
            entries.push((term.canonical_hash(), i, None));
        } else {
            for (a, c) in term.children().iter().enumerate() {
                entries.push((c.canonical_hash(), i, Some(a)));
            }
        }
    }
    entries.sort_unstable();
    entries
}

/// Calls `visit` on each factorization site whose grandparent has these
/// children, in canonical order, until it returns `true`.
fn visit_local_sites<F>(children: &[Arc<Node>], mut visit: F)
where
    F: FnMut(FactorSide, FactorSide, &Arc<Node>) -> bool,
{
    let entries = factor_entries(children);
    let mut start = 0;
    while start < entries.len() {
        let hash = entries[start].0;
        let mut end = start + 1;
        while end < entries.len() && entries[end].0 == hash {
            end += 1;
        }
        for x in start..end {
            for y in x + 1..end {
                let (_, ti, fi) = entries[x];
                let (_, tj, fj) = entries[y];
                if ti == tj {
                    continue;
                }
                let a = factor_of(&children[ti], fi).expect("indexed factor");
                let b = factor_of(&children[tj], fj).expect("indexed factor");
                if a == b
                    && visit(
                        FactorSide { term: ti, factor: fi },
                        FactorSide { term: tj, factor: fj },
                        b,
                    )
                {
                    return;
                }
            }
        }
        start = end;
    }
}

/// Number of factorization sites under a gate with these children.
pub(crate) fn count_local_sites(children: &[Arc<Node>]) -> u64 {
    let mut n = 0;
    visit_local_sites(children, |_, _, _| {
        n += 1;
        false
    });
    n
}

fn factorization_site(path: &[usize], first: FactorSide, second: FactorSide, psi: &Node, stamp: u64) -> RewriteSite {
    RewriteSite {
        target: SiteTarget::Factorization {
            grandparent: NodePath(path.to_vec()),
            first,
            second,
        },
        delta: -(psi.cost() as i64),
        stamp,
    }
}

/// Every factorization site of `f`, each unordered pair once.
///
/// Candidate factors are bucketed by canonical hash per grandparent; equal
/// hashes are confirmed structurally. The order is deterministic: preorder
/// over grandparents, then by factor hash, then by term index.
pub fn find_factorization_sites(f: &Formula) -> Vec<RewriteSite> {
    fn collect(node: &Node, path: &mut Vec<usize>, stamp: u64, out: &mut Vec<RewriteSite>) {
        if node.sites() == 0 {
            return;
        }
        if node.local_sites() > 0 {
            visit_local_sites(node.children(), |a, b, psi| {
                out.push(factorization_site(path, a, b, psi, stamp));
                false
            });
        }
        for (i, c) in node.children().iter().enumerate() {
            path.push(i);
            collect(c, path, stamp, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    collect(f.root(), &mut Vec::new(), f.canonical_hash(), &mut out);
    out
}

/// Number of factorization sites of `f`, without enumerating them.
pub fn count_factorization_sites(f: &Formula) -> u64 {
    f.root().sites()
}

/// The `index`-th entry of [`find_factorization_sites`], found by walking
/// one root-to-grandparent path using the per-node site counts.
pub fn nth_factorization_site(f: &Formula, mut index: u64) -> Option<RewriteSite> {
    let mut node: &Node = f.root();
    let mut path = Vec::new();
    if index >= node.sites() {
        return None;
    }
    loop {
        if index < node.local_sites() {
            let mut found = None;
            visit_local_sites(node.children(), |a, b, psi| {
                if index == 0 {
                    found = Some(factorization_site(&path, a, b, psi, f.canonical_hash()));
                    return true;
                }
                index -= 1;
                false
            });
            return found;
        }
        index -= node.local_sites();
        let (i, child) = node
            .children()
            .iter()
            .enumerate()
            .find(|(_, c)| {
                if index < c.sites() {
                    true
                } else {
                    index -= c.sites();
                    false
                }
            })
            .expect("site counts are consistent");
        path.push(i);
        node = child;
    }
}

/// Term without its factor; `None` when nothing is left.
fn remainder(term: &Arc<Node>, factor: Option<usize>) -> Option<Arc<Node>> {
    let i = factor?;
    let gate = term.gate_kind()?;
    let rest = term
        .children()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, c)| c.clone());
    Node::try_gate(gate, rest)
}

/// Applies a factorization site, absorbing emptied terms.
pub fn apply_factorization(f: &Formula, site: &RewriteSite) -> Result<Formula, RewriteError> {
    let SiteTarget::Factorization {
        grandparent,
        first,
        second,
    } = &site.target
    else {
        return Err(RewriteError::WrongKind(RewriteKind::Factorization));
    };
    check_stamp(f, site)?;
    let t = f
        .node(grandparent)
        .ok_or(RewriteError::Invalid("no node at grandparent path"))?;
    let gate = t.gate_kind().ok_or(RewriteError::Invalid("grandparent is a leaf"))?;
    let children = t.children();
    if first.term == second.term {
        return Err(RewriteError::Invalid("factor sides share a parent"));
    }
    let p1 = children
        .get(first.term)
        .ok_or(RewriteError::Invalid("term index out of range"))?;
    let p2 = children
        .get(second.term)
        .ok_or(RewriteError::Invalid("term index out of range"))?;
    let psi1 = factor_of(p1, first.factor).ok_or(RewriteError::Invalid("bad factor index"))?;
    let psi2 = factor_of(p2, second.factor).ok_or(RewriteError::Invalid("bad factor index"))?;
    if psi1 != psi2 {
        return Err(RewriteError::Invalid("factors differ"));
    }

    let merged = match (remainder(p1, first.factor), remainder(p2, second.factor)) {
        (Some(r1), Some(r2)) => Node::gate(gate.dual(), [psi1.clone(), Node::gate(gate, [r1, r2])]),
        // An empty remainder is the neutral element of the term's connective,
        // which absorbs the whole bracket.
        _ => psi1.clone(),
    };
    let others = children
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != first.term && i != second.term)
        .map(|(_, c)| c.clone());
    let new_t = Node::gate(gate, others.chain(core::iter::once(merged)));
    Ok(f.replace(grandparent, new_t))
}

fn distribute(f: &Formula, gate_path: &NodePath, child: usize) -> Option<Formula> {
    let g = f.node(gate_path)?;
    let kind = g.gate_kind()?;
    let d = g.children().get(child)?;
    if d.is_leaf() {
        return None;
    }
    let rest: Vec<Arc<Node>> = g
        .children()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != child)
        .map(|(_, c)| c.clone())
        .collect();
    let terms = d
        .children()
        .iter()
        .map(|di| Node::gate(kind, rest.iter().cloned().chain(core::iter::once(di.clone()))));
    Some(f.replace(gate_path, Node::gate(kind.dual(), terms)))
}

/// All `(G, D)` pairs with `D` a gate child of `G`, before the
/// strict-increase filter, in preorder.
pub(crate) fn defactorization_candidates(f: &Formula) -> Vec<(NodePath, usize)> {
    let mut out = Vec::new();
    f.root().for_each_preorder(|path, node| {
        for (i, c) in node.children().iter().enumerate() {
            if !c.is_leaf() {
                out.push((NodePath(path.to_vec()), i));
            }
        }
    });
    out
}

/// The `index`-th entry of [`defactorization_candidates`].
fn nth_defactorization_candidate(f: &Formula, mut index: u64) -> Option<(NodePath, usize)> {
    let mut node: &Node = f.root();
    let mut path = Vec::new();
    if index >= node.compound_edges() {
        return None;
    }
    loop {
        let children = node.children();
        let local = children.iter().filter(|c| !c.is_leaf()).count() as u64;
        if index < local {
            let child = children
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_leaf())
                .nth(index as usize)
                .map(|(i, _)| i)?;
            return Some((NodePath(path), child));
        }
        index -= local;
        let (i, next) = children
            .iter()
            .enumerate()
            .find(|(_, c)| {
                if index < c.compound_edges() {
                    true
                } else {
                    index -= c.compound_edges();
                    false
                }
            })
            .expect("edge counts are consistent");
        path.push(i);
        node = next;
    }
}

/// Every defactorization site of `f` whose result is strictly more
/// expensive.
///
/// Distribution can trigger deduplication (for instance when `G`'s other
/// children already occur inside `D`, or a new term equals a sibling of
/// `G`); those degenerate sites are skipped, so every reported site has
/// `delta > 0`.
pub fn find_defactorization_sites(f: &Formula) -> Vec<RewriteSite> {
    let stamp = f.canonical_hash();
    defactorization_candidates(f)
        .into_iter()
        .filter_map(|(gate, child)| {
            let out = distribute(f, &gate, child)?;
            let delta = out.cost() as i64 - f.cost() as i64;
            (delta > 0).then(|| RewriteSite {
                target: SiteTarget::Defactorization { gate, child },
                delta,
                stamp,
            })
        })
        .collect()
}

/// Applies one distribution step.
pub fn apply_defactorization(f: &Formula, site: &RewriteSite) -> Result<Formula, RewriteError> {
    let SiteTarget::Defactorization { gate, child } = &site.target else {
        return Err(RewriteError::WrongKind(RewriteKind::Defactorization));
    };
    check_stamp(f, site)?;
    distribute(f, gate, *child).ok_or(RewriteError::Invalid("no compound child at target"))
}

/// Applies either kind of site.
pub fn apply(f: &Formula, site: &RewriteSite) -> Result<Formula, RewriteError> {
    match site.kind() {
        RewriteKind::Factorization => apply_factorization(f, site),
        RewriteKind::Defactorization => apply_defactorization(f, site),
    }
}

/// Applies a uniformly chosen factorization site, or returns `None` at a
/// local optimum.
pub fn random_factorization<R: Rng + ?Sized>(f: &Formula, rng: &mut R) -> Option<Formula> {
    let total = count_factorization_sites(f);
    if total == 0 {
        return None;
    }
    let site = nth_factorization_site(f, rng.gen_range(0..total)).expect("index below count");
    Some(apply_factorization(f, &site).expect("freshly enumerated site"))
}

/// Applies a uniformly chosen cost-increasing defactorization site.
///
/// Candidates are drawn without replacement until one passes the
/// strict-increase filter, which is uniform over the valid sites without
/// evaluating all of them.
pub fn random_defactorization<R: Rng + ?Sized>(f: &Formula, rng: &mut R) -> Option<Formula> {
    let total = f.root().compound_edges();
    let mut tried = BTreeSet::new();
    while (tried.len() as u64) < total {
        let index = rng.gen_range(0..total);
        if !tried.insert(index) {
            continue;
        }
        let (gate, child) = nth_defactorization_candidate(f, index).expect("index below count");
        if let Some(out) = distribute(f, &gate, child) {
            if out.cost() > f.cost() {
                return Some(out);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::oracle::{equivalent, EquivalenceMode};

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    fn factor_text(g: &Formula, site: &RewriteSite) -> alloc::string::String {
        use alloc::string::ToString;
        let (t1, _) = site.pair().unwrap();
        g.node(&t1).unwrap().to_string()
    }

    #[test]
    fn common_factor_site() {
        let g = f("((A & B) | (A & C))");
        let sites = find_factorization_sites(&g);
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].delta, -1);
        assert_eq!(factor_text(&g, &sites[0]), "A");
        let out = apply_factorization(&g, &sites[0]).unwrap();
        assert_eq!(out, f("(A & (B | C))"));
        assert_eq!(out.cost(), 3);
    }

    #[test]
    fn no_sites_in_optimal_or_disjoint_formulas() {
        assert!(find_factorization_sites(&f("(In2 & (In1 | In3))")).is_empty());
        assert!(find_factorization_sites(&f("((A & B) | (C & D))")).is_empty());
        assert!(find_factorization_sites(&f("A")).is_empty());
    }

    #[test]
    fn absorption_is_embedded() {
        let g = f("(A | (A & B))");
        let sites = find_factorization_sites(&g);
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].delta, -1);
        let out = apply_factorization(&g, &sites[0]).unwrap();
        assert_eq!(out, f("A"));
        assert_eq!(out.cost(), 1);

        let dual = f("A & (A | B) & C");
        let out = apply_factorization(&dual, &find_factorization_sites(&dual)[0]).unwrap();
        assert_eq!(out, f("A & C"));
    }

    #[test]
    fn shared_input_factorization() {
        let g = f("((In1 & In2) | (In2 & In3))");
        let sites = find_factorization_sites(&g);
        assert_eq!(sites.len(), 1);
        let out = apply_factorization(&g, &sites[0]).unwrap();
        assert_eq!(out.to_text(), "(In2 & (In1 | In3))");
    }

    #[test]
    fn nested_grandparent_and_collapse() {
        // The OR grandparent has exactly the two terms, so it collapses and
        // the result merges into the enclosing AND.
        let g = f("Z & ((A & B) | (A & C))");
        let out = apply_factorization(&g, &find_factorization_sites(&g)[0]).unwrap();
        assert_eq!(out, f("Z & A & (B | C)"));
    }

    #[test]
    fn defactorization_examples() {
        let g = f("(A & (B | C))");
        let sites = find_defactorization_sites(&g);
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].delta, 1);
        let out = apply_defactorization(&g, &sites[0]).unwrap();
        assert_eq!(out, f("((A & B) | (A & C))"));

        let g = f("(A & B & (C | D))");
        let out = apply_defactorization(&g, &find_defactorization_sites(&g)[0]).unwrap();
        assert_eq!(out, f("((A & B & C) | (A & B & D))"));
        assert_eq!(out.cost(), 6);
        assert_eq!(equivalent(&g, &out, EquivalenceMode::Exhaustive), Ok(true));

        assert!(find_defactorization_sites(&f("A")).is_empty());
        let g = f("((A & B) | (C & D))");
        let sites = find_defactorization_sites(&g);
        assert_eq!(sites.len(), 2);
        for s in &sites {
            let out = apply_defactorization(&g, s).unwrap();
            assert_eq!(out.cost(), 6);
            assert_eq!(equivalent(&g, &out, EquivalenceMode::Exhaustive), Ok(true));
        }
    }

    #[test]
    fn degenerate_distribution_is_filtered() {
        // Distributing A over (A & C | B) yields (A & C) | (A & B): no increase.
        let g = f("A & (B | (A & C))");
        let sites = find_defactorization_sites(&g);
        assert!(sites.iter().all(|s| s.delta > 0));
        assert!(sites
            .iter()
            .all(|s| s.target() != Some((NodePath::root(), 1))
                || apply_defactorization(&g, s).unwrap().cost() > g.cost()));
        assert_eq!(defactorization_candidates(&g).len(), 2);
        assert_eq!(sites.len(), 1);
    }

    #[test]
    fn stale_and_wrong_kind() {
        let g = f("((A & B) | (A & C))");
        let site = find_factorization_sites(&g)[0].clone();
        let other = f("((A & B) | (A & D))");
        assert!(matches!(
            apply_factorization(&other, &site),
            Err(RewriteError::Stale { .. })
        ));
        assert_eq!(
            apply_defactorization(&g, &site),
            Err(RewriteError::WrongKind(RewriteKind::Defactorization))
        );
        let d = find_defactorization_sites(&g)[0].clone();
        assert_eq!(
            apply_factorization(&g, &d),
            Err(RewriteError::WrongKind(RewriteKind::Factorization))
        );
    }

    #[test]
    fn indexed_selection_matches_enumeration() {
        for text in [
            "((A & B) | (A & C) | (B & C & D) | (A & D))",
            "(A | (A & B)) & (C | (A & (D | E)) | (A & E))",
            "Z & ((A & B) | (A & C))",
        ] {
            let g = f(text);
            let sites = find_factorization_sites(&g);
            assert_eq!(count_factorization_sites(&g), sites.len() as u64);
            for (i, s) in sites.iter().enumerate() {
                assert_eq!(nth_factorization_site(&g, i as u64).as_ref(), Some(s));
            }
            assert_eq!(nth_factorization_site(&g, sites.len() as u64), None);
            let cands = defactorization_candidates(&g);
            for (i, c) in cands.iter().enumerate() {
                assert_eq!(nth_defactorization_candidate(&g, i as u64).as_ref(), Some(c));
            }
            assert_eq!(nth_defactorization_candidate(&g, cands.len() as u64), None);
        }
    }

    #[test]
    fn site_accessors() {
        let g = f("((A & B) | (A & C))");
        let s = &find_factorization_sites(&g)[0];
        assert_eq!(s.kind(), RewriteKind::Factorization);
        assert_eq!(s.grandparent(), &NodePath::root());
        let (p1, p2) = s.pair().unwrap();
        assert_ne!(p1.parent(), p2.parent());
        assert_eq!(p1.parent().unwrap().parent(), p2.parent().unwrap().parent());
        assert!(s.target().is_none());
        assert_eq!(s.stamp(), g.canonical_hash());
    }
}
