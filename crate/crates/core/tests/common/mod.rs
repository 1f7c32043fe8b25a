#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use boolmin_core::{Formula, Gate, Node};
use proptest::prelude::*;

pub const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Random normalized formulas over a small alphabet, so repeated subterms
/// (and therefore rewrite sites) are common.
pub fn formula(vars: usize, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = (0..vars).prop_map(|i| Node::leaf(NAMES[i]));
    leaf.prop_recursive(depth, 48, 4, |inner| {
        (any::<bool>(), prop::collection::vec(inner, 2..=4))
            .prop_map(|(and, kids)| Node::gate(if and { Gate::And } else { Gate::Or }, kids))
    })
    .prop_map(Formula::new)
}

/// Tree-walking evaluation, independent of the library's oracle.
pub fn eval(node: &Node, truth: &BTreeSet<&str>) -> bool {
    match node.gate_kind() {
        None => truth.contains(&**node.attribute().unwrap()),
        Some(Gate::And) => node.children().iter().all(|c| eval(c, truth)),
        Some(Gate::Or) => node.children().iter().any(|c| eval(c, truth)),
    }
}

/// Compares two formulas on every assignment of their joint attributes.
pub fn same_function(f: &Formula, g: &Formula) -> bool {
    let names: Vec<String> = f
        .attributes()
        .union(&g.attributes())
        .names()
        .iter()
        .map(|n| n.to_string())
        .collect();
    assert!(names.len() <= 16, "too many variables for brute force");
    (0u32..1 << names.len()).all(|m| {
        let truth: BTreeSet<&str> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| m >> i & 1 == 1)
            .map(|(_, n)| n.as_str())
            .collect();
        eval(f.root(), &truth) == eval(g.root(), &truth)
    })
}

/// All nodes with their paths, preorder.
pub fn nodes(f: &Formula) -> Vec<(Vec<usize>, Arc<Node>)> {
    fn walk(n: &Arc<Node>, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Arc<Node>)>) {
        out.push((path.clone(), n.clone()));
        for (i, c) in n.children().iter().enumerate() {
            path.push(i);
            walk(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(f.root(), &mut Vec::new(), &mut out);
    out
}

/// Factorization sites by pairwise scan over candidate factors.
///
/// A candidate is a node `u` read either as the factor of its parent term
/// (the term being a child of the grandparent `T`), or, for a leaf, as its
/// own term directly under `T`. Two candidates form a site when they have
/// the same grandparent, different terms, and print identically.
pub fn brute_force_sites(f: &Formula) -> usize {
    struct Cand {
        grandparent: Vec<usize>,
        term: Vec<usize>,
        text: String,
    }
    let mut cands = Vec::new();
    for (path, node) in nodes(f) {
        let text = Formula::new(node.clone()).to_text();
        if node.is_leaf() && !path.is_empty() {
            cands.push(Cand {
                grandparent: path[..path.len() - 1].to_vec(),
                term: path.clone(),
                text: text.clone(),
            });
        }
        if path.len() >= 2 {
            cands.push(Cand {
                grandparent: path[..path.len() - 2].to_vec(),
                term: path[..path.len() - 1].to_vec(),
                text,
            });
        }
    }
    let mut count = 0;
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            let (x, y) = (&cands[i], &cands[j]);
            if x.grandparent == y.grandparent && x.term != y.term && x.text == y.text {
                count += 1;
            }
        }
    }
    count
}

/// Leaf occurrences counted from the printed text.
pub fn leaves_in_text(text: &str) -> usize {
    text.split(|c: char| "()&| ".contains(c))
        .filter(|t| !t.is_empty())
        .count()
}
