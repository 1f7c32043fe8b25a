//! Monotone Boolean formulas in normalized alternating form.
//!
//! A [`Formula`] is a tree of n-ary AND/OR gates over attribute leaves. No
//! AND gate has an AND child, no OR gate has an OR child, every gate has at
//! least two children and no gate has two structurally equal children.
//! Structural equality is modulo commutativity and associativity; it is
//! decided by comparing canonical hashes first and structure second.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

mod node;
pub mod oracle;
mod parse;
mod print;

pub use node::{Attribute, Gate, Node, NodeKind};
pub use parse::{ParseError, ParseErrorKind};

/// Child-index path from the root to a node.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    /// The root.
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    /// Path extended by one child index.
    pub fn child(&self, index: usize) -> Self {
        let mut v = self.0.clone();
        v.push(index);
        NodePath(v)
    }

    /// Path of the parent, or `None` at the root.
    pub fn parent(&self) -> Option<NodePath> {
        let (_, init) = self.0.split_last()?;
        Some(NodePath(init.to_vec()))
    }

    /// Number of edges from the root.
    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Raw indices.
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("/")?;
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            write!(f, "{idx}")?;
        }
        Ok(())
    }
}

/// A normalized monotone Boolean formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Formula {
    root: Arc<Node>,
}

/// Error from [`Formula::evaluate`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("assignment has no value for attribute `{0}`")]
pub struct MissingAttribute(pub Attribute);

impl Formula {
    /// Wraps a normalized root node.
    pub fn new(root: Arc<Node>) -> Self {
        Formula { root }
    }

    /// Single-attribute formula.
    pub fn leaf(name: &str) -> Self {
        Formula::new(Node::leaf(name))
    }

    /// Parses the textual grammar (`&`/`AND`, `|`/`OR`, parentheses).
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse::parse(text)
    }

    /// Root node.
    pub fn root(&self) -> &Arc<Node> {
        &self.root
    }

    /// Literal count: leaves of the tree, which is also the number of
    /// root-to-input paths and hence the number of secret shares.
    pub fn cost(&self) -> usize {
        self.root.cost()
    }

    /// Canonical digest of the whole formula.
    pub fn canonical_hash(&self) -> u64 {
        self.root.canonical_hash()
    }

    /// Node count.
    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// Node at `path`.
    pub fn node(&self, path: &NodePath) -> Option<&Node> {
        self.root.get(path.as_slice())
    }

    /// Distinct attributes, lexicographically ordered.
    pub fn attributes(&self) -> AttributeUniverse {
        let mut names = BTreeSet::new();
        self.root.for_each_preorder(|_, n| {
            if let Some(a) = n.attribute() {
                names.insert(a.clone());
            }
        });
        AttributeUniverse {
            names: names.into_iter().collect(),
        }
    }

    /// Number of occurrences of each attribute.
    pub fn occurrences(&self) -> BTreeMap<Attribute, usize> {
        let mut counts = BTreeMap::new();
        self.root.for_each_preorder(|_, n| {
            if let Some(a) = n.attribute() {
                *counts.entry(a.clone()).or_insert(0) += 1;
            }
        });
        counts
    }

    /// Evaluates under `assignment`, which must cover every attribute; the
    /// first uncovered attribute in name order is reported.
    pub fn evaluate<K>(&self, assignment: &BTreeMap<K, bool>) -> Result<bool, MissingAttribute>
    where
        K: core::borrow::Borrow<str> + Ord,
    {
        if let Some(missing) = self
            .attributes()
            .names()
            .iter()
            .find(|n| !assignment.contains_key(&***n))
        {
            return Err(MissingAttribute(missing.clone()));
        }
        let on: BTreeSet<&str> = assignment
            .iter()
            .filter(|(_, v)| **v)
            .map(|(k, _)| k.borrow())
            .collect();
        Ok(self.evaluate_set(&on))
    }

    /// Evaluates with exactly the attributes in `true_attributes` set.
    pub fn evaluate_set(&self, true_attributes: &BTreeSet<&str>) -> bool {
        fn eval(node: &Node, on: &BTreeSet<&str>) -> bool {
            match node.gate_kind() {
                None => on.contains(&**node.attribute().expect("leaf")),
                Some(Gate::And) => node.children().iter().all(|c| eval(c, on)),
                Some(Gate::Or) => node.children().iter().any(|c| eval(c, on)),
            }
        }
        eval(&self.root, true_attributes)
    }

    /// Returns the formula with the node at `path` replaced, renormalized.
    pub fn replace(&self, path: &NodePath, new: Arc<Node>) -> Formula {
        Formula::new(Node::replace(&self.root, path.as_slice(), new))
    }

    /// Canonical text form; round-trips through [`Formula::parse`].
    pub fn to_text(&self) -> String {
        print::print(&self.root)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::parse(s)
    }
}

/// Ordered set of distinct attribute names, in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttributeUniverse {
    names: Vec<Attribute>,
}

impl AttributeUniverse {
    /// Builds a universe from arbitrary names, deduplicating and sorting.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Attribute>,
    {
        let set: BTreeSet<Attribute> = names.into_iter().map(Into::into).collect();
        AttributeUniverse {
            names: set.into_iter().collect(),
        }
    }

    /// Union of two universes.
    pub fn union(&self, other: &AttributeUniverse) -> AttributeUniverse {
        AttributeUniverse::from_names(self.names.iter().chain(&other.names).cloned())
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Whether the universe is empty.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Position of `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| (**n).cmp(name)).ok()
    }

    /// Names in order.
    pub fn names(&self) -> &[Attribute] {
        &self.names
    }
}
