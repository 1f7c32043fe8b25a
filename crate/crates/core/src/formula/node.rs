use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// Attribute name carried by a leaf.
pub type Attribute = Arc<str>;

/// Connective of an internal gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    /// Conjunction.
    And,
    /// Disjunction.
    Or,
}

impl Gate {
    /// The other connective.
    pub fn dual(self) -> Gate {
        match self {
            Gate::And => Gate::Or,
            Gate::Or => Gate::And,
        }
    }

    pub(crate) fn symbol(self) -> &'static str {
        match self {
            Gate::And => "&",
            Gate::Or => "|",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Gate::And => 0xa076_1d64_78bd_642f,
            Gate::Or => 0xe703_7ed1_a0b4_28db,
        }
    }
}

/// Shape of a node, without its payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// AND gate.
    And,
    /// OR gate.
    Or,
    /// Attribute leaf.
    Leaf,
}

#[derive(Debug)]
enum Body {
    Leaf(Attribute),
    Gate(Gate, Vec<Arc<Node>>),
}

/// A node of a normalized formula tree.
///
/// Nodes are immutable and shared through [`Arc`]; rewriting a formula only
/// rebuilds the spine above the modified subtree. Every node caches its
/// canonical hash and its literal count.
///
/// Gates built through [`Node::gate`] are always normalized: same-kind
/// children are flattened into the parent, children are sorted by
/// (canonical hash, structure), duplicate children are dropped, and a gate
/// left with a single child is replaced by that child.
#[derive(Debug)]
pub struct Node {
    body: Body,
    hash: u64,
    cost: usize,
    local_sites: u64,
    sites: u64,
    compound_edges: u64,
}

const LEAF_TAG: u64 = 0x8ebc_6af0_9c88_c6e3;

fn mix(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^ (x >> 33)
}

fn leaf_hash(name: &str) -> u64 {
    // FNV-1a, then finalized.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix(h ^ LEAF_TAG)
}

fn gate_hash(gate: Gate, children: &[Arc<Node>]) -> u64 {
    let mut h = gate.tag();
    for c in children {
        h = mix(h.rotate_left(23) ^ c.hash).wrapping_add(0x9e37_79b9_7f4a_7c15);
    }
    mix(h ^ (children.len() as u64).wrapping_mul(0x2545_f491_4f6c_dd1d))
}

impl Node {
    /// A leaf for `name`.
    pub fn leaf(name: impl Into<Attribute>) -> Arc<Node> {
        let name = name.into();
        Arc::new(Node {
            hash: leaf_hash(&name),
            body: Body::Leaf(name),
            cost: 1,
            local_sites: 0,
            sites: 0,
            compound_edges: 0,
        })
    }

    /// Normalized gate over `children`.
    ///
    /// # Panics
    ///
    /// Panics if `children` is empty.
    pub fn gate(gate: Gate, children: impl IntoIterator<Item = Arc<Node>>) -> Arc<Node> {
        Node::try_gate(gate, children).expect("gate needs at least one child")
    }

    /// Like [`Node::gate`], returning `None` for an empty child list.
    pub fn try_gate(gate: Gate, children: impl IntoIterator<Item = Arc<Node>>) -> Option<Arc<Node>> {
        let mut flat: Vec<Arc<Node>> = Vec::new();
        for child in children {
            match &child.body {
                Body::Gate(g, grand) if *g == gate => flat.extend(grand.iter().cloned()),
                _ => flat.push(child),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => None,
            1 => flat.pop(),
            _ => Some(Node::from_sorted(gate, flat)),
        }
    }

    /// Builds a gate from children that are already flattened, sorted and
    /// deduplicated.
    pub(crate) fn from_sorted(gate: Gate, children: Vec<Arc<Node>>) -> Arc<Node> {
        debug_assert!(children.len() >= 2);
        debug_assert!(children.windows(2).all(|w| w[0] < w[1]));
        let cost = children.iter().fold(0usize, |a, c| a.saturating_add(c.cost));
        let local_sites = crate::rewrite::count_local_sites(&children);
        let sites = children.iter().fold(local_sites, |a, c| a.saturating_add(c.sites));
        let compound_edges = children.iter().fold(0u64, |a, c| {
            a.saturating_add(c.compound_edges + u64::from(!c.is_leaf()))
        });
        Arc::new(Node {
            hash: gate_hash(gate, &children),
            body: Body::Gate(gate, children),
            cost,
            local_sites,
            sites,
            compound_edges,
        })
    }

    /// Factorization sites whose grandparent is this node.
    pub(crate) fn local_sites(&self) -> u64 {
        self.local_sites
    }

    /// Factorization sites anywhere in this subtree.
    pub(crate) fn sites(&self) -> u64 {
        self.sites
    }

    /// Gate-to-gate edges in this subtree, i.e. defactorization candidates.
    pub(crate) fn compound_edges(&self) -> u64 {
        self.compound_edges
    }

    /// Kind of this node.
    pub fn kind(&self) -> NodeKind {
        match &self.body {
            Body::Leaf(_) => NodeKind::Leaf,
            Body::Gate(Gate::And, _) => NodeKind::And,
            Body::Gate(Gate::Or, _) => NodeKind::Or,
        }
    }

    /// Connective, or `None` for a leaf.
    pub fn gate_kind(&self) -> Option<Gate> {
        match &self.body {
            Body::Leaf(_) => None,
            Body::Gate(g, _) => Some(*g),
        }
    }

    /// Attribute of a leaf.
    pub fn attribute(&self) -> Option<&Attribute> {
        match &self.body {
            Body::Leaf(a) => Some(a),
            Body::Gate(..) => None,
        }
    }

    /// Children in canonical order; empty for a leaf.
    pub fn children(&self) -> &[Arc<Node>] {
        match &self.body {
            Body::Leaf(_) => &[],
            Body::Gate(_, c) => c,
        }
    }

    /// Whether this node is a leaf.
    pub fn is_leaf(&self) -> bool {
        matches!(self.body, Body::Leaf(_))
    }

    /// Canonical digest, invariant under child reordering and same-kind
    /// regrouping.
    pub fn canonical_hash(&self) -> u64 {
        self.hash
    }

    /// Number of leaves below this node.
    pub fn cost(&self) -> usize {
        self.cost
    }

    /// Number of nodes (leaves and gates) in the subtree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Subtree at `path`, if it exists.
    pub fn get(&self, path: &[usize]) -> Option<&Node> {
        let mut node = self;
        for &i in path {
            node = node.children().get(i)?;
        }
        Some(node)
    }

    /// Calls `visit` on every node, parents before children.
    pub fn for_each_preorder<F: FnMut(&[usize], &Node)>(&self, mut visit: F) {
        let mut path = Vec::new();
        self.preorder(&mut path, &mut visit);
    }

    fn preorder<F: FnMut(&[usize], &Node)>(&self, path: &mut Vec<usize>, visit: &mut F) {
        visit(path, self);
        for (i, c) in self.children().iter().enumerate() {
            path.push(i);
            c.preorder(path, visit);
            path.pop();
        }
    }

    /// Rebuilds `this` with the subtree at `path` replaced by `new`,
    /// renormalizing every gate on the way up.
    pub(crate) fn replace(this: &Arc<Node>, path: &[usize], new: Arc<Node>) -> Arc<Node> {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => {
                let gate = this.gate_kind().expect("path descends through a leaf");
                let children = this.children();
                let child = Node::replace(&children[i], rest, new);
                let siblings = children
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, c)| c.clone());
                Node::gate(gate, siblings.chain(core::iter::once(child)))
            }
        }
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        if core::ptr::eq(self, other) {
            return true;
        }
        if self.hash != other.hash || self.cost != other.cost {
            return false;
        }
        match (&self.body, &other.body) {
            (Body::Leaf(a), Body::Leaf(b)) => a == b,
            (Body::Gate(g, a), Body::Gate(h, b)) => {
                g == h && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
            }
            _ => false,
        }
    }
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        if core::ptr::eq(self, other) {
            return Ordering::Equal;
        }
        self.hash
            .cmp(&other.hash)
            .then_with(|| match (&self.body, &other.body) {
                (Body::Leaf(a), Body::Leaf(b)) => a.cmp(b),
                (Body::Leaf(_), Body::Gate(..)) => Ordering::Less,
                (Body::Gate(..), Body::Leaf(_)) => Ordering::Greater,
                (Body::Gate(g, a), Body::Gate(h, b)) => g.cmp(h).then_with(|| a.cmp(b)),
            })
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
