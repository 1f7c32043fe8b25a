//! Monotone Boolean circuits (DAGs with fan-out) and their path counts.
//!
//! In circuit-based KP-ABE the secret is shared top-down from the output
//! gate; an input receives one share per directed path from it to the
//! output, and decryption spends one pairing per share. The share count of a
//! circuit is therefore its number of input-to-output paths, which equals
//! the literal count of the unfolded formula.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::formula::oracle::{Program, TruthSource};
use crate::formula::{Attribute, AttributeUniverse, Formula, Gate, MissingAttribute, Node};

/// Default limit on the leaf count of an unfolded circuit.
pub const DEFAULT_UNFOLD_CAP: u64 = 1_000_000;

/// A circuit node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitNode {
    /// Input wire carrying an attribute.
    Input(Attribute),
    /// Gate reading the listed nodes.
    Gate(Gate, Vec<usize>),
}

impl CircuitNode {
    fn inputs(&self) -> &[usize] {
        match self {
            CircuitNode::Input(_) => &[],
            CircuitNode::Gate(_, c) => c,
        }
    }
}

/// A structural defect found by [`Circuit::validate`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CircuitIssue {
    /// The designated output index does not exist.
    #[error("output index {0} is out of range")]
    BadOutput(usize),
    /// An edge points past the node list.
    #[error("node `{node}` reads nonexistent node #{target}")]
    DanglingEdge {
        /// Reading node.
        node: String,
        /// Missing index.
        target: usize,
    },
    /// A gate with fewer than two inputs.
    #[error("gate `{node}` has fan-in {fan_in}, need at least 2")]
    FanIn {
        /// Gate id.
        node: String,
        /// Its fan-in.
        fan_in: usize,
    },
    /// The same wire feeds a gate twice.
    #[error("gate `{node}` reads `{input}` more than once")]
    DuplicateEdge {
        /// Gate id.
        node: String,
        /// Repeated input id.
        input: String,
    },
    /// A directed cycle through this node.
    #[error("cycle through `{0}`")]
    Cycle(String),
    /// Node not reachable from the output.
    #[error("node `{0}` does not reach the output")]
    Unreachable(String),
    /// More than one node has no consumer.
    #[error("multiple outputs: {0:?}")]
    MultipleOutputs(Vec<String>),
    /// A gate two of whose inputs compute the same subformula (after
    /// flattening same-kind gates). Such a gate has more paths than its
    /// unfolded formula has literals.
    #[error("gate `{0}` has structurally duplicate inputs")]
    RedundantInputs(String),
}

/// Failure of a circuit operation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    /// The circuit failed validation.
    #[error("invalid circuit: {}", .0.first().map(|i| alloc::format!("{i}")).unwrap_or_default())]
    Invalid(Vec<CircuitIssue>),
    /// Path count does not fit in 64 bits.
    #[error("path count overflows 64 bits")]
    Overflow,
    /// Unfolding would exceed the leaf cap.
    #[error("unfolded formula would have {leaves} leaves, cap is {cap}")]
    UnfoldTooLarge {
        /// Leaves the unfolded formula would have.
        leaves: u64,
        /// Configured cap.
        cap: u64,
    },
}

/// Paths from inputs to the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCount {
    /// Total number of input-to-output paths.
    pub total: u64,
    /// Paths starting at inputs labeled with each attribute.
    pub per_attribute: BTreeMap<Attribute, u64>,
}

/// A monotone Boolean circuit with one output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    ids: Vec<String>,
    nodes: Vec<CircuitNode>,
    output: usize,
}

impl Circuit {
    /// Assembles a circuit from `(id, node)` pairs; edges are indices into
    /// the same list. Nothing is checked here; see [`Circuit::validate`].
    pub fn new(nodes: Vec<(String, CircuitNode)>, output: usize) -> Self {
        let (ids, nodes) = nodes.into_iter().unzip();
        Circuit { ids, nodes, output }
    }

    /// Node list.
    pub fn nodes(&self) -> &[CircuitNode] {
        &self.nodes
    }

    /// Node ids, parallel to [`Circuit::nodes`].
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Index of the output node.
    pub fn output(&self) -> usize {
        self.output
    }

    /// Structural checks. Returns every issue found rather than stopping at
    /// the first.
    pub fn validate(&self) -> Result<(), Vec<CircuitIssue>> {
        let n = self.nodes.len();
        let mut issues = Vec::new();
        if self.output >= n {
            return Err(vec![CircuitIssue::BadOutput(self.output)]);
        }
        for (i, node) in self.nodes.iter().enumerate() {
            for &t in node.inputs() {
                if t >= n {
                    issues.push(CircuitIssue::DanglingEdge {
                        node: self.ids[i].clone(),
                        target: t,
                    });
                }
            }
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let CircuitNode::Gate(_, inputs) = node {
                if inputs.len() < 2 {
                    issues.push(CircuitIssue::FanIn {
                        node: self.ids[i].clone(),
                        fan_in: inputs.len(),
                    });
                }
                let mut sorted = inputs.clone();
                sorted.sort_unstable();
                for w in sorted.windows(2) {
                    if w[0] == w[1] {
                        issues.push(CircuitIssue::DuplicateEdge {
                            node: self.ids[i].clone(),
                            input: self.ids[w[0]].clone(),
                        });
                    }
                }
            }
        }

        let cyclic = self.cycle_members();
        for &i in &cyclic {
            issues.push(CircuitIssue::Cycle(self.ids[i].clone()));
        }

        let reach = self.reachable_from_output();
        for (i, r) in reach.iter().enumerate() {
            if !r {
                issues.push(CircuitIssue::Unreachable(self.ids[i].clone()));
            }
        }
        let mut consumed = vec![false; n];
        for node in &self.nodes {
            for &t in node.inputs() {
                consumed[t] = true;
            }
        }
        let sinks: Vec<String> = (0..n).filter(|&i| !consumed[i]).map(|i| self.ids[i].clone()).collect();
        if sinks.len() > 1 {
            issues.push(CircuitIssue::MultipleOutputs(sinks));
        }

        if cyclic.is_empty() && issues.is_empty() {
            issues.extend(self.redundant_gates());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    /// Nodes on some directed cycle, found by an iterative three-color DFS.
    fn cycle_members(&self) -> Vec<usize> {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.nodes.len();
        let mut color = vec![WHITE; n];
        let mut on_cycle = vec![false; n];
        for start in 0..n {
            if color[start] != WHITE {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            color[start] = GRAY;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                let inputs = self.nodes[v].inputs();
                if *next < inputs.len() {
                    let w = inputs[*next];
                    *next += 1;
                    match color[w] {
                        WHITE => {
                            color[w] = GRAY;
                            stack.push((w, 0));
                        }
                        GRAY => {
                            // Back edge: mark the stack segment from w to v.
                            let from = stack.iter().position(|&(u, _)| u == w).unwrap_or(0);
                            for &(u, _) in &stack[from..] {
                                on_cycle[u] = true;
                            }
                        }
                        _ => {}
                    }
                } else {
                    color[v] = BLACK;
                    stack.pop();
                }
            }
        }
        (0..n).filter(|&i| on_cycle[i]).collect()
    }

    fn reachable_from_output(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.output];
        seen[self.output] = true;
        while let Some(v) = stack.pop() {
            for &w in self.nodes[v].inputs() {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Nodes reachable from the output, inputs before their consumers and
    /// the output last. Back edges are ignored, so this terminates on
    /// cyclic input too.
    fn topological_order(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = vec![(self.output, 0)];
        state[self.output] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let inputs = self.nodes[v].inputs();
            if *next < inputs.len() {
                let w = inputs[*next];
                *next += 1;
                if state[w] == 0 {
                    state[w] = 1;
                    stack.push((w, 0));
                }
            } else {
                state[v] = 2;
                order.push(v);
                stack.pop();
            }
        }
        order
    }

    /// Canonical formula node of every reachable node, sharing subtrees.
    fn canonical_nodes(&self) -> Vec<Option<Arc<Node>>> {
        let mut memo: Vec<Option<Arc<Node>>> = vec![None; self.nodes.len()];
        for v in self.topological_order() {
            memo[v] = Some(match &self.nodes[v] {
                CircuitNode::Input(a) => Node::leaf(a.clone()),
                CircuitNode::Gate(g, inputs) => {
                    Node::gate(*g, inputs.iter().map(|&i| memo[i].clone().expect("input before gate")))
                }
            });
        }
        memo
    }

    fn redundant_gates(&self) -> Vec<CircuitIssue> {
        // Paths from each node down to the inputs, saturating.
        let order = self.topological_order();
        let mut below = vec![0u64; self.nodes.len()];
        for &v in &order {
            below[v] = match &self.nodes[v] {
                CircuitNode::Input(_) => 1,
                CircuitNode::Gate(_, inputs) => inputs.iter().fold(0u64, |acc, &i| acc.saturating_add(below[i])),
            };
        }
        let memo = self.canonical_nodes();
        let mut out = Vec::new();
        for &v in &order {
            let CircuitNode::Gate(_, inputs) = &self.nodes[v] else {
                continue;
            };
            let node = memo[v].as_ref().expect("reachable");
            let inputs_ok = inputs
                .iter()
                .all(|&i| memo[i].as_ref().map(|m| m.cost() as u64) == Some(below[i]));
            if inputs_ok && below[v] != u64::MAX && node.cost() as u64 != below[v] {
                out.push(CircuitIssue::RedundantInputs(self.ids[v].clone()));
            }
        }
        out
    }

    /// Counts input-to-output paths by propagating path multiplicities
    /// from the output down, in reverse topological order.
    pub fn path_count(&self) -> Result<PathCount, CircuitError> {
        self.validate().map_err(CircuitError::Invalid)?;
        let order = self.topological_order();
        let mut paths = vec![0u64; self.nodes.len()];
        paths[self.output] = 1;
        for &v in order.iter().rev() {
            let p = paths[v];
            for &w in self.nodes[v].inputs() {
                paths[w] = paths[w].checked_add(p).ok_or(CircuitError::Overflow)?;
            }
        }
        let mut per_attribute = BTreeMap::new();
        let mut total = 0u64;
        for &v in &order {
            if let CircuitNode::Input(a) = &self.nodes[v] {
                let e = per_attribute.entry(a.clone()).or_insert(0u64);
                *e = e.checked_add(paths[v]).ok_or(CircuitError::Overflow)?;
                total = total.checked_add(paths[v]).ok_or(CircuitError::Overflow)?;
            }
        }
        Ok(PathCount { total, per_attribute })
    }

    /// Duplicates shared subcircuits into a tree formula.
    ///
    /// Fails when the result would have more than `cap` leaves.
    pub fn unfold_with_cap(&self, cap: u64) -> Result<Formula, CircuitError> {
        let count = self.path_count()?;
        if count.total > cap {
            return Err(CircuitError::UnfoldTooLarge {
                leaves: count.total,
                cap,
            });
        }
        let memo = self.canonical_nodes();
        Ok(Formula::new(memo[self.output].clone().expect("output is reachable")))
    }

    /// [`Circuit::unfold_with_cap`] with [`DEFAULT_UNFOLD_CAP`].
    pub fn unfold(&self) -> Result<Formula, CircuitError> {
        self.unfold_with_cap(DEFAULT_UNFOLD_CAP)
    }

    /// Evaluates the DAG directly, each node once.
    pub fn evaluate<K>(&self, assignment: &BTreeMap<K, bool>) -> Result<bool, MissingAttribute>
    where
        K: core::borrow::Borrow<str> + Ord,
    {
        let mut value = vec![false; self.nodes.len()];
        for v in self.topological_order() {
            value[v] = match &self.nodes[v] {
                CircuitNode::Input(a) => *assignment.get(&**a).ok_or_else(|| MissingAttribute(a.clone()))?,
                CircuitNode::Gate(Gate::And, inputs) => inputs.iter().all(|&i| value[i]),
                CircuitNode::Gate(Gate::Or, inputs) => inputs.iter().any(|&i| value[i]),
            };
        }
        Ok(value[self.output])
    }

    /// The tree-shaped circuit of a formula (fan-out 1 everywhere).
    pub fn from_formula(f: &Formula) -> Circuit {
        fn emit(node: &Node, out: &mut Vec<(String, CircuitNode)>) -> usize {
            let entry = match node.gate_kind() {
                None => CircuitNode::Input(node.attribute().expect("leaf").clone()),
                Some(g) => {
                    let inputs = node.children().iter().map(|c| emit(c, out)).collect();
                    CircuitNode::Gate(g, inputs)
                }
            };
            let id = alloc::format!("n{}", out.len());
            out.push((id, entry));
            out.len() - 1
        }
        let mut nodes = Vec::new();
        let output = emit(f.root(), &mut nodes);
        Circuit::new(nodes, output)
    }
}

impl TruthSource for Circuit {
    fn universe(&self) -> AttributeUniverse {
        AttributeUniverse::from_names(self.nodes.iter().filter_map(|n| match n {
            CircuitNode::Input(a) => Some(a.clone()),
            CircuitNode::Gate(..) => None,
        }))
    }

    fn program(&self, universe: &AttributeUniverse) -> Program {
        let mut prog = Program::default();
        let mut slot = vec![usize::MAX; self.nodes.len()];
        for v in self.topological_order() {
            slot[v] = match &self.nodes[v] {
                CircuitNode::Input(a) => prog.input(universe.index_of(a).expect("attribute outside universe")),
                CircuitNode::Gate(g, inputs) => {
                    let args: Vec<usize> = inputs.iter().map(|&i| slot[i]).collect();
                    prog.gate(*g, &args)
                }
            };
        }
        prog
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::formula::oracle::{check_equivalence, EquivalenceMode, Verdict};
    use alloc::string::ToString;

    fn node(id: &str, n: CircuitNode) -> (String, CircuitNode) {
        (id.to_string(), n)
    }

    fn input(a: &str) -> CircuitNode {
        CircuitNode::Input(a.into())
    }

    /// The two-clause circuit where `In2` fans out to both AND gates.
    pub(crate) fn fan_out_example() -> Circuit {
        Circuit::new(
            vec![
                node("in1", input("In1")),
                node("in2", input("In2")),
                node("in3", input("In3")),
                node("p2", CircuitNode::Gate(Gate::And, vec![0, 1])),
                node("p3", CircuitNode::Gate(Gate::And, vec![1, 2])),
                node("p1", CircuitNode::Gate(Gate::Or, vec![3, 4])),
            ],
            5,
        )
    }

    #[test]
    fn fan_out_path_counts() {
        let c = fan_out_example();
        assert_eq!(c.validate(), Ok(()));
        let pc = c.path_count().unwrap();
        assert_eq!(pc.total, 4);
        let per: Vec<(String, u64)> = pc.per_attribute.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        assert_eq!(per, [("In1".into(), 1), ("In2".into(), 2), ("In3".into(), 1)]);
        let f = c.unfold().unwrap();
        assert_eq!(f, Formula::parse("((In1 & In2) | (In2 & In3))").unwrap());
        assert_eq!(f.cost() as u64, pc.total);
        assert_eq!(
            check_equivalence(&c, &f, EquivalenceMode::Exhaustive, 22),
            Ok(Verdict::Equivalent)
        );
    }

    #[test]
    fn optimized_form_has_three_paths() {
        let c = Circuit::new(
            vec![
                node("in1", input("In1")),
                node("in2", input("In2")),
                node("in3", input("In3")),
                node("r2", CircuitNode::Gate(Gate::Or, vec![0, 2])),
                node("r1", CircuitNode::Gate(Gate::And, vec![1, 3])),
            ],
            4,
        );
        assert_eq!(c.path_count().unwrap().total, 3);
    }

    #[test]
    fn chain_has_one_path_per_input() {
        let c = Circuit::new(
            vec![
                node("a", input("A")),
                node("b", input("B")),
                node("g", CircuitNode::Gate(Gate::And, vec![0, 1])),
            ],
            2,
        );
        let pc = c.path_count().unwrap();
        assert_eq!(pc.per_attribute.get("A"), Some(&1));
        assert_eq!(pc.total, 2);
    }

    #[test]
    fn cycle_is_reported() {
        let c = Circuit::new(
            vec![
                node("a", input("A")),
                node("g1", CircuitNode::Gate(Gate::And, vec![0, 2])),
                node("g2", CircuitNode::Gate(Gate::Or, vec![0, 1])),
            ],
            2,
        );
        let issues = c.validate().unwrap_err();
        assert!(issues.contains(&CircuitIssue::Cycle("g1".into())));
        assert!(issues.contains(&CircuitIssue::Cycle("g2".into())));
        assert!(matches!(c.path_count(), Err(CircuitError::Invalid(_))));
    }

    #[test]
    fn structural_issues() {
        let c = Circuit::new(
            vec![node("a", input("A")), node("g", CircuitNode::Gate(Gate::And, vec![0]))],
            1,
        );
        assert_eq!(
            c.validate(),
            Err(vec![CircuitIssue::FanIn {
                node: "g".into(),
                fan_in: 1
            }])
        );

        let c = Circuit::new(
            vec![
                node("a", input("A")),
                node("b", input("B")),
                node("stray", input("C")),
                node("g", CircuitNode::Gate(Gate::And, vec![0, 1])),
            ],
            3,
        );
        let issues = c.validate().unwrap_err();
        assert!(issues.contains(&CircuitIssue::Unreachable("stray".into())));
        assert!(issues
            .iter()
            .any(|i| matches!(i, CircuitIssue::MultipleOutputs(s) if s.len() == 2)));

        let c = Circuit::new(vec![node("a", CircuitNode::Gate(Gate::Or, vec![0, 7]))], 0);
        assert!(matches!(
            c.validate().unwrap_err()[0],
            CircuitIssue::DanglingEdge { target: 7, .. }
        ));
        assert_eq!(
            Circuit::new(vec![], 0).validate(),
            Err(vec![CircuitIssue::BadOutput(0)])
        );

        let c = Circuit::new(
            vec![
                node("a", input("A")),
                node("g", CircuitNode::Gate(Gate::Or, vec![0, 0])),
            ],
            1,
        );
        assert!(c.validate().unwrap_err().contains(&CircuitIssue::DuplicateEdge {
            node: "g".into(),
            input: "a".into()
        }));
    }

    #[test]
    fn redundant_inputs_are_rejected() {
        // Two distinct AND gates over the same inputs feed one OR.
        let c = Circuit::new(
            vec![
                node("a", input("A")),
                node("b", input("B")),
                node("g1", CircuitNode::Gate(Gate::And, vec![0, 1])),
                node("g2", CircuitNode::Gate(Gate::And, vec![1, 0])),
                node("o", CircuitNode::Gate(Gate::Or, vec![2, 3])),
            ],
            4,
        );
        assert_eq!(c.validate(), Err(vec![CircuitIssue::RedundantInputs("o".into())]));
    }

    #[test]
    fn unfold_cap() {
        let c = fan_out_example();
        assert_eq!(
            c.unfold_with_cap(3),
            Err(CircuitError::UnfoldTooLarge { leaves: 4, cap: 3 })
        );
    }

    #[test]
    fn tree_round_trip() {
        let f = Formula::parse("(a & (b | c)) | (d & e)").unwrap();
        let c = Circuit::from_formula(&f);
        assert_eq!(c.validate(), Ok(()));
        assert_eq!(c.unfold().unwrap(), f);
        assert_eq!(c.path_count().unwrap().total, 5);
        let m: BTreeMap<&str, bool> = [("a", true), ("b", false), ("c", true), ("d", false), ("e", false)].into();
        assert_eq!(c.evaluate(&m), Ok(true));
    }
}
