//! Seeded generators for benchmark policies and test circuits.
//!
//! Random policies are built bottom-up from minimal authorized sets (AND
//! clauses over a few attributes) joined by a random AND/OR tree.
//! Comparison policies draw a small pool of threshold comparisons on
//! bit-decomposed numeric attributes and reuse them across AND clauses.
//! Both are cleaned by [`trim`] and regenerated until they fall inside the
//! requested size ranges.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitNode};
use crate::formula::{Formula, Gate, Node};
use crate::seed::{derive_seed, rng_from_seed};

/// Default number of regeneration attempts before giving up.
pub const DEFAULT_MAX_RETRIES: usize = 1000;

/// Which generator a [`GenSpec`] drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Minimal authorized sets joined by AND/OR.
    RandomPolicy,
    /// Threshold comparisons on bit-decomposed numbers.
    ComparisonQuery,
}

/// Shape of comparison policies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonSpec {
    /// Bits per numeric attribute.
    pub bit_width: u32,
    /// AND clauses per policy.
    pub num_clauses: RangeInclusive<usize>,
    /// Distinct numeric attributes to draw from.
    pub numeric_attributes: usize,
    /// Distinct comparisons per policy, shared by the clauses.
    pub pool: usize,
    /// Comparisons per clause.
    pub clause_arity: RangeInclusive<usize>,
    /// Chance, in percent, that a linking gate is an OR.
    pub or_percent: u32,
}

/// Generator parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    /// Allowed distinct attribute count.
    pub variables: RangeInclusive<usize>,
    /// Allowed literal count.
    pub literals: RangeInclusive<usize>,
    /// Master seed.
    pub seed: u64,
    /// Generator family.
    pub family: Family,
    /// Required for [`Family::ComparisonQuery`].
    pub comparison: Option<ComparisonSpec>,
    /// Minimal authorized set sizes for random policies.
    pub clause_size: RangeInclusive<usize>,
    /// Attempts before [`GenError::GaveUp`].
    pub max_retries: usize,
}

impl GenSpec {
    /// Random-policy spec with default clause sizes.
    pub fn random(variables: RangeInclusive<usize>, literals: RangeInclusive<usize>, seed: u64) -> Self {
        GenSpec {
            variables,
            literals,
            seed,
            family: Family::RandomPolicy,
            comparison: None,
            clause_size: 2..=6,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }

    /// Comparison-policy spec.
    pub fn comparison(
        variables: RangeInclusive<usize>,
        literals: RangeInclusive<usize>,
        comparison: ComparisonSpec,
        seed: u64,
    ) -> Self {
        GenSpec {
            family: Family::ComparisonQuery,
            comparison: Some(comparison),
            ..GenSpec::random(variables, literals, seed)
        }
    }

    /// The four benchmark families (1 to 4).
    pub fn dataset(index: usize, seed: u64) -> Option<Self> {
        Some(match index {
            1 => GenSpec::random(20..=25, 20..=40, seed),
            2 => GenSpec::random(20..=20, 60..=90, seed),
            3 => GenSpec::random(25..=35, 160..=200, seed),
            4 => GenSpec::comparison(
                20..=25,
                20..=40,
                ComparisonSpec {
                    bit_width: 5,
                    num_clauses: 10..=10,
                    numeric_attributes: 5,
                    pool: 5,
                    clause_arity: 1..=2,
                    or_percent: 90,
                },
                seed,
            ),
            _ => return None,
        })
    }

    fn check(&self) -> Result<(), GenError> {
        if self.variables.is_empty() || *self.variables.end() == 0 {
            return Err(GenError::InvalidSpec("empty variable range".into()));
        }
        if self.literals.is_empty() || *self.literals.end() == 0 {
            return Err(GenError::InvalidSpec("empty literal range".into()));
        }
        match self.family {
            Family::RandomPolicy => {
                if self.clause_size.is_empty() || *self.clause_size.start() == 0 {
                    return Err(GenError::InvalidSpec("empty clause size range".into()));
                }
            }
            Family::ComparisonQuery => {
                let c = self.comparison.as_ref().ok_or_else(|| {
                    GenError::InvalidSpec("comparison family needs bit width and clause count".into())
                })?;
                if c.bit_width == 0 || c.bit_width > 32 {
                    return Err(GenError::InvalidSpec("bit width must lie in 1..=32".into()));
                }
                if c.num_clauses.is_empty() || *c.num_clauses.start() == 0 || c.numeric_attributes == 0 || c.pool == 0 {
                    return Err(GenError::InvalidSpec(
                        "need at least one clause, comparison and numeric attribute".into(),
                    ));
                }
                if c.clause_arity.is_empty() || *c.clause_arity.start() == 0 {
                    return Err(GenError::InvalidSpec("empty clause arity range".into()));
                }
                if c.or_percent > 100 {
                    return Err(GenError::InvalidSpec("OR percentage above 100".into()));
                }
            }
        }
        Ok(())
    }
}

/// Generation failure.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    /// No attempt landed inside the requested ranges.
    #[error("gave up after {retries} attempts: ranges look unsatisfiable")]
    GaveUp {
        /// Attempts made.
        retries: usize,
    },
    /// Inconsistent parameters.
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    /// Threshold outside `1..2^bit_width`.
    #[error("threshold {k} is outside 1..2^{bit_width}")]
    Threshold {
        /// Requested threshold.
        k: u64,
        /// Bit width.
        bit_width: u32,
    },
}

/// Removes absorbed children bottom-up until nothing changes.
///
/// At an OR, a child whose conjuncts include all conjuncts of a sibling is
/// dropped (`A | (A & B)` becomes `A`); dually at an AND with disjuncts.
/// Duplicate siblings are already merged by normalization.
pub fn trim(f: &Formula) -> Formula {
    let mut current = f.clone();
    loop {
        let next = Formula::new(trim_node(current.root()));
        if next == current {
            return next;
        }
        current = next;
    }
}

/// Operands of `node` as an `inner` gate: its children if it is one, else
/// the node itself.
fn operands(node: &Arc<Node>, inner: Gate) -> Vec<&Arc<Node>> {
    match node.gate_kind() {
        Some(g) if g == inner => node.children().iter().collect(),
        _ => alloc::vec![node],
    }
}

fn trim_node(node: &Arc<Node>) -> Arc<Node> {
    let Some(gate) = node.gate_kind() else {
        return node.clone();
    };
    let children: Vec<Arc<Node>> = node.children().iter().map(trim_node).collect();
    let sets: Vec<Vec<&Arc<Node>>> = children.iter().map(|c| operands(c, gate.dual())).collect();
    let mut keep = alloc::vec![true; children.len()];
    for i in 0..children.len() {
        for j in 0..children.len() {
            // Children are distinct after normalization, so a subset relation
            // between their operand sets is strict.
            if i != j && keep[j] && sets[j].len() < sets[i].len() && is_subset(&sets[j], &sets[i]) {
                keep[i] = false;
                break;
            }
        }
    }
    Node::gate(gate, children.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c))
}

fn is_subset(small: &[&Arc<Node>], big: &[&Arc<Node>]) -> bool {
    small.iter().all(|s| big.iter().any(|b| b == s))
}

fn in_ranges(f: &Formula, spec: &GenSpec) -> bool {
    spec.literals.contains(&f.cost()) && spec.variables.contains(&f.attributes().len())
}

/// Joins `items` by a random binary tree of AND/OR gates, each an OR with
/// probability `or_percent`/100.
fn link(mut items: Vec<Arc<Node>>, or_percent: u32, rng: &mut ChaCha8Rng) -> Arc<Node> {
    while items.len() > 1 {
        let a = items.swap_remove(rng.gen_range(0..items.len()));
        let b = items.swap_remove(rng.gen_range(0..items.len()));
        let gate = if rng.gen_ratio(or_percent, 100) {
            Gate::Or
        } else {
            Gate::And
        };
        items.push(Node::gate(gate, [a, b]));
    }
    items.pop().expect("nonempty")
}

fn attempt_random(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Formula {
    let vars = rng.gen_range(spec.variables.clone());
    let target = rng.gen_range(spec.literals.clone());
    let pool: Vec<Arc<str>> = (0..vars).map(|i| Arc::from(format!("x{i}"))).collect();
    let mut clauses = Vec::new();
    let mut literals = 0;
    while literals < target {
        let size = rng.gen_range(spec.clause_size.clone()).min(vars);
        let members = pool.choose_multiple(rng, size).map(|a| Node::leaf(a.clone()));
        clauses.push(Node::gate(Gate::And, members));
        literals += size;
    }
    trim(&Formula::new(link(clauses, 50, rng)))
}

/// A random minimal-authorized-set policy inside the spec's ranges.
pub fn gen_random_policy(spec: &GenSpec) -> Result<Formula, GenError> {
    spec.check()?;
    if spec.family != Family::RandomPolicy {
        return Err(GenError::InvalidSpec("expected the random policy family".into()));
    }
    retry(spec, attempt_random)
}

fn retry(spec: &GenSpec, attempt: fn(&GenSpec, &mut ChaCha8Rng) -> Formula) -> Result<Formula, GenError> {
    for i in 0..spec.max_retries {
        let mut rng = rng_from_seed(derive_seed(spec.seed, i as u64));
        let f = attempt(spec, &mut rng);
        if in_ranges(&f, spec) {
            return Ok(f);
        }
    }
    Err(GenError::GaveUp {
        retries: spec.max_retries,
    })
}

/// The chain formula for `A ≥ k` over bit attributes `<prefix>0` (least
/// significant) to `<prefix><bit_width-1>`.
///
/// Starting from the lowest set bit `j` of `k`, each higher bit `i` is
/// joined by AND when bit `i` of `k` is set and by OR otherwise.
pub fn gen_comparison_formula(k: u64, bit_width: u32, prefix: &str) -> Result<Formula, GenError> {
    if k == 0 || bit_width == 0 || bit_width > 63 || k >> bit_width != 0 {
        return Err(GenError::Threshold { k, bit_width });
    }
    Ok(Formula::new(comparison_chain(k, bit_width, prefix)))
}

fn comparison_chain(k: u64, bit_width: u32, prefix: &str) -> Arc<Node> {
    let bit = |i: u32| Node::leaf(format!("{prefix}{i}"));
    let j = k.trailing_zeros();
    let mut acc = bit(j);
    for i in j + 1..bit_width {
        let gate = if (k >> i) & 1 == 1 { Gate::And } else { Gate::Or };
        acc = Node::gate(gate, [acc, bit(i)]);
    }
    acc
}

/// Name of the `index`-th numeric attribute: `A`, `B`, ..., `Z`, `AA`, ...
fn numeric_name(mut index: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (index % 26) as u8);
        index /= 26;
        if index == 0 {
            break;
        }
        index -= 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

fn attempt_comparison(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Formula {
    let c = spec.comparison.as_ref().expect("checked");
    let max = (1u64 << c.bit_width) - 1;
    let pool: Vec<Arc<Node>> = (0..c.pool)
        .map(|_| {
            let k = rng.gen_range(1..=max);
            // `A <= k` is the chain for `max - k` over the complemented bits,
            // which carry the same names.
            let k = if rng.gen_bool(0.5) || k == max { k } else { max - k };
            comparison_chain(k, c.bit_width, &numeric_name(rng.gen_range(0..c.numeric_attributes)))
        })
        .collect();
    let clauses = rng.gen_range(c.num_clauses.clone());
    let items: Vec<Arc<Node>> = (0..clauses)
        .map(|_| {
            let arity = rng.gen_range(c.clause_arity.clone()).min(pool.len());
            Node::gate(Gate::And, pool.choose_multiple(rng, arity).cloned())
        })
        .collect();
    trim(&Formula::new(link(items, c.or_percent, rng)))
}

/// A comparison-query policy inside the spec's ranges.
pub fn gen_comparison_policy(spec: &GenSpec) -> Result<Formula, GenError> {
    spec.check()?;
    if spec.family != Family::ComparisonQuery {
        return Err(GenError::InvalidSpec("expected the comparison query family".into()));
    }
    retry(spec, attempt_comparison)
}

/// One policy of the spec's family.
pub fn generate(spec: &GenSpec) -> Result<Formula, GenError> {
    match spec.family {
        Family::RandomPolicy => gen_random_policy(spec),
        Family::ComparisonQuery => gen_comparison_policy(spec),
    }
}

/// `count` policies; entry `i` is generated from `derive_seed(spec.seed, i)`.
pub fn gen_dataset(spec: &GenSpec, count: usize) -> Result<Vec<Formula>, GenError> {
    (0..count)
        .map(|i| {
            generate(&GenSpec {
                seed: derive_seed(spec.seed, i as u64),
                ..spec.clone()
            })
        })
        .collect()
}

/// A random valid circuit with `inputs` distinct attributes and about
/// `gates` gates, retrying seeds until validation passes.
///
/// Gates draw two or three inputs from earlier nodes, preferring nodes not
/// yet consumed; any leftover sinks are joined under one final gate. Many
/// gates over few inputs cannot avoid redundancy, so this gives up after
/// `max_retries` attempts.
pub fn random_circuit(inputs: usize, gates: usize, seed: u64, max_retries: usize) -> Result<Circuit, GenError> {
    if inputs < 2 {
        return Err(GenError::InvalidSpec("need at least two inputs".into()));
    }
    for attempt in 0..max_retries as u64 {
        let mut rng = rng_from_seed(derive_seed(seed, attempt));
        let mut nodes: Vec<(String, CircuitNode)> = (0..inputs)
            .map(|i| (format!("in{i}"), CircuitNode::Input(Arc::from(format!("v{i}")))))
            .collect();
        let mut consumed = alloc::vec![false; inputs];
        for g in 0..gates {
            let n = nodes.len();
            let fan_in = rng.gen_range(2..=3usize).min(n);
            let fresh: Vec<usize> = (0..n).filter(|&i| !consumed[i]).collect();
            let mut picked: Vec<usize> = Vec::new();
            while picked.len() < fan_in {
                let c = if !fresh.is_empty() && rng.gen_bool(0.6) {
                    fresh[rng.gen_range(0..fresh.len())]
                } else {
                    rng.gen_range(0..n)
                };
                if !picked.contains(&c) {
                    picked.push(c);
                }
            }
            for &p in &picked {
                consumed[p] = true;
            }
            let gate = if rng.gen_bool(0.5) { Gate::And } else { Gate::Or };
            nodes.push((format!("g{g}"), CircuitNode::Gate(gate, picked)));
            consumed.push(false);
        }
        let sinks: Vec<usize> = (0..nodes.len()).filter(|&i| !consumed[i]).collect();
        let output = if sinks.len() == 1 {
            sinks[0]
        } else {
            let gate = if rng.gen_bool(0.5) { Gate::And } else { Gate::Or };
            nodes.push(("out".into(), CircuitNode::Gate(gate, sinks)));
            nodes.len() - 1
        };
        let c = Circuit::new(nodes, output);
        if c.validate().is_ok() {
            return Ok(c);
        }
    }
    Err(GenError::GaveUp { retries: max_retries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::oracle::{equivalent, EquivalenceMode};
    use alloc::collections::BTreeMap;

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn trim_examples() {
        assert_eq!(
            trim(&f("((A & B) | (A & B) | (A & C))")).to_text(),
            "((A & B) | (A & C))"
        );
        assert_eq!(trim(&f("(A | (A & B))")), f("A"));
        assert_eq!(trim(&f("(A & (A | B) & C)")), f("A & C"));
        assert_eq!(trim(&f("(A & B) | (A & B & C) | D")), f("(A & B) | D"));
        let clean = f("((A & B) | (C & D))");
        assert_eq!(trim(&clean), clean);
        // Absorption exposed by an inner trim.
        let g = f("X | (Y & (X | (X & Z)))");
        assert_eq!(trim(&g), f("X"));
    }

    #[test]
    fn comparison_k11() {
        let g = gen_comparison_formula(11, 5, "A").unwrap();
        assert_eq!(g, f("((((A0 & A1) | A2) & A3) | A4)"));
        assert_eq!(g.cost(), 5);
        assert_eq!(gen_comparison_formula(16, 5, "A").unwrap(), f("A4"));
        assert!(gen_comparison_formula(0, 5, "A").is_err());
        assert!(gen_comparison_formula(32, 5, "A").is_err());
    }

    #[test]
    fn comparison_matches_numeric_order() {
        let b = 5;
        for k in 1..(1u64 << b) {
            let g = gen_comparison_formula(k, b, "A").unwrap();
            assert_eq!(g.cost() as u32, b - k.trailing_zeros());
            for a in 0..(1u64 << b) {
                let m: BTreeMap<String, bool> = (0..b).map(|i| (format!("A{i}"), (a >> i) & 1 == 1)).collect();
                assert_eq!(g.evaluate(&m), Ok(a >= k), "k={k} a={a}");
            }
        }
    }

    #[test]
    fn dataset_ranges_and_determinism() {
        for d in 1..=4 {
            let spec = GenSpec::dataset(d, 42).unwrap();
            let x = generate(&spec).unwrap();
            assert!(spec.literals.contains(&x.cost()), "dataset {d}: {}", x.cost());
            assert!(spec.variables.contains(&x.attributes().len()), "dataset {d}");
            assert_eq!(trim(&x), x);
            assert_eq!(generate(&spec).unwrap().to_text(), x.to_text());
        }
    }

    #[test]
    fn unsatisfiable_ranges_give_up() {
        let mut spec = GenSpec::random(3..=3, 100..=100, 1);
        spec.max_retries = 5;
        assert_eq!(gen_random_policy(&spec), Err(GenError::GaveUp { retries: 5 }));
        assert!(matches!(gen_comparison_policy(&spec), Err(GenError::InvalidSpec(_))));
    }

    #[test]
    fn numeric_names() {
        assert_eq!(numeric_name(0), "A");
        assert_eq!(numeric_name(25), "Z");
        assert_eq!(numeric_name(26), "AA");
    }

    #[test]
    fn trim_preserves_function() {
        for i in 0..20 {
            let mut rng = rng_from_seed(i);
            let raw = Formula::new(link(
                (0..6)
                    .map(|_| {
                        let size = rng.gen_range(1..=3);
                        let names = ["a", "b", "c", "d", "e", "f"];
                        Node::gate(Gate::And, names.choose_multiple(&mut rng, size).map(|n| Node::leaf(*n)))
                    })
                    .collect(),
                50,
                &mut rng,
            ));
            let t = trim(&raw);
            assert!(t.cost() <= raw.cost());
            assert_eq!(equivalent(&raw, &t, EquivalenceMode::Exhaustive), Ok(true));
            assert_eq!(trim(&t), t);
        }
    }

    #[test]
    fn random_circuits_validate() {
        for s in 0..20 {
            let c = random_circuit(6, 10, s, DEFAULT_MAX_RETRIES).unwrap();
            assert_eq!(c.validate(), Ok(()));
        }
        assert_eq!(random_circuit(2, 30, 0, 50), Err(GenError::GaveUp { retries: 50 }));
    }
}
