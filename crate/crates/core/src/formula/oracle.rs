//! Brute-force equivalence oracle.
//!
//! Both sides are compiled to a flat straight-line [`Program`] over a shared
//! attribute universe and simulated 64 assignments at a time, one bit per
//! assignment. Exhaustive mode walks all `2^n` assignments; sampled mode
//! draws seeded random assignments and can only ever prove inequivalence.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use rand::RngCore;

use super::{Attribute, AttributeUniverse, Formula, Gate, Node};
use crate::seed::rng_from_seed;

/// Largest universe checked exhaustively unless told otherwise.
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 22;

/// Sample count used when falling back to sampled mode.
pub const DEFAULT_SAMPLES: u64 = 100_000;

/// How to compare two functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceMode {
    /// Every assignment of the union universe.
    Exhaustive,
    /// `samples` pseudo-random assignments drawn from `seed`.
    Sampled {
        /// Number of assignments.
        samples: u64,
        /// RNG seed.
        seed: u64,
    },
}

/// Oracle failure.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    /// Exhaustive enumeration refused.
    #[error("{variables} variables exceed the exhaustive bound of {bound}; use sampled mode")]
    UniverseTooLarge {
        /// Size of the union universe.
        variables: usize,
        /// Configured bound.
        bound: usize,
    },
}

/// Oracle answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Agree on every assignment.
    Equivalent,
    /// Disagree on `witness`.
    NotEquivalent {
        /// Assignment on which the two sides differ.
        witness: BTreeMap<Attribute, bool>,
    },
    /// Agree on every sampled assignment.
    SampledAgree {
        /// Number of assignments tried.
        samples: u64,
    },
}

impl Verdict {
    /// `false` only for a definitive counterexample.
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::NotEquivalent { .. })
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Input(usize),
    And,
    Or,
}

#[derive(Clone, Debug)]
struct Instr {
    op: Op,
    args: Range<u32>,
}

/// Straight-line evaluation program over 64-bit assignment words.
///
/// Each slot is computed from earlier slots; the last slot is the output.
/// Slots may be referenced many times, so shared DAG nodes are evaluated
/// once.
#[derive(Clone, Debug, Default)]
pub struct Program {
    instrs: Vec<Instr>,
    operands: Vec<u32>,
}

impl Program {
    /// Appends an input slot reading universe variable `var`.
    pub fn input(&mut self, var: usize) -> usize {
        self.push(Op::Input(var), &[])
    }

    /// Appends a gate slot over earlier slots.
    pub fn gate(&mut self, gate: Gate, args: &[usize]) -> usize {
        let op = match gate {
            Gate::And => Op::And,
            Gate::Or => Op::Or,
        };
        self.push(op, args)
    }

    fn push(&mut self, op: Op, args: &[usize]) -> usize {
        let start = self.operands.len() as u32;
        for &a in args {
            debug_assert!(a < self.instrs.len());
            self.operands.push(a as u32);
        }
        let end = self.operands.len() as u32;
        self.instrs.push(Instr { op, args: start..end });
        self.instrs.len() - 1
    }

    /// Evaluates 64 assignments; `inputs[i]` holds variable `i`'s bits.
    pub fn eval(&self, inputs: &[u64], slots: &mut Vec<u64>) -> u64 {
        slots.clear();
        for instr in &self.instrs {
            let args = &self.operands[instr.args.start as usize..instr.args.end as usize];
            let v = match instr.op {
                Op::Input(i) => inputs[i],
                Op::And => args.iter().fold(!0u64, |acc, &a| acc & slots[a as usize]),
                Op::Or => args.iter().fold(0u64, |acc, &a| acc | slots[a as usize]),
            };
            slots.push(v);
        }
        *slots.last().expect("empty program")
    }
}

/// Anything that denotes a monotone Boolean function over named attributes.
pub trait TruthSource {
    /// Attributes the function reads.
    fn universe(&self) -> AttributeUniverse;
    /// Program computing the function with variables indexed by `universe`,
    /// which contains every attribute of [`TruthSource::universe`].
    fn program(&self, universe: &AttributeUniverse) -> Program;
}

impl TruthSource for Formula {
    fn universe(&self) -> AttributeUniverse {
        self.attributes()
    }

    fn program(&self, universe: &AttributeUniverse) -> Program {
        fn emit(node: &Node, universe: &AttributeUniverse, prog: &mut Program) -> usize {
            match node.gate_kind() {
                None => {
                    let name = node.attribute().expect("leaf");
                    prog.input(universe.index_of(name).expect("attribute outside universe"))
                }
                Some(g) => {
                    let args: Vec<usize> = node.children().iter().map(|c| emit(c, universe, prog)).collect();
                    prog.gate(g, &args)
                }
            }
        }
        let mut prog = Program::default();
        emit(self.root(), universe, &mut prog);
        prog
    }
}

const PATTERNS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

fn witness(universe: &AttributeUniverse, inputs: &[u64], bit: u32) -> BTreeMap<Attribute, bool> {
    universe
        .names()
        .iter()
        .zip(inputs)
        .map(|(n, w)| (n.clone(), (w >> bit) & 1 == 1))
        .collect()
}

/// Compares two functions over the union of their universes.
///
/// In exhaustive mode the union may hold at most `bound` variables.
pub fn check_equivalence<A, B>(a: &A, b: &B, mode: EquivalenceMode, bound: usize) -> Result<Verdict, OracleError>
where
    A: TruthSource + ?Sized,
    B: TruthSource + ?Sized,
{
    let universe = a.universe().union(&b.universe());
    let n = universe.len();
    let pa = a.program(&universe);
    let pb = b.program(&universe);
    let mut inputs = alloc::vec![0u64; n];
    let (mut sa, mut sb) = (Vec::new(), Vec::new());

    match mode {
        EquivalenceMode::Exhaustive => {
            if n > bound || n >= 64 {
                return Err(OracleError::UniverseTooLarge { variables: n, bound });
            }
            let (chunks, mask) = if n >= 6 {
                (1u64 << (n - 6), !0u64)
            } else {
                (1, (1u64 << (1u32 << n)) - 1)
            };
            for (i, w) in inputs.iter_mut().enumerate().take(n.min(6)) {
                *w = PATTERNS[i];
            }
            for chunk in 0..chunks {
                for (i, w) in inputs.iter_mut().enumerate().skip(6) {
                    *w = if (chunk >> (i - 6)) & 1 == 1 { !0 } else { 0 };
                }
                let diff = (pa.eval(&inputs, &mut sa) ^ pb.eval(&inputs, &mut sb)) & mask;
                if diff != 0 {
                    return Ok(Verdict::NotEquivalent {
                        witness: witness(&universe, &inputs, diff.trailing_zeros()),
                    });
                }
            }
            Ok(Verdict::Equivalent)
        }
        EquivalenceMode::Sampled { samples, seed } => {
            let mut rng = rng_from_seed(seed);
            let mut done = 0u64;
            while done < samples {
                let take = (samples - done).min(64);
                let mask = if take == 64 { !0 } else { (1u64 << take) - 1 };
                for w in inputs.iter_mut() {
                    *w = rng.next_u64();
                }
                let diff = (pa.eval(&inputs, &mut sa) ^ pb.eval(&inputs, &mut sb)) & mask;
                if diff != 0 {
                    return Ok(Verdict::NotEquivalent {
                        witness: witness(&universe, &inputs, diff.trailing_zeros()),
                    });
                }
                done += take;
            }
            Ok(Verdict::SampledAgree { samples })
        }
    }
}

/// Whether `f` and `g` agree, using the default exhaustive bound.
///
/// A `true` from sampled mode is probabilistic; `false` is definitive.
pub fn equivalent(f: &Formula, g: &Formula, mode: EquivalenceMode) -> Result<bool, OracleError> {
    check_equivalence(f, g, mode, DEFAULT_EXHAUSTIVE_BOUND).map(|v| v.holds())
}

/// Checks exhaustively when the union universe fits under `bound`, and
/// falls back to [`DEFAULT_SAMPLES`] seeded samples otherwise.
pub fn check_auto<A, B>(a: &A, b: &B, bound: usize, seed: u64) -> Verdict
where
    A: TruthSource + ?Sized,
    B: TruthSource + ?Sized,
{
    match check_equivalence(a, b, EquivalenceMode::Exhaustive, bound) {
        Ok(v) => v,
        Err(OracleError::UniverseTooLarge { .. }) => {
            let mode = EquivalenceMode::Sampled {
                samples: DEFAULT_SAMPLES,
                seed,
            };
            check_equivalence(a, b, mode, bound).expect("sampled mode has no bound")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn shared_and_factored_are_equivalent() {
        let a = f("((In1 & In2) | (In2 & In3))");
        let b = f("(In2 & (In1 | In3))");
        assert_eq!(equivalent(&a, &b, EquivalenceMode::Exhaustive), Ok(true));
        assert_eq!(equivalent(&a, &a, EquivalenceMode::Exhaustive), Ok(true));
    }

    #[test]
    fn and_vs_or_witness() {
        let v = check_equivalence(&f("A & B"), &f("A | B"), EquivalenceMode::Exhaustive, 22).unwrap();
        match v {
            Verdict::NotEquivalent { witness } => {
                let w: Vec<(alloc::string::String, bool)> = witness.iter().map(|(k, v)| (k.to_string(), *v)).collect();
                assert_eq!(w, [("A".into(), true), ("B".into(), false)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn different_universes_are_compared_on_the_union() {
        // A | (A & B) reads B but does not depend on it.
        let v = check_equivalence(&f("A | (A & B)"), &f("A"), EquivalenceMode::Exhaustive, 22);
        assert_eq!(v, Ok(Verdict::Equivalent));
        assert_eq!(equivalent(&f("A"), &f("B"), EquivalenceMode::Exhaustive), Ok(false));
    }

    #[test]
    fn bound_is_enforced() {
        let big = f("a0 & a1 & a2 & a3 & a4 & a5 & a6 & a7");
        let err = check_equivalence(&big, &big, EquivalenceMode::Exhaustive, 7).unwrap_err();
        assert_eq!(err, OracleError::UniverseTooLarge { variables: 8, bound: 7 });
        let sampled = EquivalenceMode::Sampled { samples: 1000, seed: 3 };
        assert_eq!(
            check_equivalence(&big, &big, sampled, 7),
            Ok(Verdict::SampledAgree { samples: 1000 })
        );
    }

    #[test]
    fn sampled_mode_finds_gross_differences() {
        let names: Vec<alloc::string::String> = (0..30).map(|i| alloc::format!("v{i}")).collect();
        let a = f(&names.join(" | "));
        let b = f(&names[1..].join(" | "));
        let mode = EquivalenceMode::Sampled {
            samples: 10_000,
            seed: 1,
        };
        // Differ only when v0 is the sole true input: probability 2^-30 per sample.
        assert_eq!(equivalent(&a, &b, mode), Ok(true));
        let c = f(&names.join(" & "));
        assert_eq!(equivalent(&a, &c, mode), Ok(false));
    }

    #[test]
    fn exhaustive_matches_pointwise_evaluation() {
        let a = f("(a & (b | c)) | (d & e & (a | f)) | (g & h)");
        let b = f("(a & b) | (a & c) | (d & e & a) | (d & e & f) | (h & g)");
        let c = f("(a & b) | (a & c) | (d & e & a) | (d & f) | (h & g)");
        assert_eq!(equivalent(&a, &b, EquivalenceMode::Exhaustive), Ok(true));
        let v = check_equivalence(&a, &c, EquivalenceMode::Exhaustive, 22).unwrap();
        let Verdict::NotEquivalent { witness } = v else {
            panic!()
        };
        assert_ne!(a.evaluate(&witness), c.evaluate(&witness));
    }
}
