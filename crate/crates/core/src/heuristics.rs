//! Local search over the factorization/defactorization neighborhood.
//!
//! Six optimizers: hill climbing (HC), simulated annealing (SA), a custom
//! heuristic with a decaying defactorization schedule (CH), and restarted
//! versions of each (IHC, ISA, ICH). All randomness flows from a single
//! seed, so a given `(algorithm, formula, params)` always produces the same
//! output.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::rewrite::{random_defactorization, random_factorization};
use crate::seed::{derive_seed, rng_from_seed};

/// How an uphill move of size `Δ` at temperature `t` is accepted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AcceptanceForm {
    /// Metropolis rule `exp(-Δ/t)`: hotter accepts more.
    #[default]
    Standard,
    /// `exp(-Δ·t)`: hotter accepts less.
    Literal,
}

impl AcceptanceForm {
    /// Acceptance probability.
    pub fn probability(self, delta: f64, t: f64) -> f64 {
        match self {
            AcceptanceForm::Standard => libm::exp(-delta / t),
            AcceptanceForm::Literal => libm::exp(-delta * t),
        }
    }
}

/// Tuning knobs shared by all optimizers.
#[derive(Clone, Debug, PartialEq)]
pub struct HeuristicParams {
    /// SA start temperature.
    pub t_max: f64,
    /// SA stop temperature.
    pub t_min: f64,
    /// SA cooling: `t ← (1 - c)·t` after each level.
    pub cooling_rate: f64,
    /// SA proposals per temperature level.
    pub inner_iters: usize,
    /// SA probability of proposing a defactorization.
    pub defact_prob: f64,
    /// CH iteration count.
    pub k_max: usize,
    /// Runs per iterated optimizer.
    pub restarts: usize,
    /// Master seed.
    pub seed: u64,
    /// SA acceptance rule.
    pub acceptance: AcceptanceForm,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            t_max: 100.0,
            t_min: 10.0,
            cooling_rate: 0.1,
            inner_iters: 25,
            defact_prob: 0.25,
            k_max: 500,
            restarts: 16,
            seed: 0,
            acceptance: AcceptanceForm::Standard,
        }
    }
}

/// Rejected parameter value.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    /// No parameter of this name.
    #[error("unknown parameter `{0}`")]
    UnknownKey(String),
    /// Value does not parse or is out of range.
    #[error("invalid value for `{key}`: {reason}")]
    Invalid {
        /// Parameter name.
        key: &'static str,
        /// What is wrong with it.
        reason: String,
    },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ParamError {
    ParamError::Invalid {
        key,
        reason: reason.into(),
    }
}

impl HeuristicParams {
    /// Names accepted by [`HeuristicParams::set`].
    pub const KEYS: [&'static str; 9] = [
        "t_max",
        "t_min",
        "cooling_rate",
        "inner_iters",
        "defact_prob",
        "k_max",
        "restarts",
        "seed",
        "acceptance",
    ];

    /// Checks ranges: `t_max > t_min > 0`, `0 < c < 1`, `0 ≤ d ≤ 1`, and
    /// positive counts.
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err(invalid("t_min", "must be positive"));
        }
        if !(self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(invalid("t_max", "must exceed t_min"));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(invalid("cooling_rate", "must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.defact_prob) {
            return Err(invalid("defact_prob", "must lie in [0, 1]"));
        }
        if self.inner_iters == 0 {
            return Err(invalid("inner_iters", "must be positive"));
        }
        if self.k_max == 0 {
            return Err(invalid("k_max", "must be positive"));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts", "must be positive"));
        }
        Ok(())
    }

    /// Sets one field from text. Does not validate cross-field ranges.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ParamError> {
        fn real(key: &'static str, v: &str) -> Result<f64, ParamError> {
            v.trim()
                .parse()
                .map_err(|_| invalid(key, alloc::format!("`{v}` is not a number")))
        }
        fn count(key: &'static str, v: &str) -> Result<usize, ParamError> {
            v.trim()
                .parse()
                .map_err(|_| invalid(key, alloc::format!("`{v}` is not a non-negative integer")))
        }
        match key.trim() {
            "t_max" => self.t_max = real("t_max", value)?,
            "t_min" => self.t_min = real("t_min", value)?,
            "cooling_rate" | "c" => self.cooling_rate = real("cooling_rate", value)?,
            "inner_iters" | "L" => self.inner_iters = count("inner_iters", value)?,
            "defact_prob" | "d" => self.defact_prob = real("defact_prob", value)?,
            "k_max" => self.k_max = count("k_max", value)?,
            "restarts" => self.restarts = count("restarts", value)?,
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| invalid("seed", alloc::format!("`{value}` is not a u64")))?
            }
            "acceptance" => {
                self.acceptance = match value.trim() {
                    "standard" => AcceptanceForm::Standard,
                    "literal" => AcceptanceForm::Literal,
                    other => {
                        return Err(invalid(
                            "acceptance",
                            alloc::format!("`{other}`, expected standard or literal"),
                        ))
                    }
                }
            }
            other => return Err(ParamError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Number of SA temperature levels these parameters produce.
    pub fn temperature_levels(&self) -> usize {
        let mut t = self.t_max;
        let mut levels = 0;
        while t > self.t_min {
            levels += 1;
            t *= 1.0 - self.cooling_rate;
        }
        levels
    }
}

/// A run stopped by its [`Budget`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("optimizer interrupted by its budget")]
pub struct Interrupted;

/// Cooperative stop signal, polled once per optimizer step.
pub trait Budget {
    /// `true` once the run should stop.
    fn exhausted(&self) -> bool;
}

/// A budget that never runs out.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&self) -> bool {
        false
    }
}

fn tick(budget: &dyn Budget) -> Result<(), Interrupted> {
    if budget.exhausted() {
        Err(Interrupted)
    } else {
        Ok(())
    }
}

/// The six optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    /// Hill climbing.
    HC,
    /// Simulated annealing.
    SA,
    /// Custom heuristic.
    CH,
    /// Iterated hill climbing.
    IHC,
    /// Iterated simulated annealing.
    ISA,
    /// Iterated custom heuristic.
    ICH,
}

impl Algorithm {
    /// All algorithms in table order.
    pub const ALL: [Algorithm; 6] = [
        Algorithm::HC,
        Algorithm::IHC,
        Algorithm::SA,
        Algorithm::ISA,
        Algorithm::CH,
        Algorithm::ICH,
    ];

    /// Short upper-case name.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::HC => "HC",
            Algorithm::SA => "SA",
            Algorithm::CH => "CH",
            Algorithm::IHC => "IHC",
            Algorithm::ISA => "ISA",
            Algorithm::ICH => "ICH",
        }
    }

    /// The single-run algorithm an iterated one restarts; itself otherwise.
    pub fn base(self) -> Algorithm {
        match self {
            Algorithm::IHC => Algorithm::HC,
            Algorithm::ISA => Algorithm::SA,
            Algorithm::ICH => Algorithm::CH,
            other => other,
        }
    }

    /// Whether this is a restarted variant.
    pub fn is_iterated(self) -> bool {
        self.base() != self
    }

    /// Runs the algorithm seeded from `params.seed`.
    pub fn run(self, f: &Formula, params: &HeuristicParams) -> Formula {
        self.run_with_budget(f, params, &Unlimited).expect("unlimited budget")
    }

    /// Runs the algorithm, polling `budget` between steps.
    pub fn run_with_budget(
        self,
        f: &Formula,
        params: &HeuristicParams,
        budget: &dyn Budget,
    ) -> Result<Formula, Interrupted> {
        if self.is_iterated() {
            iterated_with_budget(self.base(), f, params, budget)
        } else {
            let mut rng = rng_from_seed(params.seed);
            run_base(self, f, params, &mut rng, budget)
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unrecognized algorithm name.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm `{0}` (expected hc, sa, ch, ihc, isa or ich)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hc" => Ok(Algorithm::HC),
            "sa" => Ok(Algorithm::SA),
            "ch" => Ok(Algorithm::CH),
            "ihc" => Ok(Algorithm::IHC),
            "isa" => Ok(Algorithm::ISA),
            "ich" => Ok(Algorithm::ICH),
            _ => Err(UnknownAlgorithm(s.into())),
        }
    }
}

fn run_base(
    alg: Algorithm,
    f: &Formula,
    params: &HeuristicParams,
    rng: &mut ChaCha8Rng,
    budget: &dyn Budget,
) -> Result<Formula, Interrupted> {
    match alg {
        Algorithm::HC => descend(f.clone(), rng, budget),
        Algorithm::SA => anneal(f, params, rng, budget, &mut SaTrace::default()),
        Algorithm::CH => custom(f, params, rng, budget),
        _ => unreachable!("iterated algorithms are dispatched separately"),
    }
}

/// Applies random factorization sites until none is left.
fn descend(mut f: Formula, rng: &mut ChaCha8Rng, budget: &dyn Budget) -> Result<Formula, Interrupted> {
    loop {
        tick(budget)?;
        match random_factorization(&f, rng) {
            Some(next) => f = next,
            None => return Ok(f),
        }
    }
}

/// Hill climbing: uniformly random factorizations down to a local optimum.
pub fn hill_climb(f: &Formula, seed: u64) -> Formula {
    descend(f.clone(), &mut rng_from_seed(seed), &Unlimited).expect("unlimited budget")
}

/// Loop counters from one annealing run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SaTrace {
    /// Temperature levels visited.
    pub levels: usize,
    /// Proposals made before the final descent.
    pub proposals: usize,
    /// Defactorizations proposed.
    pub uphill_proposed: usize,
    /// Defactorizations accepted.
    pub uphill_accepted: usize,
}

fn anneal(
    f: &Formula,
    params: &HeuristicParams,
    rng: &mut ChaCha8Rng,
    budget: &dyn Budget,
    trace: &mut SaTrace,
) -> Result<Formula, Interrupted> {
    let mut current = f.clone();
    let mut best = f.clone();
    let mut t = params.t_max;
    while t > params.t_min {
        for _ in 0..params.inner_iters {
            tick(budget)?;
            trace.proposals += 1;
            if rng.gen::<f64>() < params.defact_prob {
                trace.uphill_proposed += 1;
                if let Some(next) = random_defactorization(&current, rng) {
                    let delta = next.cost() as f64 - current.cost() as f64;
                    if rng.gen::<f64>() < params.acceptance.probability(delta, t) {
                        trace.uphill_accepted += 1;
                        current = next;
                    }
                }
            } else if let Some(next) = random_factorization(&current, rng) {
                current = next;
                if current.cost() < best.cost() {
                    best = current.clone();
                }
            }
        }
        trace.levels += 1;
        t *= 1.0 - params.cooling_rate;
    }
    let out = descend(current, rng, budget)?;
    if out.cost() > f.cost() {
        // Ended in a worse basin than the input; fall back to the best
        // formula seen, which is never worse than the input.
        return descend(best, rng, budget);
    }
    Ok(out)
}

/// Simulated annealing.
pub fn simulated_annealing(f: &Formula, params: &HeuristicParams, seed: u64) -> Formula {
    simulated_annealing_traced(f, params, seed).0
}

/// [`simulated_annealing`] plus its loop counters.
pub fn simulated_annealing_traced(f: &Formula, params: &HeuristicParams, seed: u64) -> (Formula, SaTrace) {
    let mut trace = SaTrace::default();
    let out = anneal(f, params, &mut rng_from_seed(seed), &Unlimited, &mut trace).expect("unlimited budget");
    (out, trace)
}

/// Defactorization probability of the custom heuristic at iteration `k`.
pub fn custom_defact_probability(k: usize, k_max: usize) -> f64 {
    if k >= k_max {
        return 0.0;
    }
    (k_max - k) as f64 / (5 * k_max) as f64
}

fn custom(
    f: &Formula,
    params: &HeuristicParams,
    rng: &mut ChaCha8Rng,
    budget: &dyn Budget,
) -> Result<Formula, Interrupted> {
    let mut current = f.clone();
    let mut best = f.clone();
    for k in 0..params.k_max {
        tick(budget)?;
        let next = if rng.gen::<f64>() < custom_defact_probability(k, params.k_max) {
            random_defactorization(&current, rng)
        } else {
            random_factorization(&current, rng)
        };
        if let Some(next) = next {
            current = next;
            if current.cost() < best.cost() {
                best = current.clone();
            }
        }
    }
    descend(best, rng, budget)
}

/// Custom heuristic: a random walk whose defactorization probability decays
/// linearly from 1/5 to 0, then a full descent from the cheapest formula
/// seen.
pub fn custom_heuristic(f: &Formula, params: &HeuristicParams, seed: u64) -> Formula {
    custom(f, params, &mut rng_from_seed(seed), &Unlimited).expect("unlimited budget")
}

fn iterated_with_budget(
    base: Algorithm,
    f: &Formula,
    params: &HeuristicParams,
    budget: &dyn Budget,
) -> Result<Formula, Interrupted> {
    let mut best: Option<Formula> = None;
    for i in 0..params.restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(params.seed, i as u64));
        let out = run_base(base, f, params, &mut rng, budget)?;
        if best.as_ref().map_or(true, |b| out.cost() < b.cost()) {
            best = Some(out);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Runs `base` `params.restarts` times on streams derived from `seed` and
/// keeps the cheapest result (earliest on ties).
pub fn iterated(base: Algorithm, f: &Formula, params: &HeuristicParams, seed: u64) -> Formula {
    let params = HeuristicParams { seed, ..params.clone() };
    iterated_with_budget(base.base(), f, &params, &Unlimited).expect("unlimited budget")
}
