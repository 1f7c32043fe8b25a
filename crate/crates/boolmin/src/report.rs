//! Repeated optimizer runs on one formula and their MO/BOI/ART summary.

use std::time::{Duration, Instant};

use boolmin_core::formula::oracle::{check_auto, DEFAULT_EXHAUSTIVE_BOUND};
use boolmin_core::heuristics::Budget;
use boolmin_core::{derive_seed, Algorithm, Formula, HeuristicParams, Verdict};
use rayon::prelude::*;

/// Wall-clock budget for one run.
#[derive(Clone, Copy, Debug)]
pub struct Deadline(pub Instant);

impl Deadline {
    /// Expires `limit` from now.
    pub fn after(limit: Duration) -> Self {
        Deadline(Instant::now() + limit)
    }
}

impl Budget for Deadline {
    fn exhausted(&self) -> bool {
        Instant::now() >= self.0
    }
}

/// How [`optimize_report`] runs.
#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Independent runs; run `r` is seeded with `derive_seed(params.seed, r)`.
    pub repetitions: usize,
    /// Check every run's output with the oracle, not only the best one.
    pub check_every_run: bool,
    /// Per-run wall-clock limit; runs that hit it are recorded as failed.
    pub time_limit: Option<Duration>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            repetitions: 16,
            check_every_run: false,
            time_limit: None,
        }
    }
}

/// Outcome of one run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    /// Final cost, `None` if the run hit its time limit.
    pub final_cost: Option<usize>,
    /// Wall time of the run.
    pub wall: Duration,
}

/// Summary of repeated runs on one formula.
#[derive(Clone, Debug)]
pub struct RunReport {
    /// Optimizer used.
    pub algorithm: Algorithm,
    /// Cost of the input.
    pub original_cost: usize,
    /// Lowest cost over completed runs.
    pub best_cost: usize,
    /// Runs in seed order.
    pub per_run: Vec<RunRecord>,
    /// Mean over completed runs of the percentage saved.
    pub mo_percent: f64,
    /// Percentage saved by the best run.
    pub boi_percent: f64,
    /// Mean wall time per run, in seconds.
    pub art_seconds: f64,
    /// Output of the earliest best run.
    pub best_formula: Formula,
    /// Oracle verdict for `best_formula` against the input.
    pub verdict: Verdict,
    /// Runs whose output failed the oracle (only counted with
    /// `check_every_run`).
    pub failed_checks: usize,
}

impl RunReport {
    /// Runs that hit the time limit.
    pub fn timed_out(&self) -> usize {
        self.per_run.iter().filter(|r| r.final_cost.is_none()).count()
    }

    /// Whether every checked output was equivalent to the input.
    pub fn sound(&self) -> bool {
        self.verdict.holds() && self.failed_checks == 0
    }
}

/// Percentage of `original` saved by reaching `cost`.
pub fn saved_percent(original: usize, cost: usize) -> f64 {
    if original == 0 {
        0.0
    } else {
        100.0 * (original as f64 - cost as f64) / original as f64
    }
}

/// Runs `algorithm` on `f` `options.repetitions` times in parallel and
/// summarizes. Returns `None` when every run timed out.
///
/// Results do not depend on the thread count: each run has its own seed
/// and the summary is computed in run order.
pub fn optimize_report(
    algorithm: Algorithm,
    f: &Formula,
    params: &HeuristicParams,
    options: &ReportOptions,
) -> Option<RunReport> {
    assert!(options.repetitions >= 1, "repetitions must be positive");
    let outcomes: Vec<(Option<Formula>, Duration, bool)> = (0..options.repetitions)
        .into_par_iter()
        .map(|r| {
            let p = HeuristicParams {
                seed: derive_seed(params.seed, r as u64),
                ..params.clone()
            };
            let start = Instant::now();
            let out = match options.time_limit {
                Some(limit) => algorithm.run_with_budget(f, &p, &Deadline::after(limit)).ok(),
                None => Some(algorithm.run(f, &p)),
            };
            let wall = start.elapsed();
            let ok = match (&out, options.check_every_run) {
                (Some(g), true) => check_auto(f, g, DEFAULT_EXHAUSTIVE_BOUND, p.seed).holds(),
                _ => true,
            };
            (out, wall, ok)
        })
        .collect();

    let original_cost = f.cost();
    let mut best: Option<&Formula> = None;
    for g in outcomes.iter().filter_map(|(g, _, _)| g.as_ref()) {
        if best.map_or(true, |b| g.cost() < b.cost()) {
            best = Some(g);
        }
    }
    let best_formula = best?.clone();
    let completed: Vec<usize> = outcomes
        .iter()
        .filter_map(|(g, _, _)| g.as_ref().map(Formula::cost))
        .collect();
    let mo_percent = completed.iter().map(|&c| saved_percent(original_cost, c)).sum::<f64>() / completed.len() as f64;
    let art_seconds = outcomes.iter().map(|(_, w, _)| w.as_secs_f64()).sum::<f64>() / outcomes.len() as f64;
    let verdict = check_auto(f, &best_formula, DEFAULT_EXHAUSTIVE_BOUND, params.seed);
    Some(RunReport {
        algorithm,
        original_cost,
        best_cost: best_formula.cost(),
        boi_percent: saved_percent(original_cost, best_formula.cost()),
        mo_percent,
        art_seconds,
        failed_checks: outcomes.iter().filter(|(_, _, ok)| !ok).count(),
        per_run: outcomes
            .iter()
            .map(|(g, wall, _)| RunRecord {
                final_cost: g.as_ref().map(Formula::cost),
                wall: *wall,
            })
            .collect(),
        best_formula,
        verdict,
    })
}
