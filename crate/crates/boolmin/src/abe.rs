//! Modeled key generation and decryption cost of optimized policies.

use std::time::Instant;

use boolmin_core::datagen::{generate, ComparisonSpec};
use boolmin_core::{
    derive_seed, share_count, Algorithm, CostModel, Formula, GenError, GenSpec, HeuristicParams, PipelineRecord,
};
use rayon::prelude::*;
use serde::Serialize;

/// Optimizes `f` (if an optimizer is given), times it and prices the
/// result with `model`. Also returns the optimized policy.
pub fn simulate_pipeline(
    f: &Formula,
    optimizer: Option<Algorithm>,
    model: &CostModel,
    params: &HeuristicParams,
) -> (PipelineRecord, Formula) {
    let orig = share_count(f).total;
    let Some(alg) = optimizer else {
        return (model.record(orig, orig, 0.0), f.clone());
    };
    let start = Instant::now();
    let g = alg.run(f, params);
    let optimizer_ms = start.elapsed().as_secs_f64() * 1e3;
    (model.record(orig, share_count(&g).total, optimizer_ms), g)
}

/// Generator for pipeline policies of about `size` literals: comparison
/// queries on 8-bit attributes, in the literal range `[0.9 size, size]`.
pub fn pipeline_spec(size: usize, seed: u64) -> GenSpec {
    let pool = (size / 12).max(2);
    let clauses = (size / 6).max(2);
    GenSpec::comparison(
        1..=usize::MAX,
        (size * 9 / 10).max(1)..=size,
        ComparisonSpec {
            bit_width: 8,
            num_clauses: clauses..=clauses,
            numeric_attributes: pool,
            pool,
            clause_arity: 1..=2,
            or_percent: 90,
        },
        seed,
    )
}

/// A sweep over policy sizes and optimizers.
#[derive(Clone, Debug)]
pub struct AbeConfig {
    /// Nominal policy sizes in literals.
    pub sizes: Vec<usize>,
    /// Optimizers to compare; `None` is the unoptimized baseline.
    pub optimizers: Vec<Option<Algorithm>>,
    /// Fresh policies per size.
    pub repeats: usize,
    /// Timing model.
    pub model: CostModel,
    /// Optimizer parameters; `seed` is the master seed of the sweep.
    pub params: HeuristicParams,
}

impl Default for AbeConfig {
    fn default() -> Self {
        AbeConfig {
            sizes: vec![50, 100, 150, 200, 250],
            optimizers: vec![None, Some(Algorithm::HC), Some(Algorithm::CH), Some(Algorithm::ISA)],
            repeats: 30,
            model: CostModel::default(),
            params: HeuristicParams::default(),
        }
    }
}

/// Means over the repeats of one (size, optimizer) cell.
#[derive(Clone, Debug, Serialize)]
pub struct AbePoint {
    /// Nominal size.
    pub size: usize,
    /// Optimizer name, `none` for the baseline.
    pub optimizer: String,
    /// Mean shares before optimization.
    pub orig_shares: f64,
    /// Mean shares after optimization.
    pub opt_shares: f64,
    /// Mean modeled decryption time.
    pub decrypt_ms: f64,
    /// Mean modeled key generation time, optimizer included.
    pub keygen_ms: f64,
    /// Mean optimizer wall time.
    pub optimizer_ms: f64,
}

/// Name used for an optimizer in reports.
pub fn optimizer_name(o: Option<Algorithm>) -> &'static str {
    o.map_or("none", Algorithm::name)
}

/// Runs the sweep. Repeat `r` at size index `i` draws its policy from
/// `derive_seed(derive_seed(seed, i), r)`, and every optimizer sees the
/// same policies.
pub fn run_abe(config: &AbeConfig) -> Result<Vec<AbePoint>, GenError> {
    let mut points = Vec::new();
    for (i, &size) in config.sizes.iter().enumerate() {
        let size_seed = derive_seed(config.params.seed, i as u64);
        let records: Vec<Vec<PipelineRecord>> = (0..config.repeats)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(size_seed, r as u64);
                let f = generate(&pipeline_spec(size, seed))?;
                let params = HeuristicParams {
                    seed,
                    ..config.params.clone()
                };
                Ok(config
                    .optimizers
                    .iter()
                    .map(|&o| simulate_pipeline(&f, o, &config.model, &params).0)
                    .collect())
            })
            .collect::<Result<_, GenError>>()?;
        for (j, &o) in config.optimizers.iter().enumerate() {
            let n = records.len().max(1) as f64;
            let mean = |get: fn(&PipelineRecord) -> f64| records.iter().map(|rs| get(&rs[j])).sum::<f64>() / n;
            points.push(AbePoint {
                size,
                optimizer: optimizer_name(o).to_string(),
                orig_shares: mean(|r| r.orig_shares as f64),
                opt_shares: mean(|r| r.opt_shares as f64),
                decrypt_ms: mean(|r| r.decrypt_ms),
                keygen_ms: mean(|r| r.keygen_ms),
                optimizer_ms: mean(|r| r.optimizer_ms),
            });
        }
    }
    Ok(points)
}
