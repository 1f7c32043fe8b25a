//! Benchmark harness: every algorithm on every formula of every dataset,
//! summarized as mean optimization (MO), best over iterations (BOI) and
//! average running time (ART).

use std::fmt::Write as _;
use std::time::Duration;

use boolmin_core::{derive_seed, Algorithm, Formula, HeuristicParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{optimize_report, ReportOptions, RunReport};

/// A named list of formulas.
#[derive(Clone, Debug)]
pub struct Dataset {
    /// Column label.
    pub name: String,
    /// Formulas in file order.
    pub formulas: Vec<Formula>,
}

/// What to run.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Datasets, in column order.
    pub datasets: Vec<Dataset>,
    /// Algorithms, in row order.
    pub algorithms: Vec<Algorithm>,
    /// Runs per formula and algorithm.
    pub repetitions: usize,
    /// Optimizer parameters; `seed` is the master seed.
    pub params: HeuristicParams,
    /// Per-run wall-clock limit.
    pub time_limit: Option<Duration>,
    /// Check every run's output with the oracle.
    pub check: bool,
}

/// Rejected configuration.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BenchError {
    /// Empty algorithm list.
    #[error("no algorithms selected")]
    NoAlgorithms,
    /// Zero repetitions.
    #[error("repetitions must be at least 1")]
    NoRepetitions,
}

/// One (formula, algorithm) cell.
#[derive(Clone, Debug)]
pub struct FormulaResult {
    /// Dataset name.
    pub dataset: String,
    /// Position in the dataset.
    pub index: usize,
    /// Algorithm run.
    pub algorithm: Algorithm,
    /// `None` when every run hit the time limit.
    pub report: Option<RunReport>,
}

/// Aggregate over the formulas of one dataset for one algorithm.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    /// Dataset name.
    pub dataset: String,
    /// Algorithm name.
    pub algorithm: String,
    /// Mean of the per-formula MO.
    pub mo_percent: f64,
    /// Mean of the per-formula BOI.
    pub boi_percent: f64,
    /// Mean wall time per run, in seconds.
    pub art_s: f64,
    /// Formulas that produced a report.
    pub formulas: usize,
    /// Formulas excluded because every run timed out.
    pub failed: usize,
}

/// Full bench output.
#[derive(Clone, Debug)]
pub struct BenchReport {
    /// Cells in (dataset, formula, algorithm) order.
    pub results: Vec<FormulaResult>,
    /// One entry per (dataset, algorithm), in config order.
    pub summary: Vec<Summary>,
}

impl BenchReport {
    /// Cells with an oracle failure.
    pub fn unsound(&self) -> impl Iterator<Item = &FormulaResult> {
        self.results
            .iter()
            .filter(|r| r.report.as_ref().is_some_and(|rep| !rep.sound()))
    }

    /// Summary for one cell.
    pub fn get(&self, dataset: &str, algorithm: Algorithm) -> Option<&Summary> {
        self.summary
            .iter()
            .find(|s| s.dataset == dataset && s.algorithm == algorithm.name())
    }
}

/// Runs the benchmark. Formula `i` of dataset `d` is optimized with seed
/// `derive_seed(derive_seed(seed, d), i)` by every algorithm.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    if config.algorithms.is_empty() {
        return Err(BenchError::NoAlgorithms);
    }
    if config.repetitions == 0 {
        return Err(BenchError::NoRepetitions);
    }
    let options = ReportOptions {
        repetitions: config.repetitions,
        check_every_run: config.check,
        time_limit: config.time_limit,
    };
    let mut results = Vec::new();
    let mut summary = Vec::new();
    for (d, ds) in config.datasets.iter().enumerate() {
        let ds_seed = derive_seed(config.params.seed, d as u64);
        let cells: Vec<Vec<FormulaResult>> = ds
            .formulas
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let params = HeuristicParams {
                    seed: derive_seed(ds_seed, i as u64),
                    ..config.params.clone()
                };
                config
                    .algorithms
                    .iter()
                    .map(|&algorithm| FormulaResult {
                        dataset: ds.name.clone(),
                        index: i,
                        algorithm,
                        report: optimize_report(algorithm, f, &params, &options),
                    })
                    .collect()
            })
            .collect();
        for &alg in &config.algorithms {
            let reports: Vec<&RunReport> = cells
                .iter()
                .flatten()
                .filter(|c| c.algorithm == alg)
                .filter_map(|c| c.report.as_ref())
                .collect();
            let n = reports.len();
            let mean = |get: fn(&RunReport) -> f64| {
                if n == 0 {
                    0.0
                } else {
                    reports.iter().map(|r| get(r)).sum::<f64>() / n as f64
                }
            };
            summary.push(Summary {
                dataset: ds.name.clone(),
                algorithm: alg.name().to_string(),
                mo_percent: mean(|r| r.mo_percent),
                boi_percent: mean(|r| r.boi_percent),
                art_s: mean(|r| r.art_seconds),
                formulas: n,
                failed: ds.formulas.len() - n,
            });
        }
        results.extend(cells.into_iter().flatten());
    }
    Ok(BenchReport { results, summary })
}

/// Flat per-cell record for JSON and CSV output.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    /// Dataset name.
    pub dataset: String,
    /// Position in the dataset.
    pub formula: usize,
    /// Algorithm name.
    pub algorithm: String,
    /// Input cost.
    pub original_cost: usize,
    /// Best cost found, absent if every run timed out.
    pub best_cost: Option<usize>,
    /// Mean optimization.
    pub mo_percent: Option<f64>,
    /// Best over iterations.
    pub boi_percent: Option<f64>,
    /// Mean wall time per run.
    pub art_s: Option<f64>,
    /// Runs that hit the time limit.
    pub timed_out: usize,
    /// Oracle outcome for the best formula.
    pub check: String,
    /// Final cost of each run, `-` for timeouts, `;`-separated.
    pub runs: String,
}

impl ResultRow {
    fn new(r: &FormulaResult, original_cost: usize) -> Self {
        let rep = r.report.as_ref();
        ResultRow {
            dataset: r.dataset.clone(),
            formula: r.index,
            algorithm: r.algorithm.name().to_string(),
            original_cost,
            best_cost: rep.map(|x| x.best_cost),
            mo_percent: rep.map(|x| x.mo_percent),
            boi_percent: rep.map(|x| x.boi_percent),
            art_s: rep.map(|x| x.art_seconds),
            timed_out: rep.map_or(0, RunReport::timed_out),
            check: rep.map_or("none".into(), |x| verdict_label(x).into()),
            runs: rep
                .map(|x| {
                    x.per_run
                        .iter()
                        .map(|run| run.final_cost.map_or("-".into(), |c| c.to_string()))
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .unwrap_or_default(),
        }
    }
}

fn verdict_label(r: &RunReport) -> &'static str {
    use boolmin_core::Verdict;
    if r.failed_checks > 0 {
        return "not-equivalent";
    }
    match r.verdict {
        Verdict::Equivalent => "equivalent",
        Verdict::SampledAgree { .. } => "sampled-ok",
        Verdict::NotEquivalent { .. } => "not-equivalent",
    }
}

/// Per-cell rows; `original_cost` comes from the config's formulas.
pub fn rows(config: &BenchConfig, report: &BenchReport) -> Vec<ResultRow> {
    report
        .results
        .iter()
        .map(|r| {
            let ds = config
                .datasets
                .iter()
                .find(|d| d.name == r.dataset)
                .expect("dataset of a result");
            ResultRow::new(r, ds.formulas[r.index].cost())
        })
        .collect()
}

/// Table with one row per algorithm and MO/BOI/ART columns per dataset.
pub fn render_table(config: &BenchConfig, report: &BenchReport) -> String {
    const CELL: usize = 28;
    let mut out = String::new();
    let _ = write!(out, "{:<6}", "");
    for ds in &config.datasets {
        let _ = write!(out, "| {:<w$}", ds.name, w = CELL - 2);
    }
    out.push('\n');
    let _ = write!(out, "{:<6}", "");
    for _ in &config.datasets {
        let _ = write!(out, "| {:<8}{:<8}{:<10}", "MO", "BOI", "ART");
    }
    out.push('\n');
    for &alg in &config.algorithms {
        let _ = write!(out, "{:<6}", alg.name());
        for ds in &config.datasets {
            let s = report.get(&ds.name, alg).expect("summary for every cell");
            let _ = write!(
                out,
                "| {:<8}{:<8}{:<10}",
                format!("{:.1} %", s.mo_percent),
                format!("{:.1} %", s.boi_percent),
                format!("{:.3} s", s.art_s)
            );
        }
        out.push('\n');
    }
    let failed: usize = report.summary.iter().map(|s| s.failed).sum();
    if failed > 0 {
        let _ = writeln!(out, "{failed} formula runs excluded after timing out");
    }
    out
}

/// JSON document with per-cell `results` and the `summary`.
pub fn render_json(config: &BenchConfig, report: &BenchReport) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        results: Vec<ResultRow>,
        summary: &'a [Summary],
    }
    let doc = Doc {
        results: rows(config, report),
        summary: &report.summary,
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// CSV with one line per cell.
pub fn render_csv(config: &BenchConfig, report: &BenchReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows(config, report) {
        w.serialize(row).expect("serializable");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}
