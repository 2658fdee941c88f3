//! Benchmark harness: solve (method x instance x seed) grids, aggregate
//! with 1-shifted geometric means under the documented timeout and
//! node-imputation rules, and emit CSV/text reports plus raw records.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnb::{solve_mip, BnbError, SolveStatus, SolverConfig};
use crate::branching::{BranchError, RuleSpec, ScoringConfig};
use crate::features;
use crate::learn::SparseModel;
use crate::mip::MipInstance;
use crate::pipeline::SbDataTuple;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty input: {0}")]
    Empty(String),
    #[error("invalid value: {0}")]
    BadValue(String),
    #[error(transparent)]
    Branch(#[from] BranchError),
    #[error(transparent)]
    Bnb(#[from] BnbError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(#[from] serde_json::Error),
}

/// `exp(mean(ln(v + shift))) - shift` over nonnegative finite values.
pub fn shifted_geomean(values: &[f64], shift: f64) -> Result<f64, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Empty("shifted_geomean of no values".into()));
    }
    if shift <= 0.0 {
        return Err(EvalError::BadValue("shift must be positive".into()));
    }
    let mut acc = 0.0;
    for &v in values {
        if !v.is_finite() || v < 0.0 {
            return Err(EvalError::BadValue(format!(
                "shifted_geomean needs nonnegative finite values, got {v}"
            )));
        }
        acc += (v + shift).ln();
    }
    Ok((acc / values.len() as f64).exp() - shift)
}

/// Fraction of tuples whose model-top candidate matches the recorded SB
/// best (lowest-index tie-break on both sides).
pub fn top1_accuracy(model: &SparseModel, tuples: &[SbDataTuple]) -> Result<f64, EvalError> {
    if tuples.is_empty() {
        return Err(EvalError::Empty("no tuples for accuracy".into()));
    }
    let expected = features::base_schema().hash();
    if model.base_schema_hash != expected {
        return Err(EvalError::Branch(BranchError::SchemaMismatch {
            expected: model.base_schema_hash.clone(),
            actual: expected,
        }));
    }
    let mut hits = 0usize;
    for t in tuples {
        if t.x.len() != t.candidates.len() {
            return Err(EvalError::BadValue(format!(
                "tuple at node {} has mismatched rows",
                t.node
            )));
        }
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (i, row) in t.x.iter().enumerate() {
            let s = model.predict_base_row(row);
            if s > best_score {
                best_score = s;
                best = i;
            }
        }
        if best == t.best {
            hits += 1;
        }
    }
    Ok(hits as f64 / tuples.len() as f64)
}

#[derive(Clone, Copy, Debug)]
pub struct MetricConfig {
    pub shift: f64,
    pub time_limit: f64,
    pub seeds: u64,
    pub node_limit: u64,
    /// Report simplex-iteration ticks instead of wall time: a deterministic
    /// work proxy that makes report files byte-reproducible.
    pub deterministic_time: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            shift: 1.0,
            time_limit: 3600.0,
            seeds: 5,
            node_limit: 10_000_000,
            deterministic_time: false,
        }
    }
}

/// Seconds per simplex iteration in deterministic-tick mode.
const TICK_SECONDS: f64 = 1e-6;

/// One benchmark run outcome. `status` is a lowercase label so failed runs
/// ("error") can be recorded without aborting a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalRecord {
    pub method: String,
    pub instance: String,
    pub seed: u64,
    pub domain: String,
    pub size: String,
    pub status: String,
    pub time: f64,
    pub nodes: u64,
    pub objective: Option<f64>,
}

impl EvalRecord {
    pub fn solved(&self) -> bool {
        self.status == "optimal"
    }
}

fn status_label(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::TimeLimit => "time_limit",
        SolveStatus::NodeLimit => "node_limit",
        SolveStatus::Interrupted => "interrupted",
    }
}

/// An instance tagged with its suite coordinates.
#[derive(Clone, Debug)]
pub struct BenchInstance {
    pub instance: MipInstance,
    pub domain: String,
    pub size: String,
}

/// A named branching method for the harness.
#[derive(Clone, Debug)]
pub struct MethodSpec {
    pub name: String,
    pub rule: RuleSpec,
    pub scoring: ScoringConfig,
}

impl MethodSpec {
    pub fn new(name: &str, rule: RuleSpec) -> MethodSpec {
        MethodSpec {
            name: name.to_string(),
            rule,
            scoring: ScoringConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub domain: String,
    pub size: String,
    /// Problems solved to optimality (out of `problems`).
    pub solved: usize,
    pub problems: usize,
    pub time_geomean: Option<f64>,
    pub nodes_geomean: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,domain,size,solved,problems,time_geomean,nodes_geomean\n");
        for r in &self.rows {
            let time = r.time_geomean.map_or(String::new(), |v| format!("{v:.6}"));
            let nodes = r.nodes_geomean.map_or(String::new(), |v| format!("{v:.3}"));
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.method, r.domain, r.size, r.solved, r.problems, time, nodes
            ));
        }
        out
    }

    /// Solved | Time | Nodes blocks per (domain, size).
    pub fn render_text(&self) -> String {
        let mut groups: Vec<(String, String)> = Vec::new();
        for r in &self.rows {
            let key = (r.domain.clone(), r.size.clone());
            if !groups.contains(&key) {
                groups.push(key);
            }
        }
        let mut out = String::new();
        for (domain, size) in groups {
            out.push_str(&format!("== {domain} / {size} ==\n"));
            out.push_str(&format!(
                "{:<14} {:>8} {:>12} {:>14}\n",
                "Method", "Solved", "Time", "Nodes"
            ));
            for r in self
                .rows
                .iter()
                .filter(|r| r.domain == domain && r.size == size)
            {
                let time = r
                    .time_geomean
                    .map_or("-".to_string(), |v| format!("{v:.3}"));
                let nodes = r
                    .nodes_geomean
                    .map_or("-".to_string(), |v| format!("{v:.1}"));
                out.push_str(&format!(
                    "{:<14} {:>5}/{:<3} {:>12} {:>14}\n",
                    r.method, r.solved, r.problems, time, nodes
                ));
            }
            out.push('\n');
        }
        out
    }
}

fn run_one(
    method: &MethodSpec,
    bench: &BenchInstance,
    seed: u64,
    metric: &MetricConfig,
    solver: &SolverConfig,
) -> EvalRecord {
    let base = EvalRecord {
        method: method.name.clone(),
        instance: bench.instance.name.clone(),
        seed,
        domain: bench.domain.clone(),
        size: bench.size.clone(),
        status: "error".into(),
        time: metric.time_limit,
        nodes: 0,
        objective: None,
    };
    let mut rule = match method.rule.build(seed, &method.scoring) {
        Ok(rule) => rule,
        Err(_) => return base,
    };
    let cfg = SolverConfig {
        time_limit: metric.time_limit,
        node_limit: metric.node_limit,
        random_seed: seed,
        ..solver.clone()
    };
    match solve_mip(&bench.instance, &cfg, rule.as_mut()) {
        Ok(result) => {
            let raw_time = if metric.deterministic_time {
                result.lp_iterations as f64 * TICK_SECONDS
            } else {
                result.wall_time
            };
            let time = if result.status == SolveStatus::TimeLimit {
                metric.time_limit
            } else {
                raw_time.min(metric.time_limit)
            };
            EvalRecord {
                status: status_label(result.status).to_string(),
                time,
                nodes: result.nodes_processed,
                objective: result.incumbent_objective,
                ..base
            }
        }
        Err(_) => base,
    }
}

/// Solve every (method, instance, seed) combination on a worker pool (size
/// from `SPARSEBRANCH_WORKERS` when set) and aggregate. Per-run failures
/// are recorded, never fatal.
pub fn benchmark(
    methods: &[MethodSpec],
    instances: &[BenchInstance],
    metric: &MetricConfig,
    solver: &SolverConfig,
) -> Result<(ReportTable, Vec<EvalRecord>), EvalError> {
    if methods.is_empty() || instances.is_empty() {
        return Err(EvalError::Empty("benchmark needs methods and instances".into()));
    }
    let mut jobs = Vec::new();
    for m in methods {
        for b in instances {
            for seed in 1..=metric.seeds {
                jobs.push((m, b, seed));
            }
        }
    }

    let workers = std::env::var("SPARSEBRANCH_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let records: Vec<EvalRecord> = match workers {
        Some(n) if n >= 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| EvalError::BadValue(e.to_string()))?;
            pool.install(|| {
                use rayon::prelude::*;
                jobs.par_iter()
                    .map(|(m, b, seed)| run_one(m, b, *seed, metric, solver))
                    .collect()
            })
        }
        _ => {
            use rayon::prelude::*;
            jobs.par_iter()
                .map(|(m, b, seed)| run_one(m, b, *seed, metric, solver))
                .collect()
        }
    };
    // par_iter preserves job order, so records are already deterministic;
    // keep an explicit sort as the documented contract.
    let mut records = records;
    records.sort_by(|a, b| {
        (&a.method, &a.instance, a.seed).cmp(&(&b.method, &b.instance, b.seed))
    });
    let table = aggregate(&records, metric);
    Ok((table, records))
}

/// Rebuild the report table from raw records: solved counts over all
/// problems; time/node geomeans over problems solved by at least one
/// method, with timeouts at the limit and unsolved node counts imputed by
/// the group's largest solved node count.
pub fn aggregate(records: &[EvalRecord], metric: &MetricConfig) -> ReportTable {
    let mut group_order: Vec<(String, String)> = Vec::new();
    let mut method_order: Vec<String> = Vec::new();
    for r in records {
        let g = (r.domain.clone(), r.size.clone());
        if !group_order.contains(&g) {
            group_order.push(g);
        }
        if !method_order.contains(&r.method) {
            method_order.push(r.method.clone());
        }
    }

    let mut rows = Vec::new();
    for (domain, size) in &group_order {
        let in_group: Vec<&EvalRecord> = records
            .iter()
            .filter(|r| &r.domain == domain && &r.size == size)
            .collect();
        // Problems are (instance, seed) pairs.
        let mut problems: Vec<(String, u64)> = Vec::new();
        for r in &in_group {
            let key = (r.instance.clone(), r.seed);
            if !problems.contains(&key) {
                problems.push(key);
            }
        }
        let solved_by_any: Vec<&(String, u64)> = problems
            .iter()
            .filter(|(inst, seed)| {
                in_group
                    .iter()
                    .any(|r| &r.instance == inst && r.seed == *seed && r.solved())
            })
            .collect();
        let max_solved_nodes = in_group
            .iter()
            .filter(|r| {
                r.solved()
                    && solved_by_any
                        .iter()
                        .any(|(i, s)| i == &r.instance && *s == r.seed)
            })
            .map(|r| r.nodes)
            .max()
            .unwrap_or(0);

        for method in &method_order {
            let mine: BTreeMap<(String, u64), &EvalRecord> = in_group
                .iter()
                .filter(|r| &r.method == method)
                .map(|r| ((r.instance.clone(), r.seed), *r))
                .collect();
            if mine.is_empty() {
                continue;
            }
            let solved = mine.values().filter(|r| r.solved()).count();
            let mut times = Vec::new();
            let mut nodes = Vec::new();
            for key in solved_by_any.iter() {
                match mine.get(*key) {
                    Some(r) if r.solved() => {
                        times.push(r.time);
                        nodes.push(r.nodes as f64);
                    }
                    _ => {
                        times.push(metric.time_limit);
                        nodes.push(max_solved_nodes as f64);
                    }
                }
            }
            let time_geomean = shifted_geomean(&times, metric.shift).ok();
            let nodes_geomean = shifted_geomean(&nodes, metric.shift).ok();
            rows.push(ReportRow {
                method: method.clone(),
                domain: domain.clone(),
                size: size.clone(),
                solved,
                problems: problems.len(),
                time_geomean,
                nodes_geomean,
            });
        }
    }
    ReportTable { rows }
}

pub fn write_records(path: &Path, records: &[EvalRecord]) -> Result<(), EvalError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>, EvalError> {
    let file = BufReader::new(std::fs::File::open(path)?);
    let mut records = Vec::new();
    for line in file.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn geomean_examples() {
        // ln(2), ln(8) average to ln(4): result 3.
        let v = shifted_geomean(&[1.0, 7.0], 1.0).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        let v = shifted_geomean(&[5.5], 1.0).unwrap();
        assert!((v - 5.5).abs() < 1e-12);
        let v = shifted_geomean(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(shifted_geomean(&[], 1.0).is_err());
        assert!(shifted_geomean(&[-1.0], 1.0).is_err());
        assert!(shifted_geomean(&[1.0], 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn geomean_monotone_and_below_mean(
            mut values in proptest::collection::vec(0.0f64..1000.0, 1..12),
            bump in 0.0f64..100.0,
            idx in 0usize..12,
        ) {
            let before = shifted_geomean(&values, 1.0).unwrap();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            prop_assert!(before <= mean + 1e-9, "AM-GM on shifted values");
            let i = idx % values.len();
            values[i] += bump;
            let after = shifted_geomean(&values, 1.0).unwrap();
            prop_assert!(after + 1e-9 >= before, "monotone in each value");
        }
    }

    fn record(
        method: &str,
        instance: &str,
        seed: u64,
        status: &str,
        time: f64,
        nodes: u64,
    ) -> EvalRecord {
        EvalRecord {
            method: method.into(),
            instance: instance.into(),
            seed,
            domain: "sc".into(),
            size: "test".into(),
            status: status.into(),
            time,
            nodes,
            objective: None,
        }
    }

    #[test]
    fn timeout_recording_and_imputation() {
        let metric = MetricConfig {
            time_limit: 60.0,
            ..MetricConfig::default()
        };
        // a solves both problems; b times out everywhere.
        let records = vec![
            record("a", "i0", 1, "optimal", 2.0, 10),
            record("a", "i1", 1, "optimal", 4.0, 40),
            record("b", "i0", 1, "time_limit", 60.0, 999),
            record("b", "i1", 1, "time_limit", 60.0, 999),
        ];
        let table = aggregate(&records, &metric);
        let b_row = table
            .rows
            .iter()
            .find(|r| r.method == "b")
            .expect("row for b");
        // Geomean of [60, 60] is 60 exactly.
        assert!((b_row.time_geomean.unwrap() - 60.0).abs() < 1e-9);
        // Unsolved node counts impute the largest solved count (40).
        assert!((b_row.nodes_geomean.unwrap() - 40.0).abs() < 1e-9);
        assert_eq!(b_row.solved, 0);
        assert_eq!(b_row.problems, 2);
    }

    #[test]
    fn unsolved_by_all_is_excluded() {
        let metric = MetricConfig {
            time_limit: 60.0,
            ..MetricConfig::default()
        };
        let records = vec![
            record("a", "i0", 1, "optimal", 2.0, 10),
            record("a", "i1", 1, "time_limit", 60.0, 0),
            record("b", "i0", 1, "optimal", 6.0, 30),
            record("b", "i1", 1, "time_limit", 60.0, 0),
        ];
        let table = aggregate(&records, &metric);
        for row in &table.rows {
            // Only i0 enters the aggregates: each method's time geomean is
            // its own i0 time.
            let expect = if row.method == "a" { 2.0 } else { 6.0 };
            assert!((row.time_geomean.unwrap() - expect).abs() < 1e-9);
            assert_eq!(row.problems, 2, "solved counts still cover all problems");
        }
    }

    #[test]
    fn aggregate_is_recomputable_from_records() {
        let metric = MetricConfig {
            time_limit: 30.0,
            ..MetricConfig::default()
        };
        let records = vec![
            record("a", "i0", 1, "optimal", 1.0, 3),
            record("a", "i0", 2, "optimal", 2.0, 5),
            record("b", "i0", 1, "node_limit", 30.0, 100),
            record("b", "i0", 2, "optimal", 9.0, 50),
        ];
        let t1 = aggregate(&records, &metric);
        let t2 = aggregate(&records, &metric);
        assert_eq!(t1.to_csv(), t2.to_csv());
        assert!(t1.to_csv().contains("a,sc,test,2,2,"));
    }

    #[test]
    fn records_round_trip_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let records = vec![
            record("a", "i0", 1, "optimal", 1.5, 7),
            record("b", "i0", 1, "error", 30.0, 0),
        ];
        write_records(&path, &records).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(
            serde_json::to_string(&records).unwrap(),
            serde_json::to_string(&back).unwrap()
        );
    }

    #[test]
    fn top1_accuracy_perfect_and_constant() {
        use crate::features::{ExpansionMode, TermKind};
        use crate::learn::{ModelMetadata, ModelTerm, SparseModel};
        // Tuples over 2 candidates with feature 0 equal to the label.
        let tuples: Vec<SbDataTuple> = (0..10)
            .map(|i| {
                let hi = (i % 2) as usize;
                let mut x = vec![vec![0.0; crate::features::BASE_FEATURE_COUNT]; 2];
                x[hi][0] = 0.9;
                x[1 - hi][0] = 0.1;
                let mut scores = vec![0.1; 2];
                scores[hi] = 0.9;
                SbDataTuple {
                    instance: "i".into(),
                    solve: 1,
                    node: i,
                    candidates: vec![3, 5],
                    x,
                    scores,
                    best: hi,
                }
            })
            .collect();
        let model = |coef: f64| SparseModel {
            base_schema_hash: features::base_schema().hash(),
            schema_hash: "s".into(),
            mode: ExpansionMode::Linear,
            active_base: vec![0],
            intercept: 0.0,
            terms: if coef == 0.0 {
                vec![]
            } else {
                vec![ModelTerm {
                    term_id: 0,
                    kind: TermKind::Linear(0),
                    coefficient: coef,
                    name: "f0".into(),
                    mean: 0.0,
                    std: 1.0,
                }]
            },
            metadata: ModelMetadata {
                lambda: 0.0,
                validation_mse: None,
                nnz: usize::from(coef != 0.0),
                train_rows: 0,
                y_mean: 0.0,
                y_std: 1.0,
                converged: true,
            },
        };
        // A model tracking the label perfectly scores 1.0.
        assert_eq!(top1_accuracy(&model(1.0), &tuples).unwrap(), 1.0);
        // A constant model always picks the first candidate: accuracy is
        // the fraction of tuples whose best is index 0.
        let base = tuples.iter().filter(|t| t.best == 0).count() as f64 / tuples.len() as f64;
        assert_eq!(top1_accuracy(&model(0.0), &tuples).unwrap(), base);
        // Schema mismatch is a hard error.
        let mut wrong = model(1.0);
        wrong.base_schema_hash = "nope".into();
        assert!(top1_accuracy(&wrong, &tuples).is_err());
    }
}
