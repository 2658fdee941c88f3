//! Scoring-based branching rules: full strong branching, pseudocosts, the
//! reliability hybrid, a random floor baseline, and the learned sparse-model
//! rule. All rules combine directional gains with the product score and pick
//! the highest-scoring candidate.

use std::path::Path;
use std::sync::Arc;

use rand::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bnb::{Direction, PseudocostStats};
use crate::features::{self, NodeHistory};
use crate::learn::SparseModel;
use crate::mip::ReducedView;
use crate::simplex::{ChildLpSolver, LpSolution, LpStatus};

/// Parameters of the product score and the strong-branching evaluation.
#[derive(Clone, Copy, Debug)]
pub struct ScoringConfig {
    /// Floor applied to each directional gain inside the product score.
    pub epsilon: f64,
    /// Gain assigned to a direction whose child LP is infeasible.
    pub large_gain: f64,
    /// Optional simplex iteration cap per child LP during strong branching.
    pub sb_iteration_limit: Option<u64>,
    /// Pseudocost observations per direction required before a variable
    /// counts as reliable.
    pub reliability_threshold: u32,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            epsilon: 1e-6,
            large_gain: 1e8,
            sb_iteration_limit: None,
            reliability_threshold: 8,
        }
    }
}

/// Fractional integer variables at a node, ascending by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    vars: Vec<usize>,
}

impl CandidateSet {
    pub fn new(mut vars: Vec<usize>) -> Self {
        vars.sort_unstable();
        CandidateSet { vars }
    }

    /// Free integer variables whose LP value violates integrality by more
    /// than `int_tol`.
    pub fn from_lp(view: &ReducedView, lp: &LpSolution, int_tol: f64) -> Self {
        let vars = view
            .free_vars
            .iter()
            .copied()
            .filter(|&j| {
                if !view.instance.integrality[j] {
                    return false;
                }
                let x = lp.x_hat[j];
                let frac = x - x.floor();
                frac.min(1.0 - frac) > int_tol
            })
            .collect();
        CandidateSet { vars }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

/// Product score of Eq-style directional gains:
/// `max(down, eps) * max(up, eps)`.
pub fn product_score(down_gain: f64, up_gain: f64, cfg: &ScoringConfig) -> f64 {
    down_gain.max(cfg.epsilon) * up_gain.max(cfg.epsilon)
}

/// Outcome of one child LP during strong branching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChildOutcome {
    Feasible { z: f64 },
    Infeasible,
}

/// Full strong-branching evaluation of a candidate set.
#[derive(Clone, Debug)]
pub struct SbEvaluation {
    /// Candidate variable indices, aligned with all vectors below.
    pub candidates: Vec<usize>,
    pub down: Vec<ChildOutcome>,
    pub up: Vec<ChildOutcome>,
    pub down_gain: Vec<f64>,
    pub up_gain: Vec<f64>,
    pub scores: Vec<f64>,
    /// Set when any child LP failed numerically; data consumers must
    /// discard the node.
    pub tainted: bool,
}

fn child_gain(
    solver: &mut ChildLpSolver,
    var: usize,
    lb: f64,
    ub: f64,
    parent_z: f64,
    cfg: &ScoringConfig,
    tainted: &mut bool,
) -> (ChildOutcome, f64) {
    if lb > ub {
        return (ChildOutcome::Infeasible, cfg.large_gain);
    }
    match solver.resolve_with_limit(var, lb, ub, cfg.sb_iteration_limit) {
        Ok(sol) => match sol.status {
            LpStatus::Optimal => {
                let gain = (sol.z - parent_z).max(0.0);
                (ChildOutcome::Feasible { z: sol.z }, gain)
            }
            LpStatus::Infeasible => (ChildOutcome::Infeasible, cfg.large_gain),
            LpStatus::IterationLimit => {
                // Iteration-capped probe: the truncated objective still
                // yields a usable (conservative) gain estimate.
                let z = if sol.z.is_finite() { sol.z } else { parent_z };
                let gain = (z - parent_z).max(0.0);
                (ChildOutcome::Feasible { z }, gain)
            }
        },
        Err(_) => {
            *tainted = true;
            (ChildOutcome::Feasible { z: parent_z }, 0.0)
        }
    }
}

/// Score every candidate by solving both child LPs (scoreall semantics).
/// Leaves pseudocosts and incumbents untouched (idempotent semantics).
pub fn strong_branch_scores(
    solver: &mut ChildLpSolver,
    view: &ReducedView,
    lp: &LpSolution,
    candidates: &CandidateSet,
    cfg: &ScoringConfig,
) -> SbEvaluation {
    let mut down = Vec::with_capacity(candidates.len());
    let mut up = Vec::with_capacity(candidates.len());
    let mut down_gain = Vec::with_capacity(candidates.len());
    let mut up_gain = Vec::with_capacity(candidates.len());
    let mut scores = Vec::with_capacity(candidates.len());
    let mut tainted = false;

    for &j in candidates.vars() {
        let x = lp.x_hat[j];
        let floor = x.floor();
        let ceil = x.ceil();
        let (d_out, d_gain) =
            child_gain(solver, j, view.lb[j], floor, lp.z, cfg, &mut tainted);
        let (u_out, u_gain) = child_gain(solver, j, ceil, view.ub[j], lp.z, cfg, &mut tainted);
        scores.push(product_score(d_gain, u_gain, cfg));
        down.push(d_out);
        up.push(u_out);
        down_gain.push(d_gain);
        up_gain.push(u_gain);
    }

    SbEvaluation {
        candidates: candidates.vars().to_vec(),
        down,
        up,
        down_gain,
        up_gain,
        scores,
        tainted,
    }
}

/// Pseudocost estimates combined with the product score. The down estimate
/// pairs the floor distance with the down pseudocost, the up estimate the
/// ceiling distance with the up pseudocost.
pub fn pseudocost_scores(
    x_hat: &[f64],
    candidates: &CandidateSet,
    stats: &PseudocostStats,
    cfg: &ScoringConfig,
) -> Vec<f64> {
    let fb_down = stats.fallback_phi(Direction::Down);
    let fb_up = stats.fallback_phi(Direction::Up);
    candidates
        .vars()
        .iter()
        .map(|&j| {
            let x = x_hat[j];
            let floor_dist = x - x.floor();
            let ceil_dist = x.ceil() - x;
            let phi_down = stats.phi(j, Direction::Down).unwrap_or(fb_down);
            let phi_up = stats.phi(j, Direction::Up).unwrap_or(fb_up);
            product_score(floor_dist * phi_down, ceil_dist * phi_up, cfg)
        })
        .collect()
}

/// Reliability hybrid: pseudocost scores for candidates observed at least
/// `reliability_threshold` times in both directions, strong branching for
/// the rest. Strong-branched gains feed back into `stats`.
pub fn reliability_scores(
    solver: &mut ChildLpSolver,
    view: &ReducedView,
    lp: &LpSolution,
    candidates: &CandidateSet,
    stats: &mut PseudocostStats,
    cfg: &ScoringConfig,
    int_tol: f64,
) -> (Vec<f64>, bool) {
    let fb_down = stats.fallback_phi(Direction::Down);
    let fb_up = stats.fallback_phi(Direction::Up);
    let mut scores = Vec::with_capacity(candidates.len());
    let mut tainted = false;

    for &j in candidates.vars() {
        let x = lp.x_hat[j];
        let floor_dist = x - x.floor();
        let ceil_dist = x.ceil() - x;
        let reliable = stats
            .count(j, Direction::Down)
            .min(stats.count(j, Direction::Up))
            >= cfg.reliability_threshold;
        if reliable {
            let phi_down = stats.phi(j, Direction::Down).unwrap_or(fb_down);
            let phi_up = stats.phi(j, Direction::Up).unwrap_or(fb_up);
            scores.push(product_score(floor_dist * phi_down, ceil_dist * phi_up, cfg));
        } else {
            let (d_out, d_gain) =
                child_gain(solver, j, view.lb[j], x.floor(), lp.z, cfg, &mut tainted);
            let (u_out, u_gain) =
                child_gain(solver, j, x.ceil(), view.ub[j], lp.z, cfg, &mut tainted);
            match d_out {
                ChildOutcome::Feasible { .. } => {
                    stats.update(j, Direction::Down, d_gain, floor_dist, int_tol)
                }
                ChildOutcome::Infeasible => stats.record_infeasible(j, Direction::Down),
            }
            match u_out {
                ChildOutcome::Feasible { .. } => {
                    stats.update(j, Direction::Up, u_gain, ceil_dist, int_tol)
                }
                ChildOutcome::Infeasible => stats.record_infeasible(j, Direction::Up),
            }
            scores.push(product_score(d_gain, u_gain, cfg));
        }
    }
    (scores, tainted)
}

#[derive(Debug, Error)]
pub enum BranchError {
    #[error("feature schema mismatch: model expects hash {expected}, got {actual}")]
    SchemaMismatch { expected: String, actual: String },
    #[error("model file error: {0}")]
    Model(String),
}

/// Predicted normalized strong-branching scores for each feature row.
pub fn learned_scores(
    model: &SparseModel,
    features: &crate::features::FeatureMatrix,
) -> Result<Vec<f64>, BranchError> {
    let expected = features::base_schema().hash();
    if model.base_schema_hash != expected {
        return Err(BranchError::SchemaMismatch {
            expected: model.base_schema_hash.clone(),
            actual: expected,
        });
    }
    features
        .rows()
        .map(|row| {
            if row.len() != features::BASE_FEATURE_COUNT {
                return Err(BranchError::Model(format!(
                    "feature row has {} entries, expected {}",
                    row.len(),
                    features::BASE_FEATURE_COUNT
                )));
            }
            Ok(model.predict_base_row(row))
        })
        .collect()
}

/// Argmax over the candidate list; ties go to the earliest candidate, i.e.
/// the lowest variable index for a canonically ordered set.
pub fn pick_candidate(scores: &[f64], candidates: &CandidateSet) -> usize {
    assert!(
        !scores.is_empty() && scores.len() == candidates.len(),
        "pick_candidate needs one score per candidate"
    );
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    candidates.vars()[best]
}

/// Argmax with ties broken by earliest position in `order`, the engine's
/// seed-controlled tie-break channel. The identity order reproduces
/// `pick_candidate`.
pub fn pick_candidate_ordered(scores: &[f64], candidates: &CandidateSet, order: &[usize]) -> usize {
    assert!(!scores.is_empty() && scores.len() == candidates.len());
    debug_assert_eq!(order.len(), scores.len());
    let mut best: Option<usize> = None;
    for &pos in order {
        match best {
            None => best = Some(pos),
            Some(cur) if scores[pos] > scores[cur] => best = Some(pos),
            _ => {}
        }
    }
    candidates.vars()[best.expect("nonempty candidate set")]
}

/// Everything a branching rule may consult at one node.
pub struct BranchContext<'c, 'v> {
    pub view: &'c ReducedView<'v>,
    pub lp: &'c LpSolution,
    pub candidates: &'c CandidateSet,
    pub stats: &'c mut PseudocostStats,
    pub child_solver: &'c mut ChildLpSolver<'v>,
    pub history: NodeHistory<'c>,
    pub node_id: u64,
    pub instance_id: &'c str,
    pub int_tol: f64,
    /// Permutation of candidate positions used for tie-breaking.
    pub tie_order: &'c [usize],
}

/// The branching decision handed back to the engine.
#[derive(Clone, Debug)]
pub struct BranchChoice {
    pub var: usize,
    /// Scores source label recorded in traces.
    pub source: &'static str,
    /// Node must be discarded by data consumers (numerical SB failure).
    pub tainted: bool,
}

/// A variable-selection policy driving the branch-and-bound engine.
/// Rules are built per solve and never cross threads.
pub trait BranchingRule {
    fn name(&self) -> &'static str;
    fn select(&mut self, ctx: &mut BranchContext<'_, '_>) -> BranchChoice;
}

/// Vanilla full strong branching: evaluates every candidate, side-effect
/// free. Falls back to pseudocosts on numerical taint.
pub struct VfsRule {
    pub scoring: ScoringConfig,
}

impl BranchingRule for VfsRule {
    fn name(&self) -> &'static str {
        "vfs"
    }

    fn select(&mut self, ctx: &mut BranchContext<'_, '_>) -> BranchChoice {
        let eval = strong_branch_scores(
            ctx.child_solver,
            ctx.view,
            ctx.lp,
            ctx.candidates,
            &self.scoring,
        );
        if eval.tainted {
            let scores = pseudocost_scores(&ctx.lp.x_hat, ctx.candidates, ctx.stats, &self.scoring);
            let var = pick_candidate_ordered(&scores, ctx.candidates, ctx.tie_order);
            return BranchChoice {
                var,
                source: "vfs-fallback",
                tainted: true,
            };
        }
        let var = pick_candidate_ordered(&eval.scores, ctx.candidates, ctx.tie_order);
        BranchChoice {
            var,
            source: "vfs",
            tainted: false,
        }
    }
}

/// Pure pseudocost branching.
pub struct PseudocostRule {
    pub scoring: ScoringConfig,
}

impl BranchingRule for PseudocostRule {
    fn name(&self) -> &'static str {
        "pseudocost"
    }

    fn select(&mut self, ctx: &mut BranchContext<'_, '_>) -> BranchChoice {
        let scores = pseudocost_scores(&ctx.lp.x_hat, ctx.candidates, ctx.stats, &self.scoring);
        let var = pick_candidate_ordered(&scores, ctx.candidates, ctx.tie_order);
        BranchChoice {
            var,
            source: "pseudocost",
            tainted: false,
        }
    }
}

/// Reliability branching: strong branching until pseudocosts are trusted.
pub struct ReliabilityRule {
    pub scoring: ScoringConfig,
}

impl BranchingRule for ReliabilityRule {
    fn name(&self) -> &'static str {
        "reliability"
    }

    fn select(&mut self, ctx: &mut BranchContext<'_, '_>) -> BranchChoice {
        let (scores, tainted) = reliability_scores(
            ctx.child_solver,
            ctx.view,
            ctx.lp,
            ctx.candidates,
            ctx.stats,
            &self.scoring,
            ctx.int_tol,
        );
        let var = pick_candidate_ordered(&scores, ctx.candidates, ctx.tie_order);
        BranchChoice {
            var,
            source: "reliability",
            tainted,
        }
    }
}

/// Uniform random candidate choice, the floor baseline.
pub struct RandomRule {
    rng: ChaCha8Rng,
}

impl RandomRule {
    pub fn new(seed: u64) -> Self {
        RandomRule {
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5261_6e64),
        }
    }
}

impl BranchingRule for RandomRule {
    fn name(&self) -> &'static str {
        "random"
    }

    fn select(&mut self, ctx: &mut BranchContext<'_, '_>) -> BranchChoice {
        let idx = self.rng.random_range(0..ctx.candidates.len());
        BranchChoice {
            var: ctx.candidates.vars()[idx],
            source: "random",
            tainted: false,
        }
    }
}

/// Branching on predicted strong-branching scores from a sparse model.
pub struct LearnedRule {
    model: Arc<SparseModel>,
}

impl LearnedRule {
    /// Fails when the model was trained against a different base schema.
    pub fn new(model: Arc<SparseModel>) -> Result<Self, BranchError> {
        let expected = features::base_schema().hash();
        if model.base_schema_hash != expected {
            return Err(BranchError::SchemaMismatch {
                expected: model.base_schema_hash.clone(),
                actual: expected,
            });
        }
        Ok(LearnedRule { model })
    }
}

impl BranchingRule for LearnedRule {
    fn name(&self) -> &'static str {
        "model"
    }

    fn select(&mut self, ctx: &mut BranchContext<'_, '_>) -> BranchChoice {
        let matrix = features::extract_features(
            ctx.view,
            ctx.lp,
            ctx.candidates,
            ctx.stats,
            &ctx.history,
        );
        let scores: Vec<f64> = matrix
            .rows()
            .map(|row| self.model.predict_base_row(row))
            .collect();
        let var = pick_candidate_ordered(&scores, ctx.candidates, ctx.tie_order);
        BranchChoice {
            var,
            source: "model",
            tainted: false,
        }
    }
}

/// A parsed `--rule` argument; `build` turns it into a fresh rule instance
/// for one solve.
#[derive(Clone, Debug)]
pub enum RuleSpec {
    Vfs,
    Pseudocost,
    Reliability,
    Random,
    Model(Arc<SparseModel>),
}

impl RuleSpec {
    /// Parse `vfs | pseudocost | reliability | random | model:<path>`,
    /// loading the model file eagerly.
    pub fn parse(text: &str) -> Result<RuleSpec, BranchError> {
        match text {
            "vfs" => Ok(RuleSpec::Vfs),
            "pseudocost" => Ok(RuleSpec::Pseudocost),
            "reliability" => Ok(RuleSpec::Reliability),
            "random" => Ok(RuleSpec::Random),
            other => match other.strip_prefix("model:") {
                Some(path) => {
                    let model = SparseModel::load(Path::new(path))
                        .map_err(|e| BranchError::Model(e.to_string()))?;
                    Ok(RuleSpec::Model(Arc::new(model)))
                }
                None => Err(BranchError::Model(format!(
                    "unknown rule `{other}` (expected vfs|pseudocost|reliability|random|model:<path>)"
                ))),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            RuleSpec::Vfs => "vfs".into(),
            RuleSpec::Pseudocost => "pseudocost".into(),
            RuleSpec::Reliability => "reliability".into(),
            RuleSpec::Random => "random".into(),
            RuleSpec::Model(_) => "model".into(),
        }
    }

    pub fn build(
        &self,
        seed: u64,
        scoring: &ScoringConfig,
    ) -> Result<Box<dyn BranchingRule>, BranchError> {
        Ok(match self {
            RuleSpec::Vfs => Box::new(VfsRule { scoring: *scoring }),
            RuleSpec::Pseudocost => Box::new(PseudocostRule { scoring: *scoring }),
            RuleSpec::Reliability => Box::new(ReliabilityRule { scoring: *scoring }),
            RuleSpec::Random => Box::new(RandomRule::new(seed)),
            RuleSpec::Model(m) => Box::new(LearnedRule::new(m.clone())?),
        })
    }
}
