//! Branch-and-bound driver: best-bound / depth-first node selection,
//! LP bounding, pruning, incumbent management, pseudocost bookkeeping, and
//! delegation to a pluggable branching rule.

use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rand::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branching::{BranchContext, BranchingRule, CandidateSet};
use crate::features::NodeHistory;
use crate::mip::{reduce, MipInstance, ModelError, NodeBounds};
use crate::simplex::{solve_lp, ChildLpSolver, LpError, LpStatus, SimplexConfig};
use crate::util::OrdF64;

/// Branching direction relative to the fractional LP value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Down,
    Up,
}

#[derive(Clone, Copy, Debug, Default)]
struct DirStat {
    /// Sum of observed per-unit dual-bound gains.
    sum: f64,
    /// Number of feasible-child observations.
    count: u32,
    /// Number of infeasible-child observations.
    infeasible: u32,
}

/// Per-variable branching history: running per-unit dual-bound gains in both
/// directions, infeasible-child counts, and how often the variable was
/// branched on.
#[derive(Clone, Debug)]
pub struct PseudocostStats {
    down: Vec<DirStat>,
    up: Vec<DirStat>,
    branched: Vec<u32>,
}

impl PseudocostStats {
    pub fn new(n_vars: usize) -> Self {
        PseudocostStats {
            down: vec![DirStat::default(); n_vars],
            up: vec![DirStat::default(); n_vars],
            branched: vec![0; n_vars],
        }
    }

    fn dir(&self, var: usize, dir: Direction) -> &DirStat {
        match dir {
            Direction::Down => &self.down[var],
            Direction::Up => &self.up[var],
        }
    }

    fn dir_mut(&mut self, var: usize, dir: Direction) -> &mut DirStat {
        match dir {
            Direction::Down => &mut self.down[var],
            Direction::Up => &mut self.up[var],
        }
    }

    /// Mean per-unit gain, if the variable has been observed in `dir`.
    pub fn phi(&self, var: usize, dir: Direction) -> Option<f64> {
        let s = self.dir(var, dir);
        if s.count > 0 {
            Some(s.sum / f64::from(s.count))
        } else {
            None
        }
    }

    /// Initialization for unobserved variables: the mean of initialized
    /// pseudocosts in the same direction, or 1.0 when none exist.
    pub fn fallback_phi(&self, dir: Direction) -> f64 {
        let list = match dir {
            Direction::Down => &self.down,
            Direction::Up => &self.up,
        };
        let mut total = 0.0;
        let mut n = 0u32;
        for s in list {
            if s.count > 0 {
                total += s.sum / f64::from(s.count);
                n += 1;
            }
        }
        if n > 0 {
            total / f64::from(n)
        } else {
            1.0
        }
    }

    pub fn count(&self, var: usize, dir: Direction) -> u32 {
        self.dir(var, dir).count
    }

    pub fn infeasible_count(&self, var: usize, dir: Direction) -> u32 {
        self.dir(var, dir).infeasible
    }

    /// Fraction of branchings on `var` in `dir` whose child was pruned
    /// infeasible.
    pub fn infeasible_fraction(&self, var: usize, dir: Direction) -> f64 {
        let s = self.dir(var, dir);
        let attempts = s.count + s.infeasible;
        if attempts == 0 {
            0.0
        } else {
            f64::from(s.infeasible) / f64::from(attempts)
        }
    }

    pub fn branch_count(&self, var: usize) -> u32 {
        self.branched[var]
    }

    pub fn record_branching(&mut self, var: usize) {
        self.branched[var] += 1;
    }

    /// Fold one observed dual-bound gain into the running mean. Gains are
    /// clamped at zero (LP noise); degenerate fractional distances are
    /// discarded.
    pub fn update(&mut self, var: usize, dir: Direction, gain: f64, frac_dist: f64, int_tol: f64) {
        if frac_dist <= int_tol {
            return;
        }
        let per_unit = gain.max(0.0) / frac_dist;
        let s = self.dir_mut(var, dir);
        s.sum += per_unit;
        s.count += 1;
    }

    pub fn record_infeasible(&mut self, var: usize, dir: Direction) {
        self.dir_mut(var, dir).infeasible += 1;
    }

    pub fn n_vars(&self) -> usize {
        self.branched.len()
    }
}

/// Node selection strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeSelection {
    /// Minimal LP bound first, ties by lowest node id.
    BestBound,
    /// Deepest first, ties by lowest node id.
    Dfs,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub time_limit: f64,
    pub node_limit: u64,
    pub int_tol: f64,
    pub node_selection: NodeSelection,
    /// Seed for tie-break perturbation (candidate-order permutation);
    /// zero keeps the canonical lowest-index order.
    pub random_seed: u64,
    pub simplex: SimplexConfig,
    /// Record a per-node trace in the result.
    pub keep_trace: bool,
    /// Cooperative external stop signal (used by data collection).
    pub interrupt: Option<Arc<AtomicBool>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_limit: 3600.0,
            node_limit: 10_000_000,
            int_tol: 1e-6,
            node_selection: NodeSelection::BestBound,
            random_seed: 0,
            simplex: SimplexConfig::default(),
            keep_trace: false,
            interrupt: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimeLimit,
    NodeLimit,
    /// Externally interrupted via the configured stop flag.
    Interrupted,
}

/// One per-node trace record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeTrace {
    pub node: u64,
    pub depth: u32,
    pub bound: f64,
    pub branched_var: Option<usize>,
    pub action: String,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Incumbent objective in the instance's declared sense.
    pub incumbent_objective: Option<f64>,
    pub incumbent: Option<Vec<f64>>,
    pub nodes_processed: u64,
    pub wall_time: f64,
    /// Total simplex iterations over all LP solves, a deterministic work
    /// measure.
    pub lp_iterations: u64,
    /// Nodes discarded for numerical reasons; nonzero flags the run.
    pub numerical_failures: u64,
    pub trace: Option<Vec<NodeTrace>>,
}

#[derive(Debug, Error)]
pub enum BnbError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("LP relaxation is unbounded")]
    UnboundedRelaxation,
}

/// Frontier entry ordering is fully deterministic: best-bound pops the
/// smallest (bound, id), dfs pops the largest (depth, -id).
pub struct Frontier {
    mode: NodeSelection,
    best: BinaryHeap<std::cmp::Reverse<(OrdF64, u64)>>,
    dfs: BinaryHeap<(u32, std::cmp::Reverse<u64>)>,
}

impl Frontier {
    pub fn new(mode: NodeSelection) -> Self {
        Frontier {
            mode,
            best: BinaryHeap::new(),
            dfs: BinaryHeap::new(),
        }
    }

    pub fn push(&mut self, id: u64, bound: f64, depth: u32) {
        match self.mode {
            NodeSelection::BestBound => self.best.push(std::cmp::Reverse((OrdF64(bound), id))),
            NodeSelection::Dfs => self.dfs.push((depth, std::cmp::Reverse(id))),
        }
    }

    /// Pop the next node id according to the selection mode.
    pub fn pop(&mut self) -> Option<u64> {
        match self.mode {
            NodeSelection::BestBound => self.best.pop().map(|std::cmp::Reverse((_, id))| id),
            NodeSelection::Dfs => self.dfs.pop().map(|(_, std::cmp::Reverse(id))| id),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.best.is_empty() && self.dfs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.best.len() + self.dfs.len()
    }
}

struct BranchedFrom {
    var: usize,
    dir: Direction,
    frac_dist: f64,
    parent_z: f64,
}

struct NodeData {
    depth: u32,
    bounds: NodeBounds,
    /// Parent LP bound, used as the estimate until this node is solved.
    estimate: f64,
    branched: Option<BranchedFrom>,
    var_age: Vec<u32>,
    row_age: Vec<u32>,
}

/// Solve a MIP by LP-based branch and bound under the given rule. The rule
/// changes the search tree, never the reported optimum.
pub fn solve_mip(
    instance: &MipInstance,
    config: &SolverConfig,
    rule: &mut dyn BranchingRule,
) -> Result<SolveResult, BnbError> {
    let start = Instant::now();
    instance.validate()?;
    let n = instance.n_vars();
    let m = instance.n_rows();

    let mut stats = PseudocostStats::new(n);
    let mut frontier = Frontier::new(config.node_selection);
    let mut nodes: Vec<Option<NodeData>> = Vec::new();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut incumbent_sum = vec![0.0; n];
    let mut incumbent_count: u64 = 0;
    let mut trace: Vec<NodeTrace> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.random_seed);

    let mut nodes_processed: u64 = 0;
    let mut lp_iterations: u64 = 0;
    let mut numerical_failures: u64 = 0;

    nodes.push(Some(NodeData {
        depth: 0,
        bounds: NodeBounds::default(),
        estimate: f64::NEG_INFINITY,
        branched: None,
        var_age: vec![0; n],
        row_age: vec![0; m],
    }));
    frontier.push(0, f64::NEG_INFINITY, 0);

    let status = loop {
        if let Some(flag) = &config.interrupt {
            if flag.load(Ordering::Relaxed) {
                break SolveStatus::Interrupted;
            }
        }
        if start.elapsed().as_secs_f64() > config.time_limit {
            break SolveStatus::TimeLimit;
        }

        let Some(id) = frontier.pop() else {
            break if incumbent.is_some() {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            };
        };
        let node = nodes[id as usize].take().expect("node popped twice");

        // Stale nodes cut off by a newer incumbent are discarded silently.
        if let Some((zinc, _)) = &incumbent {
            if node.estimate >= zinc - 1e-6 {
                continue;
            }
        }
        if nodes_processed >= config.node_limit {
            break SolveStatus::NodeLimit;
        }
        nodes_processed += 1;

        let view = reduce(instance, &node.bounds);
        let lp = match solve_lp(&view, &config.simplex) {
            Ok(sol) => sol,
            Err(LpError::Unbounded) => return Err(BnbError::UnboundedRelaxation),
            Err(LpError::Numerical(_)) => {
                numerical_failures += 1;
                if config.keep_trace {
                    trace.push(NodeTrace {
                        node: id,
                        depth: node.depth,
                        bound: node.estimate,
                        branched_var: None,
                        action: "lp-failure".into(),
                    });
                }
                continue;
            }
        };
        lp_iterations += lp.iterations;

        match lp.status {
            LpStatus::Infeasible => {
                if let Some(bf) = &node.branched {
                    stats.record_infeasible(bf.var, bf.dir);
                }
                if config.keep_trace {
                    trace.push(NodeTrace {
                        node: id,
                        depth: node.depth,
                        bound: f64::INFINITY,
                        branched_var: None,
                        action: "infeasible".into(),
                    });
                }
                continue;
            }
            LpStatus::IterationLimit => {
                numerical_failures += 1;
                if config.keep_trace {
                    trace.push(NodeTrace {
                        node: id,
                        depth: node.depth,
                        bound: node.estimate,
                        branched_var: None,
                        action: "lp-iteration-limit".into(),
                    });
                }
                continue;
            }
            LpStatus::Optimal => {}
        }

        if let Some(bf) = &node.branched {
            let gain = (lp.z - bf.parent_z).max(0.0);
            stats.update(bf.var, bf.dir, gain, bf.frac_dist, config.int_tol);
        }

        if let Some((zinc, _)) = &incumbent {
            if lp.z >= zinc - 1e-6 {
                if config.keep_trace {
                    trace.push(NodeTrace {
                        node: id,
                        depth: node.depth,
                        bound: lp.z,
                        branched_var: None,
                        action: "pruned".into(),
                    });
                }
                continue;
            }
        }

        // LP-age streaks: variables at zero extend their run, rows that are
        // active but slack extend theirs.
        let mut var_age = node.var_age;
        for j in 0..n {
            if lp.x_hat[j].abs() <= 1e-9 {
                var_age[j] += 1;
            } else {
                var_age[j] = 0;
            }
        }
        let mut row_age = node.row_age;
        let mut in_lp = vec![false; m];
        for &r in &view.active_rows {
            in_lp[r] = true;
        }
        for r in 0..m {
            if in_lp[r] {
                let act = view.row_activity(r, &lp.x_hat);
                if (act - view.residual_rhs[r]).abs() > 1e-6 {
                    row_age[r] += 1;
                } else {
                    row_age[r] = 0;
                }
            } else {
                row_age[r] = 0;
            }
        }

        let candidates = CandidateSet::from_lp(&view, &lp, config.int_tol);
        if candidates.is_empty() {
            // Integral within tolerance: new incumbent.
            let better = match &incumbent {
                Some((zinc, _)) => lp.z < *zinc,
                None => true,
            };
            if better {
                for j in 0..n {
                    incumbent_sum[j] += lp.x_hat[j];
                }
                incumbent_count += 1;
                incumbent = Some((lp.z, lp.x_hat.clone()));
            }
            if config.keep_trace {
                trace.push(NodeTrace {
                    node: id,
                    depth: node.depth,
                    bound: lp.z,
                    branched_var: None,
                    action: "integral".into(),
                });
            }
            continue;
        }

        let tie_order: Vec<usize> = if config.random_seed == 0 {
            (0..candidates.len()).collect()
        } else {
            let mut order: Vec<usize> = (0..candidates.len()).collect();
            for i in (1..order.len()).rev() {
                let k = rng.random_range(0..=i);
                order.swap(i, k);
            }
            order
        };

        let incumbent_avg: Vec<f64> = if incumbent_count > 0 {
            incumbent_sum
                .iter()
                .map(|s| s / incumbent_count as f64)
                .collect()
        } else {
            vec![0.0; n]
        };

        let mut child_solver = ChildLpSolver::new(&view, &lp, &config.simplex);
        let choice = {
            let mut ctx = BranchContext {
                view: &view,
                lp: &lp,
                candidates: &candidates,
                stats: &mut stats,
                child_solver: &mut child_solver,
                history: NodeHistory {
                    var_age: &var_age,
                    row_age: &row_age,
                    incumbent: incumbent.as_ref().map(|(_, x)| x.as_slice()),
                    incumbent_avg: &incumbent_avg,
                    incumbent_count,
                },
                node_id: id,
                instance_id: &instance.name,
                int_tol: config.int_tol,
                tie_order: &tie_order,
            };
            rule.select(&mut ctx)
        };
        if choice.tainted {
            numerical_failures += 1;
        }

        let var = choice.var;
        debug_assert!(candidates.vars().contains(&var));
        stats.record_branching(var);
        let x = lp.x_hat[var];
        let floor_dist = x - x.floor();
        let ceil_dist = x.ceil() - x;

        let children = [
            (
                Direction::Down,
                floor_dist,
                node.bounds.with_upper(instance, var, x.floor()),
            ),
            (
                Direction::Up,
                ceil_dist,
                node.bounds.with_lower(instance, var, x.ceil()),
            ),
        ];
        for (dir, frac_dist, bounds) in children {
            match bounds {
                Some(bounds) => {
                    let child_id = nodes.len() as u64;
                    nodes.push(Some(NodeData {
                        depth: node.depth + 1,
                        bounds,
                        estimate: lp.z,
                        branched: Some(BranchedFrom {
                            var,
                            dir,
                            frac_dist,
                            parent_z: lp.z,
                        }),
                        var_age: var_age.clone(),
                        row_age: row_age.clone(),
                    }));
                    frontier.push(child_id, lp.z, node.depth + 1);
                }
                // Tightening to an inverted interval: the child is
                // infeasible without a solve.
                None => stats.record_infeasible(var, dir),
            }
        }

        if config.keep_trace {
            trace.push(NodeTrace {
                node: id,
                depth: node.depth,
                bound: lp.z,
                branched_var: Some(var),
                action: format!("branch:{}", choice.source),
            });
        }
    };

    Ok(SolveResult {
        status,
        incumbent_objective: incumbent
            .as_ref()
            .map(|(z, _)| instance.to_original_objective(*z)),
        incumbent: incumbent.map(|(_, x)| x),
        nodes_processed,
        wall_time: start.elapsed().as_secs_f64(),
        lp_iterations,
        numerical_failures,
        trace: if config.keep_trace { Some(trace) } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::{PseudocostRule, RandomRule, ScoringConfig, VfsRule};
    use crate::mip::parse_instance;

    fn knapsack_text() -> &'static str {
        "sense min\nvar x1 0 1 int\nvar x2 0 1 int\nobj x1 -1\nobj x2 -1\nrow r <= 1.5 : x1*1 x2*1\n"
    }

    #[test]
    fn solves_two_variable_knapsack() {
        let inst = parse_instance(knapsack_text(), "t").unwrap();
        let mut rule = VfsRule {
            scoring: ScoringConfig::default(),
        };
        let result = solve_mip(&inst, &SolverConfig::default(), &mut rule).unwrap();
        assert_eq!(result.status, SolveStatus::Optimal);
        assert!((result.incumbent_objective.unwrap() - -1.0).abs() < 1e-9);
        assert!(result.nodes_processed >= 3, "root plus two children");
    }

    #[test]
    fn integral_root_solves_in_one_node() {
        let text = "sense min\nvar x 0 5 int\nobj x 1\nrow r >= 2 : x*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let mut rule = PseudocostRule {
            scoring: ScoringConfig::default(),
        };
        let result = solve_mip(&inst, &SolverConfig::default(), &mut rule).unwrap();
        assert_eq!(result.status, SolveStatus::Optimal);
        assert_eq!(result.nodes_processed, 1);
        assert!((result.incumbent_objective.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_mip_reports_infeasible() {
        let text = "sense min\nvar x 0 1 int\nobj x 1\nrow a >= 2 : x*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let mut rule = PseudocostRule {
            scoring: ScoringConfig::default(),
        };
        let result = solve_mip(&inst, &SolverConfig::default(), &mut rule).unwrap();
        assert_eq!(result.status, SolveStatus::Infeasible);
        assert!(result.incumbent_objective.is_none());
    }

    #[test]
    fn node_limit_is_a_normal_return() {
        let inst = parse_instance(knapsack_text(), "t").unwrap();
        let mut rule = RandomRule::new(3);
        let cfg = SolverConfig {
            node_limit: 1,
            ..SolverConfig::default()
        };
        let result = solve_mip(&inst, &cfg, &mut rule).unwrap();
        assert_eq!(result.status, SolveStatus::NodeLimit);
        assert_eq!(result.nodes_processed, 1);
    }

    #[test]
    fn frontier_best_bound_and_dfs_orders() {
        let mut f = Frontier::new(NodeSelection::BestBound);
        f.push(1, -3.0, 1);
        f.push(2, -5.0, 1);
        assert_eq!(f.pop(), Some(2), "minimal bound first");

        let mut f = Frontier::new(NodeSelection::BestBound);
        f.push(4, -2.0, 2);
        f.push(3, -2.0, 2);
        assert_eq!(f.pop(), Some(3), "equal bounds tie-break by lowest id");

        let mut f = Frontier::new(NodeSelection::Dfs);
        f.push(1, -9.0, 2);
        f.push(2, -1.0, 7);
        assert_eq!(f.pop(), Some(2), "dfs pops the deepest");

        let mut f = Frontier::new(NodeSelection::Dfs);
        f.push(6, 0.0, 3);
        f.push(5, 0.0, 3);
        assert_eq!(f.pop(), Some(5), "equal depth tie-break by lowest id");
    }

    #[test]
    fn pseudocost_update_examples() {
        let mut stats = PseudocostStats::new(2);
        stats.update(0, Direction::Down, 0.5, 0.25, 1e-6);
        assert_eq!(stats.phi(0, Direction::Down), Some(2.0));
        assert_eq!(stats.count(0, Direction::Down), 1);

        // Per-unit gains 2 then 4 average to 3.
        stats.update(1, Direction::Up, 2.0, 1.0, 1e-6);
        stats.update(1, Direction::Up, 4.0, 1.0, 1e-6);
        assert_eq!(stats.phi(1, Direction::Up), Some(3.0));
        assert_eq!(stats.count(1, Direction::Up), 2);

        // Infeasible child leaves phi untouched.
        let before = stats.phi(0, Direction::Down);
        stats.record_infeasible(0, Direction::Down);
        assert_eq!(stats.phi(0, Direction::Down), before);
        assert_eq!(stats.infeasible_count(0, Direction::Down), 1);

        // Degenerate fractional distance discards the observation.
        stats.update(0, Direction::Up, 1.0, 1e-9, 1e-6);
        assert_eq!(stats.count(0, Direction::Up), 0);
    }

    #[test]
    fn fallback_phi_uses_initialized_mean() {
        let mut stats = PseudocostStats::new(3);
        assert_eq!(stats.fallback_phi(Direction::Down), 1.0);
        stats.update(0, Direction::Down, 2.0, 1.0, 1e-6);
        stats.update(1, Direction::Down, 4.0, 1.0, 1e-6);
        assert_eq!(stats.fallback_phi(Direction::Down), 3.0);
    }

    #[test]
    fn rules_agree_on_optimum() {
        // Small set-cover-like instance with a nontrivial tree.
        let text = "sense min\n\
            var a 0 1 int\nvar b 0 1 int\nvar c 0 1 int\nvar d 0 1 int\n\
            obj a 3\nobj b 2\nobj c 4\nobj d 2\n\
            row r1 >= 1 : a*1 b*1\nrow r2 >= 1 : b*1 c*1\nrow r3 >= 1 : c*1 d*1\nrow r4 >= 1 : a*1 d*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let mut objs = Vec::new();
        let scoring = ScoringConfig::default();
        let mut rules: Vec<Box<dyn BranchingRule>> = vec![
            Box::new(VfsRule { scoring }),
            Box::new(PseudocostRule { scoring }),
            Box::new(RandomRule::new(7)),
        ];
        for rule in rules.iter_mut() {
            let r = solve_mip(&inst, &SolverConfig::default(), rule.as_mut()).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            objs.push(r.incumbent_objective.unwrap());
        }
        for z in &objs {
            assert!((z - objs[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_with_fixed_seed() {
        let text = "sense max\n\
            var a 0 1 int\nvar b 0 1 int\nvar c 0 1 int\nvar d 0 1 int\nvar e 0 1 int\n\
            obj a 5\nobj b 4\nobj c 3\nobj d 6\nobj e 2\n\
            row r1 <= 2.5 : a*1 b*1 c*1\nrow r2 <= 1.5 : d*1 e*1\nrow r3 <= 2.9 : a*1 d*1 e*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let cfg = SolverConfig {
            random_seed: 42,
            keep_trace: true,
            ..SolverConfig::default()
        };
        let mut r1 = RandomRule::new(42);
        let mut r2 = RandomRule::new(42);
        let a = solve_mip(&inst, &cfg, &mut r1).unwrap();
        let b = solve_mip(&inst, &cfg, &mut r2).unwrap();
        assert_eq!(a.nodes_processed, b.nodes_processed);
        assert_eq!(a.lp_iterations, b.lp_iterations);
        let ta: Vec<String> = a.trace.unwrap().iter().map(|t| format!("{t:?}")).collect();
        let tb: Vec<String> = b.trace.unwrap().iter().map(|t| format!("{t:?}")).collect();
        assert_eq!(ta, tb);
    }

    #[test]
    fn dual_bound_monotone_along_trace() {
        let text = "sense min\n\
            var a 0 1 int\nvar b 0 1 int\nvar c 0 1 int\n\
            obj a 3\nobj b 5\nobj c 4\n\
            row r1 >= 1 : a*1 b*1\nrow r2 >= 1 : b*1 c*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let cfg = SolverConfig {
            keep_trace: true,
            ..SolverConfig::default()
        };
        let mut rule = VfsRule {
            scoring: ScoringConfig::default(),
        };
        let result = solve_mip(&inst, &cfg, &mut rule).unwrap();
        let trace = result.trace.unwrap();
        // Every processed node's bound is at least the root bound.
        let root_bound = trace[0].bound;
        for t in &trace {
            if t.bound.is_finite() {
                assert!(t.bound >= root_bound - 1e-6);
            }
        }
    }
}
