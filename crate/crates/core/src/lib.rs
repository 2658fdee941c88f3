//! A self-contained branch-and-bound toolkit for mixed-integer programs
//! with learned sparse branching models.
//!
//! The crate covers the full pipeline: benchmark instance generation,
//! LP-relaxation solving, branch-and-bound search with pluggable branching
//! rules (full strong branching, pseudocosts, reliability, random, learned),
//! strong-branching data collection, sparse lasso training over quadratic
//! feature expansions, and a benchmarking harness with shifted-geometric-mean
//! reporting.

pub mod bnb;
pub mod branching;
pub mod evaluate;
pub mod features;
pub mod generators;
pub mod learn;
pub mod mip;
pub mod pipeline;
pub mod simplex;
pub(crate) mod util;

pub use bnb::{solve_mip, PseudocostStats, SolveResult, SolveStatus, SolverConfig};
pub use branching::{product_score, CandidateSet, RuleSpec, ScoringConfig};
pub use features::{extract_features, FeatureMatrix, FeatureSchema, QuadraticSchema};
pub use learn::{lasso_path, select_model, PathConfig, SparseModel, TrainingDataset};
pub use mip::{load_instance, reduce, MipInstance, NodeBounds, ReducedView};
pub use pipeline::{collect, CollectionConfig, SbDataTuple};
pub use simplex::{solve_lp, LpSolution, LpStatus, SimplexConfig};
