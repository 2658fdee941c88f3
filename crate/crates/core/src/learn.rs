//! Sparse linear/quadratic score models: near-constant feature filtering,
//! per-term standardization, lasso coordinate descent over a warm-started
//! regularization path with an optional nonzero cap, validation-MSE model
//! selection, and standardized-coefficient interpretation.
//!
//! The objective is the mean-square form `(1/2k)||y - b0 - X b||^2 +
//! lambda ||b||_1`, so lambda grids are comparable across dataset sizes.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{self, ExpansionMode, QuadraticSchema, TermKind};
use crate::util::safe_div;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("degenerate dataset: {0}")]
    Degenerate(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("empty regularization path")]
    EmptyPath,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file error: {0}")]
    Format(#[from] serde_json::Error),
}

/// Candidate-level training data over base features.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub domain: String,
    pub scheme: String,
    pub seed: u64,
    pub split: String,
}

#[derive(Clone, Debug)]
pub struct TrainingDataset {
    /// k rows of base feature values.
    pub x: Vec<Vec<f64>>,
    /// Normalized strong-branching scores in [0, 1].
    pub y: Vec<f64>,
    pub schema_hash: String,
    pub meta: DatasetMeta,
}

impl TrainingDataset {
    pub fn new(
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        schema_hash: String,
        meta: DatasetMeta,
    ) -> Result<Self, TrainError> {
        if x.len() != y.len() {
            return Err(TrainError::Invalid(format!(
                "{} rows vs {} labels",
                x.len(),
                y.len()
            )));
        }
        for row in &x {
            if row.len() != features::BASE_FEATURE_COUNT {
                return Err(TrainError::Invalid(format!(
                    "row width {} != {}",
                    row.len(),
                    features::BASE_FEATURE_COUNT
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(TrainError::Invalid("non-finite feature".into()));
            }
        }
        if y.iter().any(|v| !v.is_finite() || *v < -1e-9 || *v > 1.0 + 1e-9) {
            return Err(TrainError::Invalid("labels must lie in [0, 1]".into()));
        }
        Ok(TrainingDataset {
            x,
            y,
            schema_hash,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Drop columns whose most frequent value covers more than 99% of rows or
/// whose range is below 1e-9; returns the surviving column ids.
pub fn filter_near_constant(x: &[Vec<f64>]) -> Result<Vec<usize>, TrainError> {
    let k = x.len();
    if k < 2 {
        return Err(TrainError::Degenerate(
            "need at least 2 rows to estimate variance".into(),
        ));
    }
    let width = x[0].len();
    let mut keep = Vec::new();
    let mut col = vec![0.0; k];
    for c in 0..width {
        for (i, row) in x.iter().enumerate() {
            col[i] = row[c];
        }
        col.sort_by(|a, b| a.total_cmp(b));
        let range = col[k - 1] - col[0];
        let mut longest = 1usize;
        let mut run = 1usize;
        for i in 1..k {
            if col[i] == col[i - 1] {
                run += 1;
                longest = longest.max(run);
            } else {
                run = 1;
            }
        }
        let dominant = longest as f64 / k as f64;
        if dominant > 0.99 || range < 1e-9 {
            continue;
        }
        keep.push(c);
    }
    if keep.is_empty() {
        return Err(TrainError::Degenerate(
            "all columns are near-constant".into(),
        ));
    }
    Ok(keep)
}

/// Per-term standardization statistics. Columns with near-zero spread are
/// flagged and never activated.
#[derive(Clone, Debug)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub y_mean: f64,
    pub y_std: f64,
    pub near_zero: Vec<bool>,
}

#[derive(Clone, Copy, Debug)]
pub struct PathConfig {
    pub n_lambdas: usize,
    pub lambda_min_ratio: f64,
    /// Truncate the path at the first solution exceeding this many nonzeros;
    /// the exceeding model is kept.
    pub dfmax: Option<usize>,
    /// Convergence threshold on the largest standardized-coefficient change
    /// per sweep.
    pub cd_tolerance: f64,
    pub max_cd_passes: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            n_lambdas: 100,
            lambda_min_ratio: 1e-4,
            dfmax: None,
            cd_tolerance: 1e-7,
            max_cd_passes: 2000,
        }
    }
}

/// One nonzero model term with its original-scale coefficient.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelTerm {
    pub term_id: usize,
    pub kind: TermKind,
    pub coefficient: f64,
    pub name: String,
    /// Training-column mean and standard deviation of this term.
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub lambda: f64,
    pub validation_mse: Option<f64>,
    pub nnz: usize,
    pub train_rows: usize,
    pub y_mean: f64,
    pub y_std: f64,
    pub converged: bool,
}

/// A sparse score predictor. Coefficients live in the original feature
/// scale, so inference needs no scaler: `y = b0 + sum coef * term(row)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparseModel {
    pub base_schema_hash: String,
    pub schema_hash: String,
    pub mode: ExpansionMode,
    pub active_base: Vec<usize>,
    pub intercept: f64,
    pub terms: Vec<ModelTerm>,
    pub metadata: ModelMetadata,
}

impl SparseModel {
    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    /// Predict from a full-width base feature row.
    pub fn predict_base_row(&self, row: &[f64]) -> f64 {
        let mut y = self.intercept;
        for t in &self.terms {
            let v = match t.kind {
                TermKind::Linear(i) => row[i],
                TermKind::Square(i) => row[i] * row[i],
                TermKind::Interaction(i, j) => row[i] * row[j],
            };
            y += t.coefficient * v;
        }
        y
    }

    /// Rebuild the term schema this model was trained against.
    pub fn schema(&self) -> QuadraticSchema {
        QuadraticSchema::new(self.active_base.clone(), self.mode)
    }

    /// Standardized coefficients `coef * s_i / s_y` from the embedded
    /// training statistics, sorted by decreasing magnitude.
    pub fn standardized_coefficients(&self) -> Vec<(usize, String, f64)> {
        let mut out: Vec<(usize, String, f64)> = self
            .terms
            .iter()
            .filter(|t| t.coefficient != 0.0)
            .map(|t| {
                (
                    t.term_id,
                    t.name.clone(),
                    safe_div(t.coefficient * t.std, self.metadata.y_std),
                )
            })
            .collect();
        out.sort_by(|a, b| b.2.abs().total_cmp(&a.2.abs()).then(a.0.cmp(&b.0)));
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), TrainError> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<SparseModel, TrainError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Standardized coefficient ranking with an explicit scaler (the scaler
/// must come from the model's training run).
pub fn standardized_coefficients(model: &SparseModel, scaler: &Scaler) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = model
        .terms
        .iter()
        .filter(|t| t.coefficient != 0.0)
        .map(|t| {
            (
                t.term_id,
                safe_div(t.coefficient * scaler.stds[t.term_id], scaler.y_std),
            )
        })
        .collect();
    out.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    out
}

/// Term ids selected (nonzero) in every model. All models must share a
/// schema.
pub fn common_features(models: &[SparseModel]) -> Result<Vec<usize>, TrainError> {
    let Some(first) = models.first() else {
        return Ok(Vec::new());
    };
    let mut common: std::collections::BTreeSet<usize> =
        first.terms.iter().map(|t| t.term_id).collect();
    for m in &models[1..] {
        if m.schema_hash != first.schema_hash {
            return Err(TrainError::SchemaMismatch(
                "models were trained against different schemas".into(),
            ));
        }
        let ids: std::collections::BTreeSet<usize> =
            m.terms.iter().map(|t| t.term_id).collect();
        common = common.intersection(&ids).copied().collect();
    }
    Ok(common.into_iter().collect())
}

/// Smallest lambda at which all coefficients are zero under the mean-square
/// objective: `max_j |x_j . y| / k` over standardized columns and centered y.
pub fn lambda_max(x_std: &[Vec<f64>], y_centered: &[f64]) -> f64 {
    let k = y_centered.len() as f64;
    x_std
        .iter()
        .map(|col| {
            let dot: f64 = col.iter().zip(y_centered).map(|(a, b)| a * b).sum();
            dot.abs() / k
        })
        .fold(0.0, f64::max)
}

fn soft_threshold(g: f64, lambda: f64) -> f64 {
    if g > lambda {
        g - lambda
    } else if g < -lambda {
        g + lambda
    } else {
        0.0
    }
}

/// Term column accessor with positions resolved into the filtered columns.
#[derive(Clone, Copy)]
enum ColKind {
    Linear(usize),
    Square(usize),
    Interaction(usize, usize),
}

struct Workspace {
    /// Filtered raw base columns, column-major.
    cols: Vec<Vec<f64>>,
    kinds: Vec<ColKind>,
    scaler: Scaler,
    k: usize,
}

impl Workspace {
    fn raw(&self, t: usize, i: usize) -> f64 {
        match self.kinds[t] {
            ColKind::Linear(a) => self.cols[a][i],
            ColKind::Square(a) => {
                let v = self.cols[a][i];
                v * v
            }
            ColKind::Interaction(a, b) => self.cols[a][i] * self.cols[b][i],
        }
    }

    fn raw_dot(&self, t: usize, v: &[f64]) -> f64 {
        match self.kinds[t] {
            ColKind::Linear(a) => {
                let col = &self.cols[a];
                col.iter().zip(v).map(|(x, r)| x * r).sum()
            }
            ColKind::Square(a) => {
                let col = &self.cols[a];
                col.iter().zip(v).map(|(x, r)| x * x * r).sum()
            }
            ColKind::Interaction(a, b) => {
                let ca = &self.cols[a];
                let cb = &self.cols[b];
                (0..self.k).map(|i| ca[i] * cb[i] * v[i]).sum()
            }
        }
    }

}

fn build_workspace(
    data: &TrainingDataset,
    schema: &QuadraticSchema,
) -> Result<Workspace, TrainError> {
    let k = data.len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(schema.active_base.len());
    for &id in &schema.active_base {
        cols.push(data.x.iter().map(|row| row[id]).collect());
    }
    let kinds: Vec<ColKind> = schema
        .terms
        .iter()
        .map(|t| match t.kind {
            TermKind::Linear(i) => ColKind::Linear(schema.position(i).unwrap()),
            TermKind::Square(i) => ColKind::Square(schema.position(i).unwrap()),
            TermKind::Interaction(i, j) => {
                ColKind::Interaction(schema.position(i).unwrap(), schema.position(j).unwrap())
            }
        })
        .collect();

    let kf = k as f64;
    let y_mean = data.y.iter().sum::<f64>() / kf;
    let y_var = data.y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum::<f64>() / kf;
    let mut ws = Workspace {
        cols,
        kinds,
        scaler: Scaler {
            means: vec![0.0; 0],
            stds: vec![0.0; 0],
            y_mean,
            y_std: y_var.max(0.0).sqrt(),
            near_zero: vec![false; 0],
        },
        k,
    };
    let t_count = ws.kinds.len();
    let mut means = Vec::with_capacity(t_count);
    let mut stds = Vec::with_capacity(t_count);
    let mut near_zero = Vec::with_capacity(t_count);
    for t in 0..t_count {
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..k {
            let v = ws.raw(t, i);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / kf;
        let var = (sumsq / kf - mean * mean).max(0.0);
        let std = var.sqrt();
        let tiny = std < 1e-12;
        means.push(mean);
        stds.push(if tiny { 1.0 } else { std });
        near_zero.push(tiny);
    }
    ws.scaler.means = means;
    ws.scaler.stds = stds;
    ws.scaler.near_zero = near_zero;
    Ok(ws)
}

#[derive(Clone, Debug)]
pub struct PathEntry {
    pub lambda: f64,
    pub model: SparseModel,
}

#[derive(Clone, Debug)]
pub struct LassoPath {
    pub entries: Vec<PathEntry>,
    pub scaler: Scaler,
    pub lambda_max: f64,
    pub schema_hash: String,
}

fn build_model(
    data: &TrainingDataset,
    schema: &QuadraticSchema,
    ws: &Workspace,
    beta_std: &[f64],
    lambda: f64,
    converged: bool,
) -> SparseModel {
    let mut terms = Vec::new();
    let mut intercept = ws.scaler.y_mean;
    for (t, &b) in beta_std.iter().enumerate() {
        if b == 0.0 {
            continue;
        }
        let coef = b / ws.scaler.stds[t];
        intercept -= b * ws.scaler.means[t] / ws.scaler.stds[t];
        terms.push(ModelTerm {
            term_id: t,
            kind: schema.terms[t].kind,
            coefficient: coef,
            name: schema.term_name(schema.terms[t].kind),
            mean: ws.scaler.means[t],
            std: ws.scaler.stds[t],
        });
    }
    let nnz = terms.len();
    SparseModel {
        base_schema_hash: data.schema_hash.clone(),
        schema_hash: schema.hash(),
        mode: schema.mode,
        active_base: schema.active_base.clone(),
        intercept,
        terms,
        metadata: ModelMetadata {
            lambda,
            validation_mse: None,
            nnz,
            train_rows: data.len(),
            y_mean: ws.scaler.y_mean,
            y_std: ws.scaler.y_std,
            converged,
        },
    }
}

/// Coordinate-descent state in covariance form: per-term outcome products
/// plus Gram columns for every term that has ever activated. Coordinate
/// updates then cost O(active set) instead of O(rows), and Gram columns are
/// shared across the whole warm-started path.
struct CdState {
    /// z_t . y_centered / k per term.
    qt: Vec<f64>,
    /// Standardized-space coefficients.
    beta: Vec<f64>,
    /// Ever-active terms in activation order.
    active: Vec<usize>,
    in_active: Vec<bool>,
    /// gram[a][t] = z_t . z_a / k for each ever-active a.
    gram: Vec<Vec<f64>>,
}

impl CdState {
    fn new(ws: &Workspace, y_centered: &[f64]) -> CdState {
        let k = ws.k as f64;
        let t_count = ws.kinds.len();
        let qt = (0..t_count)
            .map(|t| {
                if ws.scaler.near_zero[t] {
                    0.0
                } else {
                    let sum_y: f64 = y_centered.iter().sum();
                    (ws.raw_dot(t, y_centered) - ws.scaler.means[t] * sum_y)
                        / ws.scaler.stds[t]
                        / k
                }
            })
            .collect();
        CdState {
            qt,
            beta: vec![0.0; t_count],
            active: Vec::new(),
            in_active: vec![false; t_count],
            gram: Vec::new(),
        }
    }

    fn activate(&mut self, ws: &Workspace, a: usize) {
        if self.in_active[a] {
            return;
        }
        let k = ws.k as f64;
        let ma = ws.scaler.means[a];
        let sa = ws.scaler.stds[a];
        let za: Vec<f64> = (0..ws.k).map(|i| (ws.raw(a, i) - ma) / sa).collect();
        let sum_za: f64 = za.iter().sum();
        let col: Vec<f64> = (0..self.qt.len())
            .map(|t| {
                if ws.scaler.near_zero[t] {
                    0.0
                } else {
                    (ws.raw_dot(t, &za) - ws.scaler.means[t] * sum_za)
                        / ws.scaler.stds[t]
                        / k
                }
            })
            .collect();
        self.in_active[a] = true;
        self.active.push(a);
        self.gram.push(col);
    }

    /// z_t . r / k for the implicit residual r = y_c - sum_a z_a beta_a.
    fn gradient(&self, t: usize) -> f64 {
        let mut g = self.qt[t];
        for (pos, &a) in self.active.iter().enumerate() {
            let b = self.beta[a];
            if b != 0.0 {
                g -= self.gram[pos][t] * b;
            }
        }
        g
    }
}

/// Coordinate descent at a single lambda, warm-started from `state`.
/// Returns whether the sweep converged within the pass budget.
fn cd_solve(ws: &Workspace, lambda: f64, state: &mut CdState, cfg: &PathConfig) -> bool {
    let t_count = state.beta.len();
    let mut passes = 0usize;
    loop {
        // Converge on the current active set first (cheap sweeps).
        loop {
            let mut max_delta = 0.0f64;
            for idx in 0..state.active.len() {
                let t = state.active[idx];
                if ws.scaler.near_zero[t] {
                    continue;
                }
                let g = state.beta[t] + state.gradient(t);
                let new = soft_threshold(g, lambda);
                let delta = new - state.beta[t];
                if delta != 0.0 {
                    state.beta[t] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            passes += 1;
            if max_delta < cfg.cd_tolerance || passes >= cfg.max_cd_passes {
                break;
            }
        }
        // One full sweep over all terms; activations join the set.
        let mut max_delta = 0.0f64;
        for t in 0..t_count {
            if ws.scaler.near_zero[t] {
                continue;
            }
            let g = state.beta[t] + state.gradient(t);
            let new = soft_threshold(g, lambda);
            let delta = new - state.beta[t];
            if delta != 0.0 {
                if new != 0.0 {
                    state.activate(ws, t);
                }
                state.beta[t] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        passes += 1;
        if max_delta < cfg.cd_tolerance {
            return true;
        }
        if passes >= cfg.max_cd_passes {
            return false;
        }
    }
}

struct Prepared {
    schema: QuadraticSchema,
    ws: Workspace,
    lambda_max: f64,
}

fn prepare(data: &TrainingDataset, mode: ExpansionMode) -> Result<Prepared, TrainError> {
    if data.schema_hash != features::base_schema().hash() {
        return Err(TrainError::SchemaMismatch(format!(
            "dataset schema {} does not match this build's base schema",
            data.schema_hash
        )));
    }
    let active = filter_near_constant(&data.x)?;
    let schema = QuadraticSchema::new(active, mode);
    let ws = build_workspace(data, &schema)?;
    let y_centered: Vec<f64> = data.y.iter().map(|v| v - ws.scaler.y_mean).collect();
    let lambda_max = (0..schema.term_count())
        .filter(|&t| !ws.scaler.near_zero[t])
        .map(|t| (ws.raw_dot(t, &y_centered) / ws.scaler.stds[t]).abs() / ws.k as f64)
        .fold(0.0, f64::max);
    Ok(Prepared {
        schema,
        ws,
        lambda_max,
    })
}

fn fit_prepared(
    data: &TrainingDataset,
    prep: Prepared,
    lambdas: &[f64],
    cfg: &PathConfig,
) -> LassoPath {
    let Prepared {
        schema,
        ws,
        lambda_max,
    } = prep;
    let y_centered: Vec<f64> = data.y.iter().map(|v| v - ws.scaler.y_mean).collect();
    let mut state = CdState::new(&ws, &y_centered);
    let mut entries = Vec::new();
    for &lambda in lambdas {
        let converged = cd_solve(&ws, lambda, &mut state, cfg);
        let model = build_model(data, &schema, &ws, &state.beta, lambda, converged);
        let nnz = model.nnz();
        entries.push(PathEntry { lambda, model });
        if let Some(dfmax) = cfg.dfmax {
            if nnz > dfmax {
                break;
            }
        }
    }
    LassoPath {
        entries,
        scaler: ws.scaler,
        lambda_max,
        schema_hash: schema.hash(),
    }
}

/// Fit the lasso at an explicit, decreasing list of lambdas with warm
/// starts, truncating per `cfg.dfmax`.
pub fn lasso_fit_lambdas(
    data: &TrainingDataset,
    mode: ExpansionMode,
    lambdas: &[f64],
    cfg: &PathConfig,
) -> Result<LassoPath, TrainError> {
    let prep = prepare(data, mode)?;
    Ok(fit_prepared(data, prep, lambdas, cfg))
}

/// Compute the lasso regularization path: a geometric lambda grid from
/// lambda_max down to `lambda_max * lambda_min_ratio`, warm-started, with
/// coefficients reported in the original feature scale.
pub fn lasso_path(
    data: &TrainingDataset,
    mode: ExpansionMode,
    cfg: &PathConfig,
) -> Result<LassoPath, TrainError> {
    let prep = prepare(data, mode)?;
    let lam_max = prep.lambda_max;

    if lam_max <= 0.0 {
        // Outcome orthogonal to every column: the null model is the path.
        let model = build_model(
            data,
            &prep.schema,
            &prep.ws,
            &vec![0.0; prep.schema.term_count()],
            0.0,
            true,
        );
        return Ok(LassoPath {
            entries: vec![PathEntry { lambda: 0.0, model }],
            scaler: prep.ws.scaler,
            lambda_max: 0.0,
            schema_hash: prep.schema.hash(),
        });
    }

    let l = cfg.n_lambdas.max(1);
    let lambdas: Vec<f64> = (0..l)
        .map(|i| {
            if l == 1 {
                lam_max
            } else {
                lam_max * cfg.lambda_min_ratio.powf(i as f64 / (l - 1) as f64)
            }
        })
        .collect();
    Ok(fit_prepared(data, prep, &lambdas, cfg))
}

/// A selected model plus the per-entry validation MSEs that chose it.
#[derive(Clone, Debug)]
pub struct Selection {
    pub model: SparseModel,
    pub mses: Vec<f64>,
}

pub fn validation_mse(model: &SparseModel, validation: &TrainingDataset) -> f64 {
    let k = validation.len() as f64;
    validation
        .x
        .iter()
        .zip(&validation.y)
        .map(|(row, y)| {
            let e = model.predict_base_row(row) - y;
            e * e
        })
        .sum::<f64>()
        / k
}

/// Pick the path entry with the lowest validation MSE; ties go to the
/// larger lambda (sparser model).
pub fn select_model(path: &LassoPath, validation: &TrainingDataset) -> Result<Selection, TrainError> {
    if path.entries.is_empty() {
        return Err(TrainError::EmptyPath);
    }
    if validation.schema_hash != features::base_schema().hash() {
        return Err(TrainError::SchemaMismatch(
            "validation set schema does not match".into(),
        ));
    }
    let mses: Vec<f64> = path
        .entries
        .iter()
        .map(|e| validation_mse(&e.model, validation))
        .collect();
    // Strict improvement keeps the earlier (larger lambda) entry on ties.
    let mut best = 0usize;
    for i in 1..mses.len() {
        if mses[i] < mses[best] {
            best = i;
        }
    }
    let mut model = path.entries[best].model.clone();
    model.metadata.validation_mse = Some(mses[best]);
    Ok(Selection { model, mses })
}
