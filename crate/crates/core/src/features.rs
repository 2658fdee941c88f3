//! Candidate featurization: the 101-feature description computed on the
//! reduced formulation at every node, per-node min-max normalization of the
//! K-sourced features, and the quadratic term expansion used by the sparse
//! models.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bnb::{Direction, PseudocostStats};
use crate::branching::CandidateSet;
use crate::mip::ReducedView;
use crate::simplex::{BasisStatus, LpSolution};
use crate::util::{fnv_hex, safe_div, stats};

pub const BASE_FEATURE_COUNT: usize = 101;

/// Provenance of a feature: the candidate-statistics lineage (K) or the
/// aggregated variable-features lineage (G).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureSource {
    K,
    G,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub id: usize,
    pub name: String,
    pub source: FeatureSource,
    pub group: String,
}

/// The ordered base feature schema. Ids are contiguous 0..101 and stable;
/// datasets and models reference the schema by hash.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub features: Vec<FeatureDescriptor>,
}

fn push_group(
    out: &mut Vec<FeatureDescriptor>,
    source: FeatureSource,
    group: &str,
    names: &[&str],
) {
    for name in names {
        out.push(FeatureDescriptor {
            id: out.len(),
            name: (*name).to_string(),
            source,
            group: group.to_string(),
        });
    }
}

fn build_base_schema() -> FeatureSchema {
    use FeatureSource::{G, K};
    let mut f = Vec::with_capacity(BASE_FEATURE_COUNT);
    push_group(
        &mut f,
        K,
        "objective coefficient",
        &["obj_coef", "obj_coef_pos", "obj_coef_neg"],
    );
    push_group(&mut f, K, "number of constraints", &["num_rows"]);
    push_group(
        &mut f,
        K,
        "constraint degree statistics",
        &["row_degree_mean", "row_degree_std", "row_degree_min", "row_degree_max"],
    );
    push_group(
        &mut f,
        K,
        "positive coefficient statistics",
        &["pos_coef_count", "pos_coef_mean", "pos_coef_std", "pos_coef_min", "pos_coef_max"],
    );
    push_group(
        &mut f,
        K,
        "negative coefficient statistics",
        &["neg_coef_count", "neg_coef_mean", "neg_coef_std", "neg_coef_min", "neg_coef_max"],
    );
    push_group(&mut f, K, "integrality violation", &["frac_violation"]);
    push_group(&mut f, K, "ceiling distance", &["ceil_dist"]);
    push_group(
        &mut f,
        K,
        "weighted pseudocosts",
        &["wpc_up", "wpc_down", "wpc_ratio", "wpc_sum", "wpc_product"],
    );
    push_group(
        &mut f,
        K,
        "infeasibility statistics",
        &["infeas_count_down", "infeas_frac_down", "infeas_count_up", "infeas_frac_up"],
    );
    push_group(
        &mut f,
        K,
        "coefficient to rhs ratios",
        &["coef_rhs_pos_min", "coef_rhs_pos_max", "coef_rhs_neg_min", "coef_rhs_neg_max"],
    );
    push_group(
        &mut f,
        K,
        "one-to-all coefficient ratios",
        &[
            "ratio_pp_min", "ratio_pp_max", "ratio_pn_min", "ratio_pn_max",
            "ratio_np_min", "ratio_np_max", "ratio_nn_min", "ratio_nn_max",
        ],
    );
    for (tag, label) in [
        ("unit", "unit weight"),
        ("invall", "inverse all-coefficient weight"),
        ("invcand", "inverse candidate-coefficient weight"),
        ("dual", "dual value weight"),
    ] {
        let names: Vec<String> = ["sum", "mean", "std", "max", "min", "count"]
            .iter()
            .map(|s| format!("active_{tag}_{s}"))
            .collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        push_group(
            &mut f,
            K,
            &format!("active constraint coefficients ({label})"),
            &refs,
        );
    }
    push_group(
        &mut f,
        G,
        "variable type",
        &["type_binary", "type_integer", "type_impl_integer", "type_continuous"],
    );
    push_group(&mut f, G, "has bound", &["has_lower_bound", "has_upper_bound"]);
    push_group(&mut f, G, "solution at bound", &["at_lower_bound", "at_upper_bound"]);
    push_group(
        &mut f,
        G,
        "basis status",
        &["basis_lower", "basis_basic", "basis_upper", "basis_zero"],
    );
    push_group(&mut f, G, "reduced cost", &["reduced_cost_norm"]);
    push_group(&mut f, G, "variable lp age", &["var_lp_age"]);
    push_group(&mut f, G, "solution value", &["solution_value"]);
    push_group(&mut f, G, "incumbent value", &["incumbent_value"]);
    push_group(&mut f, G, "average incumbent value", &["incumbent_avg"]);
    push_group(&mut f, G, "floor distance", &["floor_dist"]);
    push_group(
        &mut f,
        G,
        "constraint coefficient statistics",
        &["coef_norm_mean", "coef_norm_min", "coef_norm_max"],
    );
    push_group(
        &mut f,
        G,
        "objective cosine similarity",
        &["obj_cos_mean", "obj_cos_min", "obj_cos_max"],
    );
    push_group(&mut f, G, "rhs statistics", &["rhs_norm_mean", "rhs_norm_min", "rhs_norm_max"]);
    push_group(
        &mut f,
        G,
        "constraint tightness",
        &["tightness_mean", "tightness_min", "tightness_max"],
    );
    push_group(
        &mut f,
        G,
        "dual value statistics",
        &["dual_norm_mean", "dual_norm_min", "dual_norm_max"],
    );
    push_group(
        &mut f,
        G,
        "row lp age statistics",
        &["row_age_mean", "row_age_min", "row_age_max"],
    );
    debug_assert_eq!(f.len(), BASE_FEATURE_COUNT);
    FeatureSchema { features: f }
}

static BASE_SCHEMA: OnceLock<FeatureSchema> = OnceLock::new();

/// The shared base schema instance.
pub fn base_schema() -> &'static FeatureSchema {
    BASE_SCHEMA.get_or_init(build_base_schema)
}

impl FeatureSchema {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Ids of K-sourced features, the min-max normalized columns.
    pub fn k_feature_ids(&self) -> Vec<usize> {
        self.features
            .iter()
            .filter(|d| d.source == FeatureSource::K)
            .map(|d| d.id)
            .collect()
    }

    /// Stable fingerprint over ids, names, and sources.
    pub fn hash(&self) -> String {
        let text: String = self
            .features
            .iter()
            .map(|d| format!("{}:{}:{:?};", d.id, d.name, d.source))
            .collect();
        fnv_hex(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn name(&self, id: usize) -> &str {
        &self.features[id].name
    }
}

/// Search-state inputs to featurization that live outside the LP: age
/// streaks and incumbent information maintained by the engine.
pub struct NodeHistory<'a> {
    pub var_age: &'a [u32],
    pub row_age: &'a [u32],
    pub incumbent: Option<&'a [f64]>,
    /// Per-variable mean over all incumbents seen so far (zeros when none).
    pub incumbent_avg: &'a [f64],
    pub incumbent_count: u64,
}

/// One feature row per candidate, aligned with the candidate list.
#[derive(Clone, Debug)]
pub struct FeatureMatrix {
    pub candidates: Vec<usize>,
    values: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(candidates: Vec<usize>, values: Vec<Vec<f64>>) -> Self {
        FeatureMatrix { candidates, values }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.iter().map(|r| r.as_slice())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn width(&self) -> usize {
        self.values.first().map_or(0, |r| r.len())
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|r| r.iter().all(|v| v.is_finite()))
    }
}

/// Min-max rescale the selected columns over this node's candidate rows;
/// constant columns map to zero.
pub fn minmax_normalize(matrix: &mut FeatureMatrix, cols: &[usize]) {
    if matrix.values.is_empty() {
        return;
    }
    for &c in cols {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in &matrix.values {
            lo = lo.min(row[c]);
            hi = hi.max(row[c]);
        }
        let range = hi - lo;
        for row in &mut matrix.values {
            row[c] = if range < 1e-12 {
                0.0
            } else {
                (row[c] - lo) / range
            };
        }
    }
}

struct RowInfo {
    norm: f64,
    pos_sum: f64,
    neg_abs_sum: f64,
    abs_sum: f64,
    degree: f64,
    active: bool,
    dual: f64,
    cos_obj: f64,
    cand_abs_sum: f64,
    rhs: f64,
}

/// Compute all 101 base features for every candidate on the reduced
/// formulation, then min-max normalize the K columns per node.
pub fn extract_features(
    view: &ReducedView,
    lp: &LpSolution,
    candidates: &CandidateSet,
    history_stats: &PseudocostStats,
    history: &NodeHistory,
) -> FeatureMatrix {
    let inst = view.instance;
    let m = inst.n_rows();

    let obj_norm = {
        let s: f64 = view
            .free_vars
            .iter()
            .map(|&j| inst.min_obj(j) * inst.min_obj(j))
            .sum();
        s.sqrt()
    };
    let rhs_norm = {
        let s: f64 = view
            .active_rows
            .iter()
            .map(|&r| view.residual_rhs[r] * view.residual_rhs[r])
            .sum();
        s.sqrt()
    };

    let mut cand_mask = vec![false; inst.n_vars()];
    for &j in candidates.vars() {
        cand_mask[j] = true;
    }

    let mut rows: Vec<Option<RowInfo>> = (0..m).map(|_| None).collect();
    for &r in &view.active_rows {
        let mut norm_sq = 0.0;
        let mut pos_sum = 0.0;
        let mut neg_abs_sum = 0.0;
        let mut degree = 0.0;
        let mut obj_dot = 0.0;
        let mut cand_abs_sum = 0.0;
        let mut activity = 0.0;
        for &(j, a) in &inst.rows[r].coeffs {
            if view.is_fixed(j) {
                continue;
            }
            norm_sq += a * a;
            if a > 0.0 {
                pos_sum += a;
            } else {
                neg_abs_sum += -a;
            }
            degree += 1.0;
            obj_dot += inst.min_obj(j) * a;
            if cand_mask[j] {
                cand_abs_sum += a.abs();
            }
            activity += a * lp.x_hat[j];
        }
        let norm = norm_sq.sqrt();
        rows[r] = Some(RowInfo {
            norm,
            pos_sum,
            neg_abs_sum,
            abs_sum: pos_sum + neg_abs_sum,
            degree,
            active: (activity - view.residual_rhs[r]).abs() <= 1e-6,
            dual: lp.duals[r],
            cos_obj: safe_div(obj_dot, obj_norm * norm),
            cand_abs_sum,
            rhs: view.residual_rhs[r],
        });
    }

    let fb_down = history_stats.fallback_phi(Direction::Down);
    let fb_up = history_stats.fallback_phi(Direction::Up);
    let wpc_eps = 1e-6;

    let mut values = Vec::with_capacity(candidates.len());
    for &j in candidates.vars() {
        let mut f = vec![0.0; BASE_FEATURE_COUNT];
        let c = inst.min_obj(j);
        let x = lp.x_hat[j];
        let floor_dist = x - x.floor();
        let ceil_dist = x.ceil() - x;

        f[0] = c;
        f[1] = c.max(0.0);
        f[2] = (-c).max(0.0);
        f[3] = view.cols[j].len() as f64;

        let degrees: Vec<f64> = view.cols[j]
            .iter()
            .map(|&(r, _)| rows[r].as_ref().unwrap().degree)
            .collect();
        let (d_mean, d_std, d_min, d_max) = stats(&degrees);
        f[4] = d_mean;
        f[5] = d_std;
        f[6] = d_min;
        f[7] = d_max;

        let mut pos_vals = Vec::new();
        let mut neg_vals = Vec::new();
        for &(r, a) in &view.cols[j] {
            let info = rows[r].as_ref().unwrap();
            let normed = safe_div(a, info.norm);
            if a > 0.0 {
                pos_vals.push(normed);
            } else {
                neg_vals.push(normed);
            }
        }
        let (p_mean, p_std, p_min, p_max) = stats(&pos_vals);
        f[8] = pos_vals.len() as f64;
        f[9] = p_mean;
        f[10] = p_std;
        f[11] = p_min;
        f[12] = p_max;
        let (n_mean, n_std, n_min, n_max) = stats(&neg_vals);
        f[13] = neg_vals.len() as f64;
        f[14] = n_mean;
        f[15] = n_std;
        f[16] = n_min;
        f[17] = n_max;

        f[18] = floor_dist.min(ceil_dist);
        f[19] = ceil_dist;

        let phi_down = history_stats.phi(j, Direction::Down).unwrap_or(fb_down);
        let phi_up = history_stats.phi(j, Direction::Up).unwrap_or(fb_up);
        let wpc_up = ceil_dist * phi_up;
        let wpc_down = floor_dist * phi_down;
        f[20] = wpc_up;
        f[21] = wpc_down;
        f[22] = (wpc_down + wpc_eps) / (wpc_up + wpc_eps);
        f[23] = wpc_down + wpc_up;
        f[24] = wpc_down * wpc_up;

        f[25] = f64::from(history_stats.infeasible_count(j, Direction::Down));
        f[26] = history_stats.infeasible_fraction(j, Direction::Down);
        f[27] = f64::from(history_stats.infeasible_count(j, Direction::Up));
        f[28] = history_stats.infeasible_fraction(j, Direction::Up);

        let mut rhs_pos = Vec::new();
        let mut rhs_neg = Vec::new();
        let mut pp = Vec::new();
        let mut pn = Vec::new();
        let mut np = Vec::new();
        let mut nn = Vec::new();
        for &(r, a) in &view.cols[j] {
            let info = rows[r].as_ref().unwrap();
            if info.rhs > 1e-10 {
                rhs_pos.push(a / info.rhs);
            } else if info.rhs < -1e-10 {
                rhs_neg.push(a / info.rhs);
            }
            if a > 0.0 {
                pp.push(safe_div(a, info.pos_sum));
                pn.push(safe_div(a, info.neg_abs_sum));
            } else {
                np.push(safe_div(-a, info.pos_sum));
                nn.push(safe_div(-a, info.neg_abs_sum));
            }
        }
        let (_, _, v_min, v_max) = stats(&rhs_pos);
        f[29] = v_min;
        f[30] = v_max;
        let (_, _, v_min, v_max) = stats(&rhs_neg);
        f[31] = v_min;
        f[32] = v_max;
        let (_, _, v_min, v_max) = stats(&pp);
        f[33] = v_min;
        f[34] = v_max;
        let (_, _, v_min, v_max) = stats(&pn);
        f[35] = v_min;
        f[36] = v_max;
        let (_, _, v_min, v_max) = stats(&np);
        f[37] = v_min;
        f[38] = v_max;
        let (_, _, v_min, v_max) = stats(&nn);
        f[39] = v_min;
        f[40] = v_max;

        // Active-row weighted coefficient statistics under four schemes.
        for (s, scheme) in [0usize, 1, 2, 3].into_iter().enumerate() {
            let mut weighted = Vec::new();
            let mut wcount = 0.0;
            for &(r, a) in &view.cols[j] {
                let info = rows[r].as_ref().unwrap();
                if !info.active {
                    continue;
                }
                let w = match scheme {
                    0 => 1.0,
                    1 => safe_div(1.0, info.abs_sum),
                    2 => safe_div(1.0, info.cand_abs_sum),
                    _ => info.dual.abs(),
                };
                weighted.push(w * a.abs());
                wcount += w;
            }
            let (w_mean, w_std, w_min, w_max) = stats(&weighted);
            let base = 41 + 6 * s;
            f[base] = weighted.iter().sum::<f64>();
            f[base + 1] = w_mean;
            f[base + 2] = w_std;
            f[base + 3] = w_max;
            f[base + 4] = w_min;
            f[base + 5] = wcount;
        }

        // G features.
        let binary = inst.is_binary(j);
        f[65] = if binary { 1.0 } else { 0.0 };
        f[66] = if inst.integrality[j] && !binary { 1.0 } else { 0.0 };
        f[67] = 0.0;
        f[68] = if inst.integrality[j] { 0.0 } else { 1.0 };
        f[69] = if view.lb[j] > f64::NEG_INFINITY { 1.0 } else { 0.0 };
        f[70] = if view.ub[j] < f64::INFINITY { 1.0 } else { 0.0 };
        f[71] = if view.lb[j].is_finite() && (x - view.lb[j]).abs() <= 1e-6 {
            1.0
        } else {
            0.0
        };
        f[72] = if view.ub[j].is_finite() && (view.ub[j] - x).abs() <= 1e-6 {
            1.0
        } else {
            0.0
        };
        let b = match lp.basis_status[j] {
            BasisStatus::Lower => 73,
            BasisStatus::Basic => 74,
            BasisStatus::Upper => 75,
            BasisStatus::Zero => 76,
        };
        f[b] = 1.0;
        f[77] = safe_div(lp.reduced_costs[j], obj_norm);
        f[78] = f64::from(history.var_age[j]);
        f[79] = x;
        f[80] = history.incumbent.map_or(0.0, |inc| inc[j]);
        f[81] = history.incumbent_avg[j];
        f[82] = floor_dist;

        let coef_normed: Vec<f64> = view.cols[j]
            .iter()
            .map(|&(r, a)| safe_div(a, rows[r].as_ref().unwrap().norm))
            .collect();
        let (v_mean, _, v_min, v_max) = stats(&coef_normed);
        f[83] = v_mean;
        f[84] = v_min;
        f[85] = v_max;

        let cosims: Vec<f64> = view.cols[j]
            .iter()
            .map(|&(r, _)| rows[r].as_ref().unwrap().cos_obj)
            .collect();
        let (v_mean, _, v_min, v_max) = stats(&cosims);
        f[86] = v_mean;
        f[87] = v_min;
        f[88] = v_max;

        let rhs_normed: Vec<f64> = view.cols[j]
            .iter()
            .map(|&(r, _)| {
                let info = rows[r].as_ref().unwrap();
                safe_div(info.rhs, info.norm)
            })
            .collect();
        let (v_mean, _, v_min, v_max) = stats(&rhs_normed);
        f[89] = v_mean;
        f[90] = v_min;
        f[91] = v_max;

        let tight: Vec<f64> = view.cols[j]
            .iter()
            .map(|&(r, _)| if rows[r].as_ref().unwrap().active { 1.0 } else { 0.0 })
            .collect();
        let (v_mean, _, v_min, v_max) = stats(&tight);
        f[92] = v_mean;
        f[93] = v_min;
        f[94] = v_max;

        let duals_normed: Vec<f64> = view.cols[j]
            .iter()
            .map(|&(r, _)| safe_div(rows[r].as_ref().unwrap().dual, rhs_norm))
            .collect();
        let (v_mean, _, v_min, v_max) = stats(&duals_normed);
        f[95] = v_mean;
        f[96] = v_min;
        f[97] = v_max;

        let ages: Vec<f64> = view.cols[j]
            .iter()
            .map(|&(r, _)| f64::from(history.row_age[r]))
            .collect();
        let (v_mean, _, v_min, v_max) = stats(&ages);
        f[98] = v_mean;
        f[99] = v_min;
        f[100] = v_max;

        debug_assert!(f.iter().all(|v| v.is_finite()), "non-finite feature");
        values.push(f);
    }

    let mut matrix = FeatureMatrix::new(candidates.vars().to_vec(), values);
    let k_ids = base_schema().k_feature_ids();
    minmax_normalize(&mut matrix, &k_ids);
    matrix
}

/// Whether models expand features quadratically or stay linear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionMode {
    Linear,
    Quadratic,
}

/// One model term over base features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermKind {
    Linear(usize),
    Square(usize),
    Interaction(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub id: usize,
    pub kind: TermKind,
}

/// Term layout over the post-filter active base features: all singletons,
/// all squares, then all unordered pairs (quadratic mode), or singletons
/// only (linear mode). Term ids are positions in this list.
#[derive(Clone, Debug)]
pub struct QuadraticSchema {
    pub mode: ExpansionMode,
    /// Active base feature ids, ascending.
    pub active_base: Vec<usize>,
    pub terms: Vec<Term>,
    /// base feature id -> position in `active_base`.
    positions: BTreeMap<usize, usize>,
}

impl QuadraticSchema {
    pub fn new(active_base: Vec<usize>, mode: ExpansionMode) -> Self {
        debug_assert!(active_base.windows(2).all(|w| w[0] < w[1]));
        let p = active_base.len();
        let mut terms = Vec::new();
        for &i in &active_base {
            terms.push(Term {
                id: terms.len(),
                kind: TermKind::Linear(i),
            });
        }
        if mode == ExpansionMode::Quadratic {
            for &i in &active_base {
                terms.push(Term {
                    id: terms.len(),
                    kind: TermKind::Square(i),
                });
            }
            for a in 0..p {
                for b in a + 1..p {
                    terms.push(Term {
                        id: terms.len(),
                        kind: TermKind::Interaction(active_base[a], active_base[b]),
                    });
                }
            }
        }
        let positions = active_base
            .iter()
            .enumerate()
            .map(|(pos, &id)| (id, pos))
            .collect();
        QuadraticSchema {
            mode,
            active_base,
            terms,
            positions,
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn position(&self, base_id: usize) -> Option<usize> {
        self.positions.get(&base_id).copied()
    }

    /// Term value from a row of active-base values (ordered as
    /// `active_base`).
    pub fn term_value(&self, kind: TermKind, active_row: &[f64]) -> f64 {
        match kind {
            TermKind::Linear(i) => active_row[self.positions[&i]],
            TermKind::Square(i) => {
                let v = active_row[self.positions[&i]];
                v * v
            }
            TermKind::Interaction(i, j) => {
                active_row[self.positions[&i]] * active_row[self.positions[&j]]
            }
        }
    }

    /// Human-readable term name from the base schema.
    pub fn term_name(&self, kind: TermKind) -> String {
        let schema = base_schema();
        match kind {
            TermKind::Linear(i) => schema.name(i).to_string(),
            TermKind::Square(i) => format!("{}^2", schema.name(i)),
            TermKind::Interaction(i, j) => format!("{} x {}", schema.name(i), schema.name(j)),
        }
    }

    /// Stable fingerprint binding the base schema, mode, and active set.
    pub fn hash(&self) -> String {
        let ids: String = self
            .active_base
            .iter()
            .map(|i| format!("{i},"))
            .collect();
        fnv_hex(&format!("{}|{:?}|{}", base_schema().hash(), self.mode, ids))
    }
}

/// Expand one active-base row into the schema's term order. The row length
/// must equal the active base count.
pub fn quadratic_expand(row: &[f64], schema: &QuadraticSchema) -> Vec<f64> {
    assert_eq!(
        row.len(),
        schema.active_base.len(),
        "row length must match active base count"
    );
    schema
        .terms
        .iter()
        .map(|t| schema.term_value(t.kind, row))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::CandidateSet;
    use crate::mip::{parse_instance, reduce, NodeBounds};
    use crate::simplex::{solve_lp, SimplexConfig};

    #[test]
    fn schema_has_101_contiguous_features() {
        let schema = base_schema();
        assert_eq!(schema.len(), BASE_FEATURE_COUNT);
        for (i, d) in schema.features.iter().enumerate() {
            assert_eq!(d.id, i);
        }
        let mut names: Vec<&str> = schema.features.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), BASE_FEATURE_COUNT, "names are unique");
        let k = schema.k_feature_ids().len();
        assert_eq!(k, 65);
        assert_eq!(BASE_FEATURE_COUNT - k, 36);
    }

    #[test]
    fn schema_group_counts_sum_to_101() {
        let schema = base_schema();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for d in &schema.features {
            *counts.entry(d.group.as_str()).or_default() += 1;
        }
        assert_eq!(counts.values().sum::<usize>(), 101);
        assert_eq!(counts["objective coefficient"], 3);
        assert_eq!(counts["weighted pseudocosts"], 5);
        assert_eq!(counts["infeasibility statistics"], 4);
        assert_eq!(counts["one-to-all coefficient ratios"], 8);
        let active: usize = counts
            .iter()
            .filter(|(g, _)| g.starts_with("active constraint"))
            .map(|(_, c)| c)
            .sum();
        assert_eq!(active, 24);
    }

    #[test]
    fn minmax_examples() {
        let mut m = FeatureMatrix::new(
            vec![0, 1, 2],
            vec![vec![2.0], vec![4.0], vec![6.0]],
        );
        minmax_normalize(&mut m, &[0]);
        assert_eq!(m.row(0), &[0.0]);
        assert_eq!(m.row(1), &[0.5]);
        assert_eq!(m.row(2), &[1.0]);

        let mut m = FeatureMatrix::new(vec![0, 1], vec![vec![5.0], vec![5.0]]);
        minmax_normalize(&mut m, &[0]);
        assert_eq!(m.row(0), &[0.0]);
        assert_eq!(m.row(1), &[0.0]);

        let mut m = FeatureMatrix::new(vec![0], vec![vec![3.7]]);
        minmax_normalize(&mut m, &[0]);
        assert_eq!(m.row(0), &[0.0], "single-candidate node normalizes to 0");
    }

    fn toy_features() -> FeatureMatrix {
        // Two fractional binaries in overlapping rows.
        let text = "sense min\n\
            var a 0 1 int\nvar b 0 1 int\nvar c 0 1 int\n\
            obj a -3\nobj b -2\nobj c -1\n\
            row r1 <= 1.3 : a*1 b*1\nrow r2 <= 1.1 : b*1 c*2\n";
        let inst = parse_instance(text, "t").unwrap();
        let view = reduce(&inst, &NodeBounds::default());
        let lp = solve_lp(&view, &SimplexConfig::default()).unwrap();
        let cands = CandidateSet::from_lp(&view, &lp, 1e-6);
        assert!(!cands.is_empty());
        let stats = PseudocostStats::new(3);
        let hist = NodeHistory {
            var_age: &[0, 0, 0],
            row_age: &[0, 0],
            incumbent: None,
            incumbent_avg: &[0.0; 3],
            incumbent_count: 0,
        };
        extract_features(&view, &lp, &cands, &stats, &hist)
    }

    #[test]
    fn features_are_finite_and_k_normalized() {
        let m = toy_features();
        assert!(m.is_finite());
        assert_eq!(m.width(), BASE_FEATURE_COUNT);
        for row in m.rows() {
            for &id in &base_schema().k_feature_ids() {
                assert!((0.0..=1.0).contains(&row[id]), "K feature {id} in [0,1]");
            }
        }
    }

    #[test]
    fn distance_features_from_fractional_value() {
        // x = 2.3 -> floor distance 0.3, ceiling 0.7, violation 0.3. Checked
        // through the raw formulas used by extract_features.
        let x: f64 = 2.3;
        let floor_dist = x - x.floor();
        let ceil_dist = x.ceil() - x;
        assert!((floor_dist - 0.3).abs() < 1e-12);
        assert!((ceil_dist - 0.7).abs() < 1e-12);
        assert!((floor_dist.min(ceil_dist) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn degree_stats_hand_example() {
        let (mean, std, min, max) = stats(&[2.0, 4.0]);
        assert_eq!((mean, std, min, max), (3.0, 1.0, 2.0, 4.0));
    }

    #[test]
    fn objective_triple_sign_split() {
        // c_j = -3 -> (raw -3, positive 0, negative magnitude 3), before the
        // per-node min-max step.
        let c: f64 = -3.0;
        assert_eq!((c, c.max(0.0), (-c).max(0.0)), (-3.0, 0.0, 3.0));
    }

    #[test]
    fn scale_covariance_of_minmax() {
        // Rescaling all candidates' raw K values by a positive affine map
        // leaves normalized columns unchanged.
        let rows = vec![vec![1.0, 4.0], vec![3.0, 2.0], vec![2.0, 9.0]];
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| 7.5 * v + 2.0).collect())
            .collect();
        let mut a = FeatureMatrix::new(vec![0, 1, 2], rows);
        let mut b = FeatureMatrix::new(vec![0, 1, 2], scaled);
        minmax_normalize(&mut a, &[0, 1]);
        minmax_normalize(&mut b, &[0, 1]);
        for i in 0..3 {
            for c in 0..2 {
                assert!((a.row(i)[c] - b.row(i)[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_expansion_combinatorics() {
        let schema = QuadraticSchema::new(vec![0, 1, 2], ExpansionMode::Quadratic);
        assert_eq!(schema.term_count(), 9, "3 + 3 + 3 for p = 3");

        let one = QuadraticSchema::new(vec![5], ExpansionMode::Quadratic);
        assert_eq!(one.term_count(), 2, "value and its square");

        let lin = QuadraticSchema::new(vec![0, 1, 2], ExpansionMode::Linear);
        assert_eq!(lin.term_count(), 3);
    }

    #[test]
    fn quadratic_expansion_values() {
        let schema = QuadraticSchema::new(vec![0, 1], ExpansionMode::Quadratic);
        let out = quadratic_expand(&[2.0, 3.0], &schema);
        assert_eq!(out, vec![2.0, 3.0, 4.0, 9.0, 6.0]);
    }

    #[test]
    #[should_panic(expected = "row length")]
    fn quadratic_expand_rejects_length_mismatch() {
        let schema = QuadraticSchema::new(vec![0, 1], ExpansionMode::Quadratic);
        let _ = quadratic_expand(&[1.0], &schema);
    }

    #[test]
    fn term_mapping_is_bijective() {
        let schema = QuadraticSchema::new(vec![3, 8, 20, 44], ExpansionMode::Quadratic);
        let p = 4;
        assert_eq!(schema.term_count(), p + p + p * (p - 1) / 2);
        let mut seen = std::collections::BTreeSet::new();
        for t in &schema.terms {
            assert!(seen.insert(format!("{:?}", t.kind)), "duplicate term");
            assert_eq!(schema.terms[t.id].id, t.id);
        }
    }

    #[test]
    fn schema_hash_distinguishes_modes_and_sets() {
        let a = QuadraticSchema::new(vec![0, 1], ExpansionMode::Quadratic);
        let b = QuadraticSchema::new(vec![0, 1], ExpansionMode::Linear);
        let c = QuadraticSchema::new(vec![0, 2], ExpansionMode::Quadratic);
        assert_ne!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash(), QuadraticSchema::new(vec![0, 1], ExpansionMode::Quadratic).hash());
    }

    #[test]
    fn fixing_a_variable_only_shifts_reduced_statistics() {
        // Fixing an extra variable changes features only through the reduced
        // formulation: recomputing on a manually reduced instance matches.
        let text = "sense min\n\
            var a 0 1 int\nvar b 0 1 int\nvar c 0 1 int\n\
            obj a -3\nobj b -2\nobj c -1\n\
            row r1 <= 1.3 : a*1 b*1 c*1\nrow r2 <= 1.1 : b*1 c*2\n";
        let inst = parse_instance(text, "t").unwrap();
        let bounds = NodeBounds::default()
            .with_upper(&inst, 2, 0.0)
            .unwrap();
        let view = reduce(&inst, &bounds);
        let lp = solve_lp(&view, &SimplexConfig::default()).unwrap();
        let cands = CandidateSet::from_lp(&view, &lp, 1e-6);
        let stats = PseudocostStats::new(3);
        let hist = NodeHistory {
            var_age: &[0; 3],
            row_age: &[0; 2],
            incumbent: None,
            incumbent_avg: &[0.0; 3],
            incumbent_count: 0,
        };
        let via_overrides = extract_features(&view, &lp, &cands, &stats, &hist);

        // The same node expressed as an instance with c removed.
        let manual = "sense min\n\
            var a 0 1 int\nvar b 0 1 int\n\
            obj a -3\nobj b -2\n\
            row r1 <= 1.3 : a*1 b*1\nrow r2 <= 1.1 : b*1\n";
        let inst2 = parse_instance(manual, "t").unwrap();
        let view2 = reduce(&inst2, &NodeBounds::default());
        let lp2 = solve_lp(&view2, &SimplexConfig::default()).unwrap();
        let cands2 = CandidateSet::from_lp(&view2, &lp2, 1e-6);
        let stats2 = PseudocostStats::new(2);
        let hist2 = NodeHistory {
            var_age: &[0; 2],
            row_age: &[0; 2],
            incumbent: None,
            incumbent_avg: &[0.0; 2],
            incumbent_count: 0,
        };
        let manual_matrix = extract_features(&view2, &lp2, &cands2, &stats2, &hist2);

        assert_eq!(via_overrides.n_rows(), manual_matrix.n_rows());
        for (r1, r2) in via_overrides.rows().zip(manual_matrix.rows()) {
            for (a, b) in r1.iter().zip(r2.iter()) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }
}
