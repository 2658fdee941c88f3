//! Dense bounded-variable simplex for LP relaxations.
//!
//! Rows are brought into computational form by one slack per row (`<=` rows
//! get a nonnegative slack, `>=` rows a nonpositive one, `=` rows a slack
//! fixed at zero). A two-phase primal simplex with artificial variables
//! solves from scratch; child re-solves after a single bound change warm
//! start from the parent basis with a dual simplex and fall back to a
//! scratch solve on any numerical doubt, so warm and cold paths agree on
//! status and objective within tolerance.

use crate::mip::ReducedView;
use thiserror::Error;

/// Outcome of an LP solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

/// Simplex basis status of a variable in the reported solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisStatus {
    Lower,
    Basic,
    Upper,
    /// Nonbasic free variable parked at zero.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index rule; slower but cycle-free and fully deterministic.
    Bland,
    /// Most-negative reduced cost with smallest-index ties; falls back to
    /// Bland after long runs of degenerate pivots.
    LargestCoefficient,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexConfig {
    pub tol_feas: f64,
    pub tol_dual: f64,
    pub iteration_limit: u64,
    pub pivot_rule: PivotRule,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        SimplexConfig {
            tol_feas: 1e-6,
            tol_dual: 1e-6,
            iteration_limit: 50_000,
            pivot_rule: PivotRule::Bland,
        }
    }
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("LP is unbounded")]
    Unbounded,
    #[error("numerical instability: {0}")]
    Numerical(String),
}

/// Opaque basis snapshot used to warm-start child re-solves. Only valid for
/// the reduced view it was produced from.
#[derive(Clone, Debug)]
pub struct Basis {
    basic: Vec<usize>,
    state: Vec<VarState>,
    n_struct: usize,
    n_rows: usize,
}

/// LP solution in instance coordinates: fixed variables appear at their
/// fixed value with status `Lower`, inactive rows carry zero duals.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective in minimization form, including the fixed-variable constant.
    pub z: f64,
    pub x_hat: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub basis_status: Vec<BasisStatus>,
    pub iterations: u64,
    /// Total primal infeasibility (phase-1 objective) when infeasible.
    pub infeasibility: f64,
    pub(crate) basis: Option<Basis>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic with both bounds infinite, parked at zero.
    Free,
}

const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-9;
const REFRESH_INTERVAL: usize = 50;

/// Computational form of a reduced view: structural columns for the free
/// variables followed by one slack per active row.
#[derive(Clone, Debug)]
struct StandardForm {
    n_struct: usize,
    n_rows: usize,
    /// Dense structural coefficients, row-major `n_rows x n_struct`.
    a: Vec<f64>,
    rhs: Vec<f64>,
    /// Minimization-form objective over structural columns.
    obj_struct: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// Active-row position of each instance row id.
    row_ids: Vec<usize>,
    /// Fixed-variable objective constant added to every reported z.
    obj_constant: f64,
}

impl StandardForm {
    fn from_view(view: &ReducedView) -> StandardForm {
        let n_struct = view.free_vars.len();
        let n_rows = view.active_rows.len();
        let mut a = vec![0.0; n_rows * n_struct];
        let mut rhs = Vec::with_capacity(n_rows);
        let mut lb = Vec::with_capacity(n_struct + n_rows);
        let mut ub = Vec::with_capacity(n_struct + n_rows);
        for (pos, &j) in view.free_vars.iter().enumerate() {
            debug_assert_eq!(view.free_index[j], Some(pos));
            lb.push(view.lb[j]);
            ub.push(view.ub[j]);
        }
        for (i, &r) in view.active_rows.iter().enumerate() {
            rhs.push(view.residual_rhs[r]);
            for &(j, v) in &view.instance.rows[r].coeffs {
                if let Some(pos) = view.free_index[j] {
                    a[i * n_struct + pos] = v;
                }
            }
            use crate::mip::RowSense::*;
            let (slb, sub) = match view.instance.rows[r].sense {
                Le => (0.0, f64::INFINITY),
                Ge => (f64::NEG_INFINITY, 0.0),
                Eq => (0.0, 0.0),
            };
            lb.push(slb);
            ub.push(sub);
        }
        let obj_struct: Vec<f64> = view
            .free_vars
            .iter()
            .map(|&j| view.instance.min_obj(j))
            .collect();
        StandardForm {
            n_struct,
            n_rows,
            a,
            rhs,
            obj_struct,
            lb,
            ub,
            row_ids: view.active_rows.clone(),
            obj_constant: view.fixed_obj_constant(),
        }
    }

    fn ncols(&self) -> usize {
        self.n_struct + self.n_rows
    }
}

enum Phase {
    /// Minimize the sum of artificial variables.
    Feasibility,
    /// Minimize the real objective; artificials are pinned at zero.
    Objective,
}

/// Dense simplex working state over a standard form plus one artificial
/// column per row (columns `ncols..ncols + n_rows`).
#[derive(Clone)]
struct Tableau {
    sf: StandardForm,
    /// Sign of each artificial column's single entry.
    art_sign: Vec<f64>,
    art_lb: Vec<f64>,
    art_ub: Vec<f64>,
    basic: Vec<usize>,
    state: Vec<VarState>,
    x: Vec<f64>,
    /// Dense basis inverse, row-major `n_rows x n_rows`.
    binv: Vec<f64>,
    iterations: u64,
    pivots_since_refresh: usize,
    degenerate_streak: u64,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

enum DualOutcome {
    Optimal,
    Infeasible(f64),
    IterationLimit,
}

impl Tableau {
    fn total_cols(&self) -> usize {
        self.sf.ncols() + self.sf.n_rows
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.sf.ncols()
    }

    fn col_lb(&self, col: usize) -> f64 {
        if self.is_artificial(col) {
            self.art_lb[col - self.sf.ncols()]
        } else {
            self.sf.lb[col]
        }
    }

    fn col_ub(&self, col: usize) -> f64 {
        if self.is_artificial(col) {
            self.art_ub[col - self.sf.ncols()]
        } else {
            self.sf.ub[col]
        }
    }

    fn obj_coef(&self, col: usize, phase: &Phase) -> f64 {
        match phase {
            Phase::Feasibility => {
                if self.is_artificial(col) {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Objective => {
                if col < self.sf.n_struct {
                    self.sf.obj_struct[col]
                } else {
                    0.0
                }
            }
        }
    }

    /// `out += scale * column(col)` over row space.
    fn add_col(&self, col: usize, scale: f64, out: &mut [f64]) {
        let m = self.sf.n_rows;
        let ns = self.sf.n_struct;
        if col < ns {
            for i in 0..m {
                out[i] += scale * self.sf.a[i * ns + col];
            }
        } else if col < self.sf.ncols() {
            out[col - ns] += scale;
        } else {
            let k = col - self.sf.ncols();
            out[k] += scale * self.art_sign[k];
        }
    }

    /// Dot product of a row-space vector with a column.
    fn dot_col(&self, col: usize, v: &[f64]) -> f64 {
        let ns = self.sf.n_struct;
        if col < ns {
            (0..self.sf.n_rows).map(|i| v[i] * self.sf.a[i * ns + col]).sum()
        } else if col < self.sf.ncols() {
            v[col - ns]
        } else {
            let k = col - self.sf.ncols();
            v[k] * self.art_sign[k]
        }
    }

    /// alpha = binv * column(col).
    fn ftran(&self, col: usize) -> Vec<f64> {
        let m = self.sf.n_rows;
        let mut raw = vec![0.0; m];
        self.add_col(col, 1.0, &mut raw);
        let mut alpha = vec![0.0; m];
        for i in 0..m {
            let mut s = 0.0;
            for k in 0..m {
                s += self.binv[i * m + k] * raw[k];
            }
            alpha[i] = s;
        }
        alpha
    }

    /// Row-space duals for the given phase objective: y = c_B^T binv.
    fn duals(&self, phase: &Phase) -> Vec<f64> {
        let m = self.sf.n_rows;
        let mut y = vec![0.0; m];
        for (i, &b) in self.basic.iter().enumerate() {
            let cb = self.obj_coef(b, phase);
            if cb != 0.0 {
                for k in 0..m {
                    y[k] += cb * self.binv[i * m + k];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, col: usize, y: &[f64], phase: &Phase) -> f64 {
        self.obj_coef(col, phase) - self.dot_col(col, y)
    }

    /// Recompute basic variable values from nonbasic values.
    fn compute_basics(&mut self) {
        let m = self.sf.n_rows;
        let mut t = self.sf.rhs.clone();
        for col in 0..self.total_cols() {
            if self.state[col] != VarState::Basic && self.x[col] != 0.0 {
                self.add_col(col, -self.x[col], &mut t);
            }
        }
        for i in 0..m {
            let mut s = 0.0;
            for k in 0..m {
                s += self.binv[i * m + k] * t[k];
            }
            self.x[self.basic[i]] = s;
        }
    }

    /// Rebuild the basis inverse by Gauss-Jordan with partial pivoting.
    fn refactorize(&mut self) -> Result<(), LpError> {
        let m = self.sf.n_rows;
        let mut b = vec![0.0; m * m];
        for (i, &col) in self.basic.iter().enumerate() {
            let mut raw = vec![0.0; m];
            self.add_col(col, 1.0, &mut raw);
            for r in 0..m {
                b[r * m + i] = raw[r];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = b[col * m + col].abs();
            for r in col + 1..m {
                let v = b[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                return Err(LpError::Numerical("singular basis".into()));
            }
            if piv_row != col {
                for k in 0..m {
                    b.swap(col * m + k, piv_row * m + k);
                    inv.swap(col * m + k, piv_row * m + k);
                }
            }
            let p = b[col * m + col];
            for k in 0..m {
                b[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = b[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            b[r * m + k] -= f * b[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refresh = 0;
        Ok(())
    }

    /// Product-form update of binv after `col_alpha` enters in row `r`.
    fn update_binv(&mut self, r: usize, alpha: &[f64]) {
        let m = self.sf.n_rows;
        let piv = alpha[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i != r && alpha[i] != 0.0 {
                let f = alpha[i];
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[r * m + k];
                }
            }
        }
        self.pivots_since_refresh += 1;
    }

    fn maybe_refresh(&mut self) -> Result<(), LpError> {
        if self.pivots_since_refresh >= REFRESH_INTERVAL {
            self.refactorize()?;
            self.compute_basics();
        }
        Ok(())
    }

    fn entering_direction(&self, col: usize, d: f64) -> f64 {
        match self.state[col] {
            VarState::AtLower => 1.0,
            VarState::AtUpper => -1.0,
            VarState::Free => {
                if d < 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            VarState::Basic => unreachable!("basic column cannot enter"),
        }
    }

    fn eligible(&self, col: usize, d: f64, tol: f64) -> bool {
        if self.state[col] == VarState::Basic || self.col_lb(col) == self.col_ub(col) {
            return false;
        }
        match self.state[col] {
            VarState::AtLower => d < -tol,
            VarState::AtUpper => d > tol,
            VarState::Free => d.abs() > tol,
            VarState::Basic => false,
        }
    }

    /// One primal phase: iterate until optimal for the given objective.
    fn primal(&mut self, phase: Phase, cfg: &SimplexConfig) -> Result<StepOutcome, LpError> {
        loop {
            if self.iterations >= cfg.iteration_limit {
                return Ok(StepOutcome::IterationLimit);
            }
            self.maybe_refresh()?;
            let y = self.duals(&phase);

            let use_bland = matches!(cfg.pivot_rule, PivotRule::Bland)
                || self.degenerate_streak > 500;
            let mut entering: Option<(usize, f64)> = None;
            for col in 0..self.total_cols() {
                let d = self.reduced_cost(col, &y, &phase);
                if !self.eligible(col, d, cfg.tol_dual) {
                    continue;
                }
                if use_bland {
                    entering = Some((col, d));
                    break;
                }
                match entering {
                    Some((_, best)) if d.abs() <= best.abs() => {}
                    _ => entering = Some((col, d)),
                }
            }
            let Some((q, dq)) = entering else {
                return Ok(StepOutcome::Optimal);
            };

            let sigma = self.entering_direction(q, dq);
            let alpha = self.ftran(q);

            // Ratio test over basic variables, then against q's own span.
            let mut t_row = f64::INFINITY;
            let mut leaving: Option<usize> = None;
            for i in 0..self.sf.n_rows {
                let w = sigma * alpha[i];
                let b = self.basic[i];
                let limit = if w > PIVOT_TOL {
                    let lo = self.col_lb(b);
                    if lo == f64::NEG_INFINITY {
                        continue;
                    }
                    ((self.x[b] - lo) / w).max(0.0)
                } else if w < -PIVOT_TOL {
                    let hi = self.col_ub(b);
                    if hi == f64::INFINITY {
                        continue;
                    }
                    ((hi - self.x[b]) / -w).max(0.0)
                } else {
                    continue;
                };
                if limit < t_row - RATIO_TIE {
                    t_row = limit;
                    leaving = Some(i);
                } else if limit < t_row + RATIO_TIE {
                    // Tie: smallest leaving variable index keeps Bland's
                    // guarantee and determinism.
                    if let Some(cur) = leaving {
                        if self.basic[i] < self.basic[cur] {
                            leaving = Some(i);
                        }
                    } else {
                        leaving = Some(i);
                    }
                }
            }
            let span = self.col_ub(q) - self.col_lb(q);
            let t_flip = if span.is_finite() { span } else { f64::INFINITY };

            if leaving.is_none() && t_flip == f64::INFINITY {
                return Ok(StepOutcome::Unbounded);
            }

            self.iterations += 1;
            if t_flip < t_row - RATIO_TIE || leaving.is_none() {
                // Bound flip: q jumps to its opposite bound.
                let delta = sigma * t_flip;
                for i in 0..self.sf.n_rows {
                    let b = self.basic[i];
                    self.x[b] -= alpha[i] * delta;
                }
                if sigma > 0.0 {
                    self.x[q] = self.col_ub(q);
                    self.state[q] = VarState::AtUpper;
                } else {
                    self.x[q] = self.col_lb(q);
                    self.state[q] = VarState::AtLower;
                }
                if t_flip <= RATIO_TIE {
                    self.degenerate_streak += 1;
                } else {
                    self.degenerate_streak = 0;
                }
            } else {
                let r = leaving.unwrap();
                let t = t_row;
                let delta = sigma * t;
                for i in 0..self.sf.n_rows {
                    let b = self.basic[i];
                    self.x[b] -= alpha[i] * delta;
                }
                self.x[q] += delta;
                let l = self.basic[r];
                if sigma * alpha[r] > 0.0 {
                    self.x[l] = self.col_lb(l);
                    self.state[l] = VarState::AtLower;
                } else {
                    self.x[l] = self.col_ub(l);
                    self.state[l] = VarState::AtUpper;
                }
                self.basic[r] = q;
                self.state[q] = VarState::Basic;
                self.update_binv(r, &alpha);
                if t <= RATIO_TIE {
                    self.degenerate_streak += 1;
                } else {
                    self.degenerate_streak = 0;
                }
            }
        }
    }

    /// Dual simplex: restore primal feasibility starting from a dual-feasible
    /// basis, as after tightening a single variable bound.
    fn dual(&mut self, cfg: &SimplexConfig) -> Result<DualOutcome, LpError> {
        let phase = Phase::Objective;
        loop {
            if self.iterations >= cfg.iteration_limit {
                return Ok(DualOutcome::IterationLimit);
            }
            self.maybe_refresh()?;

            // Leaving variable: most violated basic, ties by smallest index.
            let mut leave: Option<(usize, f64, bool)> = None; // (row, violation, below)
            for i in 0..self.sf.n_rows {
                let b = self.basic[i];
                let below = self.col_lb(b) - self.x[b];
                let above = self.x[b] - self.col_ub(b);
                let (viol, is_below) = if below > above { (below, true) } else { (above, false) };
                if viol <= cfg.tol_feas {
                    continue;
                }
                let better = match (&leave, cfg.pivot_rule) {
                    (None, _) => true,
                    (Some((ri, v, _)), PivotRule::Bland) => {
                        let _ = v;
                        self.basic[i] < self.basic[*ri]
                    }
                    (Some((ri, v, _)), PivotRule::LargestCoefficient) => {
                        viol > *v + RATIO_TIE
                            || (viol > *v - RATIO_TIE && self.basic[i] < self.basic[*ri])
                    }
                };
                if better {
                    leave = Some((i, viol, is_below));
                }
            }
            let Some((r, _viol, below)) = leave else {
                return Ok(DualOutcome::Optimal);
            };

            let m = self.sf.n_rows;
            let rho: Vec<f64> = (0..m).map(|k| self.binv[r * m + k]).collect();
            let y = self.duals(&phase);

            // Entering variable: minimum dual ratio among columns whose
            // movement pushes the leaving variable back into its bounds.
            let mut entering: Option<(usize, f64, f64)> = None; // (col, ratio, w)
            for col in 0..self.total_cols() {
                if self.state[col] == VarState::Basic || self.col_lb(col) == self.col_ub(col) {
                    continue;
                }
                let w = self.dot_col(col, &rho);
                if w.abs() <= PIVOT_TOL {
                    continue;
                }
                let ok = match self.state[col] {
                    VarState::AtLower => {
                        if below {
                            w < 0.0
                        } else {
                            w > 0.0
                        }
                    }
                    VarState::AtUpper => {
                        if below {
                            w > 0.0
                        } else {
                            w < 0.0
                        }
                    }
                    VarState::Free => true,
                    VarState::Basic => false,
                };
                if !ok {
                    continue;
                }
                let d = self.reduced_cost(col, &y, &phase);
                let ratio = d.abs() / w.abs();
                let better = match &entering {
                    None => true,
                    Some((bc, br, _)) => {
                        ratio < *br - RATIO_TIE || (ratio < *br + RATIO_TIE && col < *bc)
                    }
                };
                if better {
                    entering = Some((col, ratio, w));
                }
            }
            let Some((q, _ratio, _w)) = entering else {
                return Ok(DualOutcome::Infeasible(_viol));
            };

            self.iterations += 1;
            let alpha = self.ftran(q);
            let l = self.basic[r];
            if below {
                self.x[l] = self.col_lb(l);
                self.state[l] = VarState::AtLower;
            } else {
                self.x[l] = self.col_ub(l);
                self.state[l] = VarState::AtUpper;
            }
            self.basic[r] = q;
            self.state[q] = VarState::Basic;
            self.update_binv(r, &alpha);
            self.compute_basics();
        }
    }

    /// Total bound violation over basic variables.
    fn primal_infeasibility(&self) -> f64 {
        let mut total = 0.0;
        for &b in &self.basic {
            let below = self.col_lb(b) - self.x[b];
            let above = self.x[b] - self.col_ub(b);
            total += below.max(0.0) + above.max(0.0);
        }
        total
    }

    fn objective_value(&self) -> f64 {
        let mut z = self.sf.obj_constant;
        for col in 0..self.sf.n_struct {
            z += self.sf.obj_struct[col] * self.x[col];
        }
        z
    }
}

/// Fresh tableau with a slack/artificial starting basis. Returns the
/// tableau and whether any artificial variable is nonzero (phase 1 needed).
fn initial_tableau(sf: StandardForm) -> (Tableau, bool) {
    let m = sf.n_rows;
    let ncols = sf.ncols();
    let total = ncols + m;
    let mut state = vec![VarState::AtLower; total];
    let mut x = vec![0.0; total];

    for col in 0..sf.n_struct {
        if sf.lb[col].is_finite() {
            state[col] = VarState::AtLower;
            x[col] = sf.lb[col];
        } else if sf.ub[col].is_finite() {
            state[col] = VarState::AtUpper;
            x[col] = sf.ub[col];
        } else {
            state[col] = VarState::Free;
            x[col] = 0.0;
        }
    }

    let mut art_sign = vec![1.0; m];
    let mut art_lb = vec![0.0; m];
    let mut art_ub = vec![0.0; m];
    let mut basic = Vec::with_capacity(m);
    let mut binv = vec![0.0; m * m];
    let mut need_phase1 = false;

    for i in 0..m {
        let slack = sf.n_struct + i;
        let mut req = sf.rhs[i];
        for col in 0..sf.n_struct {
            let a = sf.a[i * sf.n_struct + col];
            if a != 0.0 {
                req -= a * x[col];
            }
        }
        let art = ncols + i;
        if req >= sf.lb[slack] && req <= sf.ub[slack] {
            // Slack absorbs the row; artificial stays fixed at zero.
            state[slack] = VarState::Basic;
            x[slack] = req;
            basic.push(slack);
            binv[i * m + i] = 1.0;
        } else {
            let clamped = req.clamp(sf.lb[slack], sf.ub[slack]);
            if clamped == sf.lb[slack] {
                state[slack] = VarState::AtLower;
            } else {
                state[slack] = VarState::AtUpper;
            }
            x[slack] = clamped;
            let resid = req - clamped;
            art_sign[i] = if resid >= 0.0 { 1.0 } else { -1.0 };
            art_ub[i] = f64::INFINITY;
            state[art] = VarState::Basic;
            x[art] = resid.abs();
            basic.push(art);
            binv[i * m + i] = art_sign[i];
            need_phase1 = true;
        }
        let _ = &mut art_lb;
    }

    (
        Tableau {
            sf,
            art_sign,
            art_lb,
            art_ub,
            basic,
            state,
            x,
            binv,
            iterations: 0,
            pivots_since_refresh: 0,
            degenerate_streak: 0,
        },
        need_phase1,
    )
}

/// Pivot remaining basic artificials out (or pin redundant rows), then lock
/// every artificial at zero for phase 2.
fn retire_artificials(t: &mut Tableau) {
    let m = t.sf.n_rows;
    let ncols = t.sf.ncols();
    for i in 0..m {
        if t.basic[i] < ncols {
            continue;
        }
        let rho: Vec<f64> = (0..m).map(|k| t.binv[i * m + k]).collect();
        let mut found = None;
        for col in 0..ncols {
            if t.state[col] == VarState::Basic {
                continue;
            }
            let w = t.dot_col(col, &rho);
            if w.abs() > 1e-7 {
                found = Some(col);
                break;
            }
        }
        if let Some(q) = found {
            let alpha = t.ftran(q);
            let art = t.basic[i];
            let k = art - ncols;
            t.art_ub[k] = 0.0;
            t.state[art] = VarState::AtLower;
            t.x[art] = 0.0;
            t.basic[i] = q;
            t.state[q] = VarState::Basic;
            t.update_binv(i, &alpha);
        }
        // Redundant row: the artificial stays basic at zero with bounds
        // already pinned to [0, 0] below.
    }
    for k in 0..m {
        t.art_ub[k] = 0.0;
    }
    t.compute_basics();
}

enum RawOutcome {
    Optimal,
    Infeasible(f64),
    IterationLimit,
}

/// Two-phase scratch solve of a standard form.
fn solve_standard(sf: StandardForm, cfg: &SimplexConfig) -> Result<(Tableau, RawOutcome), LpError> {
    let (mut t, need_phase1) = initial_tableau(sf);
    if need_phase1 {
        match t.primal(Phase::Feasibility, cfg)? {
            StepOutcome::Optimal => {}
            StepOutcome::IterationLimit => return Ok((t, RawOutcome::IterationLimit)),
            StepOutcome::Unbounded => {
                return Err(LpError::Numerical(
                    "phase-1 objective unbounded below".into(),
                ))
            }
        }
        let infeas: f64 = (0..t.sf.n_rows).map(|k| t.x[t.sf.ncols() + k]).sum();
        if infeas > cfg.tol_feas {
            return Ok((t, RawOutcome::Infeasible(infeas)));
        }
        retire_artificials(&mut t);
    }
    match t.primal(Phase::Objective, cfg)? {
        StepOutcome::Optimal => Ok((t, RawOutcome::Optimal)),
        StepOutcome::IterationLimit => Ok((t, RawOutcome::IterationLimit)),
        StepOutcome::Unbounded => Err(LpError::Unbounded),
    }
}

fn extract_solution(t: &Tableau, view: &ReducedView, status: LpStatus, infeas: f64) -> LpSolution {
    let inst = view.instance;
    let n = inst.n_vars();
    let m_inst = inst.n_rows();
    let phase = Phase::Objective;

    let mut x_hat = vec![0.0; n];
    let mut basis_status = vec![BasisStatus::Lower; n];
    for j in 0..n {
        match view.free_index[j] {
            Some(col) => {
                x_hat[j] = t.x[col];
                basis_status[j] = match t.state[col] {
                    VarState::Basic => BasisStatus::Basic,
                    VarState::AtLower => BasisStatus::Lower,
                    VarState::AtUpper => BasisStatus::Upper,
                    VarState::Free => BasisStatus::Zero,
                };
            }
            None => {
                x_hat[j] = view.lb[j];
                basis_status[j] = BasisStatus::Lower;
            }
        }
    }

    let y_active = t.duals(&phase);
    let mut duals = vec![0.0; m_inst];
    for (pos, &r) in t.sf.row_ids.iter().enumerate() {
        duals[r] = y_active[pos];
    }

    let mut reduced_costs = vec![0.0; n];
    for j in 0..n {
        let mut d = inst.min_obj(j);
        for &(r, a) in &view.cols[j] {
            d -= a * duals[r];
        }
        reduced_costs[j] = d;
    }

    let basis = Basis {
        basic: t.basic.clone(),
        state: t.state[..t.sf.ncols()].to_vec(),
        n_struct: t.sf.n_struct,
        n_rows: t.sf.n_rows,
    };

    let z = match status {
        LpStatus::Infeasible => f64::INFINITY,
        _ => t.objective_value(),
    };

    LpSolution {
        status,
        z,
        x_hat,
        duals,
        reduced_costs,
        basis_status,
        iterations: t.iterations,
        infeasibility: infeas,
        basis: Some(basis),
    }
}

/// Closed-form solution when the view has no active rows: every free
/// variable sits at its objective-favorable bound.
fn solve_unconstrained(view: &ReducedView, _cfg: &SimplexConfig) -> Result<LpSolution, LpError> {
    let inst = view.instance;
    let n = inst.n_vars();
    let mut x_hat = vec![0.0; n];
    let mut basis_status = vec![BasisStatus::Lower; n];
    let mut z = view.fixed_obj_constant();
    for j in 0..n {
        if view.is_fixed(j) {
            x_hat[j] = view.lb[j];
            continue;
        }
        let c = inst.min_obj(j);
        let (lo, hi) = (view.lb[j], view.ub[j]);
        let (v, st) = if c > 0.0 {
            if lo == f64::NEG_INFINITY {
                return Err(LpError::Unbounded);
            }
            (lo, BasisStatus::Lower)
        } else if c < 0.0 {
            if hi == f64::INFINITY {
                return Err(LpError::Unbounded);
            }
            (hi, BasisStatus::Upper)
        } else if lo.is_finite() {
            (lo, BasisStatus::Lower)
        } else if hi.is_finite() {
            (hi, BasisStatus::Upper)
        } else {
            (0.0, BasisStatus::Zero)
        };
        x_hat[j] = v;
        basis_status[j] = st;
        z += c * v;
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        z,
        x_hat,
        duals: vec![0.0; inst.n_rows()],
        reduced_costs: (0..n).map(|j| inst.min_obj(j)).collect(),
        basis_status,
        iterations: 0,
        infeasibility: 0.0,
        basis: None,
    })
}

/// Solve the LP relaxation of a reduced view with a two-phase primal
/// simplex. Fixed variables are reported at their values; a row made
/// infeasible purely by fixings yields `Infeasible` without a solve.
pub fn solve_lp(view: &ReducedView, cfg: &SimplexConfig) -> Result<LpSolution, LpError> {
    if let Some(_r) = view.violated_fixed_row(cfg.tol_feas) {
        let inst = view.instance;
        let n = inst.n_vars();
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            z: f64::INFINITY,
            x_hat: (0..n).map(|j| view.lb[j]).collect(),
            duals: vec![0.0; inst.n_rows()],
            reduced_costs: (0..n).map(|j| inst.min_obj(j)).collect(),
            basis_status: vec![BasisStatus::Lower; n],
            iterations: 0,
            infeasibility: 1.0,
            basis: None,
        });
    }
    if view.active_rows.is_empty() {
        return solve_unconstrained(view, cfg);
    }
    let sf = StandardForm::from_view(view);
    let (t, outcome) = solve_standard(sf, cfg)?;
    Ok(match outcome {
        RawOutcome::Optimal => extract_solution(&t, view, LpStatus::Optimal, 0.0),
        RawOutcome::Infeasible(v) => extract_solution(&t, view, LpStatus::Infeasible, v),
        RawOutcome::IterationLimit => {
            extract_solution(&t, view, LpStatus::IterationLimit, t.primal_infeasibility())
        }
    })
}

/// Child LP re-solver for a fixed view: applies single-variable bound
/// changes against the parent-optimal basis and re-optimizes with the dual
/// simplex, falling back to a scratch solve whenever the warm path is
/// unavailable or numerically suspect.
pub struct ChildLpSolver<'v> {
    view: &'v ReducedView<'v>,
    cfg: SimplexConfig,
    base: Option<Tableau>,
}

impl<'v> ChildLpSolver<'v> {
    /// `parent` must be an optimal solution of `view` (same shape); when its
    /// basis is missing or mismatched every child solves from scratch.
    pub fn new(view: &'v ReducedView<'v>, parent: &LpSolution, cfg: &SimplexConfig) -> Self {
        let base = parent.basis.as_ref().and_then(|basis| {
            if basis.n_struct != view.free_vars.len() || basis.n_rows != view.active_rows.len() {
                return None;
            }
            let sf = StandardForm::from_view(view);
            let m = sf.n_rows;
            let ncols = sf.ncols();
            let mut state = vec![VarState::AtLower; ncols + m];
            state[..ncols].copy_from_slice(&basis.state);
            let mut x = vec![0.0; ncols + m];
            for col in 0..ncols {
                x[col] = match state[col] {
                    VarState::AtLower => sf.lb[col],
                    VarState::AtUpper => sf.ub[col],
                    _ => 0.0,
                };
            }
            let mut t = Tableau {
                sf,
                art_sign: vec![1.0; m],
                art_lb: vec![0.0; m],
                art_ub: vec![0.0; m],
                basic: basis.basic.clone(),
                state,
                x,
                binv: vec![0.0; m * m],
                iterations: 0,
                pivots_since_refresh: 0,
                degenerate_streak: 0,
            };
            if t.basic.iter().any(|&b| b >= ncols) {
                // Parent kept a redundant-row artificial basic; keep it
                // pinned at zero in the warm start.
                for &b in &t.basic {
                    if b >= ncols {
                        t.state[b] = VarState::Basic;
                    }
                }
            }
            if t.refactorize().is_err() {
                return None;
            }
            t.compute_basics();
            Some(t)
        });
        ChildLpSolver {
            view,
            cfg: *cfg,
            base,
        }
    }

    /// Scratch solve of the view with one variable's bounds replaced.
    fn resolve_cold(&self, var: usize, lb: f64, ub: f64) -> Result<LpSolution, LpError> {
        let col = self.view.free_index[var].expect("branching variable must be free");
        let mut sf = StandardForm::from_view(self.view);
        sf.lb[col] = lb;
        sf.ub[col] = ub;
        let (t, outcome) = solve_standard(sf, &self.cfg)?;
        Ok(match outcome {
            RawOutcome::Optimal => extract_solution(&t, self.view, LpStatus::Optimal, 0.0),
            RawOutcome::Infeasible(v) => {
                extract_solution(&t, self.view, LpStatus::Infeasible, v)
            }
            RawOutcome::IterationLimit => extract_solution(
                &t,
                self.view,
                LpStatus::IterationLimit,
                t.primal_infeasibility(),
            ),
        })
    }

    /// Re-solve after tightening `var` to `[lb, ub]`.
    pub fn resolve(&mut self, var: usize, lb: f64, ub: f64) -> Result<LpSolution, LpError> {
        self.resolve_with_limit(var, lb, ub, None)
    }

    /// `resolve` with an optional per-call simplex iteration cap, used by
    /// iteration-limited strong branching probes.
    pub fn resolve_with_limit(
        &mut self,
        var: usize,
        lb: f64,
        ub: f64,
        iteration_limit: Option<u64>,
    ) -> Result<LpSolution, LpError> {
        let saved = self.cfg.iteration_limit;
        if let Some(limit) = iteration_limit {
            self.cfg.iteration_limit = limit;
        }
        let out = self.resolve_inner(var, lb, ub);
        self.cfg.iteration_limit = saved;
        out
    }

    fn resolve_inner(&mut self, var: usize, lb: f64, ub: f64) -> Result<LpSolution, LpError> {
        let Some(base) = &self.base else {
            return self.resolve_cold(var, lb, ub);
        };
        let col = match self.view.free_index[var] {
            Some(c) => c,
            None => return self.resolve_cold(var, lb, ub),
        };
        let mut t = base.clone();
        t.sf.lb[col] = lb;
        t.sf.ub[col] = ub;
        match t.state[col] {
            VarState::AtLower => t.x[col] = lb,
            VarState::AtUpper => t.x[col] = ub,
            _ => {}
        }
        t.compute_basics();
        match t.dual(&self.cfg) {
            Ok(DualOutcome::Optimal) => {
                if t.primal_infeasibility() > 10.0 * self.cfg.tol_feas {
                    return self.resolve_cold(var, lb, ub);
                }
                Ok(extract_solution(&t, self.view, LpStatus::Optimal, 0.0))
            }
            Ok(DualOutcome::Infeasible(v)) => {
                Ok(extract_solution(&t, self.view, LpStatus::Infeasible, v))
            }
            Ok(DualOutcome::IterationLimit) | Err(_) => self.resolve_cold(var, lb, ub),
        }
    }
}

/// Re-solve the parent LP after one bound change, warm-starting from the
/// parent basis. Status and objective agree with a scratch solve of the
/// child within tolerance.
pub fn resolve_child(
    parent: &LpSolution,
    view: &ReducedView,
    changed_var: usize,
    new_bound: (f64, f64),
    cfg: &SimplexConfig,
) -> Result<LpSolution, LpError> {
    let mut solver = ChildLpSolver::new(view, parent, cfg);
    solver.resolve(changed_var, new_bound.0, new_bound.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{parse_instance, reduce, MipInstance, NodeBounds, Row, RowSense, Sense};
    use proptest::prelude::*;

    fn cfg() -> SimplexConfig {
        SimplexConfig::default()
    }

    fn solve_text(text: &str) -> LpSolution {
        let inst = parse_instance(text, "t").unwrap();
        let view = reduce(&inst, &NodeBounds::default());
        solve_lp(&view, &cfg()).unwrap()
    }

    #[test]
    fn single_variable_lp() {
        let sol = solve_text("sense min\nvar x 0 10 cont\nobj x -1\nrow r <= 4 : x*1\n");
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.z - -4.0).abs() < 1e-9);
        assert!((sol.x_hat[0] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let sol = solve_text(
            "sense min\nvar x 0 10 cont\nobj x 1\nrow a >= 5 : x*1\nrow b <= 3 : x*1\n",
        );
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.infeasibility > 1e-6);
    }

    #[test]
    fn equality_row_and_max_sense() {
        // max 3x + y, x + y = 4, 0 <= x <= 3, 0 <= y <= 4 -> x=3, y=1, obj 10.
        let sol = solve_text(
            "sense max\nvar x 0 3 cont\nvar y 0 4 cont\nobj x 3\nobj y 1\nrow r = 4 : x*1 y*1\n",
        );
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.z - -10.0).abs() < 1e-9, "min-form z, got {}", sol.z);
        assert!((sol.x_hat[0] - 3.0).abs() < 1e-9);
        assert!((sol.x_hat[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fixed_variables_reported_at_value() {
        let text = "sense min\nvar x 0 1 int\nvar y 0 5 cont\nobj x -2\nobj y -1\nrow r <= 3 : x*1 y*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let bounds = NodeBounds::default()
            .with_lower(&inst, 0, 1.0)
            .unwrap()
            .with_upper(&inst, 0, 1.0)
            .unwrap();
        let view = reduce(&inst, &bounds);
        let sol = solve_lp(&view, &cfg()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x_hat[0], 1.0);
        assert_eq!(sol.basis_status[0], BasisStatus::Lower);
        // y <= 2 after substitution, so z = -2 - 2 = -4.
        assert!((sol.z - -4.0).abs() < 1e-9);
    }

    #[test]
    fn unconstrained_view_solves_in_closed_form() {
        let sol = solve_text("sense min\nvar x 0 2 cont\nvar y -1 3 cont\nobj x 1\nobj y -1\n");
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.z - -3.0).abs() < 1e-12);
        assert_eq!(sol.x_hat, vec![0.0, 3.0]);
    }

    #[test]
    fn resolve_child_matches_hand_solution() {
        let text = "sense min\nvar x1 0 1 int\nvar x2 0 1 int\nobj x1 -1\nobj x2 -1\nrow r <= 1.5 : x1*1 x2*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let view = reduce(&inst, &NodeBounds::default());
        let parent = solve_lp(&view, &cfg()).unwrap();
        assert!((parent.z - -1.5).abs() < 1e-9);

        let down = resolve_child(&parent, &view, 1, (0.0, 0.0), &cfg()).unwrap();
        assert_eq!(down.status, LpStatus::Optimal);
        assert!((down.z - -1.0).abs() < 1e-9);

        let up = resolve_child(&parent, &view, 1, (1.0, 1.0), &cfg()).unwrap();
        assert_eq!(up.status, LpStatus::Optimal);
        assert!((up.z - -1.5).abs() < 1e-9);
        assert!((up.x_hat[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn noop_bound_change_keeps_solution() {
        let text = "sense min\nvar x 0 10 cont\nvar y 0 10 cont\nobj x -1\nobj y -2\nrow r <= 6 : x*1 y*1\n";
        let inst = parse_instance(text, "t").unwrap();
        let view = reduce(&inst, &NodeBounds::default());
        let parent = solve_lp(&view, &cfg()).unwrap();
        // x sits at 0; raising its upper bound cap to 8 changes nothing.
        let child = resolve_child(&parent, &view, 0, (0.0, 8.0), &cfg()).unwrap();
        assert_eq!(child.status, LpStatus::Optimal);
        assert!((child.z - parent.z).abs() < 1e-9);
        assert_eq!(child.iterations, 0);
    }

    #[test]
    fn determinism_same_input_same_iterations() {
        let text = "sense min\nvar a 0 4 cont\nvar b 0 4 cont\nvar c 0 4 cont\nobj a -2\nobj b -3\nobj c -1\nrow r1 <= 5 : a*1 b*2 c*1\nrow r2 >= 1 : a*1 c*1\nrow r3 <= 6 : b*1 c*2\n";
        let s1 = solve_text(text);
        let s2 = solve_text(text);
        assert_eq!(s1.iterations, s2.iterations);
        assert_eq!(s1.z, s2.z);
        assert_eq!(s1.x_hat, s2.x_hat);
    }

    // ---- brute-force oracle ----------------------------------------------

    /// All constraints as (coeffs over n vars, kind) where kind 0 is `= rhs`
    /// rows and bounds enter as single-variable equalities when chosen.
    fn enumerate_lp(inst: &MipInstance) -> Option<f64> {
        let n = inst.n_vars();
        #[derive(Clone)]
        enum Gen {
            Row(usize),
            AtLower(usize),
            AtUpper(usize),
        }
        let mut gens = Vec::new();
        for r in 0..inst.n_rows() {
            gens.push(Gen::Row(r));
        }
        for j in 0..n {
            gens.push(Gen::AtLower(j));
            gens.push(Gen::AtUpper(j));
        }
        let mut best: Option<f64> = None;
        let mut combo = vec![0usize; n];
        fn rec(
            inst: &MipInstance,
            gens: &[Gen],
            combo: &mut Vec<usize>,
            depth: usize,
            start: usize,
            best: &mut Option<f64>,
        ) {
            let n = inst.n_vars();
            if depth == n {
                // Build and solve the n x n system.
                let mut a = vec![0.0; n * n];
                let mut b = vec![0.0; n];
                for (i, &g) in combo.iter().enumerate() {
                    match gens[g] {
                        Gen::Row(r) => {
                            for &(j, v) in &inst.rows[r].coeffs {
                                a[i * n + j] = v;
                            }
                            b[i] = inst.rows[r].rhs;
                        }
                        Gen::AtLower(j) => {
                            a[i * n + j] = 1.0;
                            b[i] = inst.lower[j];
                        }
                        Gen::AtUpper(j) => {
                            a[i * n + j] = 1.0;
                            b[i] = inst.upper[j];
                        }
                    }
                }
                if let Some(x) = solve_dense(&mut a, &mut b, n) {
                    if feasible(inst, &x) {
                        let z: f64 = (0..n).map(|j| inst.min_obj(j) * x[j]).sum();
                        *best = Some(best.map_or(z, |cur: f64| cur.min(z)));
                    }
                }
                return;
            }
            for g in start..gens.len() {
                combo[depth] = g;
                rec(inst, gens, combo, depth + 1, g + 1, best);
            }
        }
        fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
            for col in 0..n {
                let mut piv = col;
                for r in col + 1..n {
                    if a[r * n + col].abs() > a[piv * n + col].abs() {
                        piv = r;
                    }
                }
                if a[piv * n + col].abs() < 1e-9 {
                    return None;
                }
                if piv != col {
                    for k in 0..n {
                        a.swap(col * n + k, piv * n + k);
                    }
                    b.swap(col, piv);
                }
                let p = a[col * n + col];
                for k in 0..n {
                    a[col * n + k] /= p;
                }
                b[col] /= p;
                for r in 0..n {
                    if r != col {
                        let f = a[r * n + col];
                        if f != 0.0 {
                            for k in 0..n {
                                a[r * n + k] -= f * a[col * n + k];
                            }
                            b[r] -= f * b[col];
                        }
                    }
                }
            }
            Some(b.to_vec())
        }
        fn feasible(inst: &MipInstance, x: &[f64]) -> bool {
            let tol = 1e-7;
            for j in 0..inst.n_vars() {
                if x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol {
                    return false;
                }
            }
            for row in &inst.rows {
                let act: f64 = row.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
                let ok = match row.sense {
                    RowSense::Le => act <= row.rhs + tol,
                    RowSense::Ge => act >= row.rhs - tol,
                    RowSense::Eq => (act - row.rhs).abs() <= tol,
                };
                if !ok {
                    return false;
                }
            }
            true
        }
        rec(inst, &gens, &mut combo, 0, 0, &mut best);
        best
    }

    fn random_lp(seed: u64, n: usize, m: usize) -> MipInstance {
        use rand::prelude::*;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for r in 0..m {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if rng.random::<f64>() < 0.7 {
                    let v = (rng.random_range(-40..=40) as f64) / 8.0;
                    if v != 0.0 {
                        coeffs.push((j, v));
                    }
                }
            }
            if coeffs.is_empty() {
                coeffs.push((rng.random_range(0..n), 1.0));
            }
            let sense = match rng.random_range(0..4) {
                0 => RowSense::Ge,
                1 => RowSense::Eq,
                _ => RowSense::Le,
            };
            rows.push(Row {
                name: format!("r{r}"),
                coeffs,
                sense,
                rhs: (rng.random_range(-30..=30) as f64) / 4.0,
            });
        }
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for _ in 0..n {
            let lo = (rng.random_range(-8..=2) as f64) / 2.0;
            let hi = lo + (rng.random_range(1..=10) as f64) / 2.0;
            lower.push(lo);
            upper.push(hi);
        }
        MipInstance {
            name: format!("lp{seed}"),
            objective_sense: Sense::Min,
            c: (0..n)
                .map(|_| (rng.random_range(-20..=20) as f64) / 4.0)
                .collect(),
            rows,
            lower,
            upper,
            integrality: vec![false; n],
            var_names: (0..n).map(|j| format!("x{j}")).collect(),
        }
    }

    #[test]
    fn matches_vertex_enumeration_on_random_lps() {
        let mut checked = 0;
        for seed in 0..120u64 {
            let n = 2 + (seed % 3) as usize;
            let m = 1 + (seed % 4) as usize;
            let inst = random_lp(seed, n, m);
            let view = reduce(&inst, &NodeBounds::default());
            let sol = solve_lp(&view, &cfg()).unwrap();
            let oracle = enumerate_lp(&inst);
            match (sol.status, oracle) {
                (LpStatus::Optimal, Some(z)) => {
                    assert!(
                        (sol.z - z).abs() < 1e-6,
                        "seed {seed}: simplex {} vs oracle {z}",
                        sol.z
                    );
                    checked += 1;
                }
                (LpStatus::Infeasible, None) => checked += 1,
                (s, o) => panic!("seed {seed}: status {s:?} vs oracle {o:?}"),
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn strong_duality_and_complementary_slackness() {
        for seed in 0..60u64 {
            let inst = random_lp(seed + 500, 3, 3);
            let view = reduce(&inst, &NodeBounds::default());
            let sol = solve_lp(&view, &cfg()).unwrap();
            if sol.status != LpStatus::Optimal {
                continue;
            }
            // Dual objective: y.rhs + sum over nonbasic-at-bound of d_j * bound.
            let mut dual_obj: f64 = (0..inst.n_rows())
                .map(|r| sol.duals[r] * inst.rows[r].rhs)
                .sum();
            for j in 0..inst.n_vars() {
                match sol.basis_status[j] {
                    BasisStatus::Lower => dual_obj += sol.reduced_costs[j] * inst.lower[j],
                    BasisStatus::Upper => dual_obj += sol.reduced_costs[j] * inst.upper[j],
                    _ => {}
                }
            }
            assert!(
                (sol.z - dual_obj).abs() < 1e-6,
                "seed {seed}: z {} vs dual {dual_obj}",
                sol.z
            );
            // Nonbasic-at-lower variables price out nonnegative; slack rows
            // carry zero duals.
            for j in 0..inst.n_vars() {
                if sol.basis_status[j] == BasisStatus::Lower {
                    assert!(sol.reduced_costs[j] >= -1e-6, "seed {seed} var {j}");
                }
                if sol.basis_status[j] == BasisStatus::Basic {
                    assert!(sol.reduced_costs[j].abs() <= 1e-6, "seed {seed} var {j}");
                }
            }
            for (r, row) in inst.rows.iter().enumerate() {
                if row.sense == RowSense::Le {
                    let act: f64 = row.coeffs.iter().map(|&(j, v)| v * sol.x_hat[j]).sum();
                    if act < row.rhs - 1e-6 {
                        assert!(sol.duals[r].abs() <= 1e-6, "seed {seed} row {r}");
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn warm_child_matches_cold_child(seed in 0u64..3000) {
            let inst = random_lp(seed, 3, 3);
            let view = reduce(&inst, &NodeBounds::default());
            let parent = solve_lp(&view, &cfg()).unwrap();
            prop_assume!(parent.status == LpStatus::Optimal);
            // Tighten the first free variable toward its floor.
            let j = view.free_vars[0];
            let mid = (view.lb[j] + view.ub[j]) / 2.0;
            let warm = resolve_child(&parent, &view, j, (view.lb[j], mid.floor().max(view.lb[j])), &cfg()).unwrap();
            let mut solver = ChildLpSolver::new(&view, &LpSolution { basis: None, ..parent.clone() }, &cfg());
            let cold = solver.resolve(j, view.lb[j], mid.floor().max(view.lb[j])).unwrap();
            prop_assert_eq!(warm.status, cold.status);
            if warm.status == LpStatus::Optimal {
                prop_assert!((warm.z - cold.z).abs() < 1e-6);
            }
        }
    }
}
