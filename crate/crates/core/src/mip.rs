//! In-memory MIP representation, the textual instance format, and the
//! reduced (fixed-variables-removed) per-node view used by the LP solver
//! and the featurizer.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Objective direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

/// Row comparison sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

impl RowSense {
    fn token(self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        }
    }
}

/// One linear constraint with sparse coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    /// Sparse (variable index, coefficient) pairs, sorted by index,
    /// no duplicates, no explicit zeros.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// A full mixed-integer program: minimize or maximize `c.x` subject to
/// linear rows, variable bounds, and integrality marks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MipInstance {
    pub name: String,
    pub objective_sense: Sense,
    pub c: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integrality: Vec<bool>,
    pub var_names: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("bound inversion on variable {name}: lower {lower} > upper {upper}")]
    BoundInversion {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl MipInstance {
    pub fn n_vars(&self) -> usize {
        self.c.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Objective coefficient in minimization form (`max` flips the sign),
    /// so all internal bounding logic works on a single direction.
    pub fn min_obj(&self, j: usize) -> f64 {
        match self.objective_sense {
            Sense::Min => self.c[j],
            Sense::Max => -self.c[j],
        }
    }

    /// Convert an internal (minimization-form) objective value back to the
    /// instance's declared sense.
    pub fn to_original_objective(&self, z_min: f64) -> f64 {
        match self.objective_sense {
            Sense::Min => z_min,
            Sense::Max => -z_min,
        }
    }

    /// True for integer variables declared with bounds [0, 1].
    pub fn is_binary(&self, j: usize) -> bool {
        self.integrality[j] && self.lower[j] == 0.0 && self.upper[j] == 1.0
    }

    /// Check all structural invariants, reporting the first violation.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.n_vars();
        if self.lower.len() != n
            || self.upper.len() != n
            || self.integrality.len() != n
            || self.var_names.len() != n
        {
            return Err(ModelError::Invalid(
                "objective, bounds, integrality, and names must have equal length".into(),
            ));
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(ModelError::BoundInversion {
                    name: self.var_names[j].clone(),
                    lower: self.lower[j],
                    upper: self.upper[j],
                });
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.c[j].is_nan() {
                return Err(ModelError::Invalid(format!(
                    "NaN in data for variable {}",
                    self.var_names[j]
                )));
            }
        }
        for row in &self.rows {
            let mut last: Option<usize> = None;
            for &(j, v) in &row.coeffs {
                if j >= n {
                    return Err(ModelError::Invalid(format!(
                        "row {} references variable index {} out of range",
                        row.name, j
                    )));
                }
                if v == 0.0 {
                    return Err(ModelError::Invalid(format!(
                        "row {} has an explicit zero coefficient",
                        row.name
                    )));
                }
                if let Some(prev) = last {
                    if j <= prev {
                        return Err(ModelError::Invalid(format!(
                            "row {} has unsorted or duplicate variable indices",
                            row.name
                        )));
                    }
                }
                last = Some(j);
            }
            if row.rhs.is_nan() {
                return Err(ModelError::Invalid(format!("row {} has NaN rhs", row.name)));
            }
        }
        Ok(())
    }
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{}", v)
    }
}

fn parse_number(tok: &str, line: usize, what: &str) -> Result<f64, ModelError> {
    match tok {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().map_err(|_| ModelError::Parse {
            line,
            message: format!("cannot parse {what} `{tok}` as a number"),
        }),
    }
}

/// Render an instance in the canonical textual format: sense line, variables
/// by index, nonzero objective entries by index, rows by index with sorted
/// coefficients. Loading the output reproduces the instance exactly.
pub fn write_instance(inst: &MipInstance) -> String {
    let mut out = String::new();
    let sense = match inst.objective_sense {
        Sense::Min => "min",
        Sense::Max => "max",
    };
    let _ = writeln!(out, "sense {sense}");
    for j in 0..inst.n_vars() {
        let kind = if inst.integrality[j] { "int" } else { "cont" };
        let _ = writeln!(
            out,
            "var {} {} {} {}",
            inst.var_names[j],
            fmt_bound(inst.lower[j]),
            fmt_bound(inst.upper[j]),
            kind
        );
    }
    for j in 0..inst.n_vars() {
        if inst.c[j] != 0.0 {
            let _ = writeln!(out, "obj {} {}", inst.var_names[j], inst.c[j]);
        }
    }
    for row in &inst.rows {
        let terms: Vec<String> = row
            .coeffs
            .iter()
            .map(|&(j, v)| format!("{}*{}", inst.var_names[j], v))
            .collect();
        let _ = writeln!(
            out,
            "row {} {} {} : {}",
            row.name,
            row.sense.token(),
            row.rhs,
            terms.join(" ")
        );
    }
    out
}

/// Write an instance file in canonical form.
pub fn save_instance(inst: &MipInstance, path: &Path) -> Result<(), ModelError> {
    std::fs::write(path, write_instance(inst))?;
    Ok(())
}

/// Parse the textual instance format. `name` becomes the instance id.
pub fn parse_instance(text: &str, name: &str) -> Result<MipInstance, ModelError> {
    let mut sense: Option<Sense> = None;
    let mut var_names: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut integrality = Vec::new();
    let mut c: Vec<f64> = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut row_names: BTreeMap<String, ()> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = stripped.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "sense" => {
                if tokens.len() != 2 {
                    return Err(ModelError::Parse {
                        line,
                        message: "expected `sense min|max`".into(),
                    });
                }
                sense = Some(match tokens[1] {
                    "min" => Sense::Min,
                    "max" => Sense::Max,
                    other => {
                        return Err(ModelError::Parse {
                            line,
                            message: format!("unknown sense `{other}`"),
                        })
                    }
                });
            }
            "var" => {
                if tokens.len() != 5 {
                    return Err(ModelError::Parse {
                        line,
                        message: "expected `var <name> <lb> <ub> <int|cont>`".into(),
                    });
                }
                let vname = tokens[1].to_string();
                if index.contains_key(&vname) {
                    return Err(ModelError::Parse {
                        line,
                        message: format!("duplicate variable `{vname}`"),
                    });
                }
                let lb = parse_number(tokens[2], line, "lower bound")?;
                let ub = parse_number(tokens[3], line, "upper bound")?;
                if lb > ub {
                    return Err(ModelError::BoundInversion {
                        name: vname,
                        lower: lb,
                        upper: ub,
                    });
                }
                let is_int = match tokens[4] {
                    "int" => true,
                    "cont" => false,
                    other => {
                        return Err(ModelError::Parse {
                            line,
                            message: format!("unknown variable kind `{other}`"),
                        })
                    }
                };
                index.insert(vname.clone(), var_names.len());
                var_names.push(vname);
                lower.push(lb);
                upper.push(ub);
                integrality.push(is_int);
                c.push(0.0);
            }
            "obj" => {
                if tokens.len() != 3 {
                    return Err(ModelError::Parse {
                        line,
                        message: "expected `obj <name> <coef>`".into(),
                    });
                }
                let j = *index.get(tokens[1]).ok_or_else(|| ModelError::Parse {
                    line,
                    message: format!("objective references unknown variable `{}`", tokens[1]),
                })?;
                let v = parse_number(tokens[2], line, "objective coefficient")?;
                if v == 0.0 {
                    return Err(ModelError::Parse {
                        line,
                        message: "explicit zero objective coefficient".into(),
                    });
                }
                if c[j] != 0.0 {
                    return Err(ModelError::Parse {
                        line,
                        message: format!("duplicate objective entry for `{}`", tokens[1]),
                    });
                }
                c[j] = v;
            }
            "row" => {
                let colon = tokens.iter().position(|t| *t == ":");
                let (head, terms) = match colon {
                    Some(pos) if pos == 4 => (&tokens[1..4], &tokens[5..]),
                    _ => {
                        return Err(ModelError::Parse {
                            line,
                            message: "expected `row <name> <sense> <rhs> : <name>*<coef> ...`"
                                .into(),
                        })
                    }
                };
                let rname = head[0].to_string();
                if row_names.contains_key(&rname) {
                    return Err(ModelError::Parse {
                        line,
                        message: format!("duplicate row `{rname}`"),
                    });
                }
                let rsense = match head[1] {
                    "<=" => RowSense::Le,
                    ">=" => RowSense::Ge,
                    "=" => RowSense::Eq,
                    other => {
                        return Err(ModelError::Parse {
                            line,
                            message: format!("unknown row sense `{other}`"),
                        })
                    }
                };
                let rhs = parse_number(head[2], line, "rhs")?;
                let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
                for term in terms {
                    let (vname, coef) = term.split_once('*').ok_or_else(|| ModelError::Parse {
                        line,
                        message: format!("malformed term `{term}` (expected name*coef)"),
                    })?;
                    let j = *index.get(vname).ok_or_else(|| ModelError::Parse {
                        line,
                        message: format!("row references unknown variable `{vname}`"),
                    })?;
                    let v = parse_number(coef, line, "coefficient")?;
                    if v == 0.0 {
                        return Err(ModelError::Parse {
                            line,
                            message: format!("explicit zero coefficient for `{vname}`"),
                        });
                    }
                    if coeffs.iter().any(|&(k, _)| k == j) {
                        return Err(ModelError::Parse {
                            line,
                            message: format!("duplicate variable `{vname}` in row"),
                        });
                    }
                    coeffs.push((j, v));
                }
                coeffs.sort_by_key(|&(j, _)| j);
                row_names.insert(rname.clone(), ());
                rows.push(Row {
                    name: rname,
                    coeffs,
                    sense: rsense,
                    rhs,
                });
            }
            other => {
                return Err(ModelError::Parse {
                    line,
                    message: format!("unknown statement `{other}`"),
                });
            }
        }
    }

    let sense = sense.ok_or_else(|| ModelError::Parse {
        line: 0,
        message: "missing `sense` line".into(),
    })?;
    let inst = MipInstance {
        name: name.to_string(),
        objective_sense: sense,
        c,
        rows,
        lower,
        upper,
        integrality,
        var_names,
    };
    inst.validate()?;
    Ok(inst)
}

/// Load and validate an instance file; the file stem becomes the id.
pub fn load_instance(path: &Path) -> Result<MipInstance, ModelError> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_string());
    parse_instance(&text, &name)
}

/// Sparse per-node bound overrides. Overrides only ever tighten the
/// instance bounds; an inverted pair means the node is infeasible and is
/// rejected at construction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeBounds {
    overrides: BTreeMap<usize, (f64, f64)>,
}

impl NodeBounds {
    pub fn is_empty(&self) -> bool {
        self.overrides.is_empty()
    }

    pub fn overrides(&self) -> impl Iterator<Item = (usize, (f64, f64))> + '_ {
        self.overrides.iter().map(|(&j, &b)| (j, b))
    }

    /// Effective bounds of variable `j` under these overrides.
    pub fn effective(&self, inst: &MipInstance, j: usize) -> (f64, f64) {
        match self.overrides.get(&j) {
            Some(&(lb, ub)) => (lb, ub),
            None => (inst.lower[j], inst.upper[j]),
        }
    }

    /// Tighten the upper bound of `j` to `min(current, ub)`.
    /// Returns `None` when the result would invert the bounds.
    pub fn with_upper(&self, inst: &MipInstance, j: usize, ub: f64) -> Option<NodeBounds> {
        let (lo, hi) = self.effective(inst, j);
        let new_hi = hi.min(ub);
        if lo > new_hi {
            return None;
        }
        let mut next = self.clone();
        next.overrides.insert(j, (lo, new_hi));
        Some(next)
    }

    /// Tighten the lower bound of `j` to `max(current, lb)`.
    pub fn with_lower(&self, inst: &MipInstance, j: usize, lb: f64) -> Option<NodeBounds> {
        let (lo, hi) = self.effective(inst, j);
        let new_lo = lo.max(lb);
        if new_lo > hi {
            return None;
        }
        let mut next = self.clone();
        next.overrides.insert(j, (new_lo, hi));
        Some(next)
    }
}

/// The node-local problem with fixed variables removed: effective bounds,
/// the free variable set, rows that still touch a free variable, and each
/// row's residual rhs after substituting fixed variables.
#[derive(Clone, Debug)]
pub struct ReducedView<'a> {
    pub instance: &'a MipInstance,
    /// Effective per-variable bounds under the node overrides.
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    /// Variables with lb < ub, ascending.
    pub free_vars: Vec<usize>,
    /// Variable index -> position in `free_vars`, if free.
    pub free_index: Vec<Option<usize>>,
    /// Rows with at least one free variable, ascending.
    pub active_rows: Vec<usize>,
    /// Residual rhs for every row: rhs - sum over fixed vars of a*value.
    pub residual_rhs: Vec<f64>,
    /// Per-variable sparse column restricted to active rows:
    /// (row index, coefficient) pairs, ascending by row.
    pub cols: Vec<Vec<(usize, f64)>>,
}

impl<'a> ReducedView<'a> {
    pub fn is_fixed(&self, j: usize) -> bool {
        self.lb[j] == self.ub[j]
    }

    pub fn fixed_value(&self, j: usize) -> Option<f64> {
        if self.is_fixed(j) {
            Some(self.lb[j])
        } else {
            None
        }
    }

    /// Minimization-form objective contribution of the fixed variables.
    pub fn fixed_obj_constant(&self) -> f64 {
        (0..self.instance.n_vars())
            .filter(|&j| self.is_fixed(j))
            .map(|j| self.instance.min_obj(j) * self.lb[j])
            .sum()
    }

    /// First inactive row whose residual rhs is violated by the fixings,
    /// which makes the node infeasible before any LP is solved.
    pub fn violated_fixed_row(&self, tol: f64) -> Option<usize> {
        let mut active = vec![false; self.instance.n_rows()];
        for &r in &self.active_rows {
            active[r] = true;
        }
        for (r, row) in self.instance.rows.iter().enumerate() {
            if active[r] {
                continue;
            }
            let resid = self.residual_rhs[r];
            let violated = match row.sense {
                RowSense::Le => resid < -tol,
                RowSense::Ge => resid > tol,
                RowSense::Eq => resid.abs() > tol,
            };
            if violated {
                return Some(r);
            }
        }
        None
    }

    /// Row activity over free variables for a full-length solution vector.
    pub fn row_activity(&self, r: usize, x: &[f64]) -> f64 {
        self.instance.rows[r]
            .coeffs
            .iter()
            .filter(|&&(j, _)| !self.is_fixed(j))
            .map(|&(j, a)| a * x[j])
            .sum()
    }
}

/// Build the reduced formulation for `bounds` over `instance`. Fixed
/// variables (lb = ub) are substituted into row right-hand sides; rows whose
/// variables are all fixed become inactive.
pub fn reduce<'a>(instance: &'a MipInstance, bounds: &NodeBounds) -> ReducedView<'a> {
    let n = instance.n_vars();
    let m = instance.n_rows();
    let mut lb = instance.lower.clone();
    let mut ub = instance.upper.clone();
    for (j, (lo, hi)) in bounds.overrides() {
        debug_assert!(lo >= instance.lower[j] && hi <= instance.upper[j] && lo <= hi);
        lb[j] = lo;
        ub[j] = hi;
    }

    let mut free_vars = Vec::new();
    let mut free_index = vec![None; n];
    for j in 0..n {
        if lb[j] < ub[j] {
            free_index[j] = Some(free_vars.len());
            free_vars.push(j);
        }
    }

    let mut active_rows = Vec::new();
    let mut residual_rhs = vec![0.0; m];
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (r, row) in instance.rows.iter().enumerate() {
        let mut resid = row.rhs;
        let mut has_free = false;
        for &(j, a) in &row.coeffs {
            if lb[j] == ub[j] {
                resid -= a * lb[j];
            } else {
                has_free = true;
            }
        }
        residual_rhs[r] = resid;
        if has_free {
            active_rows.push(r);
            for &(j, a) in &row.coeffs {
                if lb[j] < ub[j] {
                    cols[j].push((r, a));
                }
            }
        }
    }

    ReducedView {
        instance,
        lb,
        ub,
        free_vars,
        free_index,
        active_rows,
        residual_rhs,
        cols,
    }
}
