//! Seeded instance generators for the four benchmark domains: set covering,
//! combinatorial auctions, capacitated facility location, and maximum
//! independent set. All draws come from one ChaCha8 stream per instance, so
//! a (spec, seed) pair is reproducible across platforms.

use std::path::Path;

use rand::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mip::{MipInstance, ModelError, Row, RowSense, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Sc,
    Ca,
    Fl,
    Is,
}

impl Domain {
    pub fn code(self) -> &'static str {
        match self {
            Domain::Sc => "sc",
            Domain::Ca => "ca",
            Domain::Fl => "fl",
            Domain::Is => "is",
        }
    }

    pub fn parse(text: &str) -> Result<Domain, GenError> {
        match text {
            "sc" => Ok(Domain::Sc),
            "ca" => Ok(Domain::Ca),
            "fl" => Ok(Domain::Fl),
            "is" => Ok(Domain::Is),
            other => Err(GenError::BadParam(format!(
                "unknown domain `{other}` (expected sc|ca|fl|is)"
            ))),
        }
    }

    pub fn all() -> [Domain; 4] {
        [Domain::Sc, Domain::Ca, Domain::Fl, Domain::Is]
    }
}

/// Desk-scale size tiers. `Tiny` stays within exhaustive-enumeration reach;
/// the paper-scale sizes are approached by raising these parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizePreset {
    Tiny,
    Test,
    Small,
    Medium,
    Large,
}

impl SizePreset {
    pub fn code(self) -> &'static str {
        match self {
            SizePreset::Tiny => "tiny",
            SizePreset::Test => "test",
            SizePreset::Small => "small",
            SizePreset::Medium => "medium",
            SizePreset::Large => "large",
        }
    }

    pub fn parse(text: &str) -> Result<SizePreset, GenError> {
        match text {
            "tiny" => Ok(SizePreset::Tiny),
            "test" => Ok(SizePreset::Test),
            "small" => Ok(SizePreset::Small),
            "medium" => Ok(SizePreset::Medium),
            "large" => Ok(SizePreset::Large),
            other => Err(GenError::BadParam(format!(
                "unknown size `{other}` (expected tiny|test|small|medium|large)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScParams {
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    /// Inclusive column-cost range; narrow ranges make desk-scale
    /// instances decidedly non-trivial for branching.
    pub cost_lo: u64,
    pub cost_hi: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CaParams {
    pub items: usize,
    pub bids: usize,
    /// Probability of adding one more item to a growing bundle.
    pub add_prob: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FlParams {
    pub customers: usize,
    pub facilities: usize,
    /// Total capacity over total demand.
    pub capacity_ratio: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IsParams {
    pub nodes: usize,
    /// Edges attached per arriving node (preferential attachment).
    pub affinity: usize,
    /// Emit greedy clique rows instead of single-edge rows.
    pub clique_cover: bool,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainParams {
    Sc(ScParams),
    Ca(CaParams),
    Fl(FlParams),
    Is(IsParams),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub domain: Domain,
    pub params: DomainParams,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("bad generator parameter: {0}")]
    BadParam(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("manifest error: {0}")]
    Manifest(#[from] serde_json::Error),
}

impl GeneratorSpec {
    /// Desk-scale parameterization for a (domain, size) pair.
    pub fn preset(domain: Domain, size: SizePreset, seed: u64) -> GeneratorSpec {
        use SizePreset::*;
        let params = match domain {
            Domain::Sc => {
                let (rows, cols, density, cost_lo, cost_hi) = match size {
                    Tiny => (6, 12, 0.3, 1, 100),
                    Test => (40, 60, 0.10, 10, 12),
                    Small => (100, 200, 0.05, 10, 12),
                    Medium => (150, 300, 0.05, 10, 12),
                    Large => (200, 400, 0.05, 10, 12),
                };
                DomainParams::Sc(ScParams {
                    rows,
                    cols,
                    density,
                    cost_lo,
                    cost_hi,
                })
            }
            Domain::Ca => {
                let (items, bids) = match size {
                    Tiny => (4, 10),
                    Test => (20, 100),
                    Small => (30, 150),
                    Medium => (50, 250),
                    Large => (70, 350),
                };
                DomainParams::Ca(CaParams {
                    items,
                    bids,
                    add_prob: 0.65,
                })
            }
            Domain::Fl => {
                let (customers, facilities, ratio) = match size {
                    Tiny => (3, 2, 2.0),
                    Test => (12, 6, 1.5),
                    Small => (15, 8, 1.5),
                    Medium => (25, 12, 1.5),
                    Large => (35, 16, 1.5),
                };
                DomainParams::Fl(FlParams {
                    customers,
                    facilities,
                    capacity_ratio: ratio,
                })
            }
            Domain::Is => {
                let (nodes, affinity) = match size {
                    Tiny => (10, 2),
                    Test => (50, 4),
                    Small => (80, 4),
                    Medium => (120, 4),
                    Large => (160, 4),
                };
                DomainParams::Is(IsParams {
                    nodes,
                    affinity,
                    clique_cover: false,
                })
            }
        };
        GeneratorSpec {
            domain,
            params,
            seed,
        }
    }

    pub fn generate(&self) -> Result<MipInstance, GenError> {
        let inst = match &self.params {
            DomainParams::Sc(p) => gen_setcover(p, self.seed),
            DomainParams::Ca(p) => gen_cauction(p, self.seed),
            DomainParams::Fl(p) => gen_facility(p, self.seed),
            DomainParams::Is(p) => gen_indset(p, self.seed),
        }?;
        inst.validate()?;
        Ok(inst)
    }
}

/// Minimum-cost set covering: binary columns, one `>= 1` cover row per
/// element, every row with at least two entries, every column used.
pub fn gen_setcover(p: &ScParams, seed: u64) -> Result<MipInstance, GenError> {
    if p.rows == 0 || p.cols < 2 {
        return Err(GenError::BadParam("need rows >= 1 and cols >= 2".into()));
    }
    if !(0.0..=1.0).contains(&p.density) || p.density * (p.cols as f64) < 2.0 {
        return Err(GenError::BadParam(format!(
            "density {} with {} columns leaves rows under 2 entries",
            p.density, p.cols
        )));
    }
    if p.cost_lo == 0 || p.cost_hi < p.cost_lo {
        return Err(GenError::BadParam("need 1 <= cost_lo <= cost_hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let costs: Vec<f64> = (0..p.cols)
        .map(|_| rng.random_range(p.cost_lo..=p.cost_hi) as f64)
        .collect();

    let nnz = ((p.density * p.cols as f64).round() as usize).clamp(2, p.cols);
    let mut row_sets: Vec<Vec<usize>> = Vec::with_capacity(p.rows);
    let mut covered = vec![false; p.cols];
    for _ in 0..p.rows {
        // Partial Fisher-Yates draw of `nnz` distinct columns.
        let mut pool: Vec<usize> = (0..p.cols).collect();
        for i in 0..nnz {
            let k = rng.random_range(i..pool.len());
            pool.swap(i, k);
        }
        let mut set: Vec<usize> = pool[..nnz].to_vec();
        set.sort_unstable();
        for &j in &set {
            covered[j] = true;
        }
        row_sets.push(set);
    }
    for j in 0..p.cols {
        if !covered[j] {
            let r = rng.random_range(0..p.rows);
            row_sets[r].push(j);
            row_sets[r].sort_unstable();
        }
    }

    let rows = row_sets
        .into_iter()
        .enumerate()
        .map(|(r, set)| Row {
            name: format!("cover{r}"),
            coeffs: set.into_iter().map(|j| (j, 1.0)).collect(),
            sense: RowSense::Ge,
            rhs: 1.0,
        })
        .collect();

    Ok(MipInstance {
        name: format!("sc_s{seed}"),
        objective_sense: Sense::Min,
        c: costs,
        rows,
        lower: vec![0.0; p.cols],
        upper: vec![1.0; p.cols],
        integrality: vec![true; p.cols],
        var_names: (0..p.cols).map(|j| format!("x{j}")).collect(),
    })
}

/// Winner determination for a combinatorial auction: binary bid variables,
/// one packing row per item, bundles grown through a seeded item
/// compatibility matrix with value-correlated prices.
pub fn gen_cauction(p: &CaParams, seed: u64) -> Result<MipInstance, GenError> {
    if p.items == 0 || p.bids < p.items {
        return Err(GenError::BadParam(
            "need items >= 1 and bids >= items".into(),
        ));
    }
    if !(0.0..1.0).contains(&p.add_prob) {
        return Err(GenError::BadParam("add_prob must be in [0, 1)".into()));
    }
    let m = p.items;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..m).map(|_| 1.0 + 99.0 * rng.random::<f64>()).collect();
    let mut compat = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let w = rng.random::<f64>();
            compat[i][j] = w;
            compat[j][i] = w;
        }
    }

    let mut bundles: Vec<Vec<usize>> = Vec::with_capacity(p.bids);
    let mut prices: Vec<f64> = Vec::with_capacity(p.bids);
    for _ in 0..p.bids {
        let mut bundle = vec![rng.random_range(0..m)];
        while bundle.len() < m && rng.random::<f64>() < p.add_prob {
            // Weight candidate items by compatibility with the bundle.
            let mut weights = Vec::new();
            let mut total = 0.0;
            for i in 0..m {
                if bundle.contains(&i) {
                    continue;
                }
                let w: f64 = bundle.iter().map(|&b| compat[i][b]).sum::<f64>() + 1e-6;
                total += w;
                weights.push((i, w));
            }
            let mut pick = rng.random::<f64>() * total;
            let mut chosen = weights[weights.len() - 1].0;
            for (i, w) in weights {
                if pick < w {
                    chosen = i;
                    break;
                }
                pick -= w;
            }
            bundle.push(chosen);
        }
        bundle.sort_unstable();
        let base: f64 = bundle.iter().map(|&i| values[i]).sum();
        let synergy = 1.0 + 0.5 * (bundle.len() as f64 - 1.0) / m as f64;
        let jitter = 1.0 + 0.1 * (rng.random::<f64>() - 0.5);
        prices.push((base * synergy * jitter).max(1.0));
        bundles.push(bundle);
    }

    // Every item must appear in at least one bundle so each packing row
    // exists.
    for item in 0..m {
        if !bundles.iter().any(|b| b.contains(&item)) {
            let b = rng.random_range(0..p.bids);
            bundles[b].push(item);
            bundles[b].sort_unstable();
            prices[b] += values[item];
        }
    }

    let rows = (0..m)
        .map(|item| Row {
            name: format!("item{item}"),
            coeffs: bundles
                .iter()
                .enumerate()
                .filter(|(_, b)| b.contains(&item))
                .map(|(idx, _)| (idx, 1.0))
                .collect(),
            sense: RowSense::Le,
            rhs: 1.0,
        })
        .collect();

    Ok(MipInstance {
        name: format!("ca_s{seed}"),
        objective_sense: Sense::Max,
        c: prices,
        rows,
        lower: vec![0.0; p.bids],
        upper: vec![1.0; p.bids],
        integrality: vec![true; p.bids],
        var_names: (0..p.bids).map(|b| format!("bid{b}")).collect(),
    })
}

/// Capacitated facility location with fractional assignment variables:
/// demand rows `sum_f x_cf = 1`, capacity rows linking assignments to the
/// binary open flags, minimize opening plus transport cost.
pub fn gen_facility(p: &FlParams, seed: u64) -> Result<MipInstance, GenError> {
    if p.customers == 0 || p.facilities == 0 {
        return Err(GenError::BadParam("need customers and facilities".into()));
    }
    if p.capacity_ratio < 1.0 {
        return Err(GenError::BadParam(
            "capacity_ratio must be >= 1 so total capacity covers demand".into(),
        ));
    }
    let nc = p.customers;
    let nf = p.facilities;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let demand: Vec<f64> = (0..nc).map(|_| rng.random_range(5..=35) as f64).collect();
    let raw_cap: Vec<f64> = (0..nf).map(|_| rng.random_range(10..=160) as f64).collect();
    let open_a: Vec<f64> = (0..nf).map(|_| rng.random_range(0..=90) as f64).collect();
    let open_b: Vec<f64> = (0..nf).map(|_| rng.random_range(100..=110) as f64).collect();
    let cust_pos: Vec<(f64, f64)> = (0..nc)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let fac_pos: Vec<(f64, f64)> = (0..nf)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    let total_demand: f64 = demand.iter().sum();
    let total_raw: f64 = raw_cap.iter().sum();
    let scale = p.capacity_ratio * total_demand / total_raw;
    let capacity: Vec<f64> = raw_cap
        .iter()
        .map(|r| (r * scale).round().max(1.0))
        .collect();
    let open_cost: Vec<f64> = (0..nf)
        .map(|f| (open_a[f] + open_b[f] * capacity[f].sqrt()).round())
        .collect();

    let n_vars = nf + nc * nf;
    let assign = |c: usize, f: usize| nf + c * nf + f;
    let mut c_vec = vec![0.0; n_vars];
    let mut lower = vec![0.0; n_vars];
    let mut upper = vec![1.0; n_vars];
    let mut integrality = vec![false; n_vars];
    let mut names = Vec::with_capacity(n_vars);
    for f in 0..nf {
        c_vec[f] = open_cost[f];
        integrality[f] = true;
        names.push(format!("open{f}"));
    }
    for c in 0..nc {
        for f in 0..nf {
            let dx = cust_pos[c].0 - fac_pos[f].0;
            let dy = cust_pos[c].1 - fac_pos[f].1;
            let dist = (dx * dx + dy * dy).sqrt();
            c_vec[assign(c, f)] = (10.0 * demand[c] * dist).round();
            names.push(format!("x{c}_{f}"));
        }
    }
    let _ = (&mut lower, &mut upper);

    let mut rows = Vec::with_capacity(nc + nf);
    for c in 0..nc {
        rows.push(Row {
            name: format!("demand{c}"),
            coeffs: (0..nf).map(|f| (assign(c, f), 1.0)).collect(),
            sense: RowSense::Eq,
            rhs: 1.0,
        });
    }
    for f in 0..nf {
        let mut coeffs: Vec<(usize, f64)> = vec![(f, -capacity[f])];
        coeffs.extend((0..nc).map(|c| (assign(c, f), demand[c])));
        coeffs.sort_by_key(|&(j, _)| j);
        rows.push(Row {
            name: format!("cap{f}"),
            coeffs,
            sense: RowSense::Le,
            rhs: 0.0,
        });
    }

    Ok(MipInstance {
        name: format!("fl_s{seed}"),
        objective_sense: Sense::Min,
        c: c_vec,
        rows,
        lower,
        upper,
        integrality,
        var_names: names,
    })
}

/// Maximum independent set on a preferential-attachment random graph:
/// binary node variables, one conflict row per edge (or per greedy clique).
pub fn gen_indset(p: &IsParams, seed: u64) -> Result<MipInstance, GenError> {
    if p.nodes == 0 || (p.affinity > 0 && p.nodes <= p.affinity) {
        return Err(GenError::BadParam("need nodes > affinity".into()));
    }
    let n = p.nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![std::collections::BTreeSet::<usize>::new(); n];
    let mut degree = vec![0usize; n];
    if p.affinity > 0 {
        for v in p.affinity..n {
            let mut targets = std::collections::BTreeSet::new();
            while targets.len() < p.affinity {
                // Degree-weighted draw over existing nodes.
                let total: f64 = (0..v).map(|u| (degree[u] + 1) as f64).sum();
                let mut pick = rng.random::<f64>() * total;
                let mut chosen = v - 1;
                for u in 0..v {
                    let w = (degree[u] + 1) as f64;
                    if pick < w {
                        chosen = u;
                        break;
                    }
                    pick -= w;
                }
                targets.insert(chosen);
            }
            for u in targets {
                adj[v].insert(u);
                adj[u].insert(v);
                degree[u] += 1;
                degree[v] += 1;
            }
        }
    }

    let mut rows = Vec::new();
    if p.clique_cover {
        let mut covered = std::collections::BTreeSet::<(usize, usize)>::new();
        for u in 0..n {
            for &v in adj[u].iter().filter(|&&v| v > u) {
                if covered.contains(&(u, v)) {
                    continue;
                }
                let mut clique = vec![u, v];
                for w in adj[u].intersection(&adj[v]).copied().collect::<Vec<_>>() {
                    if clique.iter().all(|&q| adj[w].contains(&q)) {
                        clique.push(w);
                    }
                }
                clique.sort_unstable();
                for a in 0..clique.len() {
                    for b in a + 1..clique.len() {
                        covered.insert((clique[a], clique[b]));
                    }
                }
                rows.push(Row {
                    name: format!("clique{}", rows.len()),
                    coeffs: clique.into_iter().map(|q| (q, 1.0)).collect(),
                    sense: RowSense::Le,
                    rhs: 1.0,
                });
            }
        }
    } else {
        for u in 0..n {
            for &v in adj[u].iter().filter(|&&v| v > u) {
                rows.push(Row {
                    name: format!("edge{}", rows.len()),
                    coeffs: vec![(u, 1.0), (v, 1.0)],
                    sense: RowSense::Le,
                    rhs: 1.0,
                });
            }
        }
    }

    Ok(MipInstance {
        name: format!("is_s{seed}"),
        objective_sense: Sense::Max,
        c: vec![1.0; n],
        rows,
        lower: vec![0.0; n],
        upper: vec![1.0; n],
        integrality: vec![true; n],
        var_names: (0..n).map(|v| format!("v{v}")).collect(),
    })
}

/// Suite manifest written next to generated instance files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub domain: String,
    pub size: String,
    pub count: usize,
    pub seed: u64,
    pub params: serde_json::Value,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn save(&self, dir: &Path) -> Result<(), GenError> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("manifest.json"), text)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Manifest, GenError> {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Generate `count` instances of a preset into `dir` (created if missing),
/// one file per instance plus a manifest. Instance i uses seed `seed + i`.
pub fn generate_suite(
    domain: Domain,
    size: SizePreset,
    count: usize,
    seed: u64,
    dir: &Path,
) -> Result<Manifest, GenError> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(count);
    let mut params_json = serde_json::Value::Null;
    for i in 0..count {
        let spec = GeneratorSpec::preset(domain, size, seed + i as u64);
        if i == 0 {
            params_json = serde_json::to_value(spec.params)?;
        }
        let mut inst = spec.generate()?;
        inst.name = format!("{}_{}_s{}_{:03}", domain.code(), size.code(), seed, i);
        let file = format!("{}.txt", inst.name);
        crate::mip::save_instance(&inst, &dir.join(&file))?;
        files.push(file);
    }
    let manifest = Manifest {
        domain: domain.code().to_string(),
        size: size.code().to_string(),
        count,
        seed,
        params: params_json,
        files,
    };
    manifest.save(dir)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::{reduce, NodeBounds};
    use crate::simplex::{solve_lp, LpStatus, SimplexConfig};

    #[test]
    fn setcover_structure() {
        let p = ScParams {
            rows: 20,
            cols: 40,
            density: 0.25,
            cost_lo: 1,
            cost_hi: 100,
        };
        let inst = gen_setcover(&p, 1).unwrap();
        assert_eq!(inst.n_rows(), 20);
        assert_eq!(inst.n_vars(), 40);
        assert!(inst.integrality.iter().all(|&b| b));
        let mut used = vec![false; 40];
        for row in &inst.rows {
            assert!(row.coeffs.len() >= 2, "every row has at least 2 entries");
            assert_eq!(row.sense, RowSense::Ge);
            assert_eq!(row.rhs, 1.0);
            for &(j, v) in &row.coeffs {
                assert_eq!(v, 1.0);
                used[j] = true;
            }
        }
        assert!(used.iter().all(|&u| u), "every column appears in some row");
    }

    #[test]
    fn setcover_full_density() {
        let p = ScParams {
            rows: 4,
            cols: 6,
            density: 1.0,
            cost_lo: 1,
            cost_hi: 100,
        };
        let inst = gen_setcover(&p, 3).unwrap();
        for row in &inst.rows {
            assert_eq!(row.coeffs.len(), 6, "full density fills every row");
        }
        // Covering with full rows picks the single cheapest column.
        let best = inst.c.iter().cloned().fold(f64::INFINITY, f64::min);
        let view = reduce(&inst, &NodeBounds::default());
        let lp = solve_lp(&view, &SimplexConfig::default()).unwrap();
        assert!((lp.z - best).abs() < 1e-9, "LP optimum is the min cost");
    }

    #[test]
    fn setcover_rejects_thin_density() {
        let p = ScParams {
            rows: 5,
            cols: 30,
            density: 0.01,
            cost_lo: 1,
            cost_hi: 100,
        };
        assert!(gen_setcover(&p, 0).is_err());
    }

    #[test]
    fn cauction_structure() {
        let p = CaParams {
            items: 10,
            bids: 50,
            add_prob: 0.65,
        };
        let inst = gen_cauction(&p, 3).unwrap();
        assert_eq!(inst.objective_sense, Sense::Max);
        assert_eq!(inst.n_rows(), 10, "one packing row per item");
        assert_eq!(inst.n_vars(), 50);
        for row in &inst.rows {
            assert_eq!(row.sense, RowSense::Le);
            assert_eq!(row.rhs, 1.0);
            assert!(!row.coeffs.is_empty());
        }
        assert!(inst.c.iter().all(|&p| p >= 1.0));
    }

    #[test]
    fn facility_structure() {
        let p = FlParams {
            customers: 5,
            facilities: 5,
            capacity_ratio: 2.0,
        };
        let inst = gen_facility(&p, 9).unwrap();
        assert_eq!(inst.n_vars(), 5 + 25);
        assert_eq!(inst.n_rows(), 10, "5 demand + 5 capacity rows");
        assert_eq!(inst.integrality.iter().filter(|&&b| b).count(), 5);
        let demand_rows = inst
            .rows
            .iter()
            .filter(|r| r.sense == RowSense::Eq)
            .count();
        assert_eq!(demand_rows, 5);
        // Total capacity covers total demand with ratio 2.
        let total_cap: f64 = inst
            .rows
            .iter()
            .filter(|r| r.name.starts_with("cap"))
            .map(|r| -r.coeffs.iter().find(|&&(j, _)| j < 5).unwrap().1)
            .sum();
        let view = reduce(&inst, &NodeBounds::default());
        let lp = solve_lp(&view, &SimplexConfig::default()).unwrap();
        assert_eq!(lp.status, LpStatus::Optimal, "relaxation feasible");
        assert!(total_cap >= 2.0 * 5.0 * 5.0, "capacity scaled by ratio");
    }

    #[test]
    fn indset_structure_and_edge_count() {
        let p = IsParams {
            nodes: 50,
            affinity: 4,
            clique_cover: false,
        };
        let inst = gen_indset(&p, 2).unwrap();
        assert_eq!(inst.n_vars(), 50);
        assert_eq!(
            inst.n_rows(),
            4 * (50 - 4),
            "affinity edges per arriving node"
        );
        for row in &inst.rows {
            assert_eq!(row.coeffs.len(), 2, "edge rows have degree 2");
        }
    }

    #[test]
    fn indset_edgeless_graph() {
        let p = IsParams {
            nodes: 7,
            affinity: 0,
            clique_cover: false,
        };
        let inst = gen_indset(&p, 2).unwrap();
        assert_eq!(inst.n_rows(), 0);
        let view = reduce(&inst, &NodeBounds::default());
        let lp = solve_lp(&view, &SimplexConfig::default()).unwrap();
        // Without conflicts every node joins: optimum is the node count.
        assert!((inst.to_original_objective(lp.z) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn indset_clique_cover_rows() {
        let p = IsParams {
            nodes: 30,
            affinity: 3,
            clique_cover: true,
        };
        let inst = gen_indset(&p, 5).unwrap();
        for row in &inst.rows {
            assert!(row.coeffs.len() >= 2);
        }
        // Clique rows cover every edge of the plain formulation.
        let plain = gen_indset(
            &IsParams {
                clique_cover: false,
                ..p
            },
            5,
        )
        .unwrap();
        for edge in &plain.rows {
            let (u, v) = (edge.coeffs[0].0, edge.coeffs[1].0);
            assert!(
                inst.rows.iter().any(|r| {
                    r.coeffs.iter().any(|&(j, _)| j == u) && r.coeffs.iter().any(|&(j, _)| j == v)
                }),
                "edge ({u},{v}) covered by a clique row"
            );
        }
    }

    #[test]
    fn all_generators_deterministic() {
        for domain in Domain::all() {
            let a = GeneratorSpec::preset(domain, SizePreset::Test, 7)
                .generate()
                .unwrap();
            let b = GeneratorSpec::preset(domain, SizePreset::Test, 7)
                .generate()
                .unwrap();
            assert_eq!(
                crate::mip::write_instance(&a),
                crate::mip::write_instance(&b),
                "{domain:?} must be reproducible"
            );
            let c = GeneratorSpec::preset(domain, SizePreset::Test, 8)
                .generate()
                .unwrap();
            assert_ne!(
                crate::mip::write_instance(&a),
                crate::mip::write_instance(&c),
                "{domain:?} seeds must differ"
            );
        }
    }

    #[test]
    fn every_preset_is_feasible_and_valid() {
        for domain in Domain::all() {
            for size in [SizePreset::Tiny, SizePreset::Test] {
                let inst = GeneratorSpec::preset(domain, size, 11).generate().unwrap();
                assert!(inst.validate().is_ok());
                let view = reduce(&inst, &NodeBounds::default());
                let lp = solve_lp(&view, &SimplexConfig::default()).unwrap();
                assert_eq!(
                    lp.status,
                    LpStatus::Optimal,
                    "{domain:?}/{size:?} LP relaxation solves"
                );
            }
        }
    }

    #[test]
    fn presets_are_monotone_small_to_large() {
        use SizePreset::*;
        for domain in Domain::all() {
            let sizes = [Small, Medium, Large];
            let mut prev: Option<Vec<f64>> = None;
            for size in sizes {
                let spec = GeneratorSpec::preset(domain, size, 0);
                let vals: Vec<f64> = match spec.params {
                    DomainParams::Sc(p) => vec![
                        p.rows as f64,
                        p.cols as f64,
                        p.density,
                        p.cost_lo as f64,
                        p.cost_hi as f64,
                    ],
                    DomainParams::Ca(p) => vec![p.items as f64, p.bids as f64, p.add_prob],
                    DomainParams::Fl(p) => {
                        vec![p.customers as f64, p.facilities as f64, p.capacity_ratio]
                    }
                    DomainParams::Is(p) => vec![p.nodes as f64, p.affinity as f64],
                };
                if let Some(prev) = &prev {
                    for (a, b) in prev.iter().zip(&vals) {
                        assert!(b >= a, "{domain:?} preset parameters non-decreasing");
                    }
                }
                prev = Some(vals);
            }
        }
    }

    #[test]
    fn suite_writes_loadable_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = generate_suite(Domain::Sc, SizePreset::Tiny, 3, 5, dir.path()).unwrap();
        assert_eq!(manifest.files.len(), 3);
        let loaded = Manifest::load(dir.path()).unwrap();
        assert_eq!(loaded.files, manifest.files);
        for f in &manifest.files {
            let inst = crate::mip::load_instance(&dir.path().join(f)).unwrap();
            assert!(inst.validate().is_ok());
        }
    }
}
