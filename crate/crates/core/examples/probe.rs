use sparsebranch_core::bnb::{solve_mip, SolverConfig};
use sparsebranch_core::branching::{PseudocostRule, ScoringConfig};
use sparsebranch_core::generators::{gen_setcover, ScParams};
use sparsebranch_core::pipeline::{collect, CollectionConfig, CollectionTarget};

fn main() {
    let instances: Vec<_> = (0..4)
        .map(|i| {
            gen_setcover(
                &ScParams { rows: 8, cols: 14, density: 0.3, cost_lo: 1, cost_hi: 100 },
                100 + i as u64,
            )
            .unwrap()
        })
        .collect();
    for inst in &instances {
        let mut rule = PseudocostRule { scoring: ScoringConfig::default() };
        let r = solve_mip(inst, &SolverConfig::default(), &mut rule).unwrap();
        println!("{}: status {:?} nodes {}", inst.name, r.status, r.nodes_processed);
    }
    let cfg = CollectionConfig {
        sb_probability: 1.0,
        node_cap: 40,
        target: CollectionTarget::Candidates(200),
        seed: 9,
        ..CollectionConfig::default()
    };
    let out = collect(&instances, &cfg, &SolverConfig::default()).unwrap();
    println!("tuples {} rows {} solves {}", out.tuples.len(), out.total_rows(), out.instances_solved);
}
