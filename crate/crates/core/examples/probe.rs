//! Scratch probe for pruning statistics (not part of the deliverable API).

use msdt_core::oracle::{self, InstanceParams};
use msdt_core::search::{solve_msdt, SearchConfig};
use msdt_core::DataSet;

fn main() {
    let base = SearchConfig {
        reduce: true,
        imp_lb: true,
        pair_lb: true,
        threshold_constraints: false,
        dirty_constraints: false,
        cache: false,
        dirty_priority: true,
        ..Default::default()
    };
    let with_tc = SearchConfig { threshold_constraints: true, ..base.clone() };
    let with_dc = SearchConfig { dirty_constraints: true, ..base.clone() };
    let with_both = SearchConfig {
        threshold_constraints: true,
        dirty_constraints: true,
        ..base.clone()
    };

    let mut ratios = Vec::new();
    for seed in 0..40u64 {
        let params = InstanceParams {
            n: 14,
            d: 4,
            max_value: 4,
            red_fraction: 0.5,
        };
        let ds: DataSet<f64> = oracle::random_instance(seed, &params);
        let b = solve_msdt(&ds, &base);
        let t = solve_msdt(&ds, &with_tc);
        let d = solve_msdt(&ds, &with_dc);
        let both = solve_msdt(&ds, &with_both);
        let ratio = b.stats.nodes as f64 / both.stats.nodes as f64;
        ratios.push(ratio);
        println!(
            "seed {seed:2} size {:?} base {:6} tc {:6} (cp {:4}) dc {:6} (cp {:4}) both {:6} (cp {:4}) ratio {ratio:.2}",
            b.size,
            b.stats.nodes,
            t.stats.nodes,
            t.stats.constraint_prunes,
            d.stats.nodes,
            d.stats.constraint_prunes,
            both.stats.nodes,
            both.stats.constraint_prunes,
        );
    }
    let mean: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
    println!("mean ratio {mean:.3}");
}
