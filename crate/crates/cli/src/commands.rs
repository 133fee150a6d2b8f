use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, Result};
use msdt_core::dataset::{parse_csv, parse_csv_labeled, DataSet, InstanceStats, LabelMapping};
use msdt_core::oracle::{self, InstanceParams};
use msdt_core::search::{solve_msdt, SolveResult, SolveStatus};
use msdt_core::{reduce, SearchConfig};
use serde_json::json;

use crate::args::{build_config, parse_seed_range, BenchArgs, ReduceArgs, SolveArgs, VerifyArgs};

pub fn solve(args: SolveArgs) -> Result<u8> {
    let options = args.input.parse_options()?;
    let file = File::open(&args.input.input)
        .with_context(|| format!("opening {}", args.input.input.display()))?;
    let (ds, mapping): (DataSet<f64>, LabelMapping) = parse_csv_labeled(file, &options)?;
    let input_stats = ds.stats();
    eprintln!("class red = {:?}, blue = {:?}", mapping.red, mapping.blue.join("|"));

    let config = build_config(&args)?;
    let result = solve_msdt(&ds, &config);

    let accuracy = result
        .tree
        .as_ref()
        .map(|tree| tree.accuracy_on(&result.dataset));

    match result.status {
        SolveStatus::Optimal => {
            let size = result.size.unwrap_or(0);
            println!(
                "optimal size {} in {} ms ({} search nodes, {} bounded-size calls)",
                size, result.stats.elapsed_ms, result.stats.nodes, result.stats.bsdt_calls
            );
        }
        SolveStatus::ExceedsMaxSize => {
            println!(
                "no perfect tree within max size {}; minimum is at least {}",
                config.max_size.unwrap_or(0),
                result.lower_bound
            );
        }
        SolveStatus::Timeout => {
            println!(
                "timed out; proven lower bound {}{}",
                result.lower_bound,
                result
                    .size
                    .map(|s| format!(", best tree so far has size {s}"))
                    .unwrap_or_default()
            );
        }
    }

    if let Some(tree) = &result.tree {
        if let Some(path) = &args.out {
            std::fs::write(path, tree.to_json()).with_context(|| format!("writing {}", path.display()))?;
        }
        if let Some(path) = &args.dot {
            let dot = tree.to_dot(Some(result.dataset.dim_names()));
            std::fs::write(path, dot).with_context(|| format!("writing {}", path.display()))?;
        }
    }

    if let Some(path) = &args.stats {
        let stats = stats_json(&args, &config, &result, input_stats, accuracy, &mapping);
        let text = serde_json::to_string_pretty(&stats)?;
        if path == &PathBuf::from("-") {
            println!("{text}");
        } else {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }

    Ok(match result.status {
        SolveStatus::Optimal | SolveStatus::ExceedsMaxSize => 0,
        SolveStatus::Timeout => 2,
    })
}

fn stats_json(
    args: &SolveArgs,
    config: &SearchConfig,
    result: &SolveResult<f64>,
    input: InstanceStats,
    accuracy: Option<f64>,
    mapping: &LabelMapping,
) -> serde_json::Value {
    json!({
        "input": args.input.input.display().to_string(),
        "classes": { "red": mapping.red, "blue": mapping.blue },
        "status": result.status,
        "size": result.size,
        "lower_bound": result.lower_bound,
        "pair_lb": result.pair_lb,
        "greedy_ub": result.greedy_ub,
        "strategy": config.strategy,
        "reduced": config.reduce,
        "train_accuracy": accuracy,
        "instance_input": input,
        "instance_solved": result.dataset.stats(),
        "search": result.stats,
    })
}

pub fn reduce(args: ReduceArgs) -> Result<u8> {
    let options = args.input.parse_options()?;
    let file = File::open(&args.input.input)
        .with_context(|| format!("opening {}", args.input.input.display()))?;
    let ds: DataSet<f64> = parse_csv(file, &options)?;
    let before = ds.stats();
    let reduced = reduce::reduce_all(&ds);
    let after = reduced.stats();

    match &args.out {
        Some(path) => {
            let out = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            reduced.write_csv(out, options.delimiter)?;
        }
        None => {
            let stdout = std::io::stdout();
            reduced.write_csv(stdout.lock(), options.delimiter)?;
        }
    }
    eprintln!(
        "n {} -> {}, d {} -> {}, c {} -> {}, delta {} -> {}, D {} -> {}",
        before.n, after.n, before.d, after.d, before.cuts, after.cuts, before.delta, after.delta,
        before.domain, after.domain
    );
    Ok(0)
}

pub fn verify(args: VerifyArgs) -> Result<u8> {
    let range = parse_seed_range(&args.seed_range)?;
    let params = InstanceParams {
        n: args.examples,
        d: args.dims,
        max_value: args.values,
        red_fraction: 0.5,
    };
    let config = SearchConfig::default();
    let mut failures = 0usize;
    println!("{:>6} {:>4} {:>9} {:>7} {:>7}", "seed", "n", "expected", "got", "result");
    for seed in range {
        let ds: DataSet<f64> = oracle::random_instance(seed, &params);
        let expected = oracle::min_size_exact(&ds)
            .with_context(|| format!("oracle guard tripped on seed {seed}"))?;
        let result = solve_msdt(&ds, &config);
        let row = verify_row(seed, ds.n(), expected, result.size);
        if !row.pass {
            failures += 1;
        }
        println!("{}", row.render());
    }
    if failures > 0 {
        eprintln!("{failures} FAILED");
        return Ok(1);
    }
    println!("all PASS");
    Ok(0)
}

pub(crate) struct VerifyRow {
    seed: u64,
    n: usize,
    expected: usize,
    got: Option<usize>,
    pub(crate) pass: bool,
}

pub(crate) fn verify_row(seed: u64, n: usize, expected: usize, got: Option<usize>) -> VerifyRow {
    VerifyRow { seed, n, expected, got, pass: got == Some(expected) }
}

impl VerifyRow {
    pub(crate) fn render(&self) -> String {
        format!(
            "{:>6} {:>4} {:>9} {:>7} {:>7}",
            self.seed,
            self.n,
            self.expected,
            self.got.map(|g| g.to_string()).unwrap_or_else(|| "-".into()),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    Naive,
    DirtyPriority,
    Basic,
    Lb,
    SubConst,
    Full,
}

impl Variant {
    fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "naive" => Variant::Naive,
            "dirty-priority" => Variant::DirtyPriority,
            "basic" => Variant::Basic,
            "lb" => Variant::Lb,
            "subconst" => Variant::SubConst,
            "full" => Variant::Full,
            other => anyhow::bail!("unknown variant {other:?}"),
        })
    }

    fn name(self) -> &'static str {
        match self {
            Variant::Naive => "naive",
            Variant::DirtyPriority => "dirty-priority",
            Variant::Basic => "basic",
            Variant::Lb => "lb",
            Variant::SubConst => "subconst",
            Variant::Full => "full",
        }
    }

    /// The improvement ladder: each variant adds one mechanism on top of
    /// the previous one.
    pub fn config(self, time_limit: Duration) -> SearchConfig {
        let mut config = SearchConfig {
            reduce: false,
            imp_lb: false,
            pair_lb: false,
            threshold_constraints: false,
            dirty_constraints: false,
            cache: false,
            dirty_priority: false,
            time_limit: Some(time_limit),
            ..Default::default()
        };
        if self >= Variant::DirtyPriority {
            config.dirty_priority = true;
        }
        if self >= Variant::Basic {
            config.reduce = true;
        }
        if self >= Variant::Lb {
            config.imp_lb = true;
            config.pair_lb = true;
        }
        if self >= Variant::SubConst {
            config.threshold_constraints = true;
            config.dirty_constraints = true;
        }
        if self >= Variant::Full {
            config.cache = true;
        }
        config
    }
}

impl PartialOrd for Variant {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some((*self as u8).cmp(&(*other as u8)))
    }
}

struct BenchRow {
    instance: String,
    variant: &'static str,
    solved: bool,
    time_ms: u128,
    nodes: u64,
    min_size: Option<usize>,
}

pub fn bench(args: BenchArgs) -> Result<u8> {
    let variants: Vec<Variant> = args
        .variants
        .split(',')
        .map(|v| Variant::parse(v.trim()))
        .collect::<Result<_>>()?;
    let time_limit = Duration::from_secs_f64(args.time_limit);

    let instances: Vec<(String, DataSet<f64>)> = match &args.dir {
        Some(dir) => {
            let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "csv"))
                .collect();
            files.sort();
            let mut out = Vec::new();
            for path in files {
                let file = File::open(&path)?;
                let ds = parse_csv(file, &Default::default())
                    .with_context(|| format!("parsing {}", path.display()))?;
                let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                out.push((name, ds));
            }
            out
        }
        None => {
            let params = InstanceParams {
                n: args.examples,
                d: args.dims,
                max_value: args.values,
                red_fraction: 0.5,
            };
            parse_seed_range(&args.seed_range)?
                .map(|seed| (format!("seed{seed}"), oracle::random_instance(seed, &params)))
                .collect()
        }
    };

    let jobs = args.jobs.max(1);
    let tasks: Vec<(usize, Variant)> = (0..instances.len())
        .flat_map(|i| variants.iter().map(move |&v| (i, v)))
        .collect();

    let mut rows: Vec<(usize, BenchRow)> = Vec::new();
    std::thread::scope(|scope| {
        let chunks: Vec<_> = tasks.chunks(tasks.len().div_ceil(jobs)).collect();
        let mut handles = Vec::new();
        for chunk in chunks {
            let instances = &instances;
            handles.push(scope.spawn(move || {
                let mut local = Vec::new();
                for &(idx, variant) in chunk {
                    let (name, ds) = &instances[idx];
                    let config = variant.config(time_limit);
                    let result = solve_msdt(ds, &config);
                    local.push((
                        idx,
                        BenchRow {
                            instance: name.clone(),
                            variant: variant.name(),
                            solved: result.status == SolveStatus::Optimal,
                            time_ms: result.stats.elapsed_ms,
                            nodes: result.stats.nodes,
                            min_size: result.size,
                        },
                    ));
                }
                local
            }));
        }
        for handle in handles {
            rows.extend(handle.join().expect("bench worker panicked"));
        }
    });
    rows.sort_by(|a, b| (a.0, a.1.variant).cmp(&(b.0, b.1.variant)));

    let mut csv = String::from("instance,variant,solved,time_ms,nodes,min_size\n");
    for (_, row) in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.instance,
            row.variant,
            row.solved,
            row.time_ms,
            row.nodes,
            row.min_size.map(|s| s.to_string()).unwrap_or_default()
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => {
            let mut stdout = std::io::stdout();
            stdout.write_all(csv.as_bytes())?;
        }
    }

    // Exactness contract: all variants that solved an instance must agree.
    let mut disagreements = 0;
    for idx in 0..instances.len() {
        let sizes: Vec<usize> = rows
            .iter()
            .filter(|(i, row)| *i == idx && row.solved)
            .filter_map(|(_, row)| row.min_size)
            .collect();
        if sizes.windows(2).any(|w| w[0] != w[1]) {
            eprintln!("FAIL: variants disagree on {} ({sizes:?})", instances[idx].0);
            disagreements += 1;
        }
    }
    Ok(if disagreements > 0 { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_ladder_accumulates() {
        let naive = Variant::Naive.config(Duration::from_secs(1));
        assert!(!naive.dirty_priority && !naive.reduce && !naive.imp_lb && !naive.cache);
        let basic = Variant::Basic.config(Duration::from_secs(1));
        assert!(basic.dirty_priority && basic.reduce && !basic.imp_lb);
        let full = Variant::Full.config(Duration::from_secs(1));
        assert!(full.imp_lb && full.threshold_constraints && full.dirty_constraints && full.cache);
    }

    #[test]
    fn verify_row_flags_mismatch() {
        // The harness must catch a solver returning a wrong minimum.
        let bad = verify_row(7, 10, 3, Some(4));
        assert!(!bad.pass);
        assert!(bad.render().contains("FAIL"));
        let good = verify_row(7, 10, 3, Some(3));
        assert!(good.pass);
        assert!(good.render().contains("PASS"));
    }
}
