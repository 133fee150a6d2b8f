use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use msdt_core::dataset::{ClassColumn, ParseOptions};
use msdt_core::{SearchConfig, Strategy};

#[derive(Parser)]
#[command(name = "msdt", version, about = "Exact minimum-size decision tree solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Find a minimum-size perfect decision tree for a CSV data set.
    Solve(SolveArgs),
    /// Apply the data reduction rules and emit the reduced CSV.
    Reduce(ReduceArgs),
    /// Check the solver against the brute-force reference on random instances.
    Verify(VerifyArgs),
    /// Run the solver-variant comparison and emit a CSV table.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
pub struct InputArgs {
    /// Input table (CSV by default).
    pub input: PathBuf,
    /// Field delimiter; "tab" or "\t" selects TSV.
    #[arg(long)]
    pub delimiter: Option<String>,
    /// Class column by name or zero-based index; default: a column named
    /// "class" or "target", else the last column.
    #[arg(long)]
    pub class_column: Option<String>,
}

impl InputArgs {
    pub fn parse_options(&self) -> Result<ParseOptions> {
        let delimiter = match self.delimiter.as_deref() {
            None => b',',
            Some("tab") | Some("\\t") | Some("\t") => b'\t',
            Some(s) if s.len() == 1 => s.as_bytes()[0],
            Some(other) => bail!("delimiter must be one character or \"tab\", got {other:?}"),
        };
        let class_column = match &self.class_column {
            None => ClassColumn::Auto,
            Some(spec) => match spec.parse::<usize>() {
                Ok(idx) => ClassColumn::Index(idx),
                Err(_) => ClassColumn::Named(spec.clone()),
            },
        };
        Ok(ParseOptions { delimiter, class_column })
    }
}

#[derive(Args, Clone, Default)]
pub struct ToggleArgs {
    /// Skip the data reduction rules.
    #[arg(long)]
    pub no_reduce: bool,
    /// Disable the per-node improvement lower bound.
    #[arg(long)]
    pub no_implb: bool,
    /// Disable the initial pair lower bound.
    #[arg(long)]
    pub no_pairlb: bool,
    /// Disable threshold subset constraints.
    #[arg(long)]
    pub no_threshold_constraints: bool,
    /// Disable dirty subset constraints.
    #[arg(long)]
    pub no_dirty_constraints: bool,
    /// Disable both subset constraint families.
    #[arg(long)]
    pub no_constraints: bool,
    /// Disable the set-trie lower-bound cache.
    #[arg(long)]
    pub no_cache: bool,
    /// Pick dirty examples in id order instead of fewest-refinements first.
    #[arg(long)]
    pub no_dirty_priority: bool,
}

#[derive(Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub toggles: ToggleArgs,
    /// Only search for trees of at most this size.
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Budget strategy: ascending, descending or binary.
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Write the tree as JSON to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the tree as Graphviz DOT to this path.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Write run statistics as JSON to this path ("-" for stdout).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Optional key=value file mirroring the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output path for the reduced CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Seed range `A..B` (half-open) for the random instances.
    #[arg(long, default_value = "0..50")]
    pub seed_range: String,
    /// Examples per random instance.
    #[arg(long, default_value_t = 12)]
    pub examples: usize,
    /// Dimensions per random instance.
    #[arg(long, default_value_t = 3)]
    pub dims: usize,
    /// Distinct coordinate values per dimension.
    #[arg(long, default_value_t = 3)]
    pub values: usize,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Seed range `A..B` for random instances (used when --dir is absent).
    #[arg(long, default_value = "0..20")]
    pub seed_range: String,
    /// Directory of CSV instances to benchmark instead of random ones.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// Comma-separated variant list out of
    /// naive,dirty-priority,basic,lb,subconst,full.
    #[arg(long, default_value = "naive,dirty-priority,basic,lb,subconst,full")]
    pub variants: String,
    /// Per-run wall-clock limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
    /// Parallel worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output path for the CSV table (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Examples per random instance.
    #[arg(long, default_value_t = 12)]
    pub examples: usize,
    /// Dimensions per random instance.
    #[arg(long, default_value_t = 3)]
    pub dims: usize,
    /// Distinct coordinate values per dimension.
    #[arg(long, default_value_t = 4)]
    pub values: usize,
}

pub fn parse_seed_range(spec: &str) -> Result<std::ops::Range<u64>> {
    let (a, b) = spec
        .split_once("..")
        .with_context(|| format!("seed range must look like A..B, got {spec:?}"))?;
    let start: u64 = a.trim().parse().context("seed range start")?;
    let end: u64 = b.trim().parse().context("seed range end")?;
    if end < start {
        bail!("empty seed range {spec:?}");
    }
    Ok(start..end)
}

/// Builds the search configuration from defaults, then the optional
/// key=value config file, then explicit command-line flags.
pub fn build_config(args: &SolveArgs) -> Result<SearchConfig> {
    let mut config = SearchConfig::default();

    if let Some(path) = &args.config {
        let file = parse_config_file(path)?;
        apply_config_file(&mut config, &file)?;
    }

    let t = &args.toggles;
    if t.no_reduce {
        config.reduce = false;
    }
    if t.no_implb {
        config.imp_lb = false;
    }
    if t.no_pairlb {
        config.pair_lb = false;
    }
    if t.no_threshold_constraints || t.no_constraints {
        config.threshold_constraints = false;
    }
    if t.no_dirty_constraints || t.no_constraints {
        config.dirty_constraints = false;
    }
    if t.no_cache {
        config.cache = false;
    }
    if t.no_dirty_priority {
        config.dirty_priority = false;
    }
    if let Some(strategy) = args.strategy {
        config.strategy = strategy;
    }
    if let Some(max_size) = args.max_size {
        config.max_size = Some(max_size);
    }
    if let Some(seconds) = args.time_limit {
        config.time_limit = Some(Duration::from_secs_f64(seconds));
    }
    Ok(config)
}

fn parse_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn apply_config_file(config: &mut SearchConfig, file: &HashMap<String, String>) -> Result<()> {
    let flag = |v: &str| -> Result<bool> {
        match v {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => bail!("expected boolean, got {other:?}"),
        }
    };
    for (key, value) in file {
        match key.as_str() {
            "reduce" => config.reduce = flag(value)?,
            "implb" => config.imp_lb = flag(value)?,
            "pairlb" => config.pair_lb = flag(value)?,
            "threshold-constraints" => config.threshold_constraints = flag(value)?,
            "dirty-constraints" => config.dirty_constraints = flag(value)?,
            "cache" => config.cache = flag(value)?,
            "dirty-priority" => config.dirty_priority = flag(value)?,
            "strategy" => {
                config.strategy = value.parse().map_err(anyhow::Error::msg)?;
            }
            "max-size" => config.max_size = Some(value.parse().context("max-size")?),
            "time-limit" => {
                config.time_limit =
                    Some(Duration::from_secs_f64(value.parse().context("time-limit")?));
            }
            other => bail!("unknown config key {other:?}"),
        }
    }
    Ok(())
}

