//! `latmax`: runs the checkers and experiments with seeded, reproducible output.
//!
//! Every run prints a JSON summary on stdout. With `--out DIR` it also writes
//! `DIR/<command>.csv` and `DIR/<command>.json`. Exit status is 0 when every
//! asserted inequality holds, 1 when one fails and 2 on a usage error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use latmax::output::{write_csv, Summary};
use latmax::par::Execution;
use latmax::runs::{self, RunOutput};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "latmax", version, about, arg_required_else_help = true)]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
struct Common {
    /// Dimensions: a range `a..b` (inclusive) or a comma list `1,2,4`.
    #[arg(long = "d", value_parser = parse_dims)]
    dims: Option<Dims>,
    /// Base seed; mandatory for randomized runs.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count; its meaning depends on the subcommand.
    #[arg(long)]
    samples: Option<usize>,
    /// Grid side (a power of two).
    #[arg(long)]
    side: Option<usize>,
    /// Directory for `<command>.csv` and `<command>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to LATMAX_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// `key=value` file with defaults for any long flag; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniform symbol bounds for the averaging multipliers.
    VerifyMultipliers {
        #[command(flatten)]
        common: Common,
        /// Largest N in the scan N = 1..=n_max.
        #[arg(long)]
        n_max: Option<u64>,
        /// Draws for the product functional.
        #[arg(long)]
        product_draws: Option<usize>,
    },
    /// Poisson semigroup axioms and the square-function identity.
    SemigroupCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Variation seminorm checks, Rademacher–Menshov and short variations.
    VariationCheck {
        #[command(flatten)]
        common: Common,
        /// Dyadic blocks for the short-variation ratios.
        #[arg(long)]
        blocks: Option<u32>,
    },
    /// Exact lower bound for the ellipsoid counterexample.
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "M")]
        m: Option<u32>,
    },
    /// Discrete cube averages against their continuous counterparts.
    Comparison {
        #[command(flatten)]
        common: Common,
    },
    /// Empirical maximal ratios for the cube and the ellipsoid family.
    NormScan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<f64>,
        /// Dyadic scales 1, 2, ..., 2^k.
        #[arg(long)]
        k: Option<u32>,
        /// Construction dimensions 2^{r+1} - 1 for the ellipsoid curve.
        #[arg(long = "ellipsoid-d", value_parser = parse_dims)]
        ellipsoid_dims: Option<Dims>,
    },
    /// Growth of the vector Riesz transform on l^q.
    RieszGrowth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Ergodic averages on (Z/mZ)^d against lattice averages.
    Transference {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        /// Radius of the inner window.
        #[arg(long)]
        radius: Option<i64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyMultipliers { .. } => "verify-multipliers",
            Command::SemigroupCheck { .. } => "semigroup-check",
            Command::VariationCheck { .. } => "variation-check",
            Command::Counterexample { .. } => "counterexample",
            Command::Comparison { .. } => "comparison",
            Command::NormScan { .. } => "norm-scan",
            Command::RieszGrowth { .. } => "riesz-growth",
            Command::Transference { .. } => "transference",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::VerifyMultipliers { common, .. }
            | Command::SemigroupCheck { common }
            | Command::VariationCheck { common, .. }
            | Command::Counterexample { common, .. }
            | Command::Comparison { common }
            | Command::NormScan { common, .. }
            | Command::RieszGrowth { common, .. }
            | Command::Transference { common, .. } => common,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Dims(Vec<usize>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    let bad = || format!("expected `a..b` or a comma list of positive integers, got `{s}`");
    let num = |t: &str| t.trim().parse::<usize>().ok().filter(|v| *v > 0);
    let dims: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a).ok_or_else(bad)?, num(b).ok_or_else(bad)?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|t| num(t).ok_or_else(bad))
            .collect::<Result<_, _>>()?
    };
    if dims.is_empty() {
        return Err(bad());
    }
    Ok(Dims(dims))
}

/// A failure that maps to exit status 2.
struct Usage(String);

impl From<latmax::Error> for Usage {
    fn from(e: latmax::Error) -> Self {
        Usage(e.to_string())
    }
}

fn require_seed(c: &Common) -> Result<u64, Usage> {
    c.seed
        .ok_or_else(|| Usage("--seed is required for this randomized run".into()))
}

fn check_exponent(name: &str, v: f64) -> Result<(), Usage> {
    if v > 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Usage(format!("--{name} must lie in (1, inf), got {v}")))
    }
}

fn check_side(side: usize) -> Result<(), Usage> {
    if side.is_power_of_two() && side >= 2 {
        Ok(())
    } else {
        Err(Usage(format!(
            "--side must be a power of two >= 2, got {side}"
        )))
    }
}

fn single_dim(c: &Common, default: usize) -> Result<usize, Usage> {
    match &c.dims {
        None => Ok(default),
        Some(Dims(v)) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(Usage("this subcommand takes a single dimension".into())),
    }
}

fn dims_or(c: &Common, default: Vec<usize>) -> Vec<usize> {
    c.dims.clone().map(|d| d.0).unwrap_or(default)
}

struct Prepared {
    seed: Option<u64>,
    params: Value,
    output: RunOutput,
}

fn finish<P: Serialize>(
    seed: Option<u64>,
    params: &P,
    output: RunOutput,
) -> Result<Prepared, Usage> {
    Ok(Prepared {
        seed,
        params: serde_json::to_value(params).map_err(|e| Usage(e.to_string()))?,
        output,
    })
}

fn execute(cmd: &Command, exec: Execution) -> Result<Prepared, Usage> {
    let common = cmd.common();
    match cmd {
        Command::VerifyMultipliers {
            n_max,
            product_draws,
            ..
        } => {
            let seed = require_seed(common)?;
            let mut p = runs::MultiplierParams::default();
            p.dims = dims_or(common, p.dims);
            p.samples = common.samples.unwrap_or(p.samples);
            p.n_max = n_max.unwrap_or(p.n_max);
            p.product_draws = product_draws.unwrap_or(p.product_draws);
            let out = runs::run_multipliers(&p, seed, exec)?;
            finish(Some(seed), &p, out)
        }
        Command::SemigroupCheck { .. } => {
            let seed = require_seed(common)?;
            let mut p = runs::SemigroupParams::default();
            p.dim = single_dim(common, p.dim)?;
            p.side = common.side.unwrap_or(p.side);
            check_side(p.side)?;
            p.trials = common.samples.unwrap_or(p.trials);
            let out = runs::run_semigroup(&p, seed)?;
            finish(Some(seed), &p, out)
        }
        Command::VariationCheck { blocks, .. } => {
            let seed = require_seed(common)?;
            let mut p = runs::VariationParams::default();
            p.short_dims = dims_or(common, p.short_dims);
            if let Some(n) = common.samples {
                p.calculus_paths = n;
                p.rm_blocks = n;
            }
            p.short_blocks = blocks.unwrap_or(p.short_blocks);
            let out = runs::run_variation(&p, seed, exec)?;
            finish(Some(seed), &p, out)
        }
        Command::Counterexample { r, p, m, .. } => {
            let mut params = runs::CounterexampleParams::default();
            params.r = r.unwrap_or(params.r);
            params.p = p.unwrap_or(params.p);
            params.m = m.unwrap_or(params.m);
            check_exponent("p", params.p)?;
            let out = runs::run_counterexample(&params)?;
            finish(common.seed, &params, out)
        }
        Command::Comparison { .. } => {
            let seed = require_seed(common)?;
            let mut p = runs::ComparisonParams::default();
            p.dims = dims_or(common, p.dims);
            p.functions = common.samples.unwrap_or(p.functions);
            let out = runs::run_comparison(&p, seed, exec)?;
            finish(Some(seed), &p, out)
        }
        Command::NormScan {
            p,
            k,
            ellipsoid_dims,
            ..
        } => {
            let seed = require_seed(common)?;
            let mut params = runs::NormScanParams::default();
            params.dims = dims_or(common, params.dims);
            params.p = p.unwrap_or(params.p);
            check_exponent("p", params.p)?;
            params.size = common.samples.unwrap_or(params.size);
            params.dyadic_exponent = k.unwrap_or(params.dyadic_exponent);
            if let Some(Dims(e)) = ellipsoid_dims {
                params.ellipsoid_dims = e.clone();
            }
            let out = runs::run_norm_scan(&params, seed, exec)?;
            finish(Some(seed), &params, out)
        }
        Command::RieszGrowth { q, .. } => {
            let seed = require_seed(common)?;
            let mut p = runs::RieszParams::default();
            p.dims = dims_or(common, p.dims);
            p.q = q.unwrap_or(p.q);
            if let Some(side) = common.side {
                check_side(side)?;
                p.start_side = side;
            }
            p.partition_trials = common.samples.unwrap_or(p.partition_trials);
            let out = runs::run_riesz(&p, seed, exec)?;
            finish(Some(seed), &p, out)
        }
        Command::Transference { r, p, radius, .. } => {
            let seed = require_seed(common)?;
            let mut params = runs::TransferenceParams::default();
            params.dim = single_dim(common, params.dim)?;
            params.modulus = common.side.unwrap_or(params.modulus);
            check_side(params.modulus)?;
            params.cases = common.samples.unwrap_or(params.cases);
            params.r = r.unwrap_or(params.r);
            params.p = p.unwrap_or(params.p);
            params.inner_radius = radius.unwrap_or(params.inner_radius);
            check_exponent("p", params.p)?;
            if params.r < 1.0 {
                return Err(Usage(format!("--r must be at least 1, got {}", params.r)));
            }
            let out = runs::run_transference(&params, seed, exec)?;
            finish(Some(seed), &params, out)
        }
    }
}

/// Reads `key=value` lines; `#` starts a comment.
fn read_config(path: &Path) -> Result<Vec<(String, String)>, Usage> {
    let text = fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        out.push((
            k.trim().trim_start_matches("--").to_string(),
            v.trim().to_string(),
        ));
    }
    Ok(out)
}

/// Re-parses with the config entries placed right after the subcommand, so
/// any flag given on the command line overrides them.
fn apply_config(argv: &[String], cli: Cli) -> Result<Cli, Usage> {
    let Some(path) = cli.command.common().config.clone() else {
        return Ok(cli);
    };
    let name = cli.command.name();
    let root = Cli::command();
    let sub = root
        .find_subcommand(name)
        .expect("parsed subcommand exists");
    let known = |key: &str| sub.get_arguments().any(|a| a.get_long() == Some(key));
    let mut injected = Vec::new();
    for (k, v) in read_config(&path)? {
        if k == "config" {
            continue;
        }
        if known(&k) {
            injected.push(format!("--{k}={v}"));
        } else if !root
            .get_subcommands()
            .any(|s| s.get_arguments().any(|a| a.get_long() == Some(k.as_str())))
        {
            return Err(Usage(format!("unknown config key `{k}`")));
        }
    }
    let at = argv
        .iter()
        .position(|a| a == name)
        .expect("subcommand present in argv");
    let mut args: Vec<String> = argv[..=at].to_vec();
    args.extend(injected);
    args.extend_from_slice(&argv[at + 1..]);
    Cli::try_parse_from(args).map_err(|e| Usage(e.to_string()))
}

fn thread_count(c: &Common) -> Result<Option<usize>, Usage> {
    let n = match c.threads {
        Some(n) => Some(n),
        None => match std::env::var("LATMAX_THREADS") {
            Ok(s) if !s.trim().is_empty() => Some(
                s.trim()
                    .parse()
                    .map_err(|_| Usage(format!("LATMAX_THREADS is not a count: `{s}`")))?,
            ),
            _ => None,
        },
    };
    if n == Some(0) {
        return Err(Usage("thread count must be positive".into()));
    }
    Ok(n)
}

fn configure_threads(threads: Option<usize>) -> Execution {
    match threads {
        Some(1) => Execution::Sequential,
        #[cfg(feature = "parallel")]
        Some(n) => {
            // Only fails if a global pool already exists, which keeps its size.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Execution::Sequential,
        None => Execution::default(),
    }
}

fn write_outputs(dir: &Path, name: &str, out: &RunOutput, json: &str) -> Result<(), Usage> {
    let io = |e: std::io::Error| Usage(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let csv = fs::File::create(dir.join(format!("{name}.csv"))).map_err(io)?;
    write_csv(csv, &out.rows)?;
    fs::write(dir.join(format!("{name}.json")), format!("{json}\n")).map_err(io)?;
    Ok(())
}

fn run(argv: Vec<String>) -> Result<bool, Usage> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return Ok(true);
            }
            return Err(Usage(e.render().to_string()));
        }
    };
    let cli = apply_config(&argv, cli)?;
    let common = cli.command.common().clone();
    let threads = thread_count(&common)?;
    let exec = configure_threads(threads);
    let name = cli.command.name();
    let prepared = execute(&cli.command, exec)?;

    let mut params: BTreeMap<String, Value> = match prepared.params {
        Value::Object(m) => m.into_iter().collect(),
        other => BTreeMap::from([("value".to_string(), other)]),
    };
    params.insert("threads".into(), threads.map_or(Value::Null, Value::from));
    if let Some(s) = common.side {
        params.entry("side".into()).or_insert(Value::from(s));
    }
    if let Some(s) = common.samples {
        params.insert("samples".into(), Value::from(s));
    }
    let output = prepared.output;
    let pass = output.pass();
    let summary = Summary {
        command: name.to_string(),
        seed: prepared.seed,
        params,
        results: output.results.clone(),
        pass,
    };
    let json = summary.to_json()?;
    println!("{json}");
    if let Some(dir) = &common.out {
        write_outputs(dir, name, &output, &json)?;
    }
    if let Some((row, witness)) = output.worst() {
        eprintln!(
            "FAIL {name}: d={} {} = {} against bound {}",
            row.d, row.param, row.value, row.bound
        );
        if let Some(w) = witness {
            eprintln!("worst point: {w}");
        }
    }
    Ok(pass)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            ExitCode::from(2)
        }
    }
}
