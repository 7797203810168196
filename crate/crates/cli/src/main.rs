//! Command-line front end: run relation pipelines, verify against the
//! bundled tables, inspect single pushforwards, and manage the result cache.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use tautrel::serial::{relation_set_to_csv, relation_set_to_json, rvm_from_json, rvm_to_json};
use tautrel::{
    basis_of_degree, expand_pushforward, normal_form, parse_point_monomial,
    pushforward, standard_sets, verify, GenusContext, OracleError, RelationSet,
    RelationVectorMap, WeightedPartition,
};

/// Bumped whenever the cached JSON schema changes; mismatched entries are
/// recomputed instead of trusted.
const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "tautrel", version, about = "Relations among kappa classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the expansion pipeline and print the reduced relations
    Relations(RelationsArgs),
    /// Check the bundled relation table for a genus against the pipelines
    Verify(VerifyArgs),
    /// Fibre-integrate a single point monomial
    Pushforward(PushforwardArgs),
    /// Manage the on-disk result cache
    Cache(CacheArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct RelationsArgs {
    #[arg(short = 'g', long)]
    genus: u32,
    #[arg(short = 'n', long)]
    points: u32,
    /// Point monomial to multiply in before integrating, e.g. "e1^2*v12"
    #[arg(long)]
    multiplier: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread count
    #[arg(long, default_value = "1")]
    jobs: usize,
    /// Cache directory (defaults to $TAUTREL_CACHE_DIR; unset disables caching)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Keep every multidegree instead of one representative per orbit
    #[arg(long)]
    no_orbit_reduction: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short = 'g', long)]
    genus: u32,
    #[arg(long, default_value = "1")]
    jobs: usize,
}

#[derive(Args)]
struct PushforwardArgs {
    /// Monomial in e<i>, v<i><j> (v{i,j} for n >= 10), k1
    expr: String,
    #[arg(short = 'g', long)]
    genus: u32,
    #[arg(short = 'n', long, default_value = "1")]
    points: u32,
}

#[derive(Args)]
struct CacheArgs {
    #[command(subcommand)]
    action: CacheAction,
}

#[derive(Subcommand)]
enum CacheAction {
    /// Delete every cached result
    Clear {
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CACHE_CORRUPT: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Relations(args) => cmd_relations(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Pushforward(args) => cmd_pushforward(args),
        Command::Cache(args) => cmd_cache(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: anyhow::Error,
}

fn usage_err(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: anyhow::anyhow!(msg.into()),
    }
}

fn check_common(genus: u32, points: u32, jobs: usize) -> Result<(), CliError> {
    if genus < 2 {
        return Err(usage_err(format!("genus must be at least 2, got {}", genus)));
    }
    if !(1..=4).contains(&points) {
        return Err(usage_err(format!(
            "points must be between 1 and 4, got {}",
            points
        )));
    }
    if jobs < 1 {
        return Err(usage_err("jobs must be at least 1"));
    }
    Ok(())
}

fn init_pool(jobs: usize) {
    // ignore the error from a second initialisation in the same process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
}

fn cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("TAUTREL_CACHE_DIR").map(PathBuf::from))
}

fn cache_path(
    dir: &Path,
    genus: u32,
    n: u32,
    multiplier: Option<&WeightedPartition>,
    orbit_reduce: bool,
) -> PathBuf {
    let mut hasher = Sha256::new();
    hasher.update(format!(
        "v{}:g{}:n{}:orbit{}:mult{}",
        CACHE_FORMAT_VERSION,
        genus,
        n,
        orbit_reduce,
        multiplier
            .map(|m| tautrel::serial::partition_to_json(m).to_string())
            .unwrap_or_default(),
    ));
    dir.join(format!("{:x}.json", hasher.finalize()))
}

fn load_or_compute(
    dir: Option<&Path>,
    ctx: &GenusContext,
    n: u32,
    multiplier: Option<&WeightedPartition>,
    orbit_reduce: bool,
) -> Result<RelationVectorMap, CliError> {
    let path = dir.map(|d| cache_path(d, ctx.genus(), n, multiplier, orbit_reduce));

    if let Some(path) = &path {
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| CliError {
                code: EXIT_CACHE_CORRUPT,
                message: anyhow::anyhow!(
                    "unreadable cache entry {}: {}; delete it or run `tautrel cache clear`",
                    path.display(),
                    e
                ),
            })?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError {
                code: EXIT_CACHE_CORRUPT,
                message: anyhow::anyhow!(
                    "corrupt cache entry {}: {}; delete it or run `tautrel cache clear` to recompute",
                    path.display(),
                    e
                ),
            })?;
            if value["format_version"].as_u64() == Some(CACHE_FORMAT_VERSION as u64) {
                return rvm_from_json(&value).map_err(|e| CliError {
                    code: EXIT_CACHE_CORRUPT,
                    message: anyhow::anyhow!(
                        "corrupt cache entry {}: {}; delete it or run `tautrel cache clear` to recompute",
                        path.display(),
                        e
                    ),
                });
            }
            // stale format version: fall through and recompute
        }
    }

    let rvm = expand_pushforward(ctx, n, multiplier, orbit_reduce);

    if let Some(path) = &path {
        if let Some(parent) = path.parent() {
            let _ = fs::create_dir_all(parent);
        }
        let mut value = rvm_to_json(&rvm, &basis_of_degree(rvm.degree));
        value
            .as_object_mut()
            .unwrap()
            .insert("format_version".into(), CACHE_FORMAT_VERSION.into());
        let _ = fs::write(path, serde_json::to_string_pretty(&value).unwrap());
    }
    Ok(rvm)
}

fn cmd_relations(args: RelationsArgs) -> Result<u8, CliError> {
    check_common(args.genus, args.points, args.jobs)?;
    if args.genus + 1 < args.points {
        return Err(usage_err(format!(
            "n = {} exceeds the exponent g + 1 = {}",
            args.points,
            args.genus + 1
        )));
    }
    init_pool(args.jobs);

    let ctx = GenusContext::new(args.genus);
    let multiplier = match &args.multiplier {
        None => None,
        Some(expr) => {
            let mono = parse_point_monomial(expr, args.points)
                .map_err(|e| usage_err(format!("bad multiplier at position {}: {}", e.pos, e.msg)))?;
            Some(normal_form(&mono))
        }
    };

    let dir = cache_dir(args.cache_dir);
    let rvm = load_or_compute(
        dir.as_deref(),
        &ctx,
        args.points,
        multiplier.as_ref(),
        !args.no_orbit_reduction,
    )?;

    let mut rs = RelationSet::new(ctx, rvm.degree);
    rs.absorb(&rvm);
    rs.reduce();

    let output = match args.format {
        Format::Text => {
            let mut s = format!(
                "# g={} n={} degree={} rank={}\n",
                args.genus,
                args.points,
                rs.degree(),
                rs.rank().unwrap()
            );
            for line in rs.relation_lines() {
                s.push_str(&line);
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let v = relation_set_to_json(&rvm, &rs);
            let mut s = serde_json::to_string_pretty(&v).unwrap();
            s.push('\n');
            s
        }
        Format::Csv => relation_set_to_csv(&rs),
    };

    match &args.out {
        None => print!("{}", output),
        Some(path) => fs::write(path, output).map_err(|e| CliError {
            code: EXIT_USAGE,
            message: anyhow::anyhow!("cannot write {}: {}", path.display(), e),
        })?,
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    if args.genus < 2 {
        return Err(usage_err("genus must be at least 2"));
    }
    if args.jobs < 1 {
        return Err(usage_err("jobs must be at least 1"));
    }
    init_pool(args.jobs);

    let ctx = GenusContext::new(args.genus);
    let sets = standard_sets(&ctx, &[2, 3], 6);
    let report = match verify(args.genus, &sets) {
        Ok(r) => r,
        Err(OracleError::NoGoldenData(g)) => {
            return Err(usage_err(format!("no golden data for genus {}", g)))
        }
        Err(e) => return Err(usage_err(e.to_string())),
    };
    for line in report.lines() {
        println!("{}", line);
    }
    Ok(if report.all_found() {
        0
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn cmd_pushforward(args: PushforwardArgs) -> Result<u8, CliError> {
    check_common(args.genus, args.points, 1)?;
    let ctx = GenusContext::new(args.genus);
    let mono = parse_point_monomial(&args.expr, args.points)
        .map_err(|e| usage_err(format!("parse error at position {}: {}", e.pos, e.msg)))?;
    println!("{}", pushforward(&normal_form(&mono), &ctx));
    Ok(0)
}

fn cmd_cache(args: CacheArgs) -> Result<u8, CliError> {
    match args.action {
        CacheAction::Clear { cache_dir: flag } => {
            let Some(dir) = cache_dir(flag) else {
                return Err(usage_err(
                    "no cache directory: pass --cache-dir or set TAUTREL_CACHE_DIR",
                ));
            };
            let mut removed = 0usize;
            if dir.is_dir() {
                for entry in fs::read_dir(&dir).map_err(|e| {
                    usage_err(format!("cannot read {}: {}", dir.display(), e))
                })? {
                    let entry = entry.map_err(|e| usage_err(e.to_string()))?;
                    let path = entry.path();
                    if path.extension().is_some_and(|x| x == "json") {
                        fs::remove_file(&path).map_err(|e| {
                            usage_err(format!("cannot remove {}: {}", path.display(), e))
                        })?;
                        removed += 1;
                    }
                }
            }
            println!("removed {} cached result(s) from {}", removed, dir.display());
            Ok(0)
        }
    }
}
