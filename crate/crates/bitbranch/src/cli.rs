//! Command-line entry points: transform programs, check the rule catalog,
//! replay transformed programs, and dump the catalog.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ast::Program;
use crate::interp::{shadow_replay, NondetStream, ReplayOutcome, DEFAULT_BUDGET};
use crate::oracle::{self, CheckPlan};
use crate::parser::{parse_with_options, print, ParseOptions};
use crate::rules::Catalog;
use crate::transform::{transform_program_with, Strategy, TransformConfig, TransformReport};

/// Exit codes: success / input or check failure / internal invariant breach
/// / replay violation.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Parser)]
#[command(
    name = "bitbranch",
    about = "Rewrites bitvector operations into guarded integer over-approximations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    WeakenFirst,
    RewriteFirst,
    RewriteOnly,
    WeakenOnly,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::WeakenFirst => Strategy::WeakenFirst,
            StrategyArg::RewriteFirst => Strategy::RewriteFirst,
            StrategyArg::RewriteOnly => Strategy::RewriteOnly,
            StrategyArg::WeakenOnly => Strategy::WeakenOnly,
        }
    }
}

#[derive(Args, Clone)]
struct TransformOpts {
    /// Bit width of the modeled machine integers.
    #[arg(long, default_value_t = crate::ast::DEFAULT_WIDTH)]
    width: u32,
    #[arg(long, value_enum, default_value = "weaken-first")]
    strategy: StrategyArg,
    /// Skip hoisting nested bitwise sub-expressions into temporaries.
    #[arg(long)]
    no_normalize: bool,
}

impl TransformOpts {
    fn config(&self) -> TransformConfig {
        TransformConfig {
            width: self.width,
            normalize: !self.no_normalize,
            strategy: self.strategy.into(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Transform a program and print the result.
    Transform {
        file: PathBuf,
        #[command(flatten)]
        opts: TransformOpts,
        /// Output path (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write a JSON firing report to this path ("-" for stdout).
        #[arg(long)]
        stats_json: Option<String>,
        /// Apply a named rule mutation before transforming.
        #[arg(long)]
        mutate: Option<String>,
    },
    /// Re-prove every catalog rule by exhaustive fixed-width enumeration.
    CheckRules {
        /// Widths at which every obligation is enumerated.
        #[arg(long, value_delimiter = ',', default_values_t = [4u32, 6])]
        widths: Vec<u32>,
        /// Extra width for obligations with at most two enumerated values
        /// (0 disables it).
        #[arg(long, default_value_t = 8)]
        wide_width: u32,
        /// Apply a named rule mutation before checking.
        #[arg(long)]
        mutate: Option<String>,
    },
    /// Transform a program, then re-execute it with havocs resolved to the
    /// exact values and compare traces.
    Replay {
        file: PathBuf,
        #[command(flatten)]
        opts: TransformOpts,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds to replay, starting at --seed.
        #[arg(long, default_value_t = 1000)]
        seeds: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Apply a named rule mutation before transforming.
        #[arg(long)]
        mutate: Option<String>,
        /// Print the original program's trace for each seed.
        #[arg(long)]
        dump_trace: bool,
    },
    /// Replay every `.c` file in a directory and report rule coverage.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        opts: TransformOpts,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        seeds: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write one flat key/value record per file to this path.
        #[arg(long)]
        stats_json: Option<PathBuf>,
    },
    /// Print one audit line per rule in the catalog.
    Catalog {
        #[arg(long, default_value_t = crate::ast::DEFAULT_WIDTH)]
        width: u32,
    },
    /// List the checked-in rule mutations.
    Mutations,
}

#[derive(Debug)]
enum CliError {
    /// Bad input: unreadable file, parse error, unknown mutation name.
    Input(String),
    /// A broken internal invariant (transformer output the replay harness
    /// cannot interpret).
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_FAILED,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

fn load(path: &Path, width: u32) -> Result<Program, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_with_options(
        &text,
        ParseOptions {
            width,
            allow_reserved: false,
        },
    )
    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn catalog_for(width: u32, mutate: Option<&str>) -> Result<Catalog, CliError> {
    match mutate {
        None => Ok(Catalog::for_width(width)),
        Some(name) => oracle::mutated_catalog(name, width)
            .ok_or_else(|| CliError::Input(format!("unknown mutation `{name}`"))),
    }
}

fn report_json(report: &TransformReport) -> String {
    let fired: serde_json::Map<String, serde_json::Value> = report
        .fired
        .iter()
        .map(|(k, v)| (k.clone(), serde_json::Value::from(*v)))
        .collect();
    serde_json::json!({
        "fired": fired,
        "guards_inserted": report.guards_inserted,
        "temps_introduced": report.temps_introduced,
    })
    .to_string()
}

/// Per-file replay summary: seeds run, seeds clean, first failure detail.
struct ReplayStats {
    seeds_run: u64,
    seeds_ok: u64,
    violation: bool,
    first_failure: Option<String>,
}

fn replay_program(
    original: &Program,
    transformed: &Program,
    seed0: u64,
    seeds: u64,
    budget: u64,
) -> Result<ReplayStats, CliError> {
    let mut stats = ReplayStats {
        seeds_run: 0,
        seeds_ok: 0,
        violation: false,
        first_failure: None,
    };
    for seed in seed0..seed0 + seeds {
        stats.seeds_run += 1;
        match shadow_replay(original, transformed, seed, budget) {
            Ok(ReplayOutcome::Ok) => stats.seeds_ok += 1,
            Ok(ReplayOutcome::Violation(v)) => {
                stats.violation = true;
                if stats.first_failure.is_none() {
                    stats.first_failure = Some(format!(
                        "seed {seed}: violation at stmt {}: assume({}) is false",
                        v.stmt_index, v.cond_text
                    ));
                }
            }
            Ok(ReplayOutcome::TraceMismatch { detail }) => {
                if stats.first_failure.is_none() {
                    stats.first_failure = Some(format!("seed {seed}: trace mismatch: {detail}"));
                }
            }
            Err(e) => return Err(CliError::Internal(e.to_string())),
        }
    }
    Ok(stats)
}

/// Runs the CLI; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Transform {
            file,
            opts,
            output,
            stats_json,
            mutate,
        } => {
            let program = load(&file, opts.width)?;
            let catalog = catalog_for(opts.width, mutate.as_deref())?;
            let (out, report) = transform_program_with(&program, &opts.config(), catalog);
            let text = print(&out);
            match &output {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            if let Some(dest) = stats_json {
                let json = report_json(&report);
                if dest == "-" {
                    println!("{json}");
                } else {
                    std::fs::write(&dest, json)
                        .map_err(|e| CliError::Input(format!("{dest}: {e}")))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::CheckRules {
            widths,
            wide_width,
            mutate,
        } => {
            let plan = CheckPlan {
                small_widths: widths,
                wide_width: (wide_width > 0).then_some(wide_width),
                wide_max_vars: 2,
            };
            // Resolve the mutation once so an unknown name errors early.
            if let Some(name) = &mutate {
                catalog_for(4, Some(name))?;
            }
            let verdicts = oracle::check_catalog_with(&plan, |w| {
                catalog_for(w, mutate.as_deref()).expect("mutation resolved above")
            });
            let mut failed = false;
            for v in &verdicts {
                println!("{v}");
                failed |= !v.is_pass();
            }
            Ok(if failed { EXIT_FAILED } else { EXIT_OK })
        }
        Command::Replay {
            file,
            opts,
            seed,
            seeds,
            budget,
            mutate,
            dump_trace,
        } => {
            if seeds == 0 {
                eprintln!("warning: --seeds 0, nothing replayed");
                return Ok(EXIT_OK);
            }
            let program = load(&file, opts.width)?;
            let catalog = catalog_for(opts.width, mutate.as_deref())?;
            let (transformed, _) = transform_program_with(&program, &opts.config(), catalog);
            if dump_trace {
                for s in seed..seed + seeds {
                    let mut stream = NondetStream::new(s, program.width);
                    let trace = crate::interp::run(&program, &mut stream, budget);
                    eprintln!("seed {s}:");
                    eprint!("{}", trace.dump());
                }
            }
            let stats = replay_program(&program, &transformed, seed, seeds, budget)?;
            if let Some(detail) = &stats.first_failure {
                println!("{}: {detail}", file.display());
                return Ok(EXIT_VIOLATION);
            }
            println!("{}: ok over {} seeds", file.display(), stats.seeds_run);
            Ok(EXIT_OK)
        }
        Command::Corpus {
            dir,
            opts,
            seed,
            seeds,
            budget,
            stats_json,
        } => {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "c"))
                .collect();
            files.sort();
            if files.is_empty() {
                eprintln!("warning: {}: no .c files", dir.display());
                return Ok(EXIT_OK);
            }
            let mut any_failed = false;
            let mut any_violation = false;
            let mut total_fired: u64 = 0;
            let mut distinct_rules = std::collections::BTreeSet::new();
            let mut table = String::new();
            let mut sidecar = String::new();
            writeln!(
                table,
                "{:<28} {:>6} {:>6} {:>6} {:>6}  status",
                "file", "fired", "temps", "seeds", "ok"
            )
            .unwrap();
            for file in &files {
                let name = file
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let (fired_total, temps, stats, status, rules) =
                    match corpus_one(file, &opts, seed, seeds, budget) {
                        Ok((report, stats)) => {
                            let status = match &stats.first_failure {
                                None => "ok".to_string(),
                                Some(detail) => {
                                    any_failed = true;
                                    any_violation |= stats.violation;
                                    detail.clone()
                                }
                            };
                            (
                                report.total_fired(),
                                report.temps_introduced,
                                stats,
                                status,
                                report.fired.keys().cloned().collect::<Vec<_>>(),
                            )
                        }
                        Err(err) => {
                            any_failed = true;
                            (
                                0,
                                0,
                                ReplayStats {
                                    seeds_run: 0,
                                    seeds_ok: 0,
                                    violation: false,
                                    first_failure: None,
                                },
                                format!("failed: {}", err.message()),
                                Vec::new(),
                            )
                        }
                    };
                total_fired += fired_total;
                distinct_rules.extend(rules.iter().cloned());
                writeln!(
                    table,
                    "{:<28} {:>6} {:>6} {:>6} {:>6}  {status}",
                    name, fired_total, temps, stats.seeds_run, stats.seeds_ok
                )
                .unwrap();
                writeln!(
                    sidecar,
                    "FILE={name} FIRED={fired_total} TEMPS={temps} SEEDS={} OK={} RULES={}",
                    stats.seeds_run,
                    stats.seeds_ok,
                    rules.join(",")
                )
                .unwrap();
            }
            writeln!(
                table,
                "total: {} firings across {} distinct rules in {} files",
                total_fired,
                distinct_rules.len(),
                files.len()
            )
            .unwrap();
            print!("{table}");
            if let Some(path) = stats_json {
                std::fs::write(&path, sidecar)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            Ok(if any_violation {
                EXIT_VIOLATION
            } else if any_failed {
                EXIT_FAILED
            } else {
                EXIT_OK
            })
        }
        Command::Catalog { width } => {
            print!("{}", Catalog::for_width(width).dump());
            Ok(EXIT_OK)
        }
        Command::Mutations => {
            for m in oracle::mutations() {
                println!("{} (target {})", m.name, m.target);
            }
            Ok(EXIT_OK)
        }
    }
}

fn corpus_one(
    file: &Path,
    opts: &TransformOpts,
    seed: u64,
    seeds: u64,
    budget: u64,
) -> Result<(TransformReport, ReplayStats), CliError> {
    let program = load(file, opts.width)?;
    let catalog = Catalog::for_width(opts.width);
    let (transformed, report) = transform_program_with(&program, &opts.config(), catalog);
    let stats = replay_program(&program, &transformed, seed, seeds, budget)?;
    Ok((report, stats))
}
