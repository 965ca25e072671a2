//! The `bpweave` command line.

pub mod config;
pub mod project;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, SystemTime};

use bpweave::export::{self, Highlight, RenderError};
use bpweave::runner::{self, ExecOptions};
use bpweave::scenario::{self, Criterion, Weights};
use bpweave::space::{count_runs, enumerate_runs, uniform_sample, SpaceError};
use bpweave::{explore, CheckedModel, ExploreOptions, RunGraph, Scenario};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use project::Project;

/// Process exit codes, one per error class.
pub mod exit {
    pub const OK: u8 = 0;
    /// `run`: at least one scenario failed or errored.
    pub const RUN_FAILED: u8 = 1;
    /// DSL diagnostics, unreadable project, config or scenario file.
    pub const INPUT: u8 = 2;
    /// The run set cannot be sampled uniformly (a cycle, or no completed run).
    pub const NOT_SAMPLEABLE: u8 = 3;
    pub const UNSUPPORTED_CRITERION: u8 = 4;
    pub const RENDERER_NOT_FOUND: u8 = 5;
    pub const ADAPTER_MISCONFIGURED: u8 = 6;
    pub const RENDERER_FAILED: u8 = 7;
    /// Exploration hit the node budget or the depth bound where an exact
    /// answer was needed.
    pub const LIMIT: u8 = 8;
    /// An output file could not be written.
    pub const OUTPUT: u8 = 9;
    pub const USAGE: u8 = 64;
}

pub const SAMPLES_FILE: &str = "samples.ndjson";
pub const ENSEMBLE_FILE: &str = "ensemble.ndjson";
pub const REPORT_NDJSON: &str = "report.ndjson";
pub const REPORT_TXT: &str = "report.txt";

#[derive(Debug, Parser)]
#[command(
    name = "bpweave",
    version,
    about = "Weave behavioral stories into test scenarios",
    after_help = "Exit codes:\n  0   success\n  1   run: a scenario failed\n  2   DSL errors or unreadable input\n  3   --uniform on a model without a finite set of runs\n  4   unsupported ensemble criterion\n  5   pdf renderer not found\n  6   adapter misconfigured\n  7   pdf renderer failed\n  8   exploration limit reached\n  9   output not writable\n  64  usage error"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check a project, printing diagnostics
    Check(ProjectArg),
    /// Print the number of maximal runs of the model
    Count {
        #[command(flatten)]
        project: ProjectArg,
        /// Explore at most this many events deep
        #[arg(long, value_name = "D")]
        max_depth: Option<usize>,
    },
    /// Sample scenarios into samples.ndjson
    Sample {
        #[command(flatten)]
        project: ProjectArg,
        /// Number of scenarios to draw
        #[arg(short = 'n', value_name = "NUM", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Random seed (default: `seed` from config.toml, else 0)
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Draw uniformly over all runs instead of random walks (acyclic models only)
        #[arg(long)]
        uniform: bool,
        /// Cap on scenario length / exploration depth
        #[arg(long, value_name = "D")]
        max_depth: Option<usize>,
        /// Output file
        #[arg(short = 'o', long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Select a small set of scenarios that covers the model into ensemble.ndjson
    Ensemble {
        #[command(flatten)]
        project: ProjectArg,
        /// Coverage criterion: events, pairs, triples, edges or diversity
        #[arg(short = 'c', long = "criteria", value_name = "CRITERIA")]
        criteria: String,
        /// Maximum number of scenarios in the ensemble
        #[arg(long, value_name = "B", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        /// Random seed for the walk pool of large or cyclic models
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Cap on exploration depth and walk length
        #[arg(long, value_name = "D")]
        max_depth: Option<usize>,
        /// Output file
        #[arg(short = 'o', long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Export the run graph as model.gv, model.json or model.pdf
    Analyze {
        #[command(flatten)]
        project: ProjectArg,
        /// Output format
        #[arg(short = 'f', long, value_enum, default_value_t = Format::Gv)]
        format: Format,
        /// Scenario file whose runs are highlighted
        #[arg(long, value_name = "FILE")]
        highlight: Option<PathBuf>,
        /// Explore at most this many events deep; deeper nodes become dashed frontier nodes
        #[arg(long, value_name = "D")]
        max_depth: Option<usize>,
        /// Output file
        #[arg(short = 'o', long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Execute scenarios against the system under test and write report.ndjson and report.txt
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct ProjectArg {
    /// Project directory (or a single .story file)
    #[arg(value_name = "PATH")]
    path: PathBuf,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false, args = ["input", "sample"])]
struct RunArgs {
    #[command(flatten)]
    project: ProjectArg,
    /// Scenario file to execute
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Execute N random-walk scenarios instead of a file
    #[arg(long, value_name = "N")]
    sample: Option<usize>,
    /// Adapter kind: mock, exec or http (default: from config.toml, else mock)
    #[arg(long, value_name = "NAME")]
    adapter: Option<String>,
    /// Random seed for --sample
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Cap on sampled scenario length
    #[arg(long, value_name = "D")]
    max_depth: Option<usize>,
    /// Scenarios executed concurrently
    #[arg(long, value_name = "W")]
    workers: Option<usize>,
    /// Keep dispatching a scenario's events after a failure
    #[arg(long)]
    continue_on_failure: bool,
    /// Directory for the report files
    #[arg(short = 'o', long, value_name = "DIR")]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Gv,
    Pdf,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Gv => "gv",
            Format::Pdf => "pdf",
        }
    }
}

/// A command's failure: exit code plus what goes to stderr.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn warn(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", line.as_ref());
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            io.warn(format!("error: {}", f.message));
            f.code
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> Outcome {
    match command {
        Command::Check(p) => cmd_check(&p.path, io),
        Command::Count { project, max_depth } => cmd_count(&project.path, max_depth, io),
        Command::Sample {
            project,
            n,
            seed,
            uniform,
            max_depth,
            output,
        } => cmd_sample(
            &project.path,
            n as usize,
            seed,
            uniform,
            max_depth,
            output,
            io,
        ),
        Command::Ensemble {
            project,
            criteria,
            budget,
            seed,
            max_depth,
            output,
        } => cmd_ensemble(
            &project.path,
            &criteria,
            budget as usize,
            seed,
            max_depth,
            output,
            io,
        ),
        Command::Analyze {
            project,
            format,
            highlight,
            max_depth,
            output,
        } => cmd_analyze(&project.path, format, highlight, max_depth, output, io),
        Command::Run(args) => cmd_run(args, io),
    }
}

fn open(path: &Path, io: &mut Io) -> Result<(Project, CheckedModel), Failure> {
    let project = Project::open(path).map_err(|m| fail(exit::INPUT, m))?;
    match project.load() {
        Ok(loaded) => {
            for w in &loaded.warnings {
                io.warn(w);
            }
            Ok((project, loaded.model))
        }
        Err(diags) => {
            for d in &diags {
                io.warn(d);
            }
            let n = diags.len();
            Err(fail(
                exit::INPUT,
                format!(
                    "{n} diagnostic{} in {}",
                    if n == 1 { "" } else { "s" },
                    path.display()
                ),
            ))
        }
    }
}

fn explore_opts(project: &Project, max_depth: Option<usize>) -> ExploreOptions {
    ExploreOptions {
        max_depth: Some(max_depth.unwrap_or(project.config.max_depth)),
        max_nodes: Some(project.config.max_nodes),
    }
}

fn write_output(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| fail(exit::OUTPUT, format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| fail(exit::OUTPUT, format!("{}: {e}", path.display())))
}

fn budget_failure(g: &RunGraph) -> Failure {
    fail(
        exit::LIMIT,
        format!("exploration stopped after {} nodes; raise `max_nodes` in config.toml or pass --max-depth", g.nodes.len()),
    )
}

fn cmd_check(path: &Path, io: &mut Io) -> Outcome {
    let (_, model) = open(path, io)?;
    io.say(format!(
        "ok: {} stories, {} event names",
        model.stories.len(),
        model.vocabulary.len()
    ));
    Ok(exit::OK)
}

fn cmd_count(path: &Path, max_depth: Option<usize>, io: &mut Io) -> Outcome {
    let (project, model) = open(path, io)?;
    let graph = match explore(&model, explore_opts(&project, max_depth)) {
        Ok(g) => g,
        Err(SpaceError::BudgetExceeded(g)) => return Err(budget_failure(&g)),
        Err(e) => return Err(fail(exit::LIMIT, e.to_string())),
    };
    let size = format!(
        "(nodes: {}, edges: {})",
        graph.nodes.len(),
        graph.edges.len()
    );
    if !graph.acyclic {
        io.say(format!("cyclic {size}"));
    } else if graph.is_truncated() {
        io.say(format!(
            "truncated at depth {} {size}",
            graph.depth_bound.unwrap_or_default()
        ));
    } else {
        let n = count_runs(&graph).map_err(|e| fail(exit::LIMIT, e.to_string()))?;
        io.say(n.to_string());
    }
    Ok(exit::OK)
}

fn describe_cycle(graph: &RunGraph) -> String {
    match graph.find_cycle() {
        Some(edges) => {
            let mut labels: Vec<String> = edges
                .iter()
                .map(|&e| graph.edges[e].event.to_string())
                .collect();
            labels.push(labels[0].clone());
            format!("the model has a cycle: {}", labels.join(" -> "))
        }
        None => "the model has a cycle".into(),
    }
}

fn cmd_sample(
    path: &Path,
    n: usize,
    seed: Option<u64>,
    uniform: bool,
    max_depth: Option<usize>,
    output: Option<PathBuf>,
    io: &mut Io,
) -> Outcome {
    let (project, model) = open(path, io)?;
    let seed = seed.unwrap_or(project.config.seed);
    let scenarios = if uniform {
        let graph = match explore(&model, explore_opts(&project, max_depth)) {
            Ok(g) => g,
            Err(SpaceError::BudgetExceeded(g)) => return Err(budget_failure(&g)),
            Err(e) => return Err(fail(exit::LIMIT, e.to_string())),
        };
        match uniform_sample(&graph, n, seed) {
            Ok(s) => s,
            Err(SpaceError::CyclicGraph) => {
                return Err(fail(
                    exit::NOT_SAMPLEABLE,
                    format!("{}; uniform sampling needs a finite set of runs, drop --uniform to sample random walks", describe_cycle(&graph)),
                ))
            }
            Err(SpaceError::NoCompletedRuns) => {
                return Err(fail(exit::NOT_SAMPLEABLE, "every run of the model ends in a deadlock; nothing to sample"))
            }
            Err(SpaceError::TruncatedGraph) => {
                return Err(fail(
                    exit::LIMIT,
                    format!(
                        "runs are longer than the depth bound {}; raise --max-depth or drop --uniform",
                        graph.depth_bound.unwrap_or_default()
                    ),
                ))
            }
            Err(e) => return Err(fail(exit::LIMIT, e.to_string())),
        }
    } else {
        scenario::sample_walk(
            &model,
            n,
            seed,
            max_depth.unwrap_or(project.config.max_depth),
        )
    };
    let out = output.unwrap_or_else(|| project.dir.join(SAMPLES_FILE));
    write_output(&out, scenario::write_scenarios(&scenarios).as_bytes())?;
    io.say(format!(
        "wrote {} scenarios to {}",
        scenarios.len(),
        out.display()
    ));
    Ok(exit::OK)
}

fn cmd_ensemble(
    path: &Path,
    criteria: &str,
    budget: usize,
    seed: Option<u64>,
    max_depth: Option<usize>,
    output: Option<PathBuf>,
    io: &mut Io,
) -> Outcome {
    let criterion = Criterion::from_str(criteria)
        .map_err(|e| fail(exit::UNSUPPORTED_CRITERION, e.to_string()))?;
    let (project, model) = open(path, io)?;
    let cfg = &project.config;
    let seed = seed.unwrap_or(cfg.seed);
    let depth = max_depth.unwrap_or(cfg.max_depth);
    let graph = match explore(&model, explore_opts(&project, Some(depth))) {
        Ok(g) => g,
        Err(SpaceError::BudgetExceeded(g)) => *g,
        Err(e) => return Err(fail(exit::LIMIT, e.to_string())),
    };
    let exact = graph.acyclic && !graph.is_truncated();
    let enumerable = exact
        && count_runs(&graph)
            .is_ok_and(|c| c <= bpweave::RunCount::from(cfg.ensemble.enumerate_limit));
    let pool: Vec<Scenario> = if enumerable {
        enumerate_runs(&graph, None).map_err(|e| fail(exit::LIMIT, e.to_string()))?
    } else {
        scenario::sample_walk(&model, cfg.ensemble.walk_pool, seed, depth)
    };
    let weights = Weights(cfg.weights.clone());
    let ens = scenario::ensemble(&pool, criterion, budget, Some(&graph), &weights).map_err(
        |e| match e {
            scenario::ScenarioError::EmptyPool => fail(
                exit::NOT_SAMPLEABLE,
                "the model has no completed runs to choose from",
            ),
            e => fail(exit::LIMIT, e.to_string()),
        },
    )?;
    let out = output.unwrap_or_else(|| project.dir.join(ENSEMBLE_FILE));
    write_output(&out, scenario::write_scenarios(&ens.scenarios).as_bytes())?;
    let r = ens.coverage_ratio;
    let value = *r.numer() as f64 / *r.denom() as f64;
    io.say(format!(
        "coverage ratio: {value:?} ({}/{})",
        ens.covered.len(),
        ens.feasible
    ));
    io.say(format!("members: {}", ens.scenarios.len()));
    if let Some(d) = ens.min_distance {
        io.say(format!("min distance: {d}"));
    }
    if !exact {
        io.warn("warning: coverage is measured against the sampled pool, not the full model");
    }
    Ok(exit::OK)
}

fn cmd_analyze(
    path: &Path,
    format: Format,
    highlight: Option<PathBuf>,
    max_depth: Option<usize>,
    output: Option<PathBuf>,
    io: &mut Io,
) -> Outcome {
    let (project, model) = open(path, io)?;
    let graph = match explore(&model, explore_opts(&project, max_depth)) {
        Ok(g) => g,
        Err(SpaceError::BudgetExceeded(g)) => {
            io.warn(format!(
                "warning: exploration stopped after {} nodes; exporting the partial graph",
                g.nodes.len()
            ));
            *g
        }
        Err(e) => return Err(fail(exit::LIMIT, e.to_string())),
    };
    let hl = match &highlight {
        Some(file) => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| fail(exit::INPUT, format!("{}: {e}", file.display())))?;
            let scenarios = scenario::read_scenarios(&text)
                .map_err(|e| fail(exit::INPUT, format!("{}: {e}", file.display())))?;
            let h = Highlight::resolve(&graph, &scenarios);
            for &i in &h.unresolved {
                io.warn(format!(
                    "warning: {}:{}: scenario is not a run of this model; not highlighted",
                    file.display(),
                    i + 1
                ));
            }
            Some(h)
        }
        None => None,
    };
    let out = output.unwrap_or_else(|| project.dir.join(format!("model.{}", format.extension())));
    match format {
        Format::Json => write_output(&out, export::to_structured(&graph, hl.as_ref()).as_bytes())?,
        Format::Gv => write_output(
            &out,
            export::to_graph_description(&graph, hl.as_ref()).as_bytes(),
        )?,
        Format::Pdf => {
            let desc = export::to_graph_description(&graph, hl.as_ref());
            let renderer = &project.config.renderer;
            let renderer = if renderer.contains('/') && Path::new(renderer).is_relative() {
                project.dir.join(renderer).to_string_lossy().into_owned()
            } else {
                renderer.clone()
            };
            export::render_pdf(&desc, &out, &renderer).map_err(|e| match e {
                RenderError::NotFound { .. } => fail(exit::RENDERER_NOT_FOUND, e.to_string()),
                e => fail(exit::RENDERER_FAILED, e.to_string()),
            })?;
        }
    }
    io.say(format!(
        "wrote {} ({} nodes, {} edges) to {}",
        format.extension(),
        graph.nodes.len(),
        graph.edges.len(),
        out.display()
    ));
    Ok(exit::OK)
}

/// RFC 3339 UTC; `SOURCE_DATE_EPOCH` pins it for reproducible reports.
fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .map(|secs| SystemTime::UNIX_EPOCH + Duration::from_secs(secs))
        .unwrap_or_else(SystemTime::now);
    humantime::format_rfc3339_seconds(now).to_string()
}

fn cmd_run(args: RunArgs, io: &mut Io) -> Outcome {
    let (project, model) = open(&args.project.path, io)?;
    let cfg = &project.config;
    let seed = args.seed.unwrap_or(cfg.seed);
    let max_depth = args.max_depth.unwrap_or(cfg.max_depth);
    let (scenarios, source) = match (&args.input, args.sample) {
        (Some(file), _) => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| fail(exit::INPUT, format!("{}: {e}", file.display())))?;
            let s = scenario::read_scenarios(&text)
                .map_err(|e| fail(exit::INPUT, format!("{}: {e}", file.display())))?;
            (s, json!({ "input": file.display().to_string() }))
        }
        (None, Some(n)) => (
            scenario::sample_walk(&model, n, seed, max_depth),
            json!({ "sample": n, "max_depth": max_depth }),
        ),
        (None, None) => unreachable!("clap requires a scenario source"),
    };
    let adapter = cfg
        .adapter(args.adapter.as_deref(), &project.dir)
        .and_then(|a| a.validate().map(|_| a))
        .map_err(|e| fail(exit::ADAPTER_MISCONFIGURED, e.to_string()))?;
    let options = ExecOptions {
        stop_on_failure: cfg.stop_on_failure && !args.continue_on_failure,
        workers: args.workers.unwrap_or(cfg.workers).max(1),
    };
    let tagged: Vec<_> = scenarios
        .into_iter()
        .map(|s| {
            let tags = runner::tags_for(&model, &s, &cfg.tags);
            (s, tags)
        })
        .collect();
    let results = runner::execute_all(&tagged, &adapter, &options)
        .map_err(|e| fail(exit::ADAPTER_MISCONFIGURED, e.to_string()))?;
    let echo = json!({
        "adapter": adapter.kind(),
        "seed": seed,
        "source": source,
        "stop_on_failure": options.stop_on_failure,
        "tags": cfg.tags,
    });
    let report = runner::report(&results, &timestamp(), echo);
    let mut table = report.to_table();
    let failures: Vec<String> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.failed())
        .map(|(i, r)| {
            let first = r
                .outcomes
                .iter()
                .find(|o| o.status != runner::Status::Pass && o.status != runner::Status::Skipped)
                .map(|o| {
                    if o.detail.is_empty() {
                        format!("{} {}", o.event, o.status)
                    } else {
                        format!("{} {}: {}", o.event, o.status, o.detail)
                    }
                })
                .unwrap_or_default();
            format!("  scenario {}: {first}", i + 1)
        })
        .collect();
    if !failures.is_empty() {
        table.push_str("\nfailures:\n");
        for f in &failures {
            table.push_str(f);
            table.push('\n');
        }
    }
    let dir = args.output.unwrap_or_else(|| project.dir.clone());
    write_output(&dir.join(REPORT_NDJSON), report.to_ndjson().as_bytes())?;
    write_output(&dir.join(REPORT_TXT), table.as_bytes())?;
    let _ = io.out.write_all(table.as_bytes());
    Ok(if results.iter().any(|r| r.failed()) {
        exit::RUN_FAILED
    } else {
        exit::OK
    })
}
