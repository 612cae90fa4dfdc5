use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use logibench::checker::check_plan;
use logibench::facts_io::{build_instance, build_plan, parse_facts, serialize_plan, FactSet};
use logibench::generator::{generate, load_batch, run_batch, GenConfig};
use logibench::json::ReportDoc;
use logibench::model::{Base, DomainVariant, Instance};
use logibench::planner::{
    compute_assignment, solve_min_makespan, Assignment, Limits, PositionEncoding, SolveResult, DEFAULT_NODE_CAP,
};

#[derive(Parser)]
#[command(name = "logibench", version = concat!("v", env!("CARGO_PKG_VERSION")), about = "Warehouse intra-logistics benchmark toolkit")]
#[command(propagate_version = true, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances or a batch of instances
    Gen(GenArgs),
    /// Validate a plan against an instance
    Check(CheckArgs),
    /// Compute a minimal-makespan plan
    Solve(SolveArgs),
    /// Serve the HTTP API and the studio assets
    Serve(ServeArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Grid width
    #[arg(short = 'x', default_value_t = 1)]
    x: u32,
    /// Grid height
    #[arg(short = 'y', default_value_t = 1)]
    y: u32,
    /// Storage-cluster width
    #[arg(short = 'X', default_value_t = 2)]
    cluster_x: u32,
    /// Storage-cluster height
    #[arg(short = 'Y', default_value_t = 1)]
    cluster_y: u32,
    /// Picking stations
    #[arg(short = 'p', default_value_t = 0)]
    stations: u32,
    /// Shelves
    #[arg(short = 's', default_value_t = 0)]
    shelves: u32,
    /// Robots
    #[arg(short = 'r', default_value_t = 0)]
    robots: u32,
    /// Products
    #[arg(short = 'P', default_value_t = 0)]
    products: u32,
    /// Product units
    #[arg(short = 'u', default_value_t = 0)]
    units: u32,
    /// Orders
    #[arg(short = 'o', default_value_t = 0)]
    orders: u32,
    /// Structured layout with storage clusters and highways
    #[arg(short = 'H')]
    structured: bool,
    /// Number of instances
    #[arg(short = 'N', default_value_t = 1)]
    count: u32,
    /// Place objects in threshold-sized rounds
    #[arg(short = 'I')]
    incremental: bool,
    /// Maximum distinct products per shelf [default: unbounded]
    #[arg(long)]
    prs: Option<u32>,
    /// Round size for incremental placement
    #[arg(long, default_value_t = 20)]
    threshold: u32,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Only place shelves next to the highway network
    #[arg(long)]
    reach: bool,
    /// Partial instance whose layout replaces the generated one
    #[arg(long, value_name = "FILE")]
    template: Option<PathBuf>,
    /// Write files here instead of printing to stdout
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// YAML batch file; grid flags are ignored
    #[arg(long, value_name = "FILE")]
    batch: Option<PathBuf>,
}

impl GenArgs {
    fn config(&self) -> GenConfig {
        GenConfig {
            x: self.x,
            y: self.y,
            cluster_x: self.cluster_x,
            cluster_y: self.cluster_y,
            stations: self.stations,
            shelves: self.shelves,
            robots: self.robots,
            products: self.products,
            units: self.units,
            orders: self.orders,
            prs: self.prs,
            structured: self.structured,
            reach: self.reach,
            count: self.count,
            incremental: self.incremental,
            threshold: self.threshold,
            seed: self.seed,
            template: self.template.clone(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    #[value(name = "M")]
    M,
}

impl From<Domain> for Base {
    fn from(d: Domain) -> Base {
        match d {
            Domain::A => Base::A,
            Domain::B => Base::B,
            Domain::C => Base::C,
            Domain::M => Base::M,
        }
    }
}

#[derive(Args)]
struct VariantArgs {
    /// Delivery domain
    #[arg(long, value_enum, ignore_case = true)]
    domain: Domain,
    /// Use the move-only alignment of the domain
    #[arg(long)]
    m_aligned: bool,
}

impl VariantArgs {
    fn variant(&self) -> DomainVariant {
        DomainVariant::new(self.domain.into(), self.m_aligned)
    }
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    variant: VariantArgs,
    /// Print the report as JSON instead of err facts
    #[arg(long)]
    json: bool,
    /// Include the state trace in the JSON report
    #[arg(long, requires = "json")]
    trace: bool,
    /// Check at this horizon instead of the plan's last step
    #[arg(long, value_name = "N")]
    horizon: Option<u32>,
    /// Instance file, or - for stdin
    instance: String,
    /// Plan file, or - for stdin
    plan: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    variant: VariantArgs,
    /// Task assignment: none, compute, or an assignment fact file
    #[arg(long, default_value = "none", value_name = "none|compute|FILE")]
    assign: String,
    /// Position encoding of search states: paired or split
    #[arg(long, default_value_t = PositionEncoding::Paired)]
    positions: PositionEncoding,
    /// Largest horizon tried
    #[arg(long, default_value_t = 100, value_name = "N")]
    max_horizon: u32,
    /// Wall-clock budget in milliseconds [default: unlimited]
    #[arg(long, value_name = "N")]
    budget_ms: Option<u64>,
    /// Stored-state cap per horizon
    #[arg(long, default_value_t = DEFAULT_NODE_CAP, value_name = "N")]
    node_cap: usize,
    /// Write search statistics as JSON to this file
    #[arg(long, value_name = "FILE")]
    stats: Option<PathBuf>,
    /// Instance file, or - for stdin
    instance: String,
}

#[derive(Args)]
struct ServeArgs {
    /// Address to listen on
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Directory with the studio's static files
    #[arg(long, value_name = "DIR")]
    static_dir: Option<PathBuf>,
}

/// Reads a file, or stdin for `-`.
fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn parse(path: &str, text: &str) -> Result<FactSet> {
    parse_facts(text).with_context(|| format!("parsing {path}"))
}

fn load_instance(path: &str, text: &str) -> Result<Instance> {
    build_instance(&parse(path, text)?).with_context(|| format!("building the instance from {path}"))
}

fn run_gen(args: GenArgs) -> Result<ExitCode> {
    let mut out = io::stdout().lock();
    if let Some(batch) = &args.batch {
        let mut batch = load_batch(batch)?;
        if let Some(dir) = &args.out {
            batch.output_dir = dir.clone();
        }
        for entry in run_batch(&batch)? {
            writeln!(out, "{}", entry.path.display())?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let generated = generate(&args.config())?;
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for g in generated {
                let path = dir.join(&g.name);
                fs::write(&path, &g.text).with_context(|| format!("writing {}", path.display()))?;
                writeln!(out, "{}", path.display())?;
            }
        }
        None => {
            for g in generated {
                out.write_all(g.text.as_bytes())?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_check(args: CheckArgs) -> Result<ExitCode> {
    if args.instance == "-" && args.plan == "-" {
        bail!("only one of the instance and the plan can be read from stdin");
    }
    let inst = load_instance(&args.instance, &read_input(&args.instance)?)?;
    let facts = parse(&args.plan, &read_input(&args.plan)?)?;
    let mut plan = build_plan(&facts, &inst).with_context(|| format!("building the plan from {}", args.plan))?;
    if let Some(h) = args.horizon {
        if h < plan.horizon {
            bail!("--horizon {h} is shorter than the plan, which has actions up to step {}", plan.horizon);
        }
        plan.horizon = h;
    }
    let report = check_plan(&inst, &plan, args.variant.variant());
    let doc = ReportDoc::new(&report, args.trace);
    let mut out = io::stdout().lock();
    if args.json {
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
    } else {
        for d in &doc.diagnostics {
            writeln!(out, "{}", d.fact)?;
        }
    }
    eprintln!("% {} errors", doc.errors);
    Ok(if doc.valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn load_assignment(mode: &str, inst: &Instance, variant: DomainVariant) -> Result<Option<Assignment>> {
    match mode {
        "none" => Ok(None),
        "compute" => Ok(Some(compute_assignment(inst, variant, 1000)?)),
        path => {
            let facts = parse(path, &read_input(path)?)?;
            Ok(Some(Assignment::from_facts(&facts, inst)?))
        }
    }
}

fn run_solve(args: SolveArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance, &read_input(&args.instance)?)?;
    let mut variant = args.variant.variant();
    let assignment = load_assignment(&args.assign, &inst, variant)?;
    if assignment.is_some() {
        variant = variant.with_assignment();
    }
    let mut limits = Limits { node_cap: args.node_cap, ..Limits::default() }.with_positions(args.positions);
    if let Some(ms) = args.budget_ms {
        limits = limits.with_budget_ms(ms);
    }
    let (result, stats) = solve_min_makespan(&inst, variant, args.max_horizon, assignment.as_ref(), &limits)?;
    if let Some(path) = &args.stats {
        let text = serde_json::to_string_pretty(&stats)?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    match result {
        SolveResult::Plan { plan, makespan } => {
            io::stdout().lock().write_all(serialize_plan(&plan).as_bytes())?;
            eprintln!("% {variant}: makespan {makespan}");
            Ok(ExitCode::SUCCESS)
        }
        SolveResult::Unsat { horizon } => {
            eprintln!("% {variant}: no plan within {horizon} steps");
            Ok(ExitCode::from(1))
        }
        SolveResult::Unknown { reason } => {
            eprintln!("% {variant}: undecided, {reason}");
            Ok(ExitCode::from(1))
        }
    }
}

fn run_serve(args: ServeArgs) -> Result<ExitCode> {
    if let Some(dir) = &args.static_dir {
        if !Path::new(dir).is_dir() {
            bail!("{} is not a directory", dir.display());
        }
    }
    let runtime = tokio::runtime::Runtime::new()?;
    eprintln!("listening on http://{}", args.bind);
    runtime.block_on(logibench_service::serve(args.bind, args.static_dir))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Check(a) => run_check(a),
        Command::Solve(a) => run_solve(a),
        Command::Serve(a) => run_serve(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
