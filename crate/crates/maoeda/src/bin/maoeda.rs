//! Command-line front end: standard experiment runs, neighbor-size sweeps,
//! the generations-to-baseline protocol, and analytic front sampling.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use maoeda::harness::{
    generations_to_baseline, neighbor_sweep, run_experiment, write_outputs, BaselineOutcome,
    ExperimentPlan, Mode, DEFAULT_IGD_POINTS, DEFAULT_MC_SAMPLES,
};
use maoeda::problems::{write_front_file, ProblemId, ProblemSpec};
use maoeda::refvecs::write_vectors_csv;
use maoeda::rng::stream;
use maoeda::{Error, Result};

#[derive(Parser)]
#[command(name = "maoeda", about = "Reference-vector EDA for many-objective optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded experiment grid and write results/summary CSV + JSON.
    Run(RunArgs),
    /// Sweep the neighbor size T over a set of values.
    SweepT(SweepArgs),
    /// Count generations until a baseline hypervolume is reached.
    GensToBaseline(BaselineArgs),
    /// Sample the analytic Pareto front of a problem to a file.
    SampleFront(FrontArgs),
}

/// Options shared by the experiment-shaped subcommands. Every option can
/// also come from a `key=value` config file (flags win).
#[derive(Args, Clone)]
struct CommonArgs {
    /// Line-oriented key=value config file; flag values override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem name (dtlz1..dtlz4, minus variants as dtlz1- or dtlz1m).
    #[arg(long)]
    problem: Option<String>,
    /// Objective count M.
    #[arg(long)]
    objectives: Option<usize>,
    /// Independent runs (seeds seed, seed+1, ...).
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Neighbor size T (population is T x N).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Total evaluation budget (default: canonical per-M table).
    #[arg(long)]
    budget_total: Option<usize>,
    /// Generation cap.
    #[arg(long)]
    t_max: Option<usize>,
    /// Monte Carlo samples per HV evaluation (M >= 10).
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Reference-front size for IGD.
    #[arg(long)]
    igd_points: Option<usize>,
    /// Disable the diversity-repair phase.
    #[arg(long)]
    no_diversity_repair: bool,
    /// Disable corner-search dimension reduction.
    #[arg(long)]
    no_dimension_reduction: bool,
    /// Worker thread cap for parallel runs.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Also write the reference vectors used for M to vectors.csv.
    #[arg(long)]
    dump_vectors: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Neighbor sizes: start:end:step (e.g. 5:50:5) or a comma list.
    #[arg(long)]
    values: String,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Baseline hypervolume (normalized space) to reach.
    #[arg(long)]
    baseline: f64,
    /// Generation cap for the protocol.
    #[arg(long, default_value_t = 500)]
    cap: usize,
    /// Force Monte Carlo HV with this many samples per generation.
    #[arg(long)]
    baseline_mc_samples: Option<usize>,
}

#[derive(Args)]
struct FrontArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    objectives: usize,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(clean) => {
            if clean {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::SweepT(args) => cmd_sweep(args),
        Command::GensToBaseline(args) => cmd_baseline(args),
        Command::SampleFront(args) => cmd_front(args).map(|()| true),
    }
}

/// Loads the config file (if any) and folds it under the flag values.
fn resolve(mut common: CommonArgs) -> Result<CommonArgs> {
    let Some(path) = &common.config else {
        return Ok(common);
    };
    let text = std::fs::read_to_string(path)?;
    let mut kv = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("{}:{}: expected key=value", path.display(), lineno + 1))
        })?;
        kv.insert(key.trim().to_string(), value.trim().to_string());
    }
    fn parse<T: std::str::FromStr>(kv: &HashMap<String, String>, key: &str) -> Result<Option<T>> {
        match kv.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse(format!("config key {key}: bad value {v:?}"))),
            None => Ok(None),
        }
    }
    if common.problem.is_none() {
        common.problem = kv.get("problem").cloned();
    }
    common.objectives = common.objectives.or(parse(&kv, "objectives")?);
    common.runs = common.runs.or(parse(&kv, "runs")?);
    common.seed = common.seed.or(parse(&kv, "seed")?);
    common.t = common.t.or(parse(&kv, "t")?);
    common.alpha = common.alpha.or(parse(&kv, "alpha")?);
    common.beta = common.beta.or(parse(&kv, "beta")?);
    common.gamma = common.gamma.or(parse(&kv, "gamma")?);
    common.budget_total = common.budget_total.or(parse(&kv, "budget_total")?);
    common.t_max = common.t_max.or(parse(&kv, "t_max")?);
    common.mc_samples = common.mc_samples.or(parse(&kv, "mc_samples")?);
    common.igd_points = common.igd_points.or(parse(&kv, "igd_points")?);
    common.jobs = common.jobs.or(parse(&kv, "jobs")?);
    if let Some(v) = parse::<bool>(&kv, "no_diversity_repair")? {
        common.no_diversity_repair = common.no_diversity_repair || v;
    }
    if let Some(v) = parse::<bool>(&kv, "no_dimension_reduction")? {
        common.no_dimension_reduction = common.no_dimension_reduction || v;
    }
    Ok(common)
}

fn build_plan(common: &CommonArgs) -> Result<ExperimentPlan> {
    let problem = common
        .problem
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--problem is required".into()))?;
    let problem = ProblemId::parse(problem)?;
    let m = common
        .objectives
        .ok_or_else(|| Error::InvalidArgument("--objectives is required".into()))?;
    let mode = match (common.no_diversity_repair, common.no_dimension_reduction) {
        (false, false) => Mode::Standard,
        (true, false) => Mode::AblateRepair,
        (false, true) => Mode::AblateReduction,
        (true, true) => {
            return Err(Error::InvalidArgument(
                "choose at most one ablation per invocation".into(),
            ))
        }
    };
    let mut plan = ExperimentPlan::new(vec![problem], vec![m]);
    plan.runs = common.runs.unwrap_or(30);
    plan.base_seed = common.seed.unwrap_or(42);
    plan.mode = mode;
    plan.neighbor_size = common.t.unwrap_or(25);
    plan.alpha = common.alpha.unwrap_or(0.96);
    plan.beta = common.beta.unwrap_or(0.96);
    plan.gamma = common.gamma.unwrap_or(0.5);
    plan.budget_total = common.budget_total;
    plan.t_max = common.t_max;
    plan.mc_samples = common.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
    plan.igd_points = common.igd_points.unwrap_or(DEFAULT_IGD_POINTS);
    Ok(plan)
}

fn install_thread_pool(jobs: Option<usize>) -> Result<()> {
    if let Some(jobs) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("--jobs: {e}")))?;
    }
    Ok(())
}

fn dump_vectors(common: &CommonArgs, m: usize) -> Result<()> {
    if !common.dump_vectors {
        return Ok(());
    }
    let (h1, h2) = maoeda::harness::table1_divisions(m);
    let vectors = maoeda::harness::reference_simplex(m)?;
    let boundary = if h2 == 0 {
        vectors.len()
    } else {
        maoeda::refvecs::das_dennis_count(m, h1)?
    };
    std::fs::create_dir_all(&common.out)?;
    let mut f = std::fs::File::create(common.out.join("vectors.csv"))?;
    write_vectors_csv(&mut f, &vectors, boundary)?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let common = resolve(args.common)?;
    install_thread_pool(common.jobs)?;
    let plan = build_plan(&common)?;
    let outcome = run_experiment(&plan)?;
    write_outputs(&common.out, &outcome)?;
    dump_vectors(&common, plan.objective_counts[0])?;
    for s in &outcome.summaries {
        println!(
            "{} M={} {}: median HV {:.6} ({:.2e}) over {} runs",
            s.problem, s.objectives, s.variant, s.hv_median, s.hv_dispersion, s.runs
        );
    }
    for (p, m, seed, msg) in &outcome.failures {
        eprintln!("run failed: {p} M={m} seed={seed}: {msg}");
    }
    Ok(outcome.failures.is_empty())
}

fn parse_t_values(spec: &str) -> Result<Vec<usize>> {
    let parse_one = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad neighbor size {s:?}")))
    };
    let values: Vec<usize> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "expected start:end:step, got {spec:?}"
            )));
        }
        let (start, end, step) = (parse_one(parts[0])?, parse_one(parts[1])?, parse_one(parts[2])?);
        if step == 0 {
            return Err(Error::Parse("step must be positive".into()));
        }
        (start..=end).step_by(step).collect()
    } else {
        spec.split(',').map(parse_one).collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(Error::Parse(format!("no neighbor sizes in {spec:?}")));
    }
    Ok(values)
}

fn cmd_sweep(args: SweepArgs) -> Result<bool> {
    let common = resolve(args.common)?;
    install_thread_pool(common.jobs)?;
    let plan = build_plan(&common)?;
    let values = parse_t_values(&args.values)?;
    let rows = neighbor_sweep(&plan, &values)?;
    std::fs::create_dir_all(&common.out)?;
    let mut csv = String::from("neighbor_size,igd_median,hv_median\n");
    for r in &rows {
        let igd = r.igd_median.map(|v| format!("{v:.10e}")).unwrap_or_default();
        csv.push_str(&format!("{},{},{:.10e}\n", r.neighbor_size, igd, r.hv_median));
        println!(
            "T={:>3}: median IGD {}, median HV {:.6}",
            r.neighbor_size,
            r.igd_median.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into()),
            r.hv_median
        );
    }
    std::fs::write(common.out.join("sweep.csv"), csv)?;
    Ok(true)
}

fn cmd_baseline(args: BaselineArgs) -> Result<bool> {
    let common = resolve(args.common)?;
    install_thread_pool(common.jobs)?;
    let plan = build_plan(&common)?;
    let problem = plan.problems[0];
    let m = plan.objective_counts[0];
    let mut outcomes: Vec<(u64, BaselineOutcome)> = Vec::new();
    for r in 0..plan.runs {
        let seed = plan.base_seed + r as u64;
        let cfg = plan.build_run_config(problem, m, seed)?;
        let out = generations_to_baseline(&cfg, args.baseline, args.cap, args.baseline_mc_samples)?;
        println!(
            "seed {seed}: {} generations ({}), final HV {:.6}",
            out.generations,
            if out.reached { "reached" } else { "capped" },
            out.final_hv
        );
        outcomes.push((seed, out));
    }
    std::fs::create_dir_all(&common.out)?;
    let mut csv = String::from("seed,generations,reached,final_hv\n");
    for (seed, o) in &outcomes {
        csv.push_str(&format!(
            "{seed},{},{},{:.10e}\n",
            o.generations, o.reached, o.final_hv
        ));
    }
    std::fs::write(common.out.join("baseline.csv"), csv)?;
    Ok(true)
}

fn cmd_front(args: FrontArgs) -> Result<()> {
    let problem = ProblemId::parse(&args.problem)?;
    let spec = ProblemSpec::new(problem, args.objectives)?;
    let mut rng = stream(args.seed, "front");
    let front = spec.sample_front(args.count, &mut rng)?;
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut f = std::fs::File::create(&args.out)?;
    write_front_file(&mut f, problem, args.objectives, args.seed, &front)?;
    println!("wrote {} front points to {}", front.len(), args.out.display());
    Ok(())
}
