use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use peakbench::harness::{
    self, derive_seed, instance_id, preset, preset_instance, run_distance_study, run_matrix,
    run_once, stable_id, summarize, summarize_cells, AlgorithmKind, AlgorithmSpec, ExperimentSpec,
    Preset, PresetName, PresetOptions,
};
use peakbench::sizing::{bisect_traced, BisectionConfig};
use peakbench::theory::{theory_row, DistanceMode};
use peakbench::{Goal, HeightMode, ProblemInstance, RunRecord};

#[derive(Parser)]
#[command(name = "peakbench", version, about = "Multimodal problem generator benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a problem instance file.
    Gen(GenArgs),
    /// Run one algorithm on one instance and print CSV records.
    Run(RunArgs),
    /// Print closed-form predictions for multistart NAHC.
    Theory(TheoryArgs),
    /// Size an EA population by doubling and bisection.
    Bisect(BisectArgs),
    /// Run a preset or an experiment spec file.
    Bench(BenchArgs),
    /// Summarize a records CSV.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file written by `gen`; overrides the generator flags.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    length: usize,
    #[arg(long, default_value_t = 20)]
    peaks: usize,
    #[arg(long, default_value = "equal")]
    heights: String,
    /// Generator seed; derived from the master seed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "PEAKBENCH_MASTER_SEED", default_value_t = 1)]
    master_seed: u64,
}

impl InstanceArgs {
    fn load(&self) -> Result<ProblemInstance> {
        if let Some(path) = &self.instance {
            return ProblemInstance::load(path).with_context(|| format!("loading {}", path.display()));
        }
        let mode: HeightMode = self.heights.parse()?;
        let seed = self
            .seed
            .unwrap_or_else(|| preset_instance(self.master_seed, self.peaks, mode).seed);
        Ok(ProblemInstance::generate(self.length, self.peaks, mode, seed)?)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AlgorithmArgs {
    /// ms_nahc, rts, rts_mr, mu_1p1 or idealized.
    #[arg(long, default_value = "ms_nahc")]
    algorithm: String,
    #[arg(long)]
    crossover_rate: Option<f64>,
    #[arg(long, default_value = "peak_1")]
    goal: String,
    #[arg(long, default_value_t = 5_000_000)]
    budget: u64,
}

impl AlgorithmArgs {
    fn spec(&self, population_size: Option<usize>) -> Result<(AlgorithmSpec, Goal)> {
        let kind: AlgorithmKind = self.algorithm.parse()?;
        let spec = AlgorithmSpec {
            algorithm: kind,
            crossover_rate: self.crossover_rate,
            population_size,
        };
        Ok((spec, self.goal.parse()?))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Also print the summary as JSON on stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, default_value_t = 100)]
    length: usize,
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160,320")]
    peaks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "peak_1,all_peaks")]
    goals: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "order_statistic")]
    d_modes: Vec<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BisectArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    algorithm: AlgorithmArgs,
    #[arg(long, default_value_t = 4)]
    initial_size: usize,
    #[arg(long, default_value_t = 100)]
    runs_per_trial: usize,
    /// Defaults to every run of a trial.
    #[arg(long)]
    successes_required: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    #[arg(long, default_value_t = 1 << 20)]
    ceiling: usize,
    #[arg(long, default_value_t = 0)]
    repetition: usize,
    /// Log every run to stderr.
    #[arg(long)]
    progress: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Preset name or path to an experiment spec file.
    target: String,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
    #[arg(long, env = "PEAKBENCH_MASTER_SEED")]
    master_seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    peaks: Option<Vec<usize>>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    runs_per_trial: Option<usize>,
    /// Write the resolved spec and exit without running.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct SummarizeArgs {
    records: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn gen(args: GenArgs) -> Result<()> {
    let inst = args.instance.load()?;
    let mut text = inst.to_json();
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}

fn run(args: RunArgs) -> Result<()> {
    let inst = args.instance.load()?;
    let (spec, goal) = args.algorithm.spec(args.population_size)?;
    let size = spec.fixed_population_size(&inst);
    if spec.algorithm.ea().is_some() && size.is_none() {
        bail!("{} needs --population-size", spec.algorithm);
    }
    let master = args.instance.master_seed;
    let stream = stable_id(&format!("{}/{goal}", spec.label()));
    let inst_id = instance_id(&inst.reference());
    let records = (0..args.runs)
        .map(|i| {
            let seed = derive_seed(master, inst_id, stream, i);
            let mut r = run_once(&inst, &spec, goal, args.algorithm.budget, size, seed)?;
            r.run_index = i;
            Ok(r)
        })
        .collect::<Result<Vec<RunRecord>>>()?;
    write_output(None, &harness::records_to_csv(&records))?;
    if args.summary {
        eprintln!("{}", harness::summaries_to_json(&summarize(&records)));
    }
    Ok(())
}

fn theory(args: TheoryArgs) -> Result<()> {
    let mut rows = Vec::new();
    for mode in &args.d_modes {
        let mode: DistanceMode = mode.parse()?;
        for goal in &args.goals {
            let goal: Goal = goal.parse()?;
            for &n in &args.peaks {
                rows.push(theory_row(args.length, n, goal, mode)?);
            }
        }
    }
    if args.json {
        return write_output(None, &(serde_json::to_string_pretty(&rows)? + "\n"));
    }
    let mut text = format!(
        "{:>5} {:>5} {:>10} {:>16} {:>9} {:>9} {:>10} {:>10} {:>12}\n",
        "L", "n", "goal", "d_mode", "score", "d", "restarts", "nahc", "evals"
    );
    for r in rows {
        text += &format!(
            "{:>5} {:>5} {:>10} {:>16} {:>9.4} {:>9.3} {:>10.1} {:>10.1} {:>12.0}\n",
            r.length,
            r.n,
            r.goal.to_string(),
            r.d_mode.to_string(),
            r.blom_score,
            r.distance,
            r.restarts,
            r.nahc_evals,
            r.evals
        );
    }
    write_output(None, &text)
}

fn bisect(args: BisectArgs) -> Result<()> {
    let inst = args.instance.load()?;
    let (spec, goal) = args.algorithm.spec(None)?;
    if spec.algorithm.ea().is_none() {
        bail!("bisection needs an EA algorithm");
    }
    let cfg = BisectionConfig {
        initial_size: args.initial_size,
        runs_per_trial: args.runs_per_trial,
        successes_required: args.successes_required.unwrap_or(args.runs_per_trial),
        relative_threshold: args.threshold,
        eval_budget: args.algorithm.budget,
        repetitions: 1,
        ceiling: args.ceiling,
    };
    let master = args.instance.master_seed;
    let inst_id = instance_id(&inst.reference());
    let label = spec.label();
    let mut trace = Vec::new();
    let result = bisect_traced(
        &cfg,
        |size, i| {
            let stream = stable_id(&format!("{label}/{goal}/rep{}/N{size}", args.repetition));
            let seed = derive_seed(master, inst_id, stream, i);
            let mut r = run_once(&inst, &spec, goal, cfg.eval_budget, Some(size), seed)?;
            r.run_index = i;
            if args.progress {
                eprintln!("N={size} run {i}: success={} evals={}", r.success, r.evals);
            }
            Ok(r)
        },
        &mut trace,
    );
    let (size, runs, error) = match result {
        Ok((size, runs)) => (Some(size), runs, None),
        Err(e) => (None, Vec::new(), Some(e.to_string())),
    };
    let report = serde_json::json!({
        "instance": inst.reference(),
        "algorithm": label,
        "goal": goal,
        "config": cfg,
        "population_size": size,
        "error": error,
        "trace": trace,
        "measurement": summarize(&runs),
    });
    write_output(None, &(serde_json::to_string_pretty(&report)? + "\n"))
}

fn bench(args: BenchArgs) -> Result<()> {
    let opts = PresetOptions {
        master_seed: args.master_seed.unwrap_or(1),
        peak_counts: args.peaks.clone(),
        runs: args.runs,
        budget: args.budget,
        repetitions: args.repetitions,
        runs_per_trial: args.runs_per_trial,
    };
    let plan = match args.target.parse::<PresetName>() {
        Ok(name) => preset(name, &opts),
        Err(_) => {
            let mut spec = ExperimentSpec::load(Path::new(&args.target))
                .with_context(|| format!("loading experiment {}", args.target))?;
            if let Some(m) = args.master_seed {
                spec.master_seed = m;
            }
            Preset::Matrix(spec)
        }
    };
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let out = |name: &str| args.out_dir.join(name);

    match plan {
        Preset::Distances(study) => {
            harness::save_json(&study, &out("spec.json"))?;
            if args.dry_run {
                return Ok(());
            }
            let rows = run_distance_study(&study)?;
            harness::save_json(&rows, &out("distances.json"))?;
            eprintln!("wrote {}", out("distances.json").display());
        }
        Preset::Matrix(spec) => {
            spec.save(&out("spec.json"))?;
            if args.dry_run {
                return Ok(());
            }
            let result = run_matrix(&spec)?;
            harness::save_csv(&result.records, &out("records.csv"))?;
            let summaries = summarize_cells(&result.records, &result.cells);
            harness::save_json(&summaries, &out("summary.json"))?;
            if !result.sizing.is_empty() {
                harness::save_json(&result.sizing, &out("sizing.json"))?;
            }
            if !result.failures.is_empty() {
                harness::save_json(&result.failures, &out("failures.json"))?;
                eprintln!("{} runs could not be executed", result.failures.len());
            }
            eprintln!(
                "wrote {} records for {} cells to {}",
                result.records.len(),
                result.cells.len(),
                args.out_dir.display()
            );
        }
    }
    Ok(())
}

fn summarize_cmd(args: SummarizeArgs) -> Result<()> {
    let rows = harness::load_csv(&args.records)?;
    let mut text = harness::summaries_to_json(&summarize(&rows));
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Theory(a) => theory(a),
        Command::Bisect(a) => bisect(a),
        Command::Bench(a) => bench(a),
        Command::Summarize(a) => summarize_cmd(a),
    }
}
