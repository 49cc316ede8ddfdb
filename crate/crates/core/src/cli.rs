//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when an input file or flag is unusable,
//! 1 when a run fails after its inputs were accepted.

use crate::anytime::{
    compile_decision_tree, compile_pruned_tree, AnytimeSession, DecisionTree, SelectionPolicy,
};
use crate::detection::{DetectionCriterion, Discretizer, DEFAULT_BINS};
use crate::harness::{
    benchmark_structure, compare_selection_policies, evaluate_errors, generate_synthetic_dataset,
    learn_parameters, reference_structure, run_fault_experiments, split_dataset, Dataset, ExperimentPlan,
    Severity, BENCHMARK_SEED, DEFAULT_NOISE, DEFAULT_ROWS,
};
use crate::isolation::{build_isolation_network, IsolationNet};
use crate::model::{emb_table, load_network, save_network, BayesNet, Structure};
use crate::detection::fit_discretizer;
use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "sensorval", version, about = "Anytime probabilistic sensor validation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic plant dataset and its structure file.
    Generate(GenerateArgs),
    /// Fit a discretizer and CPTs from a structure and training data.
    Learn(LearnArgs),
    /// Precompile the sensor-selection decision tree.
    CompileTree(CompileArgs),
    /// Validate every row of a reading stream, one JSON line per step.
    Validate(ValidateArgs),
    /// Inject faults into a test set and write type I/II error counts.
    Simulate(SimulateArgs),
    /// Compare entropy-driven and random sensor selection.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlantKind {
    Reference,
    Benchmark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionKind {
    Sigma,
    Pvalue,
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeverityArg {
    Severe,
    Mild,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "reference")]
    pub plant: PlantKind,
    #[arg(long, default_value_t = DEFAULT_ROWS)]
    pub rows: usize,
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    pub noise: f64,
    #[arg(long, default_value_t = BENCHMARK_SEED)]
    pub seed: u64,
    /// Dataset CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Structure JSON to write.
    #[arg(long)]
    pub structure: PathBuf,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long)]
    pub structure: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Network JSON to write.
    #[arg(long)]
    pub network: PathBuf,
    /// Discretizer JSON to write.
    #[arg(long)]
    pub discretizer: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Learn from a seeded share of the rows and write the rest to `--test-out`.
    #[arg(long, requires = "test_out")]
    pub split: Option<f64>,
    #[arg(long)]
    pub test_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct IsolationArgs {
    /// Noisy-OR link strength.
    #[arg(long, default_value_t = 0.99)]
    pub c: f64,
    /// Prior fault probability of every sensor.
    #[arg(long, default_value_t = 0.5)]
    pub prior: f64,
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    #[arg(long, value_enum, default_value = "sigma")]
    pub criterion: CriterionKind,
    #[arg(long, default_value_t = 3.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep every outcome path instead of only single-fault ones.
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub iso: IsolationArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub discretizer: PathBuf,
    /// Reading stream CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Decision tree; without one the next sensor is chosen on-line.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Step output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    pub iso: IsolationArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub discretizer: PathBuf,
    /// Test set CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Error report CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Inject only this severity; both when absent.
    #[arg(long, value_enum)]
    pub severity: Option<SeverityArg>,
    #[arg(long, default_value_t = 0.9)]
    pub declare: f64,
    /// Use at most this many test rows, drawn by `--seed`.
    #[arg(long)]
    pub max_rows: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    pub iso: IsolationArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub discretizer: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Profile CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 260)]
    pub experiments: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub criterion: CriterionArgs,
    #[command(flatten)]
    pub iso: IsolationArgs,
}

/// A failed command, tagged with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(e) | CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

trait Stage<T> {
    fn input(self) -> Result<T, CliError>;
    fn runtime(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> Stage<T> for Result<T, E> {
    fn input(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Input(e.into()))
    }

    fn runtime(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Runtime(e.into()))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).input()
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display())).runtime()
}

fn load_net(path: &Path) -> Result<BayesNet, CliError> {
    load_network(&read(path)?).with_context(|| format!("loading {}", path.display())).input()
}

fn load_discretizer(path: &Path) -> Result<Discretizer, CliError> {
    Discretizer::from_json(&read(path)?).with_context(|| format!("loading {}", path.display())).input()
}

fn load_tree(path: Option<&PathBuf>) -> Result<Option<DecisionTree>, CliError> {
    path.map(|p| DecisionTree::from_json(&read(p)?).with_context(|| format!("loading {}", p.display())).input())
        .transpose()
}

fn check_tree(tree: Option<&DecisionTree>, iso: &IsolationNet) -> Result<(), CliError> {
    tree.map_or(Ok(()), |t| t.check_sensors(iso.sensors()).context("tree does not match the network").input())
}

fn load_data(path: &Path) -> Result<Dataset, CliError> {
    Dataset::from_csv(read(path)?.as_bytes()).with_context(|| format!("loading {}", path.display())).input()
}

fn isolation(net: &BayesNet, args: &IsolationArgs) -> Result<IsolationNet, CliError> {
    build_isolation_network(&emb_table(net), args.c, args.prior).input()
}

fn criterion(args: &CriterionArgs) -> Result<DetectionCriterion, CliError> {
    match args.criterion {
        CriterionKind::Sigma => DetectionCriterion::sigma(args.k),
        CriterionKind::Pvalue => DetectionCriterion::pvalue(args.p),
        CriterionKind::Tau => DetectionCriterion::tau(args.tau),
    }
    .input()
}

/// Runs one parsed command, writing human-readable progress to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Learn(a) => learn(a, out),
        Command::CompileTree(a) => compile(a, out),
        Command::Validate(a) => validate(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Compare(a) => compare(a, out),
    }
}

fn say(out: &mut dyn Write, line: String) -> Result<(), CliError> {
    writeln!(out, "{line}").runtime()
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let structure = match a.plant {
        PlantKind::Reference => reference_structure(),
        PlantKind::Benchmark => benchmark_structure(a.seed),
    };
    if a.rows == 0 || !a.noise.is_finite() || a.noise < 0.0 {
        return Err(CliError::Input(anyhow!("need --rows ≥ 1 and a finite, non-negative --noise")));
    }
    let data = generate_synthetic_dataset(&structure, a.rows, a.noise, a.seed).runtime()?;
    write(&a.out, &data.to_csv())?;
    write(&a.structure, &structure.to_json())?;
    say(out, format!("wrote {} rows over {} sensors", data.len(), data.sensors().len()))
}

fn learn(a: LearnArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let structure = Structure::from_json(&read(&a.structure)?)
        .with_context(|| format!("loading {}", a.structure.display()))
        .input()?;
    let data = load_data(&a.data)?;
    data.require(&structure.variables).input()?;
    let train = match (a.split, &a.test_out) {
        (Some(ratio), Some(test_out)) => {
            let (train, test) = split_dataset(&data, ratio, a.seed).input()?;
            write(test_out, &test.to_csv())?;
            train
        }
        _ => data,
    };
    if train.is_empty() {
        return Err(CliError::Input(anyhow!("{}: no data rows to learn from", a.data.display())));
    }
    let d = fit_discretizer(&train.readings(), &structure.variables, a.bins).input()?;
    let net = learn_parameters(&structure, &d, &train).input()?;
    write(&a.network, &save_network(&net))?;
    write(&a.discretizer, &d.to_json())?;
    say(out, format!("learned {} variables from {} rows", net.len(), train.len()))
}

fn compile(a: CompileArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_net(&a.network)?;
    let iso = isolation(&net, &a.iso)?;
    let tree = if a.full { compile_decision_tree(&iso) } else { compile_pruned_tree(&iso) }.runtime()?;
    write(&a.out, &tree.to_json())?;
    say(out, format!("{} nodes, depth {}", tree.node_count(), tree.depth()))
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_net(&a.network)?;
    let d = load_discretizer(&a.discretizer)?;
    let tree = load_tree(a.tree.as_ref())?;
    let data = load_data(&a.data)?;
    let iso = isolation(&net, &a.iso)?;
    check_tree(tree.as_ref(), &iso)?;
    let criterion = criterion(&a.criterion)?;
    data.require(iso.sensors()).input()?;

    let mut file;
    let mut stdout;
    let sink: &mut dyn Write = match &a.out {
        Some(p) => {
            file = fs::File::create(p).with_context(|| format!("creating {}", p.display())).runtime()?;
            &mut file
        }
        None => {
            stdout = io::stdout().lock();
            &mut stdout
        }
    };
    for row in 0..data.len() {
        let reading = data.reading(row);
        let policy = tree.as_ref().map_or(SelectionPolicy::Entropy, SelectionPolicy::Tree);
        for record in AnytimeSession::new(&net, &d, &iso, &reading, criterion, policy) {
            let record = record.with_context(|| format!("row {row}")).runtime()?;
            let sent = writeln!(sink, "{}", record.to_json_line()).and_then(|_| sink.flush());
            match sent {
                // A consumer that stops reading ends the stream, not the run.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => return Ok(()),
                other => other.runtime()?,
            }
        }
    }
    if a.out.is_some() {
        say(out, format!("validated {} rows", data.len()))?;
    }
    Ok(())
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_net(&a.network)?;
    let d = load_discretizer(&a.discretizer)?;
    let tree = load_tree(a.tree.as_ref())?;
    let test = load_data(&a.data)?;
    let iso = isolation(&net, &a.iso)?;
    check_tree(tree.as_ref(), &iso)?;
    if !test.is_empty() {
        test.require(iso.sensors()).input()?;
    }
    let severities = match a.severity {
        Some(SeverityArg::Severe) => vec![Severity::Severe],
        Some(SeverityArg::Mild) => vec![Severity::Mild],
        None => vec![Severity::Severe, Severity::Mild],
    };
    if !(a.declare > 0.0 && a.declare < 1.0) {
        return Err(CliError::Input(anyhow!("--declare must lie in (0, 1), got {}", a.declare)));
    }
    let plan = ExperimentPlan {
        criteria: vec![criterion(&a.criterion)?],
        severities,
        declare: a.declare,
        max_rows: a.max_rows,
        seed: a.seed,
    };
    let records = run_fault_experiments(&net, &d, &iso, tree.as_ref(), &test, &plan).runtime()?;
    let report = evaluate_errors(&records, &plan);
    write(&a.out, &report.to_csv())?;
    for r in &report.rows {
        say(
            out,
            format!(
                "{} {}: type I {}/{} ({:.4}), type II {}/{} ({:.4})",
                r.criterion,
                r.severity,
                r.type1_count,
                r.type1_total,
                r.type1_rate(),
                r.type2_count,
                r.type2_total,
                r.type2_rate()
            ),
        )?;
    }
    Ok(())
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let net = load_net(&a.network)?;
    let d = load_discretizer(&a.discretizer)?;
    let test = load_data(&a.data)?;
    let iso = isolation(&net, &a.iso)?;
    let criterion = criterion(&a.criterion)?;
    test.require(iso.sensors()).input()?;
    if test.is_empty() || a.experiments == 0 {
        return Err(CliError::Input(anyhow!("need at least one test row and one experiment")));
    }
    let cmp = compare_selection_policies(&net, &d, &iso, &test, a.experiments, criterion, a.seed).runtime()?;
    write(&a.out, &cmp.to_csv())?;
    let mid = cmp.entropy.len() / 2;
    say(
        out,
        format!(
            "{} experiments; mean quality at step {}: entropy {:.4}, random {:.4}",
            a.experiments,
            mid + 1,
            cmp.entropy[mid],
            cmp.random[mid]
        ),
    )
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, &mut io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
