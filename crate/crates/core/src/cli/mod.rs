//! Command-line front end.
//!
//! Every JSON output carries the full command under `config` and every CSV
//! output starts with a `# config: {...}` comment line, so `qttf replay FILE`
//! re-runs the exact command that produced `FILE`. Output paths are not
//! recorded.
//!
//! Exit codes: 0 success, 1 usage or other failure, 2 POM not informationally
//! complete, 3 series budget exceeded.

pub mod experiments;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{Estimator, SweepConfig};
use crate::operators::build_basis;
use crate::pom::{self, Pom, PomFile};
use crate::qttf::{self, AutoOptions, MonteCarloDiagnostics, QttfEstimate, QttfMethod, SeriesBudget};
use crate::rng;

use experiments::{Fig1Config, SearchConfig};

const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, Parser)]
#[command(name = "qttf", version, about = "Tomographic quality of quantum measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Build, draw or transform a POM file.
    #[command(subcommand)]
    Pom(PomCommand),
    /// Compute the qTTF of a POM.
    Qttf(QttfArgs),
    /// Tabulate quantifiers for several POMs and flag ranking inversions.
    Compare(CompareArgs),
    /// Relative error of the second-order series over random POMs.
    Fig1(Fig1Args),
    /// MSE comparison of two POMs, or search for a condition-number counterexample.
    Fig2(Fig2Args),
    /// Re-run the command recorded in an output file.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Sic2,
    Sic3,
    Mub2,
    Mub3,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PomCommand {
    /// A built-in SIC or MUB POM.
    Builtin {
        #[arg(value_enum)]
        name: Builtin,
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
    },
    /// A random POM of fixed outcome rank.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
    },
    /// Duplicate an outcome and/or admix white noise.
    Transform {
        file: PathBuf,
        /// One-based index of the outcome to split.
        #[arg(long)]
        duplicate: Option<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.5")]
        weights: Vec<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        #[serde(skip)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Auto,
    Closed,
    Series,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
pub struct QttfArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    pub method: MethodChoice,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bytes available for cached Gram tensors.
    #[arg(long)]
    pub memory_budget: Option<u64>,
    /// Index tuples a single series term may visit.
    #[arg(long)]
    pub max_terms: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
pub struct CompareArgs {
    pub files: Vec<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub memory_budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
pub struct Fig1Args {
    #[arg(long = "dim", value_delimiter = ',', default_value = "2")]
    pub dims: Vec<usize>,
    #[arg(long = "mu", value_delimiter = ',', default_value = "1.25,1.5,2,3")]
    pub mus: Vec<f64>,
    #[arg(long = "rank", value_delimiter = ',', default_value = "1")]
    pub ranks: Vec<usize>,
    #[arg(long = "epsilon", value_delimiter = ',', default_value = "0,0.05")]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub poms: usize,
    /// Haar samples per POM.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 2000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
pub struct Fig2Args {
    /// Two POM files to compare; omitted with `--search`.
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_delimiter = ',', default_value = "6,8")]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 20)]
    pub attempts: usize,
    #[arg(long, default_value_t = 0.99)]
    pub purity: f64,
    #[arg(long, default_value_t = 50)]
    pub states: usize,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Haar samples for each Monte-Carlo qTTF.
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = Estimator::Weighted)]
    pub estimator: Estimator,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file, or output directory with `--search`.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub file: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Command {
    fn set_out(&mut self, out: Option<PathBuf>) {
        match self {
            Command::Pom(PomCommand::Builtin { out: o, .. })
            | Command::Pom(PomCommand::Random { out: o, .. })
            | Command::Pom(PomCommand::Transform { out: o, .. }) => *o = out,
            Command::Qttf(a) => a.out = out,
            Command::Compare(a) => a.out = out,
            Command::Fig1(a) => a.out = out,
            Command::Fig2(a) => a.out = out,
            Command::Replay(a) => a.out = out,
        }
    }

    fn out(&self) -> Option<&Path> {
        match self {
            Command::Pom(PomCommand::Builtin { out, .. })
            | Command::Pom(PomCommand::Random { out, .. })
            | Command::Pom(PomCommand::Transform { out, .. }) => out.as_deref(),
            Command::Qttf(a) => a.out.as_deref(),
            Command::Compare(a) => a.out.as_deref(),
            Command::Fig1(a) => a.out.as_deref(),
            Command::Fig2(a) => a.out.as_deref(),
            Command::Replay(a) => a.out.as_deref(),
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotInformationallyComplete { .. } => 2,
        Error::BudgetExceeded { .. } => 3,
        _ => 1,
    }
}

/// Entry point of the `qttf` binary.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run(std::env::args_os())
}

/// Parses `args` (program name first), executes, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::BudgetExceeded { .. } = e {
                eprintln!("hint: use --method mc for this POM");
            }
            exit_code(&e)
        }
    }
}

/// Runs `command` and writes its output to `--out` or standard output.
pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Replay(args) => {
            let mut recorded = recorded_config(&args.file)?;
            recorded.set_out(args.out.clone());
            execute(&recorded)
        }
        Command::Fig2(args) if args.search => {
            let found = search(args)?;
            match &args.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    Pom::try_from(found.first.clone())?.save(dir.join("pom1.json"))?;
                    Pom::try_from(found.second.clone())?.save(dir.join("pom2.json"))?;
                    write_output(Some(&dir.join("summary.json")), &to_json_line(&found)?)
                }
                None => write_output(None, &to_json_line(&found)?),
            }
        }
        _ => write_output(command.out(), &render(command)?),
    }
}

/// Produces the primary output of `command` as text.
pub fn render(command: &Command) -> Result<String> {
    match command {
        Command::Pom(p) => Ok(pom_command(p)?.to_json()),
        Command::Qttf(args) => render_qttf(args, command),
        Command::Compare(args) => render_compare(args, command),
        Command::Fig1(args) => render_fig1(args, command),
        Command::Fig2(args) if args.search => to_json_line(&search(args)?),
        Command::Fig2(args) => render_fig2(args, command),
        Command::Replay(args) => {
            let mut recorded = recorded_config(&args.file)?;
            recorded.set_out(None);
            render(&recorded)
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Reads the command recorded in a JSON or CSV output file.
pub fn recorded_config(path: &Path) -> Result<Command> {
    let text = fs::read_to_string(path)?;
    if let Some(rest) = text.strip_prefix(CONFIG_PREFIX) {
        let line = rest.lines().next().unwrap_or_default();
        return Ok(serde_json::from_str(line)?);
    }
    #[derive(Deserialize)]
    struct WithConfig {
        config: Command,
    }
    let parsed: WithConfig = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: no embedded config ({e})", path.display())))?;
    Ok(parsed.config)
}

fn pom_command(cmd: &PomCommand) -> Result<Pom> {
    match cmd {
        PomCommand::Builtin { name, .. } => match name {
            Builtin::Sic2 => pom::sic_povm(2),
            Builtin::Sic3 => pom::sic_povm(3),
            Builtin::Mub2 => pom::mub_povm(2),
            Builtin::Mub3 => pom::mub_povm(3),
        },
        PomCommand::Random { dim, m, rank, seed, epsilon, .. } => {
            let drawn = pom::random_pom(*dim, *m, *rank, &mut rng::from_seed(*seed))?
                .with_label(format!("random(D={dim},M={m},rank={rank},seed={seed})"));
            match epsilon {
                Some(e) => pom::admix_white_noise(&drawn, *e),
                None => Ok(drawn),
            }
        }
        PomCommand::Transform { file, duplicate, weights, epsilon, .. } => {
            let mut p = Pom::load(file)?;
            if let Some(index) = duplicate {
                if *index == 0 {
                    return Err(Error::InvalidArgument("--duplicate is one-based".into()));
                }
                p = pom::duplicate_outcome(&p, index - 1, weights)?;
            }
            if let Some(e) = epsilon {
                p = pom::admix_white_noise(&p, *e)?;
            }
            Ok(p)
        }
    }
}

fn budget_from(memory: Option<u64>, terms: Option<u64>) -> SeriesBudget {
    let mut b = SeriesBudget::default();
    if let Some(m) = memory {
        b.memory_bytes = m;
    }
    if let Some(t) = terms {
        b.max_terms = t as u128;
    }
    b
}

/// Result JSON of the `qttf` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QttfReport {
    pub label: String,
    pub value: f64,
    pub method: String,
    pub params: QttfMethod,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<MonteCarloDiagnostics>,
    pub seed: u64,
    pub config: Command,
}

/// Evaluates the qTTF as requested by `args`.
pub fn qttf_for(pom: &Pom, args: &QttfArgs) -> Result<QttfEstimate> {
    let basis = build_basis(pom.dim())?;
    let budget = budget_from(args.memory_budget, args.max_terms);
    match args.method {
        MethodChoice::Auto => {
            let opts = AutoOptions { mc_samples: args.samples, seed: args.seed, budget, ..AutoOptions::default() };
            qttf::qttf_auto(pom, &basis, &opts)
        }
        MethodChoice::Closed => match qttf::qttf_closed_minimal(pom, &basis) {
            Err(Error::NotMinimal(a)) => match qttf::qttf_closed_minimal_bases(pom, &basis) {
                Err(Error::NotMinimalBases(b)) => Err(Error::InvalidArgument(format!(
                    "no closed form applies: {a}; {b}"
                ))),
                other => other,
            },
            other => other,
        },
        MethodChoice::Series => qttf::qttf_series_with_budget(pom, &basis, args.alpha, args.order, budget),
        MethodChoice::Mc => qttf::qttf_monte_carlo(pom, &basis, args.samples, args.seed),
    }
}

fn render_qttf(args: &QttfArgs, command: &Command) -> Result<String> {
    let pom = Pom::load(&args.file)?;
    let est = qttf_for(&pom, args)?;
    let report = QttfReport {
        label: pom.label().to_owned(),
        value: est.value,
        method: est.method.name().to_owned(),
        params: est.method,
        std_error: est.std_error,
        diagnostics: est.diagnostics,
        seed: args.seed,
        config: command.clone(),
    };
    match args.format {
        Format::Json => to_json_line(&report),
        Format::Csv => csv_text(
            command,
            &["label", "method", "value", "std_error", "seed"],
            vec![vec![
                report.label,
                report.method,
                num(report.value),
                num(report.std_error),
                args.seed.to_string(),
            ]],
        ),
    }
}

#[derive(Serialize)]
struct CompareReport<'a> {
    table: &'a experiments::CompareTable,
    seed: u64,
    config: &'a Command,
}

fn render_compare(args: &CompareArgs, command: &Command) -> Result<String> {
    if args.files.len() < 2 {
        return Err(Error::InvalidArgument("compare needs at least two POM files".into()));
    }
    let poms = args.files.iter().map(Pom::load).collect::<Result<Vec<_>>>()?;
    let opts = AutoOptions {
        mc_samples: args.samples,
        seed: args.seed,
        budget: budget_from(args.memory_budget, None),
        ..AutoOptions::default()
    };
    let table = experiments::compare_poms(&poms, &opts)?;
    for &(i, j) in &table.inversions {
        log::warn!(
            "condition number and qTTF rank '{}' and '{}' differently",
            table.rows[i].label,
            table.rows[j].label
        );
    }
    match args.format {
        Format::Json => to_json_line(&CompareReport { table: &table, seed: args.seed, config: command }),
        Format::Csv => {
            let rows = table
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let inverted = table.inversions.iter().any(|&(a, b)| a == i || b == i);
                    vec![
                        r.label.clone(),
                        r.outcomes.to_string(),
                        num(r.kappa_c),
                        num(r.kappa_c_tilde),
                        num(r.fbar_inverse_trace),
                        num(r.qttf.value),
                        num(r.qttf.std_error),
                        r.qttf.method.name().to_owned(),
                        num(r.aqttf),
                        (i == table.best).to_string(),
                        inverted.to_string(),
                    ]
                })
                .collect();
            csv_text(
                command,
                &[
                    "label",
                    "M",
                    "kappa_c",
                    "kappa_c_tilde",
                    "fbar_inverse_trace",
                    "qttf",
                    "qttf_std_error",
                    "qttf_method",
                    "aqttf",
                    "best",
                    "inversion",
                ],
                rows,
            )
        }
    }
}

impl From<&Fig1Args> for Fig1Config {
    fn from(a: &Fig1Args) -> Self {
        Fig1Config {
            dims: a.dims.clone(),
            mus: a.mus.clone(),
            ranks: a.ranks.clone(),
            epsilons: a.epsilons.clone(),
            n_poms: a.poms,
            n_haar: a.samples,
            bootstrap: a.bootstrap,
            seed: a.seed,
        }
    }
}

#[derive(Serialize)]
struct Fig1Report<'a> {
    cells: &'a [experiments::Fig1Cell],
    seed: u64,
    config: &'a Command,
}

fn render_fig1(args: &Fig1Args, command: &Command) -> Result<String> {
    let cells = experiments::run_fig1(&Fig1Config::from(args))?;
    for c in cells.iter().filter(|c| c.skipped.is_some()) {
        log::warn!("skipped D={} mu={} rank={} epsilon={}: {}", c.dim, c.mu, c.rank, c.epsilon, c.skipped.as_deref().unwrap_or(""));
    }
    match args.format {
        Format::Json => to_json_line(&Fig1Report { cells: &cells, seed: args.seed, config: command }),
        Format::Csv => {
            let rows = cells
                .iter()
                .map(|c| {
                    vec![
                        c.dim.to_string(),
                        num(c.mu),
                        c.rank.to_string(),
                        num(c.epsilon),
                        num(c.halved_rel_err),
                        num(c.ci_lo),
                        num(c.ci_hi),
                        num(c.limit),
                    ]
                })
                .collect();
            csv_text(command, &["D", "mu", "rank", "epsilon", "halved_rel_err", "ci_lo", "ci_hi", "limit"], rows)
        }
    }
}

fn sweep_config(args: &Fig2Args) -> SweepConfig {
    SweepConfig {
        purity: args.purity,
        n_states: args.states,
        shots: args.shots,
        trials: args.trials,
        mc_samples: args.samples,
        seed: args.seed,
        estimator: args.estimator,
    }
}

#[derive(Serialize)]
struct Fig2Report<'a> {
    rows: &'a [experiments::Fig2Row],
    seed: u64,
    config: &'a Command,
}

fn render_fig2(args: &Fig2Args, command: &Command) -> Result<String> {
    if args.files.len() != 2 {
        return Err(Error::InvalidArgument("fig2 needs exactly two POM files, or --search".into()));
    }
    let a = Pom::load(&args.files[0])?;
    let b = Pom::load(&args.files[1])?;
    let rows = experiments::run_fig2([&a, &b], &sweep_config(args))?;
    match args.format {
        Format::Json => to_json_line(&Fig2Report { rows: &rows, seed: args.seed, config: command }),
        Format::Csv => {
            let body = rows
                .iter()
                .map(|r| {
                    vec![
                        r.label.clone(),
                        num(r.kappa_c_tilde),
                        num(r.qttf_mc),
                        num(r.qttf_mc_std_error),
                        num(r.aqttf),
                        num(r.mean_scaled_mse),
                        num(r.mse_std_error),
                    ]
                })
                .collect();
            csv_text(
                command,
                &["label", "kappa_c_tilde", "qttf_mc", "qttf_mc_std_error", "aqttf", "mean_scaled_mse", "mse_std_error"],
                body,
            )
        }
    }
}

/// Summary written by `fig2 --search`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSummary {
    pub first: PomFile,
    pub second: PomFile,
    pub kappa_first: f64,
    pub kappa_second: f64,
    pub qttf_first: f64,
    pub qttf_first_std_error: f64,
    pub qttf_second: f64,
    pub qttf_second_std_error: f64,
    /// Gap in units of the combined standard error.
    pub sigma: f64,
    pub attempts_used: usize,
    pub seed: u64,
    pub config: Command,
}

fn search(args: &Fig2Args) -> Result<SearchSummary> {
    let cfg = SearchConfig {
        dim: args.dim,
        outcome_choices: args.m.clone(),
        rank: args.rank,
        attempts: args.attempts,
        mc_samples: args.samples,
        seed: args.seed,
        ..SearchConfig::default()
    };
    let pair = experiments::search_counterexample(&cfg)?;
    Ok(SearchSummary {
        first: PomFile::from(&pair.first.pom),
        second: PomFile::from(&pair.second.pom),
        kappa_first: pair.first.kappa_c_tilde,
        kappa_second: pair.second.kappa_c_tilde,
        qttf_first: pair.first.qttf.value,
        qttf_first_std_error: pair.first.qttf.std_error,
        qttf_second: pair.second.qttf.value,
        qttf_second_std_error: pair.second.qttf.std_error,
        sigma: pair.sigma,
        attempts_used: pair.attempts_used,
        seed: args.seed,
        config: Command::Fig2(args.clone()),
    })
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(command: &Command, header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut buf = Vec::new();
    buf.extend_from_slice(CONFIG_PREFIX.as_bytes());
    buf.extend_from_slice(serde_json::to_string(command)?.as_bytes());
    buf.push(b'\n');
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
        w.write_record(header).map_err(csv_error)?;
        for r in rows {
            w.write_record(&r).map_err(csv_error)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
