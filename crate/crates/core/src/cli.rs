//! The `precedence` command line.
//!
//! Every subcommand reads JSON files, calls one library operation and
//! prints a JSON document. Exit codes: 0 success, 1 a verification came
//! out negative, 2 bad input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::combinatorics::{parse_index_list, SubsetMask};
use crate::construction::{
    build_ls_epsilon, certify_concordance, certify_concordance_with, check_epsilon_condition, epsilon_schedule,
    invert_to_ls, EpsilonSchedule,
};
use crate::error::{Error, Result};
use crate::loadsharing::{distribution_of, AnyModel};
use crate::montecarlo::{compare_alphas, estimate_alphas};
use crate::permdist::{alpha_family, alpha_family_scan, PermutationDistribution, WinningProbabilityFamily};
use crate::rational::Rational;
use crate::ranking::{
    enumerate_patterns, induced_pattern, pattern_cyclic, pattern_very_paradox, sample_patterns, RankingPattern,
};
use crate::signature::{
    ls_for_target_signature, probability_signature, survival_decomposition_terms, ProbabilitySignature,
    StructureFunction,
};
use crate::voting::{check_n_concordance, synthesize_voting_situation, tally, VotingSituation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "precedence", version, about = "Winning probabilities, ranking patterns and load-sharing models")]
struct Cli {
    /// Add a 12-significant-digit decimal copy of every exact value.
    #[arg(long, global = true)]
    decimal: bool,

    /// Worker threads (0 picks one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Winning probabilities of a permutation distribution.
    Alpha(AlphaArgs),
    /// Winning probabilities by scanning every permutation (cross-check).
    Oracle(AlphaArgs),
    /// Generate ranking patterns or read one off a distribution.
    #[command(subcommand)]
    Pattern(PatternCommand),
    /// Build, invert and check load-sharing models.
    #[command(subcommand)]
    Ls(LsCommand),
    /// Certify that a pattern is realised by a load-sharing model.
    #[command(subcommand)]
    Concord(ConcordCommand),
    /// Tally, check and synthesise voting situations.
    #[command(subcommand)]
    Vote(VoteCommand),
    /// Probability signatures of coherent systems.
    #[command(subcommand)]
    Signature(SignatureCommand),
    /// Simulate a load-sharing model and report empirical frequencies.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct AlphaArgs {
    /// Permutation distribution file.
    #[arg(long)]
    dist: PathBuf,
    /// Restrict to one subset, e.g. `1,3`.
    #[arg(long)]
    set: Option<String>,
}

#[derive(Subcommand, Debug)]
enum PatternCommand {
    /// The ranking pattern induced by a distribution.
    Induce {
        #[arg(long)]
        dist: PathBuf,
    },
    /// Generate named, random or all patterns.
    Gen(PatternGenArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PatternKind {
    Random,
    VeryParadox,
    Cyclic,
    All,
}

#[derive(Args, Debug)]
struct PatternGenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "random")]
    kind: PatternKind,
    /// Number of random patterns; more than one prints a list.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow ties in random and enumerated patterns.
    #[arg(long)]
    weak: bool,
}

#[derive(Subcommand, Debug)]
enum LsCommand {
    /// Load-sharing model generating a given distribution.
    Invert {
        #[arg(long)]
        dist: PathBuf,
    },
    /// LS(eps, sigma) model for a strict pattern.
    Build {
        #[arg(long)]
        pattern: PathBuf,
        /// Schedule file; defaults to the universal schedule.
        #[arg(long)]
        eps: Option<PathBuf>,
    },
    /// Check the separation and decay conditions on a schedule.
    CheckEps {
        /// Check the universal schedule for this dimension.
        #[arg(long, conflicts_with = "eps", required_unless_present = "eps")]
        m: Option<usize>,
        #[arg(long)]
        eps: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ConcordCommand {
    /// Build LS(eps, sigma) and certify its p-concordance with sigma.
    Certify {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        eps: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum VoteCommand {
    /// Plurality tallies on every agenda.
    Tally {
        #[arg(long)]
        votes: PathBuf,
    },
    /// N-concordance of a pattern with a voting situation.
    Check {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        votes: PathBuf,
    },
    /// Integer voting situation realizing a strict pattern.
    Synth {
        #[arg(long)]
        pattern: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum SignatureCommand {
    /// Probability signature of a system under a distribution or model.
    Compute {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        dist: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Also list the failure orders behind each entry.
        #[arg(long)]
        terms: bool,
    },
    /// Load-sharing model producing a target signature.
    Invert {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Model whose exact winning probabilities are listed alongside.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Tolerance, in standard errors, for the comparison with the reference.
    #[arg(long, default_value_t = 4.0)]
    sigmas: f64,
}

struct Output {
    payload: Value,
    verified: bool,
}

impl Output {
    fn of<T: Serialize>(value: &T) -> Result<Self> {
        Ok(Output { payload: serde_json::to_value(value)?, verified: true })
    }

    fn checked<T: Serialize>(value: &T, verified: bool) -> Result<Self> {
        Ok(Output { payload: serde_json::to_value(value)?, verified })
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return CommandResult { exit_code: code, stdout, stderr };
        }
    };
    let decimal = cli.decimal;
    let workers = cli.workers;
    let outcome = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| execute(cli.command, workers)),
        Err(e) => Err(Error::Precondition(format!("thread pool: {e}"))),
    };
    match outcome {
        Ok(out) => {
            let mut payload = out.payload;
            if decimal {
                annotate_decimal(&mut payload);
            }
            let mut stdout = serde_json::to_string_pretty(&payload).expect("serializable");
            stdout.push('\n');
            let (exit_code, stderr) = if out.verified {
                (EXIT_OK, String::new())
            } else {
                (EXIT_VERIFICATION_FAILED, "verification failed\n".to_string())
            };
            CommandResult { exit_code, stdout, stderr }
        }
        Err(e) => CommandResult { exit_code: EXIT_INPUT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn execute(command: Command, workers: usize) -> Result<Output> {
    match command {
        Command::Alpha(args) => alpha_output(&args, alpha_family),
        Command::Oracle(args) => alpha_output(&args, alpha_family_scan),
        Command::Pattern(PatternCommand::Induce { dist }) => {
            let rho: PermutationDistribution = load(&dist)?;
            Output::of(&induced_pattern(&alpha_family(&rho)))
        }
        Command::Pattern(PatternCommand::Gen(args)) => pattern_gen(&args),
        Command::Ls(LsCommand::Invert { dist }) => {
            let rho: PermutationDistribution = load(&dist)?;
            Output::of(&invert_to_ls(&rho)?)
        }
        Command::Ls(LsCommand::Build { pattern, eps }) => {
            let sigma: RankingPattern = load(&pattern)?;
            let eps = schedule_or_default(eps.as_deref(), sigma.m())?;
            Output::of(&build_ls_epsilon(&sigma, &eps)?)
        }
        Command::Ls(LsCommand::CheckEps { m, eps }) => {
            let eps = match (m, eps) {
                (_, Some(path)) => load::<EpsilonSchedule>(&path)?,
                (Some(m), None) => epsilon_schedule(m)?,
                (None, None) => return Err(Error::Domain("give --m or --eps".into())),
            };
            let report = check_epsilon_condition(&eps);
            Output::checked(&report, report.passed())
        }
        Command::Concord(ConcordCommand::Certify { pattern, eps }) => {
            let sigma: RankingPattern = load(&pattern)?;
            let cert = match eps {
                Some(path) => certify_concordance_with(&sigma, &load(&path)?)?,
                None => certify_concordance(&sigma)?,
            };
            Output::checked(&cert, cert.passed())
        }
        Command::Vote(VoteCommand::Tally { votes }) => {
            let vs: VotingSituation = load(&votes)?;
            Output::of(&tally(&vs))
        }
        Command::Vote(VoteCommand::Check { pattern, votes }) => {
            let tau: RankingPattern = load(&pattern)?;
            let vs: VotingSituation = load(&votes)?;
            let report = check_n_concordance(&tau, &vs)?;
            Output::checked(&report, report.passed())
        }
        Command::Vote(VoteCommand::Synth { pattern }) => {
            let sigma: RankingPattern = load(&pattern)?;
            Output::of(&synthesize_voting_situation(&sigma)?)
        }
        Command::Signature(SignatureCommand::Compute { system, dist, model, terms }) => {
            let phi: StructureFunction = load(&system)?;
            let rho = match (dist, model) {
                (Some(path), _) => load::<PermutationDistribution>(&path)?,
                (None, Some(path)) => distribution_of(&load_model(&path)?)?,
                (None, None) => return Err(Error::Domain("give --dist or --model".into())),
            };
            let sig = probability_signature(&phi, &rho)?;
            let mut payload = serde_json::to_value(&sig)?;
            if terms {
                payload["terms"] = serde_json::to_value(survival_decomposition_terms(&phi, &rho)?)?;
            }
            Ok(Output { payload, verified: true })
        }
        Command::Signature(SignatureCommand::Invert { system, target }) => {
            let phi: StructureFunction = load(&system)?;
            let target: ProbabilitySignature = load(&target)?;
            Output::of(&ls_for_target_signature(&phi, &target)?)
        }
        Command::Simulate(args) => simulate(&args, workers),
    }
}

fn alpha_output(args: &AlphaArgs, compute: fn(&PermutationDistribution) -> WinningProbabilityFamily) -> Result<Output> {
    let rho: PermutationDistribution = load(&args.dist)?;
    let fam = compute(&rho);
    match &args.set {
        None => Output::of(&fam),
        Some(text) => {
            let set = SubsetMask::from_elements(rho.m(), &parse_index_list(text)?)?;
            if set.len() < 2 {
                return Err(Error::Domain(format!("--set needs at least two elements, got {set}")));
            }
            let row: BTreeMap<String, &Rational> = fam
                .row(set)
                .expect("complete family")
                .iter()
                .map(|(j, a)| (j.to_string(), a))
                .collect();
            Ok(Output { payload: json!({ "alpha": row }), verified: true })
        }
    }
}

fn pattern_gen(args: &PatternGenArgs) -> Result<Output> {
    let single = |p: RankingPattern| Output::of(&p);
    match args.kind {
        PatternKind::VeryParadox => single(pattern_very_paradox(args.m)?),
        PatternKind::Cyclic => single(pattern_cyclic(args.m)?),
        PatternKind::All => {
            let patterns = enumerate_patterns(args.m, !args.weak)?;
            Ok(Output { payload: json!({ "count": patterns.len(), "patterns": patterns }), verified: true })
        }
        PatternKind::Random => {
            let mut patterns = sample_patterns(args.m, args.count.max(1), !args.weak, args.seed)?;
            if args.count <= 1 {
                single(patterns.remove(0))
            } else {
                Ok(Output { payload: json!({ "count": patterns.len(), "patterns": patterns }), verified: true })
            }
        }
    }
}

fn simulate(args: &SimulateArgs, workers: usize) -> Result<Output> {
    let model = load_model(&args.model)?;
    let summary = estimate_alphas(&model, args.samples, args.seed, workers)?;
    let mut payload = serde_json::to_value(&summary)?;
    let mut verified = true;
    if let Some(path) = &args.reference {
        let reference = load_model(path)?;
        let exact = alpha_family(&distribution_of(&reference)?);
        let comparison = compare_alphas(&summary, &exact, args.sigmas);
        verified = comparison.iter().all(|c| c.within);
        payload["reference"] = serde_json::to_value(&comparison)?;
    }
    Ok(Output { payload, verified })
}

fn schedule_or_default(path: Option<&Path>, m: usize) -> Result<EpsilonSchedule> {
    match path {
        Some(p) => load(p),
        None => epsilon_schedule(m),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads and validates a JSON file, naming the file in any error.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Reads either model layout.
pub fn load_model(path: &Path) -> Result<AnyModel> {
    AnyModel::from_json_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Adds a `"decimal"` member holding a copy of the document in which every
/// exact rational string is replaced by its decimal form.
fn annotate_decimal(payload: &mut Value) {
    fn convert(v: &Value) -> Value {
        match v {
            Value::String(s) => match s.parse::<Rational>() {
                Ok(r) => Value::String(r.to_decimal_string()),
                Err(_) => v.clone(),
            },
            Value::Array(items) => Value::Array(items.iter().map(convert).collect()),
            Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), convert(v))).collect()),
            other => other.clone(),
        }
    }
    let copy = convert(payload);
    if let Value::Object(map) = payload {
        map.insert("decimal".into(), copy);
    }
}
