//! Command-line front end: `table`, `synth`, `eval` and `fit-prior`.
//!
//! Exit status is 0 on success, 1 on runtime failure and 2 on usage errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::beta::BetaParams;
use crate::error::{Error, Result};
use crate::estimators::{
    default_exclusions, fit_prior_from_ratios, EstimatorConfig, FrequencyPair, PriorFit,
};
use crate::evaluation::{
    rank_rules, recall_curve, write_curve_csv, write_summary_csv, CurveSummary, DenominatorMode,
};
use crate::mining::{count_pairs, score_rules, write_rules_csv, Direction, PairCounts};
use crate::synth::{
    compute_stats, generate_dataset, synthesize_relation, HierarchicalRelation, TransactionDataset,
};
use crate::table::{generate_table, write_csv};

/// Exclusion list used by `fit-prior` unless overridden.
pub const DEFAULT_EXCLUDE: &str = "0,1/1,1/2,1/3,2/3,1/4,3/4,1/5,2/5,3/5,4/5";

#[derive(Debug, Parser)]
#[command(
    name = "condprob",
    version,
    about = "Conservative conditional-probability estimation and its evaluation harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the MLE / posterior mean / lower bound table for 1 <= n <= n_max.
    Table(TableArgs),
    /// Generate a transaction dataset from a parent/child relation.
    Synth(SynthArgs),
    /// Score, rank and evaluate rules for one or more estimators.
    Eval(EvalArgs),
    /// Fit a Beta prior to observed ratios by the method of moments.
    FitPrior(FitPriorArgs),
}

fn open_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must lie strictly between 0 and 1"))
    }
}

fn closed_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} must lie in [0, 1]"))
    }
}

fn positive_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn estimator_spec(s: &str) -> std::result::Result<EstimatorConfig, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_max: u64,
    #[arg(long, default_value_t = 0.99, value_parser = open_unit)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive_real)]
    pub prior_a: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive_real)]
    pub prior_b: f64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Relation TSV (`parent<TAB>child`). When omitted a relation is
    /// synthesized from --parents/--children/--shared.
    #[arg(long, conflicts_with_all = ["parents", "children", "shared"])]
    pub relation: Option<PathBuf>,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub parents: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub children: u64,
    /// Fraction of children attached to a second parent.
    #[arg(long, default_value_t = 0.1, value_parser = closed_unit)]
    pub shared: f64,
    /// Number of transactions.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Relation pairs unioned into each transaction.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub pairs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Transactions output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the relation used (TSV).
    #[arg(long)]
    pub relation_out: Option<PathBuf>,
    /// Also write the dataset statistics.
    #[arg(long)]
    pub stats_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    /// P(parent | child) for parent/child pairs only.
    Typed,
    /// Larger of the two conditional estimates, every co-occurring pair.
    MaxBoth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenominatorArg {
    /// Relation pairs that co-occur in the data.
    Observed,
    /// All relation pairs.
    Relation,
}

impl From<DenominatorArg> for DenominatorMode {
    fn from(d: DenominatorArg) -> Self {
        match d {
            DenominatorArg::Observed => DenominatorMode::ObservedRightKinds,
            DenominatorArg::Relation => DenominatorMode::RelationSize,
        }
    }
}

fn direction<'a>(arg: DirectionArg, r: &'a HierarchicalRelation) -> Direction<'a> {
    match arg {
        DirectionArg::Typed => Direction::TypedChildCondition(r),
        DirectionArg::MaxBoth => Direction::MaxBoth,
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub transactions: PathBuf,
    #[arg(long)]
    pub relation: PathBuf,
    /// Estimator spec `kind[:key=val,...]`; repeat for side-by-side curves.
    /// Kinds: mle, laplace, pmean, lb, cp. Keys: alpha, a, b, minsup.
    #[arg(long = "estimator", required = true, value_parser = estimator_spec)]
    pub estimators: Vec<EstimatorConfig>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Typed)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = DenominatorArg::Observed)]
    pub denominator: DenominatorArg,
    /// Rank cut-off for the summary's mean-recall column.
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    pub auc_rank: u64,
    /// Output path prefix; writes `<prefix>.<label>.rules.csv`,
    /// `<prefix>.<label>.curve.csv` and `<prefix>.summary.csv`.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitPriorArgs {
    /// Transactions file; ratios are the MLE scores of its co-occurring pairs.
    #[arg(long, required_unless_present = "counts", conflicts_with = "counts")]
    pub transactions: Option<PathBuf>,
    /// CSV with header `n,x`, one observed pair per line.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Relation TSV; with it only P(parent | child) ratios are used,
    /// without it the larger direction of every co-occurring pair.
    #[arg(long, requires = "transactions")]
    pub relation: Option<PathBuf>,
    /// Comma-separated ratios to drop, as fractions or decimals.
    #[arg(long, default_value = DEFAULT_EXCLUDE)]
    pub exclude: String,
}

/// Parses `p/q` or decimal ratios separated by commas.
pub fn parse_exclusions(list: &str) -> Result<Vec<f64>> {
    let bad = |item: &str| Error::Domain(format!("invalid exclusion `{item}`"));
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| match item.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| bad(item))?;
                let q: f64 = q.trim().parse().map_err(|_| bad(item))?;
                if q == 0.0 {
                    return Err(bad(item));
                }
                Ok(p / q)
            }
            None => item.parse().map_err(|_| bad(item)),
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish<W: Write>(path: &Path, result: io::Result<()>, mut w: W) -> Result<()> {
    result
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn cmd_table(args: &TableArgs, stdout: &mut dyn Write) -> Result<()> {
    let prior = BetaParams::new(args.prior_a, args.prior_b)?;
    let rows = generate_table(args.n_max, args.alpha, prior)?;
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            let r = write_csv(&rows, &mut w);
            finish(path, r, w)
        }
        None => write_csv(&rows, stdout).map_err(|e| Error::io("<stdout>", e)),
    }
}

pub fn cmd_synth(args: &SynthArgs, stdout: &mut dyn Write) -> Result<()> {
    let relation = match &args.relation {
        Some(path) => HierarchicalRelation::read_tsv(path)?,
        None => synthesize_relation(
            args.parents as usize,
            args.children as usize,
            args.shared,
            args.seed,
        )?,
    };
    let dataset = generate_dataset(
        &relation,
        args.count as usize,
        args.pairs as usize,
        args.seed,
    )?;

    let mut w = create(&args.out)?;
    let r = dataset.write(&mut w);
    finish(&args.out, r, w)?;

    if let Some(path) = &args.relation_out {
        let mut w = create(path)?;
        let r = relation.write_tsv(&mut w);
        finish(path, r, w)?;
    }

    let stats = compute_stats(&dataset, &relation).to_string();
    if let Some(path) = &args.stats_out {
        let mut w = create(path)?;
        let r = w.write_all(stats.as_bytes());
        finish(path, r, w)?;
    }
    stdout
        .write_all(stats.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn load_nonempty(path: &Path) -> Result<TransactionDataset> {
    let dataset = TransactionDataset::read(path)?;
    if dataset.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} contains no transactions",
            path.display()
        )));
    }
    Ok(dataset)
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

struct Evaluated {
    label: String,
    rules_csv: Vec<u8>,
    curve_csv: Vec<u8>,
    summary: CurveSummary,
}

fn evaluate_one(
    config: &EstimatorConfig,
    counts: &PairCounts,
    relation: &HierarchicalRelation,
    args: &EvalArgs,
) -> Result<Evaluated> {
    let label = config.label();
    let ranked = rank_rules(score_rules(
        counts,
        config,
        direction(args.direction, relation),
    )?);
    let curve = recall_curve(
        &ranked,
        relation,
        args.denominator.into(),
        counts,
        label.clone(),
    );
    let mut rules_csv = Vec::new();
    write_rules_csv(&ranked, &mut rules_csv).map_err(|e| Error::io("<buffer>", e))?;
    let mut curve_csv = Vec::new();
    write_curve_csv(&curve, &mut curve_csv).map_err(|e| Error::io("<buffer>", e))?;
    Ok(Evaluated {
        summary: CurveSummary::of(&curve, args.auc_rank as usize),
        label,
        rules_csv,
        curve_csv,
    })
}

pub fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<()> {
    let dataset = load_nonempty(&args.transactions)?;
    let relation = HierarchicalRelation::read_tsv(&args.relation)?;
    let counts = count_pairs(&dataset);

    let mut labels: Vec<String> = args.estimators.iter().map(EstimatorConfig::label).collect();
    labels.sort();
    if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::EstimatorSpec {
            spec: w[0].clone(),
            reason: "estimator given more than once".into(),
        });
    }

    let results: Vec<Result<Evaluated>> = thread::scope(|scope| {
        let handles: Vec<_> = args
            .estimators
            .iter()
            .map(|config| scope.spawn(|| evaluate_one(config, &counts, &relation, args)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect()
    });

    let mut summaries = Vec::new();
    for result in results {
        let ev = result?;
        for (suffix, bytes) in [
            (format!(".{}.rules.csv", ev.label), &ev.rules_csv),
            (format!(".{}.curve.csv", ev.label), &ev.curve_csv),
        ] {
            let path = suffixed(&args.out_prefix, &suffix);
            let mut w = create(&path)?;
            let r = w.write_all(bytes);
            finish(&path, r, w)?;
        }
        summaries.push(ev.summary);
    }

    let k = args.auc_rank as usize;
    let path = suffixed(&args.out_prefix, ".summary.csv");
    let mut w = create(&path)?;
    let r = write_summary_csv(&summaries, k, &mut w);
    finish(&path, r, w)?;
    write_summary_csv(&summaries, k, stdout).map_err(|e| Error::io("<stdout>", e))
}

fn read_counts_csv(path: &Path) -> Result<Vec<FrequencyPair>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    match lines.next() {
        Some((_, header)) if header.trim() == "n,x" => {}
        _ => return Err(parse_err(1, "expected header `n,x`".into())),
    }
    let mut pairs = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (n, x) = line
            .split_once(',')
            .ok_or_else(|| parse_err(i + 1, "expected `n,x`".into()))?;
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|e| parse_err(i + 1, format!("n: {e}")))?;
        let x: u64 = x
            .trim()
            .parse()
            .map_err(|e| parse_err(i + 1, format!("x: {e}")))?;
        pairs.push(FrequencyPair::new(n, x).map_err(|e| parse_err(i + 1, e.to_string()))?);
    }
    Ok(pairs)
}

/// MLE ratios the prior is fitted to.
pub fn observed_ratios(args: &FitPriorArgs) -> Result<Vec<f64>> {
    if let Some(path) = &args.counts {
        return read_counts_csv(path)?
            .into_iter()
            .filter(|f| f.n() > 0)
            .map(crate::estimators::mle)
            .collect();
    }
    let path = args
        .transactions
        .as_ref()
        .expect("clap enforces transactions or counts");
    let dataset = load_nonempty(path)?;
    let counts = count_pairs(&dataset);
    let relation = args
        .relation
        .as_deref()
        .map(HierarchicalRelation::read_tsv)
        .transpose()?;
    let dir = match &relation {
        Some(r) => Direction::TypedChildCondition(r),
        None => Direction::MaxBoth,
    };
    let mle: EstimatorConfig = EstimatorConfig::new(crate::estimators::EstimatorKind::Mle);
    Ok(score_rules(&counts, &mle, dir)?
        .into_iter()
        .map(|r| r.score)
        .collect())
}

pub fn cmd_fit_prior(args: &FitPriorArgs, stdout: &mut dyn Write) -> Result<PriorFit> {
    let excluded = if args.exclude == DEFAULT_EXCLUDE {
        default_exclusions()
    } else {
        parse_exclusions(&args.exclude)?
    };
    let ratios = observed_ratios(args)?;
    let fit = fit_prior_from_ratios(&ratios, &excluded)?;
    writeln!(
        stdout,
        "a={}\nb={}\nretained={}\nmean={}\nvariance={}",
        fit.params.a(),
        fit.params.b(),
        fit.retained,
        fit.mean,
        fit.variance
    )
    .map_err(|e| Error::io("<stdout>", e))?;
    Ok(fit)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Table(args) => cmd_table(args, stdout),
        Command::Synth(args) => cmd_synth(args, stdout),
        Command::Eval(args) => cmd_eval(args, stdout),
        Command::FitPrior(args) => cmd_fit_prior(args, stdout).map(|_| ()),
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
