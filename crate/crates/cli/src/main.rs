use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use soldiff_cli::summary::RunSummary;
use soldiff_cli::{
    read_manifest, read_reports, render_groups, run_corpus, summarize, CorpusOptions, GroupBy,
    RULES_ENV,
};
use soldiff_core::linediff::unified;
use soldiff_core::{
    default_solidity_rules, diff_sources, line_diff, load_rules, serialize, DiffError, Format,
    Frontend, MatcherConfig, Side, SolidityParser, TransformRuleSet, GRAMMAR_VERSION,
};

#[derive(Parser)]
#[command(
    name = "soldiff",
    version,
    about = "Structural diffs of Solidity sources"
)]
struct Cli {
    /// Print the parser grammar version and exit.
    #[arg(long)]
    grammar_version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Diff two files and print the edit script.
    Diff(DiffArgs),
    /// Diff every pair of a manifest and write one CSV row per pair.
    Corpus(CorpusArgs),
    /// Aggregate a corpus report.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct Pipeline {
    /// Transform rule file; defaults to the built-in Solidity rules.
    #[arg(long, env = RULES_ENV, value_name = "FILE")]
    rules: Option<PathBuf>,
    #[arg(long, default_value_t = 2, value_name = "N")]
    min_height: usize,
    #[arg(long, default_value_t = 0.5, value_name = "X")]
    min_dice: f64,
    #[arg(long, default_value_t = 100, value_name = "N")]
    max_recovery_size: usize,
}

impl Pipeline {
    fn config(&self) -> Result<(MatcherConfig, TransformRuleSet)> {
        let cfg = MatcherConfig::new(self.min_height, self.min_dice, self.max_recovery_size)?;
        let rules = match &self.rules {
            Some(path) => load_rules(path)
                .with_context(|| format!("loading rules from {}", path.display()))?,
            None => default_solidity_rules(),
        };
        Ok((cfg, rules))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Xml,
    Json,
    Text,
    /// Line-based unified diff instead of an edit script.
    Unified,
}

#[derive(Args)]
struct DiffArgs {
    before: PathBuf,
    after: PathBuf,
    #[arg(long, value_enum, default_value = "xml")]
    format: OutputFormat,
    /// Print both trees before the script.
    #[arg(long)]
    dump_tree: bool,
    #[command(flatten)]
    pipeline: Pipeline,
}

#[derive(Args)]
struct CorpusArgs {
    manifest: PathBuf,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Check that every script rebuilds the after tree.
    #[arg(long)]
    verify: bool,
    /// Fill the ms column. Timed reports differ from run to run.
    #[arg(long)]
    timings: bool,
    /// Report path; standard output if absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    pipeline: Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grouping {
    None,
    Category,
    #[value(name = "mutationCount")]
    MutationCount,
}

#[derive(Args)]
struct SummarizeArgs {
    report: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    group_by: Grouping,
}

// Exit status 2: an input did not parse.
#[derive(Debug)]
struct SyntaxFailure(String);

impl std::fmt::Display for SyntaxFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SyntaxFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        _ if cli.grammar_version => {
            println!("{GRAMMAR_VERSION}");
            Ok(())
        }
        Some(Command::Diff(a)) => diff(a),
        Some(Command::Corpus(a)) => corpus(a),
        Some(Command::Summarize(a)) => summarize_cmd(a),
        None => Err(anyhow::anyhow!("no command given; see --help")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<SyntaxFailure>() => {
            eprintln!("soldiff: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("soldiff: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn diff(a: DiffArgs) -> Result<()> {
    let (cfg, rules) = a.pipeline.config()?;
    let before = read(&a.before)?;
    let after = read(&a.after)?;
    let mut out = io::stdout().lock();
    if let OutputFormat::Unified = a.format {
        let r = line_diff(&before, &after);
        out.write_all(
            unified(
                &r,
                &a.before.display().to_string(),
                &a.after.display().to_string(),
                3,
            )
            .as_bytes(),
        )?;
        return Ok(());
    }
    let mut frontend = Frontend::new(SolidityParser::new(), rules);
    let d = match diff_sources(&mut frontend, &before, &after, &cfg) {
        Ok(d) => d,
        Err(DiffError::Parse { side, error }) => {
            let path = match side {
                Side::Before => &a.before,
                Side::After => &a.after,
            };
            bail!(SyntaxFailure(format!("{}:{error}", path.display())));
        }
        Err(e) => return Err(e.into()),
    };
    if a.dump_tree {
        writeln!(out, "# grammar: {}", frontend.grammar_version())?;
        writeln!(out, "# before: {}", a.before.display())?;
        out.write_all(d.before.dump().as_bytes())?;
        writeln!(out, "# after: {}", a.after.display())?;
        out.write_all(d.after.dump().as_bytes())?;
        writeln!(out, "# script")?;
    }
    let format = match a.format {
        OutputFormat::Xml => Format::Xml,
        OutputFormat::Json => Format::Json,
        OutputFormat::Text | OutputFormat::Unified => Format::Text,
    };
    let text = serialize(&d.script, format);
    if !text.is_empty() {
        writeln!(out, "{text}")?;
    }
    Ok(())
}

fn corpus(a: CorpusArgs) -> Result<()> {
    let (matcher, rules) = a.pipeline.config()?;
    let entries = read_manifest(&a.manifest)?;
    let opts = CorpusOptions {
        jobs: a.jobs.unwrap_or_else(soldiff_cli::default_jobs),
        verify: a.verify,
        timings: a.timings,
        matcher,
        rules,
    };
    let rows = match &a.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            run_corpus(&entries, &opts, BufWriter::new(file))?
        }
        None => run_corpus(&entries, &opts, io::stdout().lock())?,
    };
    let block = format!("grammar: {GRAMMAR_VERSION}\n{}", RunSummary::new(&rows));
    if a.out.is_some() {
        print!("{block}");
    } else {
        eprint!("{block}");
    }
    Ok(())
}

fn summarize_cmd(a: SummarizeArgs) -> Result<()> {
    let file =
        File::open(&a.report).with_context(|| format!("cannot open {}", a.report.display()))?;
    let rows =
        read_reports(file).with_context(|| format!("malformed report {}", a.report.display()))?;
    let by = match a.group_by {
        Grouping::None => GroupBy::None,
        Grouping::Category => GroupBy::Category,
        Grouping::MutationCount => GroupBy::MutationCount,
    };
    print!("{}", render_groups(&summarize(&rows, by)));
    Ok(())
}
