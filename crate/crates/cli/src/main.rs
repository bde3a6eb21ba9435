//! `biint`: prove, refute, check models, fuzz and benchmark.
//!
//! Exit codes: 0 valid (or check passed), 1 invalid (or check failed),
//! 2 usage, parse or model input error, 3 internal failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use biint_core::emit::{
    emit_derivation, emit_model, graph_text, parse_corpus, DerivationJson, Format,
};
use biint_core::fuzz::{fuzz, FuzzOptions};
use biint_core::prover::{Config, SearchStats, DEFAULT_BUDGET};
use biint_core::semantics::{bounded_countermodel, KripkeModel, ModelSpec};
use biint_core::sequent::RuleMutation;
use biint_core::verdict::{decide, Verdict};
use biint_core::{parse_input, parse_sequent, ParseError, ProveError, Sequent};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::Serialize;

/// Above this many atoms the oracle cross-check of VALID verdicts is skipped.
const ORACLE_MAX_ATOMS: usize = 4;

#[derive(Parser)]
#[command(
    name = "biint",
    version,
    about = "Bi-intuitionistic prover with Kripke countermodels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Text,
    Json,
    Dot,
    Latex,
}

impl From<Emit> for Format {
    fn from(e: Emit) -> Format {
        match e {
            Emit::Text => Format::Text,
            Emit::Json => Format::Json,
            Emit::Dot => Format::Dot,
            Emit::Latex => Format::Latex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutation {
    OrLDropsSecondPremise,
    ImpRKeepsContext,
    AndRDropsPrincipal,
}

impl From<Mutation> for RuleMutation {
    fn from(m: Mutation) -> RuleMutation {
        match m {
            Mutation::OrLDropsSecondPremise => RuleMutation::OrLDropsSecondPremise,
            Mutation::ImpRKeepsContext => RuleMutation::ImpRKeepsContext,
            Mutation::AndRDropsPrincipal => RuleMutation::AndRDropsPrincipal,
        }
    }
}

#[derive(clap::Args)]
struct SearchArgs {
    /// Maximum number of rule applications per search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Replace a rule by a variant (for mutation testing and replaying
    /// simplified derivations).
    #[arg(long, value_enum)]
    mutation: Option<Mutation>,
}

impl SearchArgs {
    fn config(&self, trace: bool) -> Config {
        Config {
            budget: self.budget,
            trace,
            mutation: self.mutation.map(Into::into),
            ..Config::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide a formula or sequent; emits a derivation, or a countermodel.
    Prove {
        /// A formula, or a sequent `A, B |- C, D`.
        input: String,
        /// Require the input to be a sequent.
        #[arg(long)]
        sequent: bool,
        #[arg(long, value_enum, default_value = "text")]
        emit: Emit,
        /// Include failed transitional branches and variable flow.
        #[arg(long)]
        trace: bool,
        /// World bound of the brute-force cross-check of VALID verdicts; 0
        /// turns it off.
        #[arg(long, default_value_t = 3)]
        oracle_worlds: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check whether a model falsifies a sequent at a world.
    CheckModel {
        /// Model JSON file.
        model: PathBuf,
        /// A formula or sequent.
        input: String,
        /// World id to check at.
        #[arg(long)]
        point: usize,
    },
    /// Cross-check prover, countermodels and oracle on every small formula.
    Fuzz {
        #[arg(long, default_value_t = 2)]
        atoms: usize,
        /// Maximum number of binary connectives.
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 3)]
        oracle_worlds: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Time a corpus of `VALID:` / `INVALID:` lines and check the verdicts.
    Bench {
        corpus: PathBuf,
        /// Shuffle the corpus with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        search: SearchArgs,
    },
}

/// Errors that map to exit code 2.
#[derive(Debug, thiserror::Error)]
enum InputError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Other(String),
}

fn read_input(text: &str, sequent: bool) -> Result<Sequent, InputError> {
    if sequent && !text.contains("|-") {
        return Err(InputError::Other(
            "--sequent given but the input has no `|-`".into(),
        ));
    }
    Ok(if sequent {
        parse_sequent(text)?
    } else {
        parse_input(text)?
    })
}

#[derive(Serialize)]
struct ProveJson<'a> {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivation: Option<DerivationJson>,
    stats: &'a SearchStats,
}

fn json_output(verdict: &Verdict) -> ProveJson<'_> {
    let proof = verdict.proof();
    let cm = match verdict {
        Verdict::Invalid(_, cm) => Some(cm),
        Verdict::Valid(_) => None,
    };
    ProveJson {
        verdict: if verdict.is_valid() {
            "valid"
        } else {
            "invalid"
        },
        point: cm.map(|c| c.world),
        model: cm.map(|c| c.model.to_spec()),
        derivation: proof.root.as_ref().map(DerivationJson::from),
        stats: &proof.stats,
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn write_stdout(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn prove_cmd(
    text: &str,
    sequent: bool,
    emit: Emit,
    trace: bool,
    oracle_worlds: usize,
    search: &SearchArgs,
) -> anyhow::Result<ExitCode> {
    let seq = match read_input(text, sequent) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let cfg = search.config(trace);
    let start = Instant::now();
    let verdict = match decide(&seq, &cfg) {
        Ok(v) => v,
        Err(e @ ProveError::BudgetExceeded(_)) => {
            eprintln!("biint: {e}");
            return Ok(ExitCode::from(3));
        }
        Err(e) => return Err(e).context("deciding the sequent"),
    };
    let elapsed = start.elapsed();
    if verdict.is_valid() && oracle_worlds > 0 {
        let atoms = seq.atoms();
        if atoms.len() <= ORACLE_MAX_ATOMS {
            if let Some((m, w)) = bounded_countermodel(&seq, oracle_worlds, &atoms) {
                anyhow::bail!(
                    "proved, but world {w} of this model falsifies it:\n{}",
                    m.to_json()
                );
            }
        } else {
            eprintln!("biint: oracle cross-check skipped ({} atoms)", atoms.len());
        }
    }
    let format = Format::from(emit);
    let mut out = String::new();
    match (format, &verdict) {
        (Format::Json, _) => {
            out = serde_json::to_string_pretty(&json_output(&verdict))?;
            out.push('\n');
        }
        (Format::Text, Verdict::Valid(p)) => {
            writeln!(
                out,
                "VALID ({elapsed:.1?}, {} nodes)",
                p.stats.nodes_expanded
            )?;
            if let Some(root) = &p.root {
                out.push_str(&emit_derivation(root, format));
            }
        }
        (Format::Text, Verdict::Invalid(p, cm)) => {
            writeln!(
                out,
                "INVALID ({elapsed:.1?}, {} nodes); falsified at world {}",
                p.stats.nodes_expanded, cm.world
            )?;
            if trace {
                if let Some(root) = &p.root {
                    out.push_str(&emit_derivation(root, format));
                }
                out.push_str("model graph:\n");
                out.push_str(&graph_text(&cm.graph));
            }
            out.push_str("model:\n");
            out.push_str(&emit_model(&cm.model, format));
        }
        (_, Verdict::Valid(p)) => {
            if let Some(root) = &p.root {
                out.push_str(&emit_derivation(root, format));
            }
        }
        (_, Verdict::Invalid(_, cm)) => out.push_str(&emit_model(&cm.model, format)),
    }
    write_stdout(&out)?;
    Ok(if verdict.is_valid() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn check_model_cmd(path: &PathBuf, text: &str, point: usize) -> anyhow::Result<ExitCode> {
    let seq = match read_input(text, false) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let json = match std::fs::read_to_string(path) {
        Ok(j) => j,
        Err(e) => return usage(InputError::Other(format!("{}: {e}", path.display()))),
    };
    let model = match KripkeModel::from_json(&json) {
        Ok(m) => m,
        Err(e) => return usage(InputError::Other(e.to_string())),
    };
    match model.falsifies(point, &seq) {
        Ok(true) => {
            write_stdout(&format!("falsified at world {point}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Ok(false) => {
            write_stdout(&format!("not falsified at world {point}\n"))?;
            Ok(ExitCode::from(1))
        }
        Err(e) => usage(InputError::Other(e.to_string())),
    }
}

fn fuzz_cmd(
    atoms: usize,
    size: usize,
    oracle_worlds: usize,
    search: &SearchArgs,
) -> anyhow::Result<ExitCode> {
    let opts = FuzzOptions {
        atoms,
        max_connectives: size,
        oracle_worlds,
        config: Config {
            record: false,
            ..search.config(false)
        },
    };
    let report = fuzz(&opts, |r| {
        eprintln!("{} formulas, {} failures", r.formulas, r.total_failures())
    });
    write_stdout(&report.to_string())?;
    Ok(if report.total_failures() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench_cmd(path: &PathBuf, seed: Option<u64>, search: &SearchArgs) -> anyhow::Result<ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage(InputError::Other(format!("{}: {e}", path.display()))),
    };
    let mut items = match parse_corpus(&text) {
        Ok(i) => i,
        Err(e) => return usage(e.into()),
    };
    if let Some(seed) = seed {
        items.shuffle(&mut StdRng::seed_from_u64(seed));
    }
    let cfg = Config {
        record: false,
        ..search.config(false)
    };
    let mut mismatches = 0;
    let mut out = String::new();
    writeln!(
        out,
        "{:>5}  {:<8} {:<8} {:>10} {:>7} {:>5}  input",
        "line", "expected", "got", "time", "nodes", "depth"
    )?;
    for item in &items {
        let start = Instant::now();
        let verdict = decide(&item.sequent, &cfg).with_context(|| format!("line {}", item.line))?;
        let elapsed = start.elapsed();
        let label = |v: bool| if v { "VALID" } else { "INVALID" };
        let ok = verdict.is_valid() == item.expect_valid;
        if !ok {
            mismatches += 1;
        }
        let stats = &verdict.proof().stats;
        writeln!(
            out,
            "{:>5}  {:<8} {:<8} {:>10} {:>7} {:>5}  {}{}",
            item.line,
            label(item.expect_valid),
            label(verdict.is_valid()),
            format!("{elapsed:.1?}"),
            stats.nodes_expanded,
            stats.max_depth,
            item.text,
            if ok { "" } else { "  MISMATCH" }
        )?;
    }
    writeln!(out, "{} items, {mismatches} mismatches", items.len())?;
    write_stdout(&out)?;
    Ok(if mismatches == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn usage(e: InputError) -> anyhow::Result<ExitCode> {
    eprintln!("biint: {e}");
    Ok(ExitCode::from(2))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Prove {
            input,
            sequent,
            emit,
            trace,
            oracle_worlds,
            search,
        } => prove_cmd(input, *sequent, *emit, *trace, *oracle_worlds, search),
        Command::CheckModel {
            model,
            input,
            point,
        } => check_model_cmd(model, input, *point),
        Command::Fuzz {
            atoms,
            size,
            oracle_worlds,
            search,
        } => fuzz_cmd(*atoms, *size, *oracle_worlds, search),
        Command::Bench {
            corpus,
            seed,
            search,
        } => bench_cmd(corpus, *seed, search),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("biint: internal error: {e:#}");
            ExitCode::from(3)
        }
    }
}
