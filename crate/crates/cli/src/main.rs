//! Command-line front end: run sessions, emit reports, replay transcripts.
//!
//! Exit codes: 0 success, 1 abort due to eavesdropping detection (or a
//! replay mismatch), 2 configuration or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cdsqc_core::adversary::{AttackKind, AttackModel, TapPoint};
use cdsqc_core::bits::hex_to_bits;
use cdsqc_core::catalog::ChannelSpec;
use cdsqc_core::check::CheckMode;
use cdsqc_core::io::{
    document_from_outcome, parse_transcript, render_detection_csv, render_detection_text,
    render_table_csv, render_table_text, replay, serialize_transcript,
};
use cdsqc_core::metrics::{count_resources, detection_summary, efficiency, table1, Convention};
use cdsqc_core::protocol::{
    run_session, Link, MessagePayload, ProtocolKind, SessionConfig, Subprotocol,
};
use cdsqc_core::rng::SessionRng;

#[derive(Parser)]
#[command(
    name = "cdsqc",
    version,
    about = "Deterministic simulator for controlled (bidirectional) secure quantum communication"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more protocol sessions and write the transcript(s).
    Run(RunArgs),
    /// Emit a report.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Re-run a stored transcript and verify it regenerates identically.
    Replay { file: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// cdsqc | cbdsqc | cdsqc-alt2 | cdsqc-alt3
    #[arg(long, default_value = "cdsqc")]
    protocol: String,
    /// bell | ghz-like | cat:m=<int> | swap:s=<int>,m=<int>,l=<int> |
    /// controlled:psi1=<bell>,psi2=<bell>,sign=<+|->
    #[arg(long, default_value = "bell")]
    channel: String,
    /// pp | cl | dll | pp-gv | cl-gv | dll-gv
    #[arg(long, default_value = "cl")]
    subprotocol: String,
    /// Blocks per direction.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Check on Charlie's distribution legs: bb84 | gv
    #[arg(long, default_value = "bb84")]
    check: String,
    /// none | intercept-resend | intercept-resend-z | bell-pairing
    #[arg(long, default_value = "none")]
    attack: String,
    #[arg(long, default_value_t = 1.0)]
    attack_prob: f64,
    /// charlie-to-alice | charlie-to-bob | alice-to-bob | bob-to-alice
    #[arg(long, default_value = "charlie-to-alice")]
    attack_link: String,
    /// Message as hex (capacity bits, zero-padded to a nibble). Random
    /// from the seed when omitted.
    #[arg(long)]
    message: Option<String>,
    /// Second message for cbdsqc.
    #[arg(long)]
    message2: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    decoy_fraction: f64,
    #[arg(long, default_value_t = 0.0)]
    error_threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run this many sessions with derived seeds (seed + index).
    #[arg(long, default_value_t = 1)]
    repeat: u64,
    /// Transcript output path (JSON lines); `-` or omitted writes the last
    /// transcript to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print resource counts under this convention:
    /// without-decoys | with-decoys
    #[arg(long)]
    convention: Option<String>,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// The five-row efficiency comparison table.
    Table1 {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical detection rates under the standard attacks.
    Detection {
        #[arg(long, default_value_t = 10_000)]
        bb84_decoys: usize,
        #[arg(long, default_value_t = 2_000)]
        gv_pairs: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_enum<T>(what: &str, value: &str, parse: impl Fn(&str) -> Option<T>) -> Result<T> {
    parse(value).ok_or_else(|| anyhow!("unknown {what} `{value}`"))
}

fn parse_link(value: &str) -> Option<Link> {
    match value {
        "charlie-to-alice" => Some(Link::CharlieToAlice),
        "charlie-to-bob" => Some(Link::CharlieToBob),
        "alice-to-bob" => Some(Link::AliceToBob),
        "bob-to-alice" => Some(Link::BobToAlice),
        _ => None,
    }
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) if path.as_os_str() != "-" => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
        }
        _ => print!("{content}"),
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<u8> {
    let protocol = parse_enum("protocol", &args.protocol, ProtocolKind::from_label)?;
    let channel = ChannelSpec::from_str(&args.channel)?;
    let subprotocol = parse_enum("subprotocol", &args.subprotocol, Subprotocol::from_label)?;
    let check = parse_enum("check", &args.check, |v| match v {
        "bb84" => Some(CheckMode::Bb84),
        "gv" => Some(CheckMode::Gv),
        _ => None,
    })?;
    let attack_kind = parse_enum("attack", &args.attack, AttackKind::from_label)?;
    let attack_link = parse_enum("attack link", &args.attack_link, parse_link)?;
    if args.repeat == 0 {
        bail!("--repeat must be at least 1");
    }

    let mut aborted = 0u64;
    let mut last_doc = None;
    for index in 0..args.repeat {
        let config = SessionConfig {
            protocol,
            subprotocol,
            channel: channel.clone(),
            n: args.n,
            check,
            decoy_fraction: args.decoy_fraction,
            error_threshold: args.error_threshold,
            seed: args.seed + index,
        };
        config.validate()?;
        let capacity = config.message_bits()?;
        let mut rng = SessionRng::new(config.seed);
        let a_to_b = match &args.message {
            Some(hex) => hex_to_bits(hex, capacity)?,
            None => rng.random_bits(capacity),
        };
        let b_to_a = if protocol == ProtocolKind::Cbdsqc {
            Some(match &args.message2 {
                Some(hex) => hex_to_bits(hex, capacity)?,
                None => rng.random_bits(capacity),
            })
        } else {
            if args.message2.is_some() {
                bail!("--message2 is only meaningful for cbdsqc");
            }
            None
        };
        let payload = MessagePayload { a_to_b, b_to_a };

        let attacks = if attack_kind == AttackKind::None {
            Vec::new()
        } else {
            vec![AttackModel {
                kind: attack_kind,
                tap: TapPoint { link: attack_link },
                probability: args.attack_prob,
                pairing_offset: 0,
            }]
        };
        let outcome = run_session(&config, &payload, &attacks)?;
        if outcome.result.abort {
            aborted += 1;
            eprintln!(
                "session {index}: aborted ({})",
                outcome.result.abort_reason.as_deref().unwrap_or("detected")
            );
        } else {
            for delivered in &outcome.result.delivered {
                eprintln!(
                    "session {index}: delivered {} bits ({:?}): {}",
                    delivered.bits, delivered.direction, delivered.hex
                );
            }
            if let Some(label) = &args.convention {
                let convention = parse_enum("convention", label, Convention::from_label)?;
                let counts = count_resources(&outcome.transcript, convention)?;
                let report = efficiency(protocol.label(), counts)?;
                eprintln!(
                    "session {index}: c={} q={} b={} eta1={} eta2={}",
                    counts.c,
                    counts.q,
                    counts.b,
                    cdsqc_core::metrics::format_percent(report.eta1),
                    cdsqc_core::metrics::format_percent(report.eta2),
                );
            }
        }
        last_doc = Some(document_from_outcome(&config, &payload, &attacks, &outcome));
    }

    if let Some(doc) = &last_doc {
        let text = serialize_transcript(doc)?;
        write_or_print(&args.out, &text)?;
    }
    Ok(if aborted > 0 { 1 } else { 0 })
}

fn cmd_report(cmd: &ReportCommand) -> Result<u8> {
    match cmd {
        ReportCommand::Table1 {
            n,
            seed,
            format,
            out,
        } => {
            let rows = table1(*n, *seed)?;
            let content = match format.as_str() {
                "csv" => render_table_csv(&rows),
                "text" => render_table_text(&rows),
                other => bail!("unknown format `{other}` (text or csv)"),
            };
            write_or_print(out, &content)?;
        }
        ReportCommand::Detection {
            bb84_decoys,
            gv_pairs,
            trials,
            n,
            seed,
            format,
            out,
        } => {
            let summary = detection_summary(*bb84_decoys, *gv_pairs, *trials, *n, *seed)?;
            let content = match format.as_str() {
                "csv" => render_detection_csv(&summary),
                "text" => render_detection_text(&summary),
                other => bail!("unknown format `{other}` (text or csv)"),
            };
            write_or_print(out, &content)?;
        }
    }
    Ok(0)
}

fn cmd_replay(file: &PathBuf) -> Result<u8> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let doc = parse_transcript(&text)?;
    let (_regenerated, identical) = replay(&doc)?;
    if identical {
        eprintln!("replay: transcript regenerated byte-identically");
        Ok(0)
    } else {
        eprintln!("replay: regenerated transcript differs from the document");
        Ok(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Report(cmd) => cmd_report(cmd),
        Command::Replay { file } => cmd_replay(file),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
