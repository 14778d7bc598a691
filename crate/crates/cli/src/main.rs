//! Command-line front end: run elections, replay the attack demonstrations
//! and render the efficiency comparison.
//!
//! Exit codes: 0 success, 2 configuration error, 3 protocol abort
//! (eavesdropping detected), 4 internal consistency failure.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qvote_core::attacks::{eve_replace_attack, separable_attack};
use qvote_core::batch::{aggregate, run_trials};
use qvote_core::decoy::{CheckSubroutine, DecoyState};
use qvote_core::error::Error;
use qvote_core::scenario::{
    canonical_scenarios, render_report, run_scenario, AdversarySpec, ProtocolKind, ScenarioConfig,
    Summary, VoteSpec,
};
use qvote_core::transcript::Transcript;
use qvote_core::tzl::TzlLeg;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "qvote",
    about = "Simulator for controlled-teleportation and CDSQC quantum voting protocols",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an election scenario and emit its transcript and summary.
    Run(RunArgs),
    /// Replay one of the structural attack demonstrations.
    Attack(AttackArgs),
    /// Render the qubit-efficiency comparison table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Tzl,
    TzlCharliePrep,
    Cdsqc1,
    Cdsqc2,
}

impl From<ProtocolArg> for ProtocolKind {
    fn from(arg: ProtocolArg) -> Self {
        match arg {
            ProtocolArg::Tzl => ProtocolKind::Tzl,
            ProtocolArg::TzlCharliePrep => ProtocolKind::TzlCharliePrep,
            ProtocolArg::Cdsqc1 => ProtocolKind::Cdsqc1,
            ProtocolArg::Cdsqc2 => ProtocolKind::Cdsqc2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SubroutineArg {
    Bb84,
    Gv,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    #[arg(long, default_value_t = 1)]
    n_voters: usize,
    /// Explicit bit string ("1101") or "random" (seed-derived).
    #[arg(long, default_value = "random")]
    votes: String,
    /// Seed for every random choice in the run; mandatory so that runs are
    /// reproducible.
    #[arg(long)]
    seed: u64,
    /// Decoys per message qubit per protected leg (defaults: 0 for the TZL
    /// variants, 1 for the improved protocols).
    #[arg(long)]
    decoys_per_leg: Option<u32>,
    #[arg(long)]
    abort_threshold: Option<f64>,
    /// none | intercept-resend | replace-fixed:{zero,one,plus,minus}
    #[arg(long, default_value = "none")]
    adversary: String,
    /// Fan out this many independently seeded runs (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Use one public rule for all voters (cdsqc1 only).
    #[arg(long)]
    shared_rule: bool,
    #[arg(long, value_enum, default_value_t = SubroutineArg::Bb84)]
    subroutine: SubroutineArg,
    /// Write the transcript (JSON lines) to this path, or "-" for stdout.
    #[arg(long)]
    transcript: Option<String>,
    /// Emit the summary as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AttackArgs {
    #[command(subcommand)]
    kind: AttackKind,
}

#[derive(Subcommand)]
enum AttackKind {
    /// The tallyman prepares a separable channel and decodes every vote
    /// without the controller.
    Separable {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        json: bool,
    },
    /// Controller irrelevance for |±⟩ inputs: purity and recovery table.
    NoController {
        #[arg(long)]
        json: bool,
    },
    /// Qubit replacement on an unprotected TZL leg.
    Replace {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = LegArg::Voting2Qubit)]
        target_leg: LegArg,
        #[arg(long, default_value_t = 0)]
        eve_vote: u8,
        #[arg(long, default_value_t = 1_000)]
        trials: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LegArg {
    Voting2Qubit,
    Voting4Channel,
}

impl From<LegArg> for TzlLeg {
    fn from(arg: LegArg) -> Self {
        match arg {
            LegArg::Voting2Qubit => TzlLeg::Voting2Qubit,
            LegArg::Voting4Channel => TzlLeg::Voting4ChannelQubits,
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Include the shared-rule cdsqc1 variant as a derived row.
    #[arg(long)]
    include_derived: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Jsonl,
}

fn parse_adversary(input: &str) -> Result<AdversarySpec, Error> {
    match input {
        "none" => Ok(AdversarySpec::None),
        "intercept-resend" => Ok(AdversarySpec::InterceptResend),
        other => {
            if let Some(state) = other.strip_prefix("replace-fixed:") {
                let state = match state {
                    "zero" => DecoyState::Zero,
                    "one" => DecoyState::One,
                    "plus" => DecoyState::Plus,
                    "minus" => DecoyState::Minus,
                    bad => {
                        return Err(Error::Config {
                            field: "adversary",
                            message: format!(
                                "unknown replacement state `{bad}` (zero|one|plus|minus)"
                            ),
                        })
                    }
                };
                Ok(AdversarySpec::ReplaceFixed(state))
            } else {
                Err(Error::Config {
                    field: "adversary",
                    message: format!(
                        "unknown adversary `{other}` \
                         (none|intercept-resend|replace-fixed:STATE)"
                    ),
                })
            }
        }
    }
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Config { .. } | Error::Validation(_) | Error::Unimplemented(_) => ExitCode::from(2),
        Error::Consistency(_) => ExitCode::from(4),
        _ => ExitCode::from(1),
    }
}

fn print_summary(summary: &Summary, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string(summary).expect("summary serializes")
        );
        return;
    }
    println!(
        "protocol {}  seed {}  voters {}  tally {}  aborts {}  invalid {}",
        summary.protocol,
        summary.seed,
        summary.n_voters,
        summary.tally,
        summary.aborts,
        summary.invalid
    );
    println!(
        "resources: c={} q={} b={}{}",
        summary.ledger.c,
        summary.ledger.q,
        summary.ledger.b,
        match summary.eta {
            Some(eta) => format!("  eta={:.4} ({:.2}%)", eta, eta * 100.0),
            None => String::new(),
        }
    );
    if let Some(per_vote) = &summary.per_vote {
        println!(
            "per vote:  c={} q={} b={}",
            per_vote.c, per_vote.q, per_vote.b
        );
    }
    if let Some(attack) = &summary.attack {
        println!(
            "attack {}: {}",
            attack.kind,
            serde_json::to_string(attack).expect("attack serializes")
        );
    }
}

fn write_transcript(path: &str, transcript: &Transcript) -> Result<bool, Error> {
    let text = transcript.to_jsonl();
    if path == "-" {
        print!("{text}");
        std::io::stdout().flush().ok();
        Ok(true)
    } else {
        fs::write(path, text)
            .map_err(|e| Error::Validation(format!("cannot write transcript {path}: {e}")))?;
        Ok(false)
    }
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode, Error> {
    let mut config = ScenarioConfig::new(args.protocol.into());
    config.n_voters = args.n_voters;
    config.votes = if args.votes == "random" {
        VoteSpec::Random
    } else {
        VoteSpec::Explicit(args.votes.clone())
    };
    config.seed = args.seed;
    if let Some(d) = args.decoys_per_leg {
        config.decoys_per_leg = d;
    }
    if let Some(t) = args.abort_threshold {
        config.abort_threshold = t;
    }
    config.adversary = parse_adversary(&args.adversary)?;
    config.trials = args.trials;
    config.shared_rule = args.shared_rule;
    config.subroutine = match args.subroutine {
        SubroutineArg::Bb84 => CheckSubroutine::Bb84,
        SubroutineArg::Gv => CheckSubroutine::Gv,
    };

    let mut any_abort = false;
    if args.trials > 1 {
        config.validate()?;
        let results = run_trials(&config, args.trials)?;
        for result in &results {
            if args.json {
                println!(
                    "{}",
                    serde_json::to_string(result).expect("trial result serializes")
                );
            } else {
                println!(
                    "trial {:>4}  seed {:>8}  tally {}  aborts {}  invalid {}",
                    result.trial,
                    result.seed,
                    result.summary.tally,
                    result.summary.aborts,
                    result.summary.invalid
                );
            }
            any_abort |= result.summary.aborts > 0;
        }
        let agg = aggregate(&results);
        if args.json {
            println!(
                "{}",
                serde_json::to_string(&agg).expect("aggregate serializes")
            );
        } else {
            println!(
                "batch: trials {}  total tally {}  total aborts {}  total invalid {}",
                agg.trials, agg.total_tally, agg.total_aborts, agg.total_invalid
            );
        }
    } else {
        let (transcript, summary) = run_scenario(&config)?;
        any_abort = summary.aborts > 0;
        let mut summary_to_stderr = false;
        if let Some(path) = &args.transcript {
            summary_to_stderr = write_transcript(path, &transcript)?;
        }
        if summary_to_stderr {
            let line = serde_json::to_string(&summary).expect("summary serializes");
            eprintln!("{line}");
        } else {
            print_summary(&summary, args.json);
        }
    }
    if any_abort {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_attack(args: &AttackArgs) -> Result<ExitCode, Error> {
    match &args.kind {
        AttackKind::Separable { seed, trials, json } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let votes: Vec<u8> = (0..*trials).map(|t| (t % 2) as u8).collect();
            let report = separable_attack(&votes, &mut rng)?;
            if *json {
                println!(
                    "{}",
                    serde_json::to_string(&report).expect("report serializes")
                );
            } else {
                println!(
                    "separable channel: trials {}  decode success {:.4}  detection {:.4}",
                    report.outcome.trials,
                    report.outcome.success_rate,
                    report.outcome.detection_rate
                );
                println!(
                    "controller outcome == preparation bit: {:.4}; mutual information with \
                     vote: {:.6} bits",
                    report.charlie_match_rate, report.mutual_information_bits
                );
            }
        }
        AttackKind::NoController { json } => {
            let mut config = ScenarioConfig::new(ProtocolKind::Tzl);
            config.adversary = AdversarySpec::NoController;
            let (_, summary) = run_scenario(&config)?;
            let attack = summary.attack.expect("analysis attached");
            if *json {
                println!(
                    "{}",
                    serde_json::to_string(&attack).expect("attack serializes")
                );
            } else {
                println!("controller irrelevance for |+>/|-> inputs:");
                println!("input  outcome  purity      correction  fidelity    cond-distance");
                for row in attack.irrelevance.expect("rows present") {
                    println!(
                        "{:<6} {:<8} {:<11.9} {:<11} {:<11.9} {:.3e}",
                        row.input,
                        row.alice_outcome,
                        row.purity,
                        row.correction,
                        row.recovered_fidelity,
                        row.conditional_distance
                    );
                }
            }
        }
        AttackKind::Replace {
            seed,
            target_leg,
            eve_vote,
            trials,
            json,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let outcome = eve_replace_attack((*target_leg).into(), *eve_vote, *trials, &mut rng)?;
            if *json {
                println!(
                    "{}",
                    serde_json::to_string(&outcome).expect("outcome serializes")
                );
            } else {
                println!(
                    "replacement on {:?}: trials {}  announced == attacker vote {:.4}  \
                     detection {:.4}",
                    target_leg, outcome.trials, outcome.success_rate, outcome.detection_rate
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: &ReportArgs) -> Result<ExitCode, Error> {
    let mut summaries = Vec::new();
    for config in canonical_scenarios(args.seed, args.include_derived) {
        let (_, summary) = run_scenario(&config)?;
        summaries.push(summary);
    }
    let report = render_report(&summaries)?;
    match args.format {
        FormatArg::Text => print!("{}", report.text()),
        FormatArg::Jsonl => print!("{}", report.to_jsonl()),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
