//! Scenario configuration and the runner that composes the protocol
//! modules, plus the efficiency-comparison report.
//!
//! A scenario is fully determined by its configuration; in particular the
//! seed fixes every random choice, so two runs of the same configuration
//! produce byte-identical transcripts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::{charlie_irrelevance, eve_replace_attack, separable_attack, AttackOutcome};
use crate::cdsqc::{protocol1_run, protocol2_run, Pairing, Protocol1Config, Protocol2Config};
use crate::decoy::{CheckSubroutine, DecoyState, EavesdropperModel, DEFAULT_ABORT_THRESHOLD};
use crate::error::{Error, Result};
use crate::ledger::{eta, ledger_from_transcript, ResourceLedger};
use crate::qstate::StateVector;
use crate::states::GhzLikeSpec;
use crate::transcript::{Actor, Phase, Transcript};
use crate::tzl::{
    run_tzl_voting, CaPolicy, ChannelPrep, CorrectionPolicy, TzlAdversary, TzlConfig, TzlLeg,
    VoteStatus, VotingRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Tzl,
    TzlCharliePrep,
    Cdsqc1,
    Cdsqc2,
}

impl ProtocolKind {
    pub fn label(self) -> &'static str {
        match self {
            ProtocolKind::Tzl => "tzl",
            ProtocolKind::TzlCharliePrep => "tzl-charlie-prep",
            ProtocolKind::Cdsqc1 => "cdsqc1",
            ProtocolKind::Cdsqc2 => "cdsqc2",
        }
    }

    pub fn is_tzl(self) -> bool {
        matches!(self, ProtocolKind::Tzl | ProtocolKind::TzlCharliePrep)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoteSpec {
    Random,
    Explicit(String),
}

/// Channel tamper or attack demonstration selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversarySpec {
    None,
    InterceptResend,
    ReplaceFixed(DecoyState),
    Separable,
    NoController,
    Replace { leg: TzlLeg, eve_vote: u8 },
}

impl AdversarySpec {
    fn is_attack_demo(&self) -> bool {
        matches!(
            self,
            AdversarySpec::Separable | AdversarySpec::NoController | AdversarySpec::Replace { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub protocol: ProtocolKind,
    pub n_voters: usize,
    pub votes: VoteSpec,
    pub seed: u64,
    pub adversary: AdversarySpec,
    /// Decoys per message qubit per protected leg. The faithful TZL runs
    /// with 0; the improved protocols default to 1.
    pub decoys_per_leg: u32,
    pub abort_threshold: f64,
    pub trials: u64,
    /// Protocol 1 variant with one public rule for all voters.
    pub shared_rule: bool,
    pub subroutine: CheckSubroutine,
}

impl ScenarioConfig {
    pub fn new(protocol: ProtocolKind) -> Self {
        let decoys = if protocol.is_tzl() { 0 } else { 1 };
        ScenarioConfig {
            protocol,
            n_voters: 1,
            votes: VoteSpec::Random,
            seed: 0,
            adversary: AdversarySpec::None,
            decoys_per_leg: decoys,
            abort_threshold: DEFAULT_ABORT_THRESHOLD,
            trials: 1,
            shared_rule: false,
            subroutine: CheckSubroutine::Bb84,
        }
    }

    /// Row label for reports; decoy-protected TZL is its own scenario.
    pub fn label(&self) -> String {
        match self.protocol {
            ProtocolKind::Tzl if self.decoys_per_leg > 0 => "tzl+decoys".into(),
            ProtocolKind::Cdsqc1 if self.shared_rule => "cdsqc1-shared-rule (derived)".into(),
            p => p.label().into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.abort_threshold) {
            return Err(Error::Config {
                field: "abort_threshold",
                message: format!("{} is not in [0, 1]", self.abort_threshold),
            });
        }
        if let VoteSpec::Explicit(bits) = &self.votes {
            if bits.len() != self.n_voters {
                return Err(Error::Config {
                    field: "votes",
                    message: format!("{} vote bits for {} voters", bits.len(), self.n_voters),
                });
            }
            if bits.chars().any(|c| c != '0' && c != '1') {
                return Err(Error::Config {
                    field: "votes",
                    message: "vote string must be binary".into(),
                });
            }
        }
        if self.trials == 0 {
            return Err(Error::Config {
                field: "trials",
                message: "at least one trial is required".into(),
            });
        }
        if self.adversary.is_attack_demo() && !self.protocol.is_tzl() {
            return Err(Error::Config {
                field: "adversary",
                message: format!(
                    "attack demonstration {:?} targets the TZL protocol; \
                     use an eavesdropper model against the decoy-protected protocols",
                    self.adversary
                ),
            });
        }
        if matches!(self.adversary, AdversarySpec::Replace { .. }) && self.decoys_per_leg > 0 {
            return Err(Error::Config {
                field: "adversary",
                message: "the replacement attack runs against unprotected legs only; \
                          drop --decoys-per-leg or use an eavesdropper model"
                    .into(),
            });
        }
        if self.shared_rule && self.protocol != ProtocolKind::Cdsqc1 {
            return Err(Error::Config {
                field: "shared_rule",
                message: "the shared-rule variant applies to cdsqc1 only".into(),
            });
        }
        Ok(())
    }

    fn resolve_votes<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        match &self.votes {
            VoteSpec::Explicit(bits) => bits.bytes().map(|b| b - b'0').collect(),
            VoteSpec::Random => (0..self.n_voters)
                .map(|_| u8::from(rng.random::<bool>()))
                .collect(),
        }
    }
}

/// Attack-demonstration figures attached to a summary.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AttackSummary {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<AttackOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charlie_match_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutual_information_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irrelevance: Option<Vec<IrrelevanceRow>>,
}

/// One serializable row of the controller-irrelevance analysis.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IrrelevanceRow {
    pub input: String,
    pub alice_outcome: String,
    pub purity: f64,
    pub correction: String,
    pub recovered_fidelity: f64,
    pub conditional_distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub protocol: String,
    pub n_voters: usize,
    pub seed: u64,
    pub tally: u64,
    pub aborts: u32,
    pub invalid: u32,
    pub ledger: ResourceLedger,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_vote: Option<ResourceLedger>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackSummary>,
}

fn count_invalid(statuses: &[VoteStatus]) -> u32 {
    statuses
        .iter()
        .filter(|s| matches!(s, VoteStatus::Invalid))
        .count() as u32
}

fn summarize(
    config: &ScenarioConfig,
    transcript: &Transcript,
    tally: u64,
    aborts: u32,
    invalid: u32,
    attack: Option<AttackSummary>,
) -> Result<Summary> {
    let ledger = ledger_from_transcript(transcript, false)?;
    let per_vote = ledger_from_transcript(transcript, true).ok();
    let eta_value = eta(&ledger).ok();
    Ok(Summary {
        protocol: config.label(),
        n_voters: config.n_voters,
        seed: config.seed,
        tally,
        aborts,
        invalid,
        ledger,
        per_vote,
        eta: eta_value,
        attack,
    })
}

fn annotate_attack(transcript: &mut Transcript, summary: &AttackSummary) {
    let value = serde_json::to_string(summary).expect("attack summary serializes");
    transcript.announce(Phase::Counting, Actor::Eve, "attack-report", value, 0);
}

fn tzl_adversary(spec: &AdversarySpec) -> Option<TzlAdversary> {
    match spec {
        AdversarySpec::InterceptResend => {
            Some(TzlAdversary::Tap(EavesdropperModel::InterceptResend))
        }
        AdversarySpec::ReplaceFixed(state) => {
            Some(TzlAdversary::Tap(EavesdropperModel::ReplaceFixed(*state)))
        }
        AdversarySpec::Replace { leg, eve_vote } => Some(TzlAdversary::EveReplace {
            leg: *leg,
            vote: *eve_vote,
        }),
        _ => None,
    }
}

fn generic_adversary(spec: &AdversarySpec) -> Option<EavesdropperModel> {
    match spec {
        AdversarySpec::InterceptResend => Some(EavesdropperModel::InterceptResend),
        AdversarySpec::ReplaceFixed(state) => Some(EavesdropperModel::ReplaceFixed(*state)),
        _ => None,
    }
}

/// Run one scenario. Deterministic: the seed fixes the votes, the rules and
/// every measurement outcome, so the returned transcript is reproducible
/// byte for byte.
pub fn run_scenario(config: &ScenarioConfig) -> Result<(Transcript, Summary)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match config.adversary {
        AdversarySpec::Separable => return run_separable_scenario(config, &mut rng),
        AdversarySpec::NoController => return run_irrelevance_scenario(config),
        _ => {}
    }
    match config.protocol {
        ProtocolKind::Tzl | ProtocolKind::TzlCharliePrep => {
            let votes = config.resolve_votes(&mut rng);
            let rules: Vec<VotingRule> = votes
                .iter()
                .map(|_| VotingRule::random_tzl_assignment(&mut rng))
                .collect();
            let tzl_config = TzlConfig {
                channel_prep: if config.protocol == ProtocolKind::TzlCharliePrep {
                    ChannelPrep::ControllerCharlie
                } else {
                    ChannelPrep::TallymanBob
                },
                correction: CorrectionPolicy::Table,
                decoys_per_leg: config.decoys_per_leg,
                abort_threshold: config.abort_threshold,
                subroutine: config.subroutine,
            };
            let adversary = tzl_adversary(&config.adversary);
            let run = run_tzl_voting(
                &tzl_config,
                &votes,
                &rules,
                CaPolicy::AcceptAll,
                adversary,
                &mut rng,
            )?;
            let mut transcript = run.transcript;
            let attack = match config.adversary {
                AdversarySpec::Replace { leg, eve_vote } => {
                    let mut stats_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
                    let outcome = eve_replace_attack(leg, eve_vote, config.trials, &mut stats_rng)?;
                    let summary = AttackSummary {
                        kind: format!("replace:{}", leg.label()),
                        outcome: Some(outcome),
                        charlie_match_rate: None,
                        mutual_information_bits: None,
                        irrelevance: None,
                    };
                    annotate_attack(&mut transcript, &summary);
                    Some(summary)
                }
                _ => None,
            };
            let invalid = run
                .voters
                .iter()
                .filter(|v| matches!(v.status, VoteStatus::Invalid))
                .count() as u32;
            let summary = summarize(config, &transcript, run.tally, run.aborts, invalid, attack)?;
            Ok((transcript, summary))
        }
        ProtocolKind::Cdsqc1 => {
            let votes = config.resolve_votes(&mut rng);
            let mut p1 =
                Protocol1Config::with_random_rules(GhzLikeSpec::default(), votes.len(), &mut rng)?;
            p1.decoys_per_leg = config.decoys_per_leg;
            p1.abort_threshold = config.abort_threshold;
            p1.subroutine = config.subroutine;
            if config.shared_rule {
                let shared = p1.rules.first().copied().unwrap_or(VotingRule {
                    yes_op: crate::states::PauliOp::I,
                    no_op: crate::states::PauliOp::X,
                });
                p1.rules = vec![shared; votes.len()];
                p1.shared_rule = true;
            }
            let run = protocol1_run(
                &p1,
                &votes,
                CaPolicy::AcceptAll,
                generic_adversary(&config.adversary),
                &mut rng,
            )?;
            let invalid = count_invalid(&run.statuses);
            let summary = summarize(
                config,
                &run.transcript,
                run.tally,
                run.aborts,
                invalid,
                None,
            )?;
            Ok((run.transcript, summary))
        }
        ProtocolKind::Cdsqc2 => {
            let votes = config.resolve_votes(&mut rng);
            let p2 = Protocol2Config {
                decoys_per_leg: config.decoys_per_leg,
                abort_threshold: config.abort_threshold,
                subroutine: config.subroutine,
                ..Protocol2Config::default()
            };
            let run = protocol2_run(
                &p2,
                &votes,
                CaPolicy::AcceptAll,
                generic_adversary(&config.adversary),
                Pairing::Disclosed,
                &mut rng,
            )?;
            let invalid = count_invalid(&run.statuses);
            let summary = summarize(
                config,
                &run.transcript,
                run.tally,
                run.aborts,
                invalid,
                None,
            )?;
            Ok((run.transcript, summary))
        }
    }
}

fn run_separable_scenario(
    config: &ScenarioConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Transcript, Summary)> {
    let votes: Vec<u8> = (0..config.trials)
        .map(|_| u8::from(rng.random::<bool>()))
        .collect();
    let report = separable_attack(&votes, rng)?;
    // Re-run the identical election for its transcript; the attack API only
    // reports rates.
    let attack = AttackSummary {
        kind: "separable".into(),
        outcome: Some(report.outcome),
        charlie_match_rate: Some(report.charlie_match_rate),
        mutual_information_bits: Some(report.mutual_information_bits),
        irrelevance: None,
    };
    let mut transcript = representative_separable_transcript(config)?;
    annotate_attack(&mut transcript, &attack);
    let ledger = ledger_from_transcript(&transcript, false)?;
    let per_vote = ledger_from_transcript(&transcript, true).ok();
    let eta_value = eta(&ledger).ok();
    Ok((
        transcript,
        Summary {
            protocol: config.label(),
            n_voters: config.trials as usize,
            seed: config.seed,
            tally: 0,
            aborts: 0,
            invalid: 0,
            ledger,
            per_vote,
            eta: eta_value,
            attack: Some(attack),
        },
    ))
}

fn representative_separable_transcript(config: &ScenarioConfig) -> Result<Transcript> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let votes: Vec<u8> = (0..config.trials.min(4))
        .map(|_| u8::from(rng.random::<bool>()))
        .collect();
    let rules: Vec<VotingRule> = votes
        .iter()
        .map(|_| VotingRule::random_tzl_assignment(&mut rng))
        .collect();
    let tzl_config = TzlConfig {
        channel_prep: ChannelPrep::SeparableBob,
        correction: CorrectionPolicy::CharlieFree,
        ..TzlConfig::default()
    };
    Ok(run_tzl_voting(
        &tzl_config,
        &votes,
        &rules,
        CaPolicy::AcceptAll,
        None,
        &mut rng,
    )?
    .transcript)
}

fn run_irrelevance_scenario(config: &ScenarioConfig) -> Result<(Transcript, Summary)> {
    let mut rows = Vec::new();
    for (label, input) in [("+", StateVector::plus()), ("-", StateVector::minus())] {
        let report = charlie_irrelevance(&input)?;
        for entry in report.entries {
            rows.push(IrrelevanceRow {
                input: label.into(),
                alice_outcome: entry.alice_outcome.label().into(),
                purity: entry.purity,
                correction: entry.charlie_free_correction.label().into(),
                recovered_fidelity: entry.recovered_fidelity,
                conditional_distance: entry.conditional_distance,
            });
        }
    }
    let attack = AttackSummary {
        kind: "no-controller".into(),
        outcome: None,
        charlie_match_rate: None,
        mutual_information_bits: None,
        irrelevance: Some(rows),
    };
    let mut transcript = Transcript::new();
    transcript.prepare(Phase::Voting, Actor::Bob, "controller-irrelevance-analysis");
    transcript.counting_marker(Actor::Charlie);
    annotate_attack(&mut transcript, &attack);
    let ledger = ledger_from_transcript(&transcript, false)?;
    Ok((
        transcript,
        Summary {
            protocol: config.label(),
            n_voters: 0,
            seed: config.seed,
            tally: 0,
            aborts: 0,
            invalid: 0,
            ledger,
            per_vote: None,
            eta: None,
            attack: Some(attack),
        },
    ))
}

/// One row of the efficiency-comparison table (per-vote resources).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub protocol: String,
    pub c: u64,
    pub q: u64,
    pub b: u64,
    pub eta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// Plain-text table, η-descending.
    pub fn text(&self) -> String {
        let mut out = String::from(
            "protocol                       c    q    b    eta\n\
             -----------------------------------------------------\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{:<30} {:<4} {:<4} {:<4} {:>6.2}%\n",
                row.protocol,
                row.c,
                row.q,
                row.b,
                row.eta * 100.0
            ));
        }
        out
    }

    /// Machine-readable form: one JSON row per line, same framing as
    /// transcripts.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&serde_json::to_string(row).expect("rows serialize"));
            out.push('\n');
        }
        out
    }
}

/// Build the efficiency table from per-vote ledgers, sorted η-descending.
pub fn render_report(summaries: &[Summary]) -> Result<Report> {
    if summaries.is_empty() {
        return Err(Error::Validation(
            "a report needs at least one summary".into(),
        ));
    }
    let mut rows = Vec::with_capacity(summaries.len());
    for summary in summaries {
        let per_vote = summary.per_vote.ok_or_else(|| {
            Error::Accounting(format!(
                "summary for {} has no per-vote ledger",
                summary.protocol
            ))
        })?;
        rows.push(ReportRow {
            protocol: summary.protocol.clone(),
            c: per_vote.c,
            q: per_vote.q,
            b: per_vote.b,
            eta: eta(&per_vote)?,
        });
    }
    rows.sort_by(|a, b| b.eta.total_cmp(&a.eta));
    Ok(Report { rows })
}

/// The four reference scenarios (and optionally the derived shared-rule
/// variant), each with one vote so the per-vote ledgers are the totals.
pub fn canonical_scenarios(seed: u64, include_derived: bool) -> Vec<ScenarioConfig> {
    let mut scenarios = Vec::new();
    let mut push = |protocol: ProtocolKind, decoys: u32, shared: bool| {
        let mut config = ScenarioConfig::new(protocol);
        config.n_voters = 1;
        config.votes = VoteSpec::Explicit("1".into());
        config.seed = seed;
        config.decoys_per_leg = decoys;
        config.shared_rule = shared;
        scenarios.push(config);
    };
    push(ProtocolKind::Cdsqc2, 1, false);
    push(ProtocolKind::Cdsqc1, 1, false);
    push(ProtocolKind::Tzl, 0, false);
    // The original scheme with its two legs decoy-protected.
    push(ProtocolKind::Tzl, 1, false);
    if include_derived {
        push(ProtocolKind::Cdsqc1, 1, true);
    }
    scenarios
}
