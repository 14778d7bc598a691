//! The TZL controlled-teleportation voting scheme: the 4-qubit channel, the
//! GHZ-basis measurement, the eight-row correction table keyed on the
//! sender's and the controller's outcomes, and the sequential voting phases
//! around them.
//!
//! The implementation is deliberately faithful to the original scheme,
//! flaws included: the qubit legs carry no decoy protection unless
//! explicitly enabled, the tallyman may prepare the channel himself, and
//! the `|±⟩` vote encoding leaves the controller's announcement without
//! effect on the decoded vote. The attack module turns each of those into
//! an executable demonstration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decoy::{CheckSubroutine, EavesdropperModel, DEFAULT_ABORT_THRESHOLD};
use crate::error::{Error, Result};
use crate::legs::{ship_leg, LegPolicy, LegTraffic};
use crate::qstate::{measure, MeasurementBasis, StateVector};
use crate::register::Arena;
use crate::states::{ghz, tzl_channel, GhzLabel, PauliOp, Sign};
use crate::transcript::{Actor, Phase, Transcript};

/// Correction-table key: the sender's GHZ outcome (only `GHZ0±`/`GHZ3±`
/// ever occur) and the controller's computational outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TzlCorrectionKey {
    alice_outcome: GhzLabel,
    charlie_outcome: u8,
}

impl TzlCorrectionKey {
    pub fn new(alice_outcome: GhzLabel, charlie_outcome: u8) -> Result<Self> {
        if alice_outcome.a != 0 && alice_outcome.a != 3 {
            return Err(Error::Validation(format!(
                "GHZ outcome {alice_outcome} never occurs in the teleportation branch set"
            )));
        }
        if charlie_outcome > 1 {
            return Err(Error::Validation(format!(
                "controller outcome must be a bit, got {charlie_outcome}"
            )));
        }
        Ok(TzlCorrectionKey {
            alice_outcome,
            charlie_outcome,
        })
    }

    pub fn alice_outcome(&self) -> GhzLabel {
        self.alice_outcome
    }

    pub fn charlie_outcome(&self) -> u8 {
        self.charlie_outcome
    }
}

/// The eight-row correction table mapping (sender outcome, controller
/// outcome) to the receiver's recovery operation.
pub fn table1_correction(key: &TzlCorrectionKey) -> PauliOp {
    match (
        key.alice_outcome.a,
        key.alice_outcome.sign,
        key.charlie_outcome,
    ) {
        (0, Sign::Plus, 0) => PauliOp::I,
        (0, Sign::Plus, _) => PauliOp::X,
        (0, Sign::Minus, 0) => PauliOp::Z,
        (0, Sign::Minus, _) => PauliOp::IY,
        (3, Sign::Plus, 0) => PauliOp::X,
        (3, Sign::Plus, _) => PauliOp::I,
        (3, Sign::Minus, 0) => PauliOp::IY,
        (3, Sign::Minus, _) => PauliOp::Z,
        _ => unreachable!("key construction restricts a to {{0, 3}}"),
    }
}

/// Everything one teleportation produced.
#[derive(Debug, Clone)]
pub struct TeleportRecord {
    pub alice_outcome: GhzLabel,
    pub charlie_outcome: u8,
    pub correction: PauliOp,
    /// The receiver's qubit after applying the correction.
    pub bob_state: StateVector,
}

/// One controlled teleportation of `input` through the 4-qubit channel:
/// GHZ measurement on (input, A1, A2), computational measurement on C,
/// table lookup, correction. The corrected state equals the input up to a
/// global phase on every branch.
pub fn tzl_controlled_teleport<R: Rng + ?Sized>(
    input: &StateVector,
    rng: &mut R,
) -> Result<TeleportRecord> {
    if input.num_qubits() != 1 {
        return Err(Error::Validation(format!(
            "teleportee must be a single qubit, got {}",
            input.num_qubits()
        )));
    }
    let joint = input.tensor(&tzl_channel())?;
    let ghz_basis = MeasurementBasis::ghz();
    let alice = measure(&joint, &ghz_basis, &[0, 1, 2], rng)?;
    let alice_outcome = GhzLabel::from_index(alice.outcome)?;
    // Residual order is (B, C).
    let charlie = measure(
        &alice.post_state,
        &MeasurementBasis::computational(),
        &[1],
        rng,
    )?;
    let charlie_outcome = charlie.outcome as u8;
    let key = TzlCorrectionKey::new(alice_outcome, charlie_outcome)?;
    let correction = table1_correction(&key);
    let bob_state = charlie
        .post_state
        .apply_unitary(&correction.matrix(), &[0])?;
    Ok(TeleportRecord {
        alice_outcome,
        charlie_outcome,
        correction,
        bob_state,
    })
}

/// A voter's yes/no encoding pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VotingRule {
    pub yes_op: PauliOp,
    pub no_op: PauliOp,
}

impl VotingRule {
    pub fn new(yes_op: PauliOp, no_op: PauliOp) -> Result<Self> {
        if yes_op == no_op {
            return Err(Error::Validation(
                "voting rule must use two distinct operators".into(),
            ));
        }
        Ok(VotingRule { yes_op, no_op })
    }

    /// The canonical assignment: identity in favor.
    pub fn identity_yes(no_op: PauliOp) -> Result<Self> {
        VotingRule::new(PauliOp::I, no_op)
    }

    /// One of the two `{I, Z}` assignments, picked uniformly. This is the
    /// full rule space of the TZL scheme.
    pub fn random_tzl_assignment<R: Rng + ?Sized>(rng: &mut R) -> VotingRule {
        if rng.random::<bool>() {
            VotingRule {
                yes_op: PauliOp::I,
                no_op: PauliOp::Z,
            }
        } else {
            VotingRule {
                yes_op: PauliOp::Z,
                no_op: PauliOp::I,
            }
        }
    }

    pub fn op_for(&self, vote: u8) -> PauliOp {
        if vote == 1 {
            self.yes_op
        } else {
            self.no_op
        }
    }

    /// Decode an operator back to a vote; `None` flags an operator outside
    /// the pair (a tamper signal).
    pub fn vote_for(&self, op: PauliOp) -> Option<u8> {
        if op == self.yes_op {
            Some(1)
        } else if op == self.no_op {
            Some(0)
        } else {
            None
        }
    }

    pub fn label(&self) -> String {
        format!("{}=yes,{}=no", self.yes_op, self.no_op)
    }

    fn is_tzl_pair(&self) -> bool {
        matches!(
            (self.yes_op, self.no_op),
            (PauliOp::I, PauliOp::Z) | (PauliOp::Z, PauliOp::I)
        )
    }
}

/// Who prepares and distributes the 4-qubit channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelPrep {
    /// The original scheme: the tallyman prepares the channel.
    TallymanBob,
    /// The patched variant that hands preparation to the controller. The
    /// controller-irrelevance flaw survives this change untouched.
    ControllerCharlie,
    /// The tallyman's cheat: `GHZ0+` on (A1, A2, B) with the controller's
    /// qubit split off in a random computational state, so the controller's
    /// outcome is fixed in advance and controls nothing.
    SeparableBob,
}

/// How the receiver picks his correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionPolicy {
    /// Table lookup from both announcements.
    Table,
    /// Ignore the controller entirely: `GHZ0±/3±` keyed on the sign only
    /// (`+ → I`, `− → Z`). For `|±⟩` carriers this decodes identically.
    CharlieFree,
}

/// The controller-free correction used by the flaw demonstrations.
pub fn charlie_free_correction(outcome: GhzLabel) -> PauliOp {
    match outcome.sign {
        Sign::Plus => PauliOp::I,
        Sign::Minus => PauliOp::Z,
    }
}

/// The two quantum legs of one TZL round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TzlLeg {
    /// The `|+⟩` carrier sent to the voter.
    Voting2Qubit,
    /// The channel qubits distributed to voter and controller.
    Voting4ChannelQubits,
}

impl TzlLeg {
    pub fn label(self) -> &'static str {
        match self {
            TzlLeg::Voting2Qubit => "voting2-qubit",
            TzlLeg::Voting4ChannelQubits => "voting4-channel",
        }
    }
}

/// Adversarial interference with a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TzlAdversary {
    /// Tap every traveling leg with a generic tamper model. Without decoys
    /// nothing detects it; with decoys enabled the checks catch it.
    Tap(EavesdropperModel),
    /// Full hijack of the voter's quantum participation starting at the
    /// tapped leg: the interceptor holds the genuine carrier and channel
    /// qubits, encodes her own vote and completes the round in the voter's
    /// place. No check exists on these legs, so nothing aborts.
    EveReplace { leg: TzlLeg, vote: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoteStatus {
    Counted { cast: u8, decoded: u8 },
    Aborted,
    Invalid,
}

/// Per-voter trace of a run, for analyses beyond the tally.
#[derive(Debug, Clone)]
pub struct VoterReport {
    pub cast: u8,
    pub rule: VotingRule,
    pub status: VoteStatus,
    pub alice_outcome: Option<GhzLabel>,
    pub charlie_outcome: Option<u8>,
    /// Diagonal broadcast of the corrected qubit: 0 for "+", 1 for "−".
    pub broadcast: Option<u8>,
    /// The separable cheat's preparation bit, when that mode is active.
    pub prep_bit: Option<u8>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub transcript: Transcript,
    pub tally: u64,
    pub voters: Vec<VoterReport>,
    pub aborts: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TzlConfig {
    pub channel_prep: ChannelPrep,
    pub correction: CorrectionPolicy,
    /// Decoys inserted per message qubit on each traveling leg; the
    /// original scheme runs with 0.
    pub decoys_per_leg: u32,
    pub abort_threshold: f64,
    pub subroutine: CheckSubroutine,
}

impl Default for TzlConfig {
    fn default() -> Self {
        TzlConfig {
            channel_prep: ChannelPrep::TallymanBob,
            correction: CorrectionPolicy::Table,
            decoys_per_leg: 0,
            abort_threshold: DEFAULT_ABORT_THRESHOLD,
            subroutine: CheckSubroutine::Bb84,
        }
    }
}

/// Authentication oracle for the initial phase; quantum IDs are abstracted
/// behind an accept/reject decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaPolicy {
    #[default]
    AcceptAll,
    Reject(u32),
}

impl CaPolicy {
    pub(crate) fn authenticate(&self, voter: u32) -> Result<()> {
        match self {
            CaPolicy::AcceptAll => Ok(()),
            CaPolicy::Reject(bad) if *bad != voter => Ok(()),
            CaPolicy::Reject(_) => Err(Error::Authentication(format!("Voter_{voter}"))),
        }
    }
}

impl TzlConfig {
    fn leg_policy(&self) -> LegPolicy {
        LegPolicy {
            decoys_per_message_qubit: self.decoys_per_leg,
            abort_threshold: self.abort_threshold,
            subroutine: self.subroutine,
        }
    }
}

/// Run the voting and counting phases for a list of votes (bit 1 = yes),
/// one rule per voter. Votes are processed strictly sequentially; the
/// tally counts decoded yes votes.
pub fn run_tzl_voting<R: Rng + ?Sized>(
    config: &TzlConfig,
    votes: &[u8],
    rules: &[VotingRule],
    ca: CaPolicy,
    adversary: Option<TzlAdversary>,
    rng: &mut R,
) -> Result<RunOutcome> {
    if rules.len() != votes.len() {
        return Err(Error::Validation(format!(
            "{} rules for {} votes",
            rules.len(),
            votes.len()
        )));
    }
    for rule in rules {
        if !rule.is_tzl_pair() {
            return Err(Error::Validation(format!(
                "TZL voting rules are {{I, Z}} assignments, got {}",
                rule.label()
            )));
        }
    }

    let mut transcript = Transcript::new();
    transcript.prepare(Phase::Initial, Actor::Ca, "authentication-oracle");
    transcript.prepare(Phase::Voting, Actor::Charlie, "bulletin-board");

    let tap = match adversary {
        Some(TzlAdversary::Tap(model)) => Some(model),
        _ => None,
    };
    let hijack = match adversary {
        Some(TzlAdversary::EveReplace { leg, vote }) => Some((leg, vote)),
        _ => None,
    };

    let preparer = match config.channel_prep {
        ChannelPrep::ControllerCharlie => Actor::Charlie,
        _ => Actor::Bob,
    };

    let mut voters = Vec::with_capacity(votes.len());
    let mut aborts = 0u32;

    for (i, &cast) in votes.iter().enumerate() {
        let voter = i as u32;
        let rule = rules[i];
        ca.authenticate(voter)?;
        transcript.announce(
            Phase::Voting,
            Actor::Ca,
            format!("auth/{voter}"),
            "accepted",
            0,
        );

        let mut arena = Arena::new();
        let mut report = VoterReport {
            cast,
            rule,
            status: VoteStatus::Aborted,
            alice_outcome: None,
            charlie_outcome: None,
            broadcast: None,
            prep_bit: None,
        };

        // Voting 2: the |+⟩ carrier.
        transcript.prepare(Phase::Voting, Actor::Bob, "plus-qubit");
        let carrier = arena.alloc_single(StateVector::plus())?;
        let carrier = match ship_leg(
            &mut arena,
            &mut transcript,
            Actor::Bob,
            Actor::Voter(voter),
            &format!("voting2/{voter}"),
            vec![(carrier, "plus".into())],
            LegTraffic::FirstSend,
            &config.leg_policy(),
            tap,
            rng,
        )? {
            Some(mut delivered) => delivered.pop().expect("one carrier"),
            None => {
                aborts += 1;
                voters.push(report);
                continue;
            }
        };

        // Voting 3: secret rule delivery (1 decoding bit; the payload stays
        // opaque until the counting phase).
        transcript.disclose(
            Phase::Voting,
            Actor::Charlie,
            format!("rule-delivery/{voter}"),
            "[bb84-encrypted]",
            1,
        );

        // Voting 4: channel preparation and distribution.
        let (a1, a2, b, c, prep_bit) = match config.channel_prep {
            ChannelPrep::SeparableBob => {
                let bit = u8::from(rng.random::<bool>());
                transcript.prepare(Phase::Voting, preparer, "separable-channel(GHZ0+ x |r>)");
                let ghz_part = arena.alloc(ghz(GhzLabel::new(0, Sign::Plus)?));
                let c = arena.alloc_single(StateVector::basis_state(1, bit as usize)?)?;
                (ghz_part[0], ghz_part[1], ghz_part[2], c, Some(bit))
            }
            _ => {
                transcript.prepare(Phase::Voting, preparer, "tzl-channel");
                let q = arena.alloc(tzl_channel());
                (q[0], q[1], q[2], q[3], None)
            }
        };
        report.prep_bit = prep_bit;

        let voter_leg = ship_leg(
            &mut arena,
            &mut transcript,
            preparer,
            Actor::Voter(voter),
            &format!("voting4-voter/{voter}"),
            vec![(a1, "A1".into()), (a2, "A2".into())],
            LegTraffic::FirstSend,
            &config.leg_policy(),
            tap,
            rng,
        )?;
        // The tallyman's share: part of the distributed resource even when
        // it does not travel (or travels preparer → tallyman in the patched
        // variant).
        transcript.transmit(
            Phase::Voting,
            preparer,
            "B",
            Actor::Bob,
            format!("voting4-keeper/{voter}"),
        );
        let charlie_leg = ship_leg(
            &mut arena,
            &mut transcript,
            preparer,
            Actor::Charlie,
            &format!("voting4-charlie/{voter}"),
            vec![(c, "C".into())],
            LegTraffic::FirstSend,
            &config.leg_policy(),
            tap,
            rng,
        )?;

        let (Some(voter_qubits), Some(charlie_qubits)) = (voter_leg, charlie_leg) else {
            aborts += 1;
            voters.push(report);
            continue;
        };
        let (a1, a2) = (voter_qubits[0], voter_qubits[1]);
        let c = charlie_qubits[0];

        // Voting 5: encoding, GHZ measurement and announcements. Under a
        // hijack the interceptor performs these steps with the genuine
        // qubits; the voter's own actions happen on substituted qubits and
        // never reach the channel.
        let (encoder, encoded_vote) = match hijack {
            Some((_, eve_vote)) => (Actor::Eve, eve_vote),
            None => (Actor::Voter(voter), cast),
        };
        let op = rule.op_for(encoded_vote);
        arena.apply(&op.matrix(), &[carrier])?;
        let alice = arena.measure_out(&[carrier, a1, a2], &MeasurementBasis::ghz(), rng)?;
        let alice_outcome = GhzLabel::from_index(alice.outcome)?;
        report.alice_outcome = Some(alice_outcome);
        transcript.measure(Phase::Voting, encoder, "ghz", alice.label);
        transcript.announce(
            Phase::Voting,
            encoder,
            format!("ghz-outcome/{voter}"),
            alice.label,
            3,
        );

        // An honest channel only ever yields GHZ0±/GHZ3±; anything else
        // means the legs were tampered with and the correction table has no
        // row for it. The vote is flagged instead of counted.
        if alice_outcome.a != 0 && alice_outcome.a != 3 {
            transcript.announce(
                Phase::Voting,
                Actor::Bob,
                format!("tamper/{voter}"),
                format!("announcement {} has no correction row", alice.label),
                0,
            );
            report.status = VoteStatus::Invalid;
            voters.push(report);
            continue;
        }

        let charlie = arena.measure_out(&[c], &MeasurementBasis::computational(), rng)?;
        let charlie_outcome = charlie.outcome as u8;
        report.charlie_outcome = Some(charlie_outcome);
        transcript.measure(
            Phase::Voting,
            Actor::Charlie,
            "computational",
            charlie.label,
        );
        transcript.announce(
            Phase::Voting,
            Actor::Charlie,
            format!("charlie-outcome/{voter}"),
            charlie.label,
            1,
        );

        // Voting 6: correction, diagonal measurement, public broadcast.
        let correction = match config.correction {
            CorrectionPolicy::Table => {
                table1_correction(&TzlCorrectionKey::new(alice_outcome, charlie_outcome)?)
            }
            CorrectionPolicy::CharlieFree => charlie_free_correction(alice_outcome),
        };
        arena.apply(&correction.matrix(), &[b])?;
        transcript.prepare(
            Phase::Voting,
            Actor::Bob,
            format!("correction={correction}"),
        );
        let diag = arena.measure_out(&[b], &MeasurementBasis::diagonal(), rng)?;
        report.broadcast = Some(diag.outcome as u8);
        transcript.measure(Phase::Voting, Actor::Bob, "diagonal", diag.label);
        transcript.announce(
            Phase::Voting,
            Actor::Bob,
            format!("vote-broadcast/{voter}"),
            diag.label,
            0,
        );

        report.status = VoteStatus::Counted {
            cast,
            decoded: u8::MAX, // decoded in the counting phase below
        };
        voters.push(report);
    }

    // Counting phase: the controller releases the rules, the tallyman
    // decodes the broadcasts.
    transcript.counting_marker(Actor::Charlie);
    let mut tally = 0u64;
    for (i, report) in voters.iter_mut().enumerate() {
        let voter = i as u32;
        if !matches!(report.status, VoteStatus::Counted { .. }) {
            continue;
        }
        transcript.disclose(
            Phase::Counting,
            Actor::Charlie,
            format!("rule/{voter}"),
            report.rule.label(),
            1,
        );
        let broadcast = report
            .broadcast
            .ok_or_else(|| Error::Consistency("counted vote lacks a broadcast".into()))?;
        // "+" means the carrier came through as |+⟩ (identity image), "−"
        // as |−⟩ (the Z image).
        let observed_op = if broadcast == 0 {
            PauliOp::I
        } else {
            PauliOp::Z
        };
        let decoded = report.rule.vote_for(observed_op).ok_or_else(|| {
            Error::Consistency("diagonal broadcast decoded outside the rule pair".into())
        })?;
        report.status = VoteStatus::Counted {
            cast: report.cast,
            decoded,
        };
        transcript.decoded_vote(Actor::Bob, voter, decoded);
        if decoded == 1 {
            tally += 1;
        }
    }
    transcript.announce(Phase::Counting, Actor::Bob, "tally", tally.to_string(), 0);

    // Cross-check the running tally against the recorded decodes.
    let recount = voters
        .iter()
        .filter(|v| matches!(v.status, VoteStatus::Counted { decoded: 1, .. }))
        .count() as u64;
    if recount != tally {
        return Err(Error::Consistency(format!(
            "tally {tally} disagrees with decoded votes {recount}"
        )));
    }

    transcript.validate()?;
    Ok(RunOutcome {
        transcript,
        tally,
        voters,
        aborts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        equal_up_to_global_phase, fidelity_pure, outcome_distribution, project_outcome, to_density,
        ASSERT_TOL, NORM_TOL,
    };
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn key(a: u8, sign: Sign, c: u8) -> TzlCorrectionKey {
        TzlCorrectionKey::new(GhzLabel::new(a, sign).unwrap(), c).unwrap()
    }

    #[test]
    fn correction_table_rows() {
        assert_eq!(table1_correction(&key(0, Sign::Plus, 0)), PauliOp::I);
        assert_eq!(table1_correction(&key(0, Sign::Plus, 1)), PauliOp::X);
        assert_eq!(table1_correction(&key(0, Sign::Minus, 0)), PauliOp::Z);
        assert_eq!(table1_correction(&key(0, Sign::Minus, 1)), PauliOp::IY);
        assert_eq!(table1_correction(&key(3, Sign::Plus, 0)), PauliOp::X);
        assert_eq!(table1_correction(&key(3, Sign::Plus, 1)), PauliOp::I);
        assert_eq!(table1_correction(&key(3, Sign::Minus, 0)), PauliOp::IY);
        assert_eq!(table1_correction(&key(3, Sign::Minus, 1)), PauliOp::Z);
    }

    #[test]
    fn keys_outside_the_branch_set_are_rejected() {
        assert!(TzlCorrectionKey::new(GhzLabel::new(1, Sign::Plus).unwrap(), 0).is_err());
        assert!(TzlCorrectionKey::new(GhzLabel::new(0, Sign::Plus).unwrap(), 2).is_err());
    }

    /// Exhaustive branch enumeration of the teleportation: every (sender,
    /// controller) branch, its probability, the receiver's pre-correction
    /// state and the corrected state.
    fn enumerate_branches(
        input: &StateVector,
    ) -> Vec<(GhzLabel, u8, f64, StateVector, StateVector)> {
        let joint = input.tensor(&tzl_channel()).unwrap();
        let ghz_basis = MeasurementBasis::ghz();
        let comp = MeasurementBasis::computational();
        let mut branches = Vec::new();
        for outcome in 0..8 {
            let Some(alice) = project_outcome(&joint, &ghz_basis, &[0, 1, 2], outcome).unwrap()
            else {
                continue;
            };
            let label = GhzLabel::from_index(outcome).unwrap();
            for charlie in 0..2 {
                let Some(rec) = project_outcome(&alice.post_state, &comp, &[1], charlie).unwrap()
                else {
                    continue;
                };
                let pre = rec.post_state.clone();
                let correction = table1_correction(&key(label.a, label.sign, charlie as u8));
                let corrected = pre.apply_unitary(&correction.matrix(), &[0]).unwrap();
                branches.push((
                    label,
                    charlie as u8,
                    alice.probability * rec.probability,
                    pre,
                    corrected,
                ));
            }
        }
        branches
    }

    #[test]
    fn ghz_branch_support_is_exactly_four_outcomes() {
        // Only GHZ0± and GHZ3± occur, each with probability 1/4, for any
        // normalized input.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
            let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let input = StateVector::single(
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            )
            .unwrap();
            let joint = input.tensor(&tzl_channel()).unwrap();
            let dist = outcome_distribution(&joint, &MeasurementBasis::ghz(), &[0, 1, 2]).unwrap();
            for (label, p) in dist {
                let expected = match label {
                    "GHZ0+" | "GHZ0-" | "GHZ3+" | "GHZ3-" => 0.25,
                    _ => 0.0,
                };
                assert!((p - expected).abs() < NORM_TOL, "{label}: {p}");
            }
        }
    }

    #[test]
    fn plus_and_minus_reproduce_the_pre_correction_column() {
        // The pre-correction states for |+⟩ and |−⟩ inputs, including the
        // −|−⟩ phases, row by row.
        let minus = StateVector::minus();
        let neg_minus =
            StateVector::from_amplitudes(vec![-minus.amplitude(0), -minus.amplitude(1)]).unwrap();
        let plus = StateVector::plus();

        let expect_plus: &[(u8, Sign, u8, &StateVector)] = &[
            (0, Sign::Plus, 0, &plus),
            (0, Sign::Plus, 1, &plus),
            (0, Sign::Minus, 0, &minus),
            (0, Sign::Minus, 1, &neg_minus),
            (3, Sign::Plus, 0, &plus),
            (3, Sign::Plus, 1, &plus),
            (3, Sign::Minus, 0, &neg_minus),
            (3, Sign::Minus, 1, &minus),
        ];
        let branches = enumerate_branches(&plus);
        assert_eq!(branches.len(), 8);
        for (a, sign, charlie, expected) in expect_plus {
            let (_, _, p, pre, corrected) = branches
                .iter()
                .find(|(l, c, ..)| l.a == *a && l.sign == *sign && c == charlie)
                .unwrap();
            assert!((p - 0.125).abs() < NORM_TOL);
            for (i, amp) in pre.amplitudes().iter().enumerate() {
                assert!(
                    (amp - expected.amplitude(i)).norm() < ASSERT_TOL,
                    "branch GHZ{a}{sign:?}/{charlie} amplitude {i}"
                );
            }
            assert!(equal_up_to_global_phase(corrected, &plus, ASSERT_TOL).unwrap());
        }

        let expect_minus: &[(u8, Sign, u8, &StateVector)] = &[
            (0, Sign::Plus, 0, &minus),
            (0, Sign::Plus, 1, &neg_minus),
            (0, Sign::Minus, 0, &plus),
            (0, Sign::Minus, 1, &plus),
            (3, Sign::Plus, 0, &neg_minus),
            (3, Sign::Plus, 1, &minus),
            (3, Sign::Minus, 0, &plus),
            (3, Sign::Minus, 1, &plus),
        ];
        let branches = enumerate_branches(&minus);
        for (a, sign, charlie, expected) in expect_minus {
            let (_, _, _, pre, corrected) = branches
                .iter()
                .find(|(l, c, ..)| l.a == *a && l.sign == *sign && c == charlie)
                .unwrap();
            for (i, amp) in pre.amplitudes().iter().enumerate() {
                assert!(
                    (amp - expected.amplitude(i)).norm() < ASSERT_TOL,
                    "branch GHZ{a}{sign:?}/{charlie} amplitude {i}"
                );
            }
            assert!(equal_up_to_global_phase(corrected, &minus, ASSERT_TOL).unwrap());
        }
    }

    #[test]
    fn random_inputs_recover_on_all_branches() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
            let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let input = StateVector::single(
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            )
            .unwrap();
            let branches = enumerate_branches(&input);
            assert_eq!(branches.len(), 8);
            let mut total = 0.0;
            for (label, charlie, p, _, corrected) in &branches {
                total += p;
                let fid = fidelity_pure(&to_density(corrected), &input).unwrap();
                assert!(
                    (fid - 1.0).abs() < ASSERT_TOL,
                    "branch {label}/{charlie} fidelity {fid}"
                );
            }
            assert!((total - 1.0).abs() < NORM_TOL);
        }
    }

    #[test]
    fn sampled_teleport_matches_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..64 {
            let input = StateVector::plus();
            let record = tzl_controlled_teleport(&input, &mut rng).unwrap();
            assert!(matches!(record.alice_outcome.a, 0 | 3));
            assert!(equal_up_to_global_phase(&record.bob_state, &input, ASSERT_TOL).unwrap());
            assert_eq!(
                record.correction,
                table1_correction(
                    &TzlCorrectionKey::new(record.alice_outcome, record.charlie_outcome).unwrap()
                )
            );
        }
    }

    #[test]
    fn three_votes_tally_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rule = VotingRule::identity_yes(PauliOp::Z).unwrap();
        let outcome = run_tzl_voting(
            &TzlConfig::default(),
            &[1, 0, 1],
            &[rule, rule, rule],
            CaPolicy::AcceptAll,
            None,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.tally, 2);
        assert_eq!(outcome.aborts, 0);
        for report in &outcome.voters {
            assert!(matches!(
                report.status,
                VoteStatus::Counted { cast, decoded } if cast == decoded
            ));
        }
    }

    #[test]
    fn empty_election_has_only_setup_records() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let outcome = run_tzl_voting(
            &TzlConfig::default(),
            &[],
            &[],
            CaPolicy::AcceptAll,
            None,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.tally, 0);
        // Oracle prep, bulletin board, marker, tally announcement.
        assert_eq!(outcome.transcript.len(), 4);
    }

    #[test]
    fn decoded_vote_equals_cast_vote_over_many_seeds() {
        for seed in 0..1000 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vote = (seed % 2) as u8;
            let rule = VotingRule::random_tzl_assignment(&mut rng);
            let outcome = run_tzl_voting(
                &TzlConfig::default(),
                &[vote],
                &[rule],
                CaPolicy::AcceptAll,
                None,
                &mut rng,
            )
            .unwrap();
            assert_eq!(outcome.tally, u64::from(vote));
        }
    }

    #[test]
    fn per_vote_resources_are_five_qubits_six_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rule = VotingRule::identity_yes(PauliOp::Z).unwrap();
        let outcome = run_tzl_voting(
            &TzlConfig::default(),
            &[1, 1],
            &[rule, rule],
            CaPolicy::AcceptAll,
            None,
            &mut rng,
        )
        .unwrap();
        let ledger = crate::ledger::ledger_from_transcript(&outcome.transcript, true).unwrap();
        assert_eq!(ledger.c, 1);
        assert_eq!(ledger.q, 5);
        assert_eq!(ledger.b, 6);
    }

    #[test]
    fn decoy_protection_adds_four_qubits_per_vote() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rule = VotingRule::identity_yes(PauliOp::Z).unwrap();
        let config = TzlConfig {
            decoys_per_leg: 1,
            ..TzlConfig::default()
        };
        let outcome =
            run_tzl_voting(&config, &[1], &[rule], CaPolicy::AcceptAll, None, &mut rng).unwrap();
        let ledger = crate::ledger::ledger_from_transcript(&outcome.transcript, true).unwrap();
        assert_eq!(ledger.q, 9);
        assert_eq!(ledger.b, 6);
        assert_eq!(outcome.aborts, 0);
    }

    #[test]
    fn charlie_prepared_variant_behaves_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rule = VotingRule::identity_yes(PauliOp::Z).unwrap();
        let config = TzlConfig {
            channel_prep: ChannelPrep::ControllerCharlie,
            ..TzlConfig::default()
        };
        let outcome = run_tzl_voting(
            &config,
            &[1, 0],
            &[rule, rule],
            CaPolicy::AcceptAll,
            None,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.tally, 1);
        let ledger = crate::ledger::ledger_from_transcript(&outcome.transcript, true).unwrap();
        assert_eq!((ledger.q, ledger.b), (5, 6));
    }

    #[test]
    fn ca_rejection_is_an_authentication_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rule = VotingRule::identity_yes(PauliOp::Z).unwrap();
        let result = run_tzl_voting(
            &TzlConfig::default(),
            &[1],
            &[rule],
            CaPolicy::Reject(0),
            None,
            &mut rng,
        );
        assert!(matches!(result, Err(Error::Authentication(_))));
    }

    #[test]
    fn non_tzl_rules_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rule = VotingRule::identity_yes(PauliOp::X).unwrap();
        assert!(run_tzl_voting(
            &TzlConfig::default(),
            &[1],
            &[rule],
            CaPolicy::AcceptAll,
            None,
            &mut rng,
        )
        .is_err());
    }

    #[test]
    fn tampered_channel_flags_votes_instead_of_counting_them() {
        // An intercept-resend tap breaks the channel, so off-table GHZ
        // announcements (GHZ1±/GHZ2±) appear; those votes must be flagged,
        // never decoded, and nothing aborts (there are no checks).
        let rule = VotingRule::identity_yes(PauliOp::Z).unwrap();
        let mut saw_invalid = false;
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let outcome = run_tzl_voting(
                &TzlConfig::default(),
                &[1, 0],
                &[rule, rule],
                CaPolicy::AcceptAll,
                Some(TzlAdversary::Tap(EavesdropperModel::InterceptResend)),
                &mut rng,
            )
            .unwrap();
            assert_eq!(outcome.aborts, 0);
            saw_invalid |= outcome
                .voters
                .iter()
                .any(|v| matches!(v.status, VoteStatus::Invalid));
        }
        assert!(
            saw_invalid,
            "off-table announcements should occur under the tap"
        );
    }

    #[test]
    fn rule_stays_secret_until_counting() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rule = VotingRule::identity_yes(PauliOp::Z).unwrap();
        let outcome = run_tzl_voting(
            &TzlConfig::default(),
            &[1],
            &[rule],
            CaPolicy::AcceptAll,
            None,
            &mut rng,
        )
        .unwrap();
        assert!(outcome.transcript.secret_until_counting(&["rule/"]));
    }
}
