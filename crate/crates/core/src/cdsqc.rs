//! The two improved voting protocols.
//!
//! Protocol 1 replaces controlled teleportation with controlled secure
//! direct communication over a GHZ-like channel: the controller prepares
//! and distributes the state, the voter encodes with a Pauli operator and
//! sends her qubit to the tallyman, who Bell-measures the pair. Decoding
//! needs the controller's announced branch, and every leg is
//! decoy-protected.
//!
//! Protocol 2 needs only Bell pairs: the controller hides the pairing of
//! voters to the tallyman's qubit string behind a secret permutation and
//! discloses it in the counting phase, which is where his control lives.
//!
//! Not built here: the entanglement-swapping variant of the same idea
//! (where encoded qubits never travel) and dense-coding two-bit ballots.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::decoy::{CheckSubroutine, EavesdropperModel, DEFAULT_ABORT_THRESHOLD};
use crate::error::{Error, Result};
use crate::legs::{ship_leg, LegPolicy, LegTraffic};
use crate::qstate::MeasurementBasis;
use crate::register::{Arena, QubitId};
use crate::states::{
    bell, bell_transition, bell_transition_inverse, BellLabel, GhzLikeSpec, PauliOp,
};
use crate::transcript::{Actor, Phase, Transcript};
use crate::tzl::{CaPolicy, VoteStatus, VotingRule};

/// Configuration of the GHZ-like-channel protocol.
#[derive(Debug, Clone)]
pub struct Protocol1Config {
    pub channel_spec: GhzLikeSpec,
    /// One rule per voter, secret until the counting phase. Any pair of
    /// distinct operators decodes correctly; [`controller_safe_pairs`]
    /// lists the pairs that also keep the tallyman blind before the
    /// controller's announcement.
    pub rules: Vec<VotingRule>,
    /// Decoys per message qubit on each protected leg.
    pub decoys_per_leg: u32,
    pub abort_threshold: f64,
    pub subroutine: CheckSubroutine,
    /// One public predecided rule for everyone, dropping the rule delivery
    /// and disclosure bits from the ledger.
    pub shared_rule: bool,
}

impl Protocol1Config {
    /// Per-voter rules drawn uniformly from the controller-safe assignments
    /// of the given channel.
    pub fn with_random_rules<R: Rng + ?Sized>(
        channel_spec: GhzLikeSpec,
        n_voters: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let safe = controller_safe_pairs(&channel_spec);
        if safe.is_empty() {
            return Err(Error::Validation(format!(
                "channel {channel_spec} admits no controller-safe rule pair"
            )));
        }
        let rules = (0..n_voters)
            .map(|_| {
                let (a, b) = safe[rng.random_range(0..safe.len())];
                if rng.random::<bool>() {
                    VotingRule::new(a, b)
                } else {
                    VotingRule::new(b, a)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Protocol1Config {
            channel_spec,
            rules,
            decoys_per_leg: 1,
            abort_threshold: DEFAULT_ABORT_THRESHOLD,
            subroutine: CheckSubroutine::Bb84,
            shared_rule: false,
        })
    }
}

/// Unordered encoding pairs whose Bell-outcome image sets coincide across
/// the two channel branches, so an outcome seen without the controller's
/// announcement is consistent with both votes. For the default channel
/// (psi+, phi+) these are {I, X} and {Z, iY}; pairs like {I, Z} decode fine
/// but leak the vote to a tallyman who ignores the controller.
pub fn controller_safe_pairs(spec: &GhzLikeSpec) -> Vec<(PauliOp, PauliOp)> {
    let mut safe = Vec::new();
    for (i, &a) in PauliOp::ALL.iter().enumerate() {
        for &b in &PauliOp::ALL[i + 1..] {
            let image_a = [bell_transition(spec.psi1, a), bell_transition(spec.psi2, a)];
            let image_b = [bell_transition(spec.psi1, b), bell_transition(spec.psi2, b)];
            let mut sa = image_a.map(BellLabel::index);
            let mut sb = image_b.map(BellLabel::index);
            sa.sort_unstable();
            sb.sort_unstable();
            if sa == sb {
                safe.push((a, b));
            }
        }
    }
    safe
}

/// Decode outcome of a single vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoded {
    Vote(u8),
    /// The decoded operator lies outside the voter's rule pair.
    Tamper(PauliOp),
}

/// Decode one Protocol 1 round: the controller's outcome picks the channel
/// branch, the Bell transition inverts to the encoding operator, the rule
/// maps it to a vote. An operator outside the rule pair is a tamper signal.
pub fn protocol1_decode(
    bell_outcome: BellLabel,
    charlie_outcome: u8,
    spec: &GhzLikeSpec,
    rule: &VotingRule,
) -> Decoded {
    let initial = spec.branch(charlie_outcome as usize);
    let op = bell_transition_inverse(initial, bell_outcome);
    match rule.vote_for(op) {
        Some(vote) => Decoded::Vote(vote),
        None => Decoded::Tamper(op),
    }
}

/// Election result shared by both improved protocols.
#[derive(Debug, Clone)]
pub struct ElectionOutcome {
    pub transcript: Transcript,
    pub tally: u64,
    pub statuses: Vec<VoteStatus>,
    pub aborts: u32,
}

fn policy(decoys: u32, threshold: f64, subroutine: CheckSubroutine) -> LegPolicy {
    LegPolicy {
        decoys_per_message_qubit: decoys,
        abort_threshold: threshold,
        subroutine,
    }
}

fn finish_counting(transcript: &mut Transcript, statuses: &[VoteStatus], tally: u64) -> Result<()> {
    transcript.announce(Phase::Counting, Actor::Bob, "tally", tally.to_string(), 0);
    let recount = statuses
        .iter()
        .filter(|s| matches!(s, VoteStatus::Counted { decoded: 1, .. }))
        .count() as u64;
    if recount != tally {
        return Err(Error::Consistency(format!(
            "tally {tally} disagrees with decoded votes {recount}"
        )));
    }
    transcript.validate()
}

/// Run the GHZ-like-channel protocol. Votes are bits (1 = yes); the rule
/// list must match. An eavesdropper model, when given, taps every
/// protected leg; detected tampering aborts that voter's round.
pub fn protocol1_run<R: Rng + ?Sized>(
    config: &Protocol1Config,
    votes: &[u8],
    ca: CaPolicy,
    adversary: Option<EavesdropperModel>,
    rng: &mut R,
) -> Result<ElectionOutcome> {
    if config.rules.len() != votes.len() {
        return Err(Error::Validation(format!(
            "{} rules for {} votes",
            config.rules.len(),
            votes.len()
        )));
    }
    if config.shared_rule && config.rules.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Validation(
            "shared-rule mode requires identical rules for all voters".into(),
        ));
    }
    let leg_policy = policy(
        config.decoys_per_leg,
        config.abort_threshold,
        config.subroutine,
    );

    let mut transcript = Transcript::new();
    transcript.prepare(Phase::Initial, Actor::Ca, "authentication-oracle");
    transcript.prepare(Phase::Voting, Actor::Charlie, "bulletin-board");
    if config.shared_rule {
        if let Some(rule) = config.rules.first() {
            transcript.announce(
                Phase::Voting,
                Actor::Charlie,
                "public-rule",
                rule.label(),
                0,
            );
        }
    }

    let mut statuses = vec![VoteStatus::Aborted; votes.len()];
    let mut rounds: Vec<Option<(BellLabel, u8)>> = vec![None; votes.len()];
    let mut aborts = 0u32;

    for (i, &cast) in votes.iter().enumerate() {
        let voter = i as u32;
        ca.authenticate(voter)?;
        transcript.announce(
            Phase::Voting,
            Actor::Ca,
            format!("auth/{voter}"),
            "accepted",
            0,
        );

        if !config.shared_rule {
            transcript.disclose(
                Phase::Voting,
                Actor::Charlie,
                format!("rule-delivery/{voter}"),
                "[bb84-encrypted]",
                1,
            );
        }

        let mut arena = Arena::new();
        transcript.prepare(
            Phase::Voting,
            Actor::Charlie,
            format!("ghz-like{}", config.channel_spec),
        );
        let channel = arena.alloc(ghz_like_state(&config.channel_spec)?);
        let (v, t, ctl) = (channel[0], channel[1], channel[2]);

        let voter_leg = ship_leg(
            &mut arena,
            &mut transcript,
            Actor::Charlie,
            Actor::Voter(voter),
            &format!("channel-voter/{voter}"),
            vec![(v, "ch1".into())],
            LegTraffic::FirstSend,
            &leg_policy,
            adversary,
            rng,
        )?;
        let bob_leg = ship_leg(
            &mut arena,
            &mut transcript,
            Actor::Charlie,
            Actor::Bob,
            &format!("channel-tallyman/{voter}"),
            vec![(t, "ch2".into())],
            LegTraffic::FirstSend,
            &leg_policy,
            adversary,
            rng,
        )?;
        // The controller's own share of the distributed resource.
        transcript.transmit(
            Phase::Voting,
            Actor::Charlie,
            "ch3",
            Actor::Charlie,
            format!("channel-keeper/{voter}"),
        );

        let (Some(voter_qubits), Some(bob_qubits)) = (voter_leg, bob_leg) else {
            aborts += 1;
            continue;
        };
        let v = voter_qubits[0];
        let t = bob_qubits[0];

        // The voter encodes and returns her qubit.
        let op = config.rules[i].op_for(cast);
        arena.apply(&op.matrix(), &[v])?;
        let encoded_leg = ship_leg(
            &mut arena,
            &mut transcript,
            Actor::Voter(voter),
            Actor::Bob,
            &format!("encoded/{voter}"),
            vec![(v, "ch1".into())],
            LegTraffic::Forward,
            &leg_policy,
            adversary,
            rng,
        )?;
        let Some(encoded) = encoded_leg else {
            aborts += 1;
            continue;
        };
        let encoded = encoded[0];

        // Controller measurement and announcement.
        let controller_basis = config.channel_spec.controller_basis.measurement_basis();
        let charlie = arena.measure_out(&[ctl], &controller_basis, rng)?;
        transcript.measure(
            Phase::Voting,
            Actor::Charlie,
            basis_name(&controller_basis),
            charlie.label,
        );
        transcript.announce(
            Phase::Voting,
            Actor::Charlie,
            format!("charlie-outcome/{voter}"),
            charlie.label,
            1,
        );

        // Tallyman's Bell measurement, posted on the bulletin board.
        let bob = arena.measure_out(&[encoded, t], &MeasurementBasis::bell(), rng)?;
        transcript.measure(Phase::Voting, Actor::Bob, "bell", bob.label);
        transcript.announce(
            Phase::Voting,
            Actor::Bob,
            format!("bell-outcome/{voter}"),
            bob.label,
            0,
        );

        rounds[i] = Some((BellLabel::from_index(bob.outcome)?, charlie.outcome as u8));
    }

    // Counting phase.
    transcript.counting_marker(Actor::Charlie);
    let mut tally = 0u64;
    for (i, round) in rounds.iter().enumerate() {
        let voter = i as u32;
        let Some((bell_outcome, charlie_outcome)) = round else {
            continue;
        };
        if !config.shared_rule {
            transcript.disclose(
                Phase::Counting,
                Actor::Charlie,
                format!("rule/{voter}"),
                config.rules[i].label(),
                1,
            );
        }
        match protocol1_decode(
            *bell_outcome,
            *charlie_outcome,
            &config.channel_spec,
            &config.rules[i],
        ) {
            Decoded::Vote(decoded) => {
                statuses[i] = VoteStatus::Counted {
                    cast: votes[i],
                    decoded,
                };
                transcript.decoded_vote(Actor::Bob, voter, decoded);
                if decoded == 1 {
                    tally += 1;
                }
            }
            Decoded::Tamper(op) => {
                statuses[i] = VoteStatus::Invalid;
                transcript.announce(
                    Phase::Counting,
                    Actor::Bob,
                    format!("tamper/{voter}"),
                    format!("operator {op} outside rule pair"),
                    0,
                );
            }
        }
    }
    finish_counting(&mut transcript, &statuses, tally)?;
    Ok(ElectionOutcome {
        transcript,
        tally,
        statuses,
        aborts,
    })
}

fn ghz_like_state(spec: &GhzLikeSpec) -> Result<crate::qstate::StateVector> {
    crate::states::ghz_like(spec)
}

fn basis_name(basis: &MeasurementBasis) -> &'static str {
    match basis.name() {
        crate::qstate::BasisName::Computational => "computational",
        crate::qstate::BasisName::Diagonal => "diagonal",
        crate::qstate::BasisName::Bell => "bell",
        crate::qstate::BasisName::Ghz => "ghz",
    }
}

/// Configuration of the Bell-pair (permutation-of-particles) protocol.
#[derive(Debug, Clone)]
pub struct Protocol2Config {
    pub initial_bell: BellLabel,
    /// The predecided public rule shared by all voters: identity in favor,
    /// one fixed Pauli against.
    pub public_rule: VotingRule,
    pub decoys_per_leg: u32,
    pub abort_threshold: f64,
    pub subroutine: CheckSubroutine,
}

impl Default for Protocol2Config {
    fn default() -> Self {
        Protocol2Config {
            initial_bell: BellLabel::PsiPlus,
            public_rule: VotingRule {
                yes_op: PauliOp::I,
                no_op: PauliOp::Z,
            },
            decoys_per_leg: 1,
            abort_threshold: DEFAULT_ABORT_THRESHOLD,
            subroutine: CheckSubroutine::Bb84,
        }
    }
}

/// How the tallyman pairs partner particles in the counting phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// The controller disclosed the permutation (the honest protocol).
    Disclosed,
    /// The permutation was withheld and the tallyman guesses a uniformly
    /// random pairing; used to quantify the controller's leverage.
    UniformRandom,
}

/// `out[j] = seq[pi[j]]`.
pub fn apply_permutation<T: Clone>(seq: &[T], pi: &[usize]) -> Result<Vec<T>> {
    if seq.len() != pi.len() {
        return Err(Error::Validation(format!(
            "permutation of length {} applied to sequence of length {}",
            pi.len(),
            seq.len()
        )));
    }
    validate_permutation(pi)?;
    Ok(pi.iter().map(|&j| seq[j].clone()).collect())
}

/// `pi⁻¹` with `pi⁻¹[pi[j]] = j`.
pub fn invert_permutation(pi: &[usize]) -> Result<Vec<usize>> {
    validate_permutation(pi)?;
    let mut inverse = vec![0usize; pi.len()];
    for (j, &image) in pi.iter().enumerate() {
        inverse[image] = j;
    }
    Ok(inverse)
}

fn validate_permutation(pi: &[usize]) -> Result<()> {
    let mut seen = vec![false; pi.len()];
    for &j in pi {
        if j >= pi.len() || seen[j] {
            return Err(Error::Validation(format!(
                "{pi:?} is not a permutation of 0..{}",
                pi.len()
            )));
        }
        seen[j] = true;
    }
    Ok(())
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(rng);
    pi
}

/// Run the Bell-pair protocol over `votes`. The controller's secret
/// permutation hides which tallyman qubit partners which voter until the
/// counting phase.
pub fn protocol2_run<R: Rng + ?Sized>(
    config: &Protocol2Config,
    votes: &[u8],
    ca: CaPolicy,
    adversary: Option<EavesdropperModel>,
    pairing: Pairing,
    rng: &mut R,
) -> Result<ElectionOutcome> {
    let n = votes.len();
    let leg_policy = policy(
        config.decoys_per_leg,
        config.abort_threshold,
        config.subroutine,
    );

    let mut transcript = Transcript::new();
    transcript.prepare(Phase::Initial, Actor::Ca, "authentication-oracle");
    transcript.prepare(Phase::Voting, Actor::Charlie, "bulletin-board");
    transcript.announce(
        Phase::Voting,
        Actor::Charlie,
        "public-rule",
        config.public_rule.label(),
        0,
    );

    let mut statuses = vec![VoteStatus::Aborted; n];
    let mut aborts = 0u32;
    let mut arena = Arena::new();

    // Pair preparation and the voter-bound legs.
    transcript.prepare(
        Phase::Voting,
        Actor::Charlie,
        format!("bell({}) x{n}", config.initial_bell),
    );
    let mut voter_qubits: Vec<Option<QubitId>> = Vec::with_capacity(n);
    let mut partner_qubits: Vec<QubitId> = Vec::with_capacity(n);
    for i in 0..n {
        let voter = i as u32;
        ca.authenticate(voter)?;
        transcript.announce(
            Phase::Voting,
            Actor::Ca,
            format!("auth/{voter}"),
            "accepted",
            0,
        );
        let pair = arena.alloc(bell(config.initial_bell));
        partner_qubits.push(pair[1]);
        let delivered = ship_leg(
            &mut arena,
            &mut transcript,
            Actor::Charlie,
            Actor::Voter(voter),
            &format!("pair-voter/{voter}"),
            vec![(pair[0], format!("pair{i}.1"))],
            LegTraffic::FirstSend,
            &leg_policy,
            adversary,
            rng,
        )?;
        voter_qubits.push(delivered.map(|q| q[0]));
    }

    // The permuted partner string to the tallyman.
    let pi = random_permutation(n, rng);
    let permuted = apply_permutation(&partner_qubits, &pi)?;
    let string_leg = ship_leg(
        &mut arena,
        &mut transcript,
        Actor::Charlie,
        Actor::Bob,
        "permuted-string",
        permuted
            .iter()
            .enumerate()
            .map(|(j, &q)| (q, format!("string.{j}")))
            .collect(),
        LegTraffic::FirstSend,
        &leg_policy,
        adversary,
        rng,
    )?;

    // Voter encoding legs.
    let mut encoded_qubits: Vec<Option<QubitId>> = Vec::with_capacity(n);
    for (i, &cast) in votes.iter().enumerate() {
        let voter = i as u32;
        let Some(v) = voter_qubits[i] else {
            encoded_qubits.push(None);
            continue;
        };
        let op = config.public_rule.op_for(cast);
        arena.apply(&op.matrix(), &[v])?;
        let delivered = ship_leg(
            &mut arena,
            &mut transcript,
            Actor::Voter(voter),
            Actor::Bob,
            &format!("encoded/{voter}"),
            vec![(v, format!("pair{i}.1"))],
            LegTraffic::Forward,
            &leg_policy,
            adversary,
            rng,
        )?;
        encoded_qubits.push(delivered.map(|q| q[0]));
    }
    transcript.announce(
        Phase::Voting,
        Actor::Bob,
        "all-received",
        "notify-controller",
        0,
    );

    // Counting phase: pairing disclosure and Bell measurements.
    transcript.counting_marker(Actor::Charlie);
    let received = string_leg;
    let lookup: Option<Vec<usize>> = match pairing {
        Pairing::Disclosed => {
            transcript.disclose_permutation(
                Actor::Charlie,
                pi.clone(),
                config.initial_bell.label().to_string(),
                n as u32,
            );
            Some(invert_permutation(&pi)?)
        }
        Pairing::UniformRandom => {
            transcript.announce(
                Phase::Counting,
                Actor::Bob,
                "pairing",
                "withheld: uniform random guess",
                0,
            );
            Some(random_permutation(n, rng))
        }
    };

    let mut tally = 0u64;
    if let (Some(received), Some(lookup)) = (received.as_ref(), lookup) {
        for (i, &cast) in votes.iter().enumerate() {
            let voter = i as u32;
            let Some(encoded) = encoded_qubits.get(i).copied().flatten() else {
                aborts += 1;
                continue;
            };
            let partner = received[lookup[i]];
            if !arena.contains(partner) {
                // Partner already consumed by an earlier (mispaired) round.
                statuses[i] = VoteStatus::Invalid;
                continue;
            }
            let outcome = arena.measure_out(&[encoded, partner], &MeasurementBasis::bell(), rng)?;
            transcript.measure(Phase::Counting, Actor::Bob, "bell", outcome.label);
            let observed = BellLabel::from_index(outcome.outcome)?;
            let op = bell_transition_inverse(config.initial_bell, observed);
            match config.public_rule.vote_for(op) {
                Some(decoded) => {
                    statuses[i] = VoteStatus::Counted { cast, decoded };
                    transcript.decoded_vote(Actor::Bob, voter, decoded);
                    if decoded == 1 {
                        tally += 1;
                    }
                }
                None => {
                    statuses[i] = VoteStatus::Invalid;
                    transcript.announce(
                        Phase::Counting,
                        Actor::Bob,
                        format!("tamper/{voter}"),
                        format!("operator {op} outside rule pair"),
                        0,
                    );
                }
            }
        }
    } else {
        // The whole partner string was rejected; every vote is lost.
        aborts += n as u32;
    }

    finish_counting(&mut transcript, &statuses, tally)?;
    Ok(ElectionOutcome {
        transcript,
        tally,
        statuses,
        aborts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::ledger_from_transcript;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p1_config(rules: Vec<VotingRule>) -> Protocol1Config {
        Protocol1Config {
            channel_spec: GhzLikeSpec::default(),
            rules,
            decoys_per_leg: 1,
            abort_threshold: DEFAULT_ABORT_THRESHOLD,
            subroutine: CheckSubroutine::Bb84,
            shared_rule: false,
        }
    }

    fn rule(yes: PauliOp, no: PauliOp) -> VotingRule {
        VotingRule::new(yes, no).unwrap()
    }

    #[test]
    fn decode_examples() {
        let spec = GhzLikeSpec::default();
        let iz = rule(PauliOp::I, PauliOp::Z);
        assert_eq!(
            protocol1_decode(BellLabel::PsiPlus, 0, &spec, &iz),
            Decoded::Vote(1)
        );
        assert_eq!(
            protocol1_decode(BellLabel::PsiMinus, 0, &spec, &iz),
            Decoded::Vote(0)
        );
        assert_eq!(
            protocol1_decode(BellLabel::PhiPlus, 0, &spec, &iz),
            Decoded::Tamper(PauliOp::X)
        );
    }

    #[test]
    fn protocol1_counts_identity_and_iy_encodings() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let config = p1_config(vec![
            rule(PauliOp::I, PauliOp::Z),
            rule(PauliOp::IY, PauliOp::X),
        ]);
        let outcome = protocol1_run(&config, &[1, 1], CaPolicy::AcceptAll, None, &mut rng).unwrap();
        assert_eq!(outcome.tally, 2);
        assert_eq!(outcome.aborts, 0);
    }

    #[test]
    fn protocol1_all_encodings_and_branches_decode_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for yes in PauliOp::ALL {
            for no in PauliOp::ALL {
                if yes == no {
                    continue;
                }
                let config = p1_config(vec![rule(yes, no), rule(yes, no)]);
                for _ in 0..20 {
                    let votes = [
                        u8::from(rng.random::<bool>()),
                        u8::from(rng.random::<bool>()),
                    ];
                    let outcome =
                        protocol1_run(&config, &votes, CaPolicy::AcceptAll, None, &mut rng)
                            .unwrap();
                    let cast = votes.iter().map(|&v| u64::from(v)).sum::<u64>();
                    assert_eq!(outcome.tally, cast, "rule {yes}/{no} votes {votes:?}");
                }
            }
        }
    }

    #[test]
    fn protocol1_per_vote_ledger_is_six_and_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let config = p1_config(vec![rule(PauliOp::I, PauliOp::X); 3]);
        let outcome =
            protocol1_run(&config, &[1, 0, 1], CaPolicy::AcceptAll, None, &mut rng).unwrap();
        let ledger = ledger_from_transcript(&outcome.transcript, true).unwrap();
        assert_eq!((ledger.c, ledger.q, ledger.b), (1, 6, 3));
    }

    #[test]
    fn protocol1_shared_rule_cuts_b_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut config = p1_config(vec![rule(PauliOp::I, PauliOp::X); 2]);
        config.shared_rule = true;
        let outcome = protocol1_run(&config, &[1, 1], CaPolicy::AcceptAll, None, &mut rng).unwrap();
        let ledger = ledger_from_transcript(&outcome.transcript, true).unwrap();
        assert_eq!((ledger.c, ledger.q, ledger.b), (1, 6, 1));
    }

    #[test]
    fn protocol1_rules_stay_secret_until_counting() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let config = p1_config(vec![rule(PauliOp::Z, PauliOp::IY)]);
        let outcome = protocol1_run(&config, &[0], CaPolicy::AcceptAll, None, &mut rng).unwrap();
        assert!(outcome.transcript.secret_until_counting(&["rule/"]));
    }

    #[test]
    fn controller_safe_pairs_for_default_channel() {
        let safe = controller_safe_pairs(&GhzLikeSpec::default());
        assert_eq!(
            safe,
            vec![(PauliOp::I, PauliOp::X), (PauliOp::IY, PauliOp::Z)]
        );
    }

    #[test]
    fn safe_pair_marginals_are_identical_without_the_controller() {
        // Marginalized over the two channel branches, the Bell-outcome
        // distributions of yes and no coincide exactly for a safe pair and
        // split completely for {I, Z}.
        let spec = GhzLikeSpec::default();
        let marginal = |op: PauliOp| {
            let mut dist = [0.0f64; 4];
            for branch in 0..2 {
                let observed = bell_transition(spec.branch(branch), op);
                dist[observed.index()] += 0.5;
            }
            dist
        };
        let tvd = |a: [f64; 4], b: [f64; 4]| -> f64 {
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
        };
        assert!(tvd(marginal(PauliOp::I), marginal(PauliOp::X)) < 1e-9);
        assert!(tvd(marginal(PauliOp::Z), marginal(PauliOp::IY)) < 1e-9);
        assert!((tvd(marginal(PauliOp::I), marginal(PauliOp::Z)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn permutation_helpers() {
        assert_eq!(
            apply_permutation(&['a', 'b'], &[0, 1]).unwrap(),
            vec!['a', 'b']
        );
        assert_eq!(
            apply_permutation(&['a', 'b'], &[1, 0]).unwrap(),
            vec!['b', 'a']
        );
        assert!(apply_permutation(&['a'], &[0, 1]).is_err());
        assert!(invert_permutation(&[0, 0]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let pi = random_permutation(8, &mut rng);
            let inverse = invert_permutation(&pi).unwrap();
            let seq: Vec<usize> = (0..8).collect();
            let shuffled = apply_permutation(&seq, &pi).unwrap();
            let back = apply_permutation(&shuffled, &inverse).unwrap();
            assert_eq!(back, seq);
        }
    }

    #[test]
    fn protocol2_three_votes_tally_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let outcome = protocol2_run(
            &Protocol2Config::default(),
            &[1, 1, 0],
            CaPolicy::AcceptAll,
            None,
            Pairing::Disclosed,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.tally, 2);
        assert_eq!(outcome.aborts, 0);
    }

    #[test]
    fn protocol2_single_no_vote_measures_psi_minus() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let outcome = protocol2_run(
            &Protocol2Config::default(),
            &[0],
            CaPolicy::AcceptAll,
            None,
            Pairing::Disclosed,
            &mut rng,
        )
        .unwrap();
        assert_eq!(outcome.tally, 0);
        let bell_measurements: Vec<&str> = outcome
            .transcript
            .records()
            .iter()
            .filter_map(|r| match &r.payload {
                crate::transcript::Payload::Measure { basis, outcome } if basis == "bell" => {
                    Some(outcome.as_str())
                }
                _ => None,
            })
            .collect();
        assert_eq!(bell_measurements, vec!["psi-"]);
    }

    #[test]
    fn protocol2_per_vote_ledger_is_five_and_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let outcome = protocol2_run(
            &Protocol2Config::default(),
            &[1, 0, 1, 1],
            CaPolicy::AcceptAll,
            None,
            Pairing::Disclosed,
            &mut rng,
        )
        .unwrap();
        let ledger = ledger_from_transcript(&outcome.transcript, true).unwrap();
        assert_eq!((ledger.c, ledger.q, ledger.b), (1, 5, 1));
    }

    #[test]
    fn protocol2_permutation_stays_secret_until_counting() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let outcome = protocol2_run(
            &Protocol2Config::default(),
            &[1, 0, 0],
            CaPolicy::AcceptAll,
            None,
            Pairing::Disclosed,
            &mut rng,
        )
        .unwrap();
        assert!(outcome.transcript.secret_until_counting(&["permutation"]));
        // And the disclosure does exist after the marker.
        let marker = outcome.transcript.counting_marker_index().unwrap();
        assert!(outcome
            .transcript
            .records()
            .iter()
            .any(|r| { r.index > marker && r.payload.topic() == Some("permutation") }));
    }

    #[test]
    fn protocol2_correct_for_all_sizes_and_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=8 {
            for _ in 0..10 {
                let votes: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
                let outcome = protocol2_run(
                    &Protocol2Config::default(),
                    &votes,
                    CaPolicy::AcceptAll,
                    None,
                    Pairing::Disclosed,
                    &mut rng,
                )
                .unwrap();
                let cast: u64 = votes.iter().map(|&v| u64::from(v)).sum();
                assert_eq!(outcome.tally, cast, "n = {n}");
            }
        }
    }

    #[test]
    fn withheld_permutation_breaks_decoding_for_two_voters() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut correct = 0u64;
        let trials = 400;
        for _ in 0..trials {
            let votes = [
                u8::from(rng.random::<bool>()),
                u8::from(rng.random::<bool>()),
            ];
            let outcome = protocol2_run(
                &Protocol2Config::default(),
                &votes,
                CaPolicy::AcceptAll,
                None,
                Pairing::UniformRandom,
                &mut rng,
            )
            .unwrap();
            for (i, status) in outcome.statuses.iter().enumerate() {
                if matches!(status, VoteStatus::Counted { cast, decoded } if cast == decoded && votes[i] == *cast)
                {
                    correct += 1;
                }
            }
        }
        let rate = correct as f64 / (2.0 * trials as f64);
        // Expectation (n + 3)/(4n) = 5/8 for n = 2; certainly below 1.
        assert!(rate < 0.95, "rate {rate}");
        assert!((rate - 0.625).abs() < 0.08, "rate {rate}");
    }

    #[test]
    fn intercept_resend_gets_caught_by_some_leg() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut aborted = 0u32;
        let trials = 200;
        for _ in 0..trials {
            let outcome = protocol2_run(
                &Protocol2Config::default(),
                &[1],
                CaPolicy::AcceptAll,
                Some(EavesdropperModel::InterceptResend),
                Pairing::Disclosed,
                &mut rng,
            )
            .unwrap();
            if outcome.aborts > 0 {
                aborted += 1;
                // Aborted legs leave an abort record and no decoded vote.
                assert!(outcome
                    .transcript
                    .records()
                    .iter()
                    .any(|r| matches!(r.payload, crate::transcript::Payload::Abort { .. })));
                assert!(matches!(outcome.statuses[0], VoteStatus::Aborted));
            }
        }
        // Three protected legs with one decoy each: detection
        // 1 − 0.75³ ≈ 0.58.
        let rate = f64::from(aborted) / trials as f64;
        assert!((rate - 0.578).abs() < 0.11, "rate {rate}");
    }

    #[test]
    fn fixed_state_replacement_fails_the_decoy_checks() {
        // Replaying the qubit-replacement idea against the decoy-protected
        // protocols: each decoy catches a fixed |0⟩ substitute with
        // probability 1/2, so a single-decoy leg aborts half the time and a
        // vote survives all three legs with probability (1/2)³.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut leg_aborts = 0u32;
        let mut survived = 0u32;
        let trials = 2_000;
        for _ in 0..trials {
            let outcome = protocol2_run(
                &Protocol2Config::default(),
                &[1],
                CaPolicy::AcceptAll,
                Some(EavesdropperModel::ReplaceFixed(
                    crate::decoy::DecoyState::Zero,
                )),
                Pairing::Disclosed,
                &mut rng,
            )
            .unwrap();
            leg_aborts += outcome
                .transcript
                .records()
                .iter()
                .filter(|r| matches!(r.payload, crate::transcript::Payload::Abort { .. }))
                .count() as u32;
            if outcome.aborts == 0 {
                survived += 1;
            }
        }
        // First-leg abort frequency estimates the per-decoy detection.
        let survival = f64::from(survived) / f64::from(trials);
        let expected_survival = 0.125;
        let sigma = (expected_survival * (1.0 - expected_survival) / f64::from(trials)).sqrt();
        assert!(
            (survival - expected_survival).abs() < 4.0 * sigma,
            "survival {survival}"
        );
        assert!(leg_aborts > 0);
    }

    #[test]
    fn protocol1_rule_count_mismatch_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let config = p1_config(vec![rule(PauliOp::I, PauliOp::X)]);
        assert!(protocol1_run(&config, &[1, 0], CaPolicy::AcceptAll, None, &mut rng).is_err());
    }
}
