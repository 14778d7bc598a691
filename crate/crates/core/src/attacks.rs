//! Executable demonstrations of the three TZL flaws: the controller's
//! irrelevance for `|±⟩` inputs, the tallyman's separable-channel cheat,
//! and qubit replacement on the unprotected legs.
//!
//! A related dead end is worth recording even though it has no runnable
//! form here: recasting the scheme as controlled remote state preparation
//! (the sender always knows she holds `|+⟩` or `|−⟩`) does not help,
//! because the receiver's ignorance is a single bit and the sender's own
//! announcement hands it over — to the tallyman and to any listener alike.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    equal_up_to_global_phase, fidelity_pure, partial_trace, project_outcome, to_density,
    trace_distance_1q, DensityMatrix, MeasurementBasis, StateVector, ASSERT_TOL,
};
use crate::states::{tzl_channel, GhzLabel, PauliOp};
use crate::tzl::{
    charlie_free_correction, run_tzl_voting, CaPolicy, ChannelPrep, CorrectionPolicy, TzlAdversary,
    TzlConfig, TzlLeg, VoteStatus, VotingRule,
};

/// One row of the controller-irrelevance analysis: the receiver's reduced
/// state after the sender's announcement (controller traced out,
/// pre-measurement), and the controller-free recovery.
#[derive(Debug, Clone)]
pub struct IrrelevanceEntry {
    pub alice_outcome: GhzLabel,
    pub bob_reduced: DensityMatrix,
    pub purity: f64,
    pub charlie_free_correction: PauliOp,
    pub recovered_fidelity: f64,
    /// Trace distance between the receiver's conditional states for the two
    /// controller outcomes: zero means the announcement tells him nothing.
    pub conditional_distance: f64,
}

#[derive(Debug, Clone)]
pub struct IrrelevanceReport {
    pub input: StateVector,
    pub entries: Vec<IrrelevanceEntry>,
}

/// For a `|±⟩` input, show that the receiver's Charlie-traced state is pure
/// for every sender outcome and that the four-entry controller-free table
/// `{GHZ0+ → I, GHZ3+ → I, GHZ3− → Z, GHZ0− → Z}` recovers the input with
/// fidelity 1. Inputs other than `|±⟩` are rejected: for those the reduced
/// state is mixed and the claim does not hold.
pub fn charlie_irrelevance(input: &StateVector) -> Result<IrrelevanceReport> {
    if input.num_qubits() != 1 {
        return Err(Error::Validation("input must be a single qubit".into()));
    }
    let is_plus = equal_up_to_global_phase(input, &StateVector::plus(), ASSERT_TOL)?;
    let is_minus = equal_up_to_global_phase(input, &StateVector::minus(), ASSERT_TOL)?;
    if !is_plus && !is_minus {
        return Err(Error::Validation(
            "controller irrelevance holds only for |+⟩ and |−⟩ inputs".into(),
        ));
    }

    let joint = input.tensor(&tzl_channel())?;
    let ghz_basis = MeasurementBasis::ghz();
    let comp = MeasurementBasis::computational();
    let mut entries = Vec::with_capacity(4);
    for outcome in 0..8 {
        let Some(alice) = project_outcome(&joint, &ghz_basis, &[0, 1, 2], outcome)? else {
            continue;
        };
        let alice_outcome = GhzLabel::from_index(outcome)?;
        // Residual order (B, C): trace out the controller.
        let joint_rho = to_density(&alice.post_state);
        let bob_reduced = partial_trace(&joint_rho, &[0])?;
        let purity = bob_reduced.purity();

        let correction = charlie_free_correction(alice_outcome);
        let corrected = bob_reduced.apply_unitary(&correction.matrix(), &[0])?;
        let recovered_fidelity = fidelity_pure(&corrected, input)?;

        // Bob's conditional states across the controller's two outcomes.
        let mut conditionals = Vec::new();
        for charlie in 0..2 {
            if let Some(rec) = project_outcome(&alice.post_state, &comp, &[1], charlie)? {
                conditionals.push(to_density(&rec.post_state));
            }
        }
        let conditional_distance = match conditionals.as_slice() {
            [a, b] => trace_distance_1q(a, b)?,
            _ => 0.0,
        };

        entries.push(IrrelevanceEntry {
            alice_outcome,
            bob_reduced,
            purity,
            charlie_free_correction: correction,
            recovered_fidelity,
            conditional_distance,
        });
    }
    if entries.len() != 4 {
        return Err(Error::Consistency(format!(
            "expected 4 occurring sender outcomes, found {}",
            entries.len()
        )));
    }
    Ok(IrrelevanceReport {
        input: input.clone(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attacker {
    BobSeparable,
    EveReplace,
}

/// Empirical rates over a batch of attacked rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    pub attacker: Attacker,
    pub success_rate: f64,
    pub detection_rate: f64,
    pub trials: u64,
}

/// Separable-channel results: the tallyman decodes everything without the
/// controller, whose outcomes are pinned to the preparation bits and carry
/// no information about the votes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparableReport {
    pub outcome: AttackOutcome,
    /// Fraction of rounds where the controller's outcome equaled the
    /// tallyman's preparation bit (always 1).
    pub charlie_match_rate: f64,
    /// Plug-in mutual information between the controller's outcome and the
    /// decoded vote, in bits.
    pub mutual_information_bits: f64,
}

/// Run the tallyman's separable-channel cheat over one vote per entry of
/// `votes`. The tallyman prepares `GHZ0+ ⊗ |r⟩`, never waits for the
/// controller, and corrects from the sender's announcement alone.
pub fn separable_attack<R: Rng + ?Sized>(votes: &[u8], rng: &mut R) -> Result<SeparableReport> {
    let config = TzlConfig {
        channel_prep: ChannelPrep::SeparableBob,
        correction: CorrectionPolicy::CharlieFree,
        ..TzlConfig::default()
    };
    let rules: Vec<VotingRule> = votes
        .iter()
        .map(|_| VotingRule::random_tzl_assignment(rng))
        .collect();
    let run = run_tzl_voting(&config, votes, &rules, CaPolicy::AcceptAll, None, rng)?;

    let mut successes = 0u64;
    let mut matches = 0u64;
    let mut joint = [[0u64; 2]; 2]; // [charlie outcome][decoded vote]
    for report in &run.voters {
        let VoteStatus::Counted { cast, decoded } = report.status else {
            return Err(Error::Consistency("separable run aborted a vote".into()));
        };
        if decoded == cast {
            successes += 1;
        }
        let charlie = report
            .charlie_outcome
            .ok_or_else(|| Error::Consistency("missing controller outcome".into()))?;
        let prep = report
            .prep_bit
            .ok_or_else(|| Error::Consistency("missing preparation bit".into()))?;
        if charlie == prep {
            matches += 1;
        }
        joint[charlie as usize][decoded as usize] += 1;
    }
    let trials = votes.len() as u64;
    let denom = trials.max(1) as f64;
    Ok(SeparableReport {
        outcome: AttackOutcome {
            attacker: Attacker::BobSeparable,
            success_rate: successes as f64 / denom,
            detection_rate: run.aborts as f64 / denom,
            trials,
        },
        charlie_match_rate: matches as f64 / denom,
        mutual_information_bits: mutual_information(&joint),
    })
}

/// Plug-in mutual information (bits) of a 2×2 joint frequency table.
pub fn mutual_information(joint: &[[u64; 2]; 2]) -> f64 {
    let total: u64 = joint.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let row: Vec<f64> = (0..2)
        .map(|i| (joint[i][0] + joint[i][1]) as f64 / n)
        .collect();
    let col: Vec<f64> = (0..2)
        .map(|j| (joint[0][j] + joint[1][j]) as f64 / n)
        .collect();
    let mut mi = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let p = joint[i][j] as f64 / n;
            if p > 0.0 && row[i] > 0.0 && col[j] > 0.0 {
                mi += p * (p / (row[i] * col[j])).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Replay the qubit-replacement attack against an unprotected TZL leg over
/// `trials` single-voter rounds. The interceptor taps the voter-bound
/// quantum channel at the chosen leg, captures the genuine qubits, encodes
/// `eve_vote` under the round's (canonical) rule and completes the round in
/// the voter's place; the honest voter's intent alternates and never shows
/// up in the announced result. Without decoys nothing can abort, so the
/// detection rate is exactly zero.
pub fn eve_replace_attack<R: Rng + ?Sized>(
    target_leg: TzlLeg,
    eve_vote: u8,
    trials: u64,
    rng: &mut R,
) -> Result<AttackOutcome> {
    if eve_vote > 1 {
        return Err(Error::Validation(format!(
            "eve_vote must be a bit, got {eve_vote}"
        )));
    }
    let config = TzlConfig::default();
    let rule = VotingRule::identity_yes(PauliOp::Z)?;
    let mut successes = 0u64;
    let mut aborts = 0u64;
    for trial in 0..trials {
        let honest_vote = (trial % 2) as u8;
        let run = run_tzl_voting(
            &config,
            &[honest_vote],
            &[rule],
            CaPolicy::AcceptAll,
            Some(TzlAdversary::EveReplace {
                leg: target_leg,
                vote: eve_vote,
            }),
            rng,
        )?;
        aborts += u64::from(run.aborts);
        let VoteStatus::Counted { decoded, .. } = run.voters[0].status else {
            continue;
        };
        if decoded == eve_vote {
            successes += 1;
        }
    }
    let denom = trials.max(1) as f64;
    Ok(AttackOutcome {
        attacker: Attacker::EveReplace,
        success_rate: successes as f64 / denom,
        detection_rate: aborts as f64 / denom,
        trials,
    })
}

/// Guard used by the CLI: the replacement attack is a statement about the
/// unprotected TZL legs; the decoy-protected protocols face it through the
/// generic eavesdropper models instead.
pub fn assert_tzl_target(protocol_is_tzl: bool) -> Result<()> {
    if protocol_is_tzl {
        Ok(())
    } else {
        Err(Error::Contract(
            "the replacement attack targets unprotected TZL legs; run the decoy-protected \
             protocols with an eavesdropper model instead"
                .into(),
        ))
    }
}
