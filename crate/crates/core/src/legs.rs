//! Crate-internal plumbing for one quantum transmission leg: log the sends,
//! insert decoys, let an active tap tamper with the sequence, then run the
//! eavesdropping check when decoys are present.

use rand::Rng;

use crate::decoy::{
    apply_adversary, insert_decoys, run_check, CheckSubroutine, EavesdropperModel, Verdict,
};
use crate::error::Result;
use crate::register::{Arena, QubitId};
use crate::transcript::{Actor, Phase, Transcript};

#[derive(Debug, Clone, Copy)]
pub(crate) struct LegPolicy {
    /// Decoys inserted per message qubit on the leg.
    pub decoys_per_message_qubit: u32,
    pub abort_threshold: f64,
    pub subroutine: CheckSubroutine,
}

/// Whether the message qubits are entering the protocol (charged to `q`) or
/// are re-sends of already-counted qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LegTraffic {
    FirstSend,
    Forward,
}

/// Ship a leg and return the delivered message qubits, or `None` when the
/// check aborted (the abort record is already logged against the receiver).
#[allow(clippy::too_many_arguments)]
pub(crate) fn ship_leg<R: Rng + ?Sized>(
    arena: &mut Arena,
    transcript: &mut Transcript,
    sender: Actor,
    receiver: Actor,
    leg: &str,
    message: Vec<(QubitId, String)>,
    traffic: LegTraffic,
    policy: &LegPolicy,
    tap: Option<EavesdropperModel>,
    rng: &mut R,
) -> Result<Option<Vec<QubitId>>> {
    let decoys = policy.decoys_per_message_qubit as usize * message.len();
    for (_, name) in &message {
        match traffic {
            LegTraffic::FirstSend => {
                transcript.transmit(Phase::Voting, sender, name.clone(), receiver, leg)
            }
            LegTraffic::Forward => {
                transcript.forward(Phase::Voting, sender, name.clone(), receiver, leg)
            }
        }
    }
    let ids: Vec<QubitId> = message.into_iter().map(|(q, _)| q).collect();
    let (protected, records) = insert_decoys(arena, ids, decoys, rng);
    for _ in 0..decoys {
        transcript.transmit(Phase::Voting, sender, "decoy", receiver, leg);
    }
    let delivered = match tap {
        Some(model) => apply_adversary(arena, model, &protected, rng)?,
        None => protected,
    };
    if records.is_empty() {
        return Ok(Some(delivered));
    }
    let (check, message) = run_check(
        policy.subroutine,
        arena,
        &records,
        &delivered,
        policy.abort_threshold,
        rng,
    )?;
    if check.verdict == Verdict::Abort {
        transcript.abort(Phase::Voting, receiver, leg, check.error_rate);
        return Ok(None);
    }
    Ok(Some(message))
}
