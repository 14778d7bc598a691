//! Decoy-qubit insertion and the BB84-style eavesdropping check protecting
//! every quantum transmission in the improved protocols, plus the adversary
//! models the checks are calibrated against.
//!
//! An adversary only ever receives the ordered qubit handles of a leg; the
//! interface carries nothing that distinguishes a decoy position from a
//! message position.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{MeasurementBasis, StateVector};
use crate::register::{Arena, QubitId};

/// Default abort threshold. Any modeled adversary pushes the decoy error
/// rate far above this; an honest noiseless channel produces exactly zero.
pub const DEFAULT_ABORT_THRESHOLD: f64 = 0.11;

/// The four BB84 decoy states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoyState {
    Zero,
    One,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoyBasis {
    Computational,
    Diagonal,
}

impl DecoyState {
    pub const ALL: [DecoyState; 4] = [
        DecoyState::Zero,
        DecoyState::One,
        DecoyState::Plus,
        DecoyState::Minus,
    ];

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> DecoyState {
        DecoyState::ALL[rng.random_range(0..4)]
    }

    pub fn state(self) -> StateVector {
        match self {
            DecoyState::Zero => StateVector::zero(),
            DecoyState::One => StateVector::one(),
            DecoyState::Plus => StateVector::plus(),
            DecoyState::Minus => StateVector::minus(),
        }
    }

    pub fn basis(self) -> DecoyBasis {
        match self {
            DecoyState::Zero | DecoyState::One => DecoyBasis::Computational,
            DecoyState::Plus | DecoyState::Minus => DecoyBasis::Diagonal,
        }
    }

    /// Outcome index this state produces when measured in its own basis.
    pub fn expected_outcome(self) -> usize {
        match self {
            DecoyState::Zero | DecoyState::Plus => 0,
            DecoyState::One | DecoyState::Minus => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DecoyState::Zero => "zero",
            DecoyState::One => "one",
            DecoyState::Plus => "plus",
            DecoyState::Minus => "minus",
        }
    }
}

impl DecoyBasis {
    pub fn measurement_basis(self) -> MeasurementBasis {
        match self {
            DecoyBasis::Computational => MeasurementBasis::computational(),
            DecoyBasis::Diagonal => MeasurementBasis::diagonal(),
        }
    }
}

/// The sender's private note about one inserted decoy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoyRecord {
    /// Index in the protected (post-insertion) sequence.
    pub position: usize,
    pub prepared_state: DecoyState,
    pub basis: DecoyBasis,
}

/// Which eavesdropping-check subroutine a leg uses. Only the BB84 check is
/// implemented; the GV variant is declared so configurations can name it,
/// and selecting it reports an unimplemented error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CheckSubroutine {
    #[default]
    Bb84,
    Gv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub tested: usize,
    pub errors: usize,
    pub error_rate: f64,
    pub verdict: Verdict,
}

/// Insert `count` decoys, each drawn uniformly from the four BB84 states,
/// at uniformly random distinct positions; the message qubits keep their
/// relative order. Returns the protected sequence and the sender's records.
pub fn insert_decoys<R: Rng + ?Sized>(
    arena: &mut Arena,
    message: Vec<QubitId>,
    count: usize,
    rng: &mut R,
) -> (Vec<QubitId>, Vec<DecoyRecord>) {
    if count == 0 {
        return (message, Vec::new());
    }
    let total = message.len() + count;
    let mut positions = rand::seq::index::sample(rng, total, count).into_vec();
    positions.sort_unstable();

    let mut protected = Vec::with_capacity(total);
    let mut records = Vec::with_capacity(count);
    let mut message_iter = message.into_iter();
    let mut next_decoy = 0;
    for position in 0..total {
        if next_decoy < positions.len() && positions[next_decoy] == position {
            let prepared = DecoyState::sample(rng);
            let q = arena
                .alloc_single(prepared.state())
                .expect("decoy states are single qubits");
            protected.push(q);
            records.push(DecoyRecord {
                position,
                prepared_state: prepared,
                basis: prepared.basis(),
            });
            next_decoy += 1;
        } else {
            protected.push(message_iter.next().expect("message length accounted"));
        }
    }
    (protected, records)
}

/// Measure each decoy of a received sequence in its preparation basis and
/// compare with the prepared state. Returns the verdict and the surviving
/// message qubits in order. The position/basis announcement this implies is
/// not charged to the `b` ledger.
pub fn bb84_check<R: Rng + ?Sized>(
    arena: &mut Arena,
    records: &[DecoyRecord],
    received: &[QubitId],
    threshold: f64,
    rng: &mut R,
) -> Result<(CheckResult, Vec<QubitId>)> {
    let mut decoy_positions = Vec::with_capacity(records.len());
    let mut errors = 0usize;
    for record in records {
        if record.position >= received.len() {
            return Err(Error::Contract(format!(
                "decoy position {} out of bounds for sequence of {}",
                record.position,
                received.len()
            )));
        }
        if record.basis != record.prepared_state.basis() {
            return Err(Error::Contract(
                "decoy record basis inconsistent with prepared state".into(),
            ));
        }
        if decoy_positions.contains(&record.position) {
            return Err(Error::Contract(format!(
                "duplicate decoy position {}",
                record.position
            )));
        }
        decoy_positions.push(record.position);
        let outcome = arena.measure_out(
            &[received[record.position]],
            &record.basis.measurement_basis(),
            rng,
        )?;
        if outcome.outcome != record.prepared_state.expected_outcome() {
            errors += 1;
        }
    }
    let tested = records.len();
    let error_rate = if tested == 0 {
        0.0
    } else {
        errors as f64 / tested as f64
    };
    let verdict = if error_rate > threshold {
        Verdict::Abort
    } else {
        Verdict::Pass
    };
    let message = received
        .iter()
        .enumerate()
        .filter(|(i, _)| !decoy_positions.contains(i))
        .map(|(_, &q)| q)
        .collect();
    Ok((
        CheckResult {
            tested,
            errors,
            error_rate,
            verdict,
        },
        message,
    ))
}

/// Gatekeeper for the subroutine selector.
pub fn run_check<R: Rng + ?Sized>(
    subroutine: CheckSubroutine,
    arena: &mut Arena,
    records: &[DecoyRecord],
    received: &[QubitId],
    threshold: f64,
    rng: &mut R,
) -> Result<(CheckResult, Vec<QubitId>)> {
    match subroutine {
        CheckSubroutine::Bb84 => bb84_check(arena, records, received, threshold, rng),
        CheckSubroutine::Gv => Err(Error::Unimplemented(
            "GV eavesdropping-check subroutine; use bb84",
        )),
    }
}

/// Channel tamper models. Each acts on every qubit of the leg it is applied
/// to, decoys included, through the handle interface alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EavesdropperModel {
    /// Measure each qubit in a uniformly random basis (computational or
    /// diagonal) and forward a fresh qubit prepared as the outcome.
    InterceptResend,
    /// Keep every qubit and forward a fresh copy of one fixed state.
    ReplaceFixed(DecoyState),
}

impl EavesdropperModel {
    pub fn label(self) -> String {
        match self {
            EavesdropperModel::InterceptResend => "intercept-resend".into(),
            EavesdropperModel::ReplaceFixed(s) => format!("replace-fixed:{}", s.label()),
        }
    }
}

/// Run the adversary over a transmitted sequence, returning what the
/// receiver ends up with. Originals captured by `ReplaceFixed` stay live in
/// the arena (the attacker holds them); intercepted-and-measured qubits
/// collapse any partners they were entangled with.
pub fn apply_adversary<R: Rng + ?Sized>(
    arena: &mut Arena,
    model: EavesdropperModel,
    sequence: &[QubitId],
    rng: &mut R,
) -> Result<Vec<QubitId>> {
    let mut out = Vec::with_capacity(sequence.len());
    for &q in sequence {
        match model {
            EavesdropperModel::InterceptResend => {
                let basis = if rng.random::<bool>() {
                    DecoyBasis::Computational
                } else {
                    DecoyBasis::Diagonal
                };
                let outcome = arena.measure_out(&[q], &basis.measurement_basis(), rng)?;
                let reprepared = match (basis, outcome.outcome) {
                    (DecoyBasis::Computational, 0) => StateVector::zero(),
                    (DecoyBasis::Computational, _) => StateVector::one(),
                    (DecoyBasis::Diagonal, 0) => StateVector::plus(),
                    (DecoyBasis::Diagonal, _) => StateVector::minus(),
                };
                out.push(arena.alloc_single(reprepared)?);
            }
            EavesdropperModel::ReplaceFixed(state) => {
                out.push(arena.alloc_single(state.state())?);
            }
        }
    }
    Ok(out)
}
