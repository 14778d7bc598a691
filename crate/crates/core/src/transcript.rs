//! Protocol transcripts: an ordered, append-only log of party actions,
//! announcements, qubit transmissions and resource deltas. The serialized
//! form is one JSON record per line; parsing it back yields the identical
//! record list, which is what the replay and determinism checks rely on.
//!
//! Resource conventions:
//! - every `TransmitQubit` record carries `dq = 1` and is logged exactly
//!   once per distinct qubit entering the protocol (shares of a distributed
//!   entangled resource count even when the preparer keeps one, matching
//!   how the efficiency figures count a whole channel state);
//! - re-sends of an already-counted qubit (a voter forwarding her encoded
//!   channel qubit) are `ForwardQubit` records with `dq = 0`;
//! - `db` is charged only on decoding-relevant classical traffic, never on
//!   eavesdropping-check bookkeeping;
//! - `dc` is charged once per vote conveyed, at decode time.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Initial,
    Voting,
    Counting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Actor {
    Ca,
    Charlie,
    Bob,
    Voter(u32),
    Eve,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Actor::Ca => f.write_str("CA"),
            Actor::Charlie => f.write_str("Charlie"),
            Actor::Bob => f.write_str("Bob"),
            Actor::Voter(i) => write!(f, "Voter_{i}"),
            Actor::Eve => f.write_str("Eve"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Prepare,
    TransmitQubit,
    ForwardQubit,
    Measure,
    Announce,
    Disclose,
    Abort,
    PhaseMarker,
}

/// Structured record payloads. Announcement-style payloads keep their
/// values as plain strings so the bulletin board stays human-readable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Prepare {
        what: String,
    },
    Qubit {
        qubit: String,
        to: Actor,
        leg: String,
    },
    Measure {
        basis: String,
        outcome: String,
    },
    Announce {
        topic: String,
        value: String,
    },
    Disclose {
        topic: String,
        value: String,
    },
    Permutation {
        pi: Vec<usize>,
        initial: String,
    },
    Abort {
        leg: String,
        error_rate: f64,
    },
    Marker {
        label: String,
    },
}

impl Payload {
    /// Topic of announcement-like payloads, used by the secrecy scans.
    pub fn topic(&self) -> Option<&str> {
        match self {
            Payload::Announce { topic, .. } | Payload::Disclose { topic, .. } => Some(topic),
            Payload::Permutation { .. } => Some("permutation"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub index: u64,
    pub phase: Phase,
    pub actor: Actor,
    pub action: ActionKind,
    pub payload: Payload,
    pub dq: u32,
    pub db: u32,
    pub dc: u32,
}

/// One bulletin-board entry: the announce-record subset of a transcript.
#[derive(Debug, Clone, Copy)]
pub struct BulletinEntry<'a> {
    pub actor: Actor,
    pub payload: &'a Payload,
    pub bits: u32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    records: Vec<Record>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        phase: Phase,
        actor: Actor,
        action: ActionKind,
        payload: Payload,
        dq: u32,
        db: u32,
        dc: u32,
    ) {
        let index = self.records.len() as u64;
        self.records.push(Record {
            index,
            phase,
            actor,
            action,
            payload,
            dq,
            db,
            dc,
        });
    }

    pub fn prepare(&mut self, phase: Phase, actor: Actor, what: impl Into<String>) {
        self.push(
            phase,
            actor,
            ActionKind::Prepare,
            Payload::Prepare { what: what.into() },
            0,
            0,
            0,
        );
    }

    /// A qubit entering the protocol: counted in `q`.
    pub fn transmit(
        &mut self,
        phase: Phase,
        actor: Actor,
        qubit: impl Into<String>,
        to: Actor,
        leg: impl Into<String>,
    ) {
        self.push(
            phase,
            actor,
            ActionKind::TransmitQubit,
            Payload::Qubit {
                qubit: qubit.into(),
                to,
                leg: leg.into(),
            },
            1,
            0,
            0,
        );
    }

    /// A re-send of a qubit already counted: not charged to `q`.
    pub fn forward(
        &mut self,
        phase: Phase,
        actor: Actor,
        qubit: impl Into<String>,
        to: Actor,
        leg: impl Into<String>,
    ) {
        self.push(
            phase,
            actor,
            ActionKind::ForwardQubit,
            Payload::Qubit {
                qubit: qubit.into(),
                to,
                leg: leg.into(),
            },
            0,
            0,
            0,
        );
    }

    pub fn measure(
        &mut self,
        phase: Phase,
        actor: Actor,
        basis: impl Into<String>,
        outcome: impl Into<String>,
    ) {
        self.push(
            phase,
            actor,
            ActionKind::Measure,
            Payload::Measure {
                basis: basis.into(),
                outcome: outcome.into(),
            },
            0,
            0,
            0,
        );
    }

    pub fn announce(
        &mut self,
        phase: Phase,
        actor: Actor,
        topic: impl Into<String>,
        value: impl Into<String>,
        bits: u32,
    ) {
        self.push(
            phase,
            actor,
            ActionKind::Announce,
            Payload::Announce {
                topic: topic.into(),
                value: value.into(),
            },
            0,
            bits,
            0,
        );
    }

    pub fn disclose(
        &mut self,
        phase: Phase,
        actor: Actor,
        topic: impl Into<String>,
        value: impl Into<String>,
        bits: u32,
    ) {
        self.push(
            phase,
            actor,
            ActionKind::Disclose,
            Payload::Disclose {
                topic: topic.into(),
                value: value.into(),
            },
            0,
            bits,
            0,
        );
    }

    pub fn disclose_permutation(
        &mut self,
        actor: Actor,
        pi: Vec<usize>,
        initial: String,
        bits: u32,
    ) {
        self.push(
            Phase::Counting,
            actor,
            ActionKind::Disclose,
            Payload::Permutation { pi, initial },
            0,
            bits,
            0,
        );
    }

    /// A decoded vote: counted in `c`.
    pub fn decoded_vote(&mut self, actor: Actor, voter: u32, vote: u8) {
        self.push(
            Phase::Counting,
            actor,
            ActionKind::Announce,
            Payload::Announce {
                topic: format!("decoded-vote/{voter}"),
                value: vote.to_string(),
            },
            0,
            0,
            1,
        );
    }

    pub fn abort(&mut self, phase: Phase, actor: Actor, leg: impl Into<String>, error_rate: f64) {
        self.push(
            phase,
            actor,
            ActionKind::Abort,
            Payload::Abort {
                leg: leg.into(),
                error_rate,
            },
            0,
            0,
            0,
        );
    }

    /// The mandatory counting-phase marker.
    pub fn counting_marker(&mut self, actor: Actor) {
        self.push(
            Phase::Counting,
            actor,
            ActionKind::PhaseMarker,
            Payload::Marker {
                label: "counting".into(),
            },
            0,
            0,
            0,
        );
    }

    pub fn counting_marker_index(&self) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.action == ActionKind::PhaseMarker)
            .map(|r| r.index)
    }

    /// The bulletin board: announcements and disclosures in order.
    pub fn bulletin_board(&self) -> Vec<BulletinEntry<'_>> {
        self.records
            .iter()
            .filter(|r| matches!(r.action, ActionKind::Announce | ActionKind::Disclose))
            .map(|r| BulletinEntry {
                actor: r.actor,
                payload: &r.payload,
                bits: r.db,
            })
            .collect()
    }

    /// Structural invariants: strictly increasing indices, transmit records
    /// charge exactly one qubit, at most one counting marker.
    pub fn validate(&self) -> Result<()> {
        let mut markers = 0;
        for (i, r) in self.records.iter().enumerate() {
            if r.index != i as u64 {
                return Err(Error::Consistency(format!(
                    "record {i} has index {}",
                    r.index
                )));
            }
            match r.action {
                ActionKind::TransmitQubit if r.dq != 1 => {
                    return Err(Error::Consistency(format!(
                        "transmit record {i} has dq = {}",
                        r.dq
                    )));
                }
                ActionKind::PhaseMarker => markers += 1,
                _ => {}
            }
            if r.action != ActionKind::TransmitQubit && r.dq != 0 {
                return Err(Error::Consistency(format!(
                    "non-transmit record {i} charges dq = {}",
                    r.dq
                )));
            }
        }
        if markers > 1 {
            return Err(Error::Consistency(format!(
                "{markers} counting-phase markers present"
            )));
        }
        Ok(())
    }

    /// True when no record before the counting marker announces any of the
    /// given topics (the secrecy scan for rules and the permutation).
    pub fn secret_until_counting(&self, topics: &[&str]) -> bool {
        let marker = self.counting_marker_index().unwrap_or(u64::MAX);
        !self.records.iter().any(|r| {
            r.index < marker
                && r.payload
                    .topic()
                    .is_some_and(|t| topics.iter().any(|needle| t.starts_with(needle)))
        })
    }

    /// One JSON record per line, trailing newline included.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(input: &str) -> Result<Transcript> {
        let mut records = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: Record = serde_json::from_str(line)
                .map_err(|e| Error::TranscriptParse(format!("line {}: {e}", lineno + 1)))?;
            records.push(record);
        }
        Ok(Transcript { records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Transcript {
        let mut t = Transcript::new();
        t.prepare(Phase::Initial, Actor::Ca, "authentication-oracle");
        t.transmit(
            Phase::Voting,
            Actor::Bob,
            "plus",
            Actor::Voter(0),
            "voting2/0",
        );
        t.announce(Phase::Voting, Actor::Voter(0), "ghz-outcome/0", "GHZ0+", 3);
        t.counting_marker(Actor::Charlie);
        t.disclose(Phase::Counting, Actor::Charlie, "rule/0", "I=yes,Z=no", 1);
        t.decoded_vote(Actor::Bob, 0, 1);
        t
    }

    #[test]
    fn jsonl_round_trip_is_lossless() {
        let t = sample();
        let text = t.to_jsonl();
        let back = Transcript::from_jsonl(&text).unwrap();
        assert_eq!(t, back);
        assert_eq!(text, back.to_jsonl());
    }

    #[test]
    fn validation_accepts_well_formed_logs() {
        sample().validate().unwrap();
    }

    #[test]
    fn secrecy_scan_sees_post_marker_disclosures_as_fine() {
        let t = sample();
        assert!(t.secret_until_counting(&["rule", "permutation"]));
        let mut bad = Transcript::new();
        bad.disclose(Phase::Voting, Actor::Charlie, "rule/0", "I=yes,Z=no", 1);
        bad.counting_marker(Actor::Charlie);
        assert!(!bad.secret_until_counting(&["rule"]));
    }

    #[test]
    fn bulletin_board_is_the_announce_subset() {
        let t = sample();
        let board = t.bulletin_board();
        assert_eq!(board.len(), 3);
        assert_eq!(board[0].bits, 3);
    }
}
