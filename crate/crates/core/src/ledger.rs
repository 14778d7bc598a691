//! Resource accounting and the qubit-efficiency figure `η = c / (q + b)`:
//! classical message bits conveyed over qubits transmitted (decoys included)
//! plus decoding-side classical bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transcript::Transcript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    /// Classical message bits conveyed (one per vote).
    pub c: u64,
    /// Qubits transmitted, decoys included.
    pub q: u64,
    /// Classical bits consumed in decoding (eavesdropping-check traffic is
    /// excluded by convention).
    pub b: u64,
}

impl ResourceLedger {
    pub fn new(c: u64, q: u64, b: u64) -> Self {
        ResourceLedger { c, q, b }
    }
}

/// Qubit efficiency `c / (q + b)`.
pub fn eta(ledger: &ResourceLedger) -> Result<f64> {
    let denom = ledger.q + ledger.b;
    if denom == 0 {
        return Err(Error::UndefinedEfficiency);
    }
    Ok(ledger.c as f64 / denom as f64)
}

/// Sum a transcript's resource deltas. `per_vote` scales the totals down to
/// a single vote, which must divide exactly; the counting-phase marker must
/// be present for the accounting to be considered complete.
pub fn ledger_from_transcript(t: &Transcript, per_vote: bool) -> Result<ResourceLedger> {
    if t.counting_marker_index().is_none() {
        return Err(Error::Accounting(
            "transcript has no counting-phase marker; accounting incomplete".into(),
        ));
    }
    let mut ledger = ResourceLedger::new(0, 0, 0);
    for r in t.records() {
        ledger.q += u64::from(r.dq);
        ledger.b += u64::from(r.db);
        ledger.c += u64::from(r.dc);
    }
    if !per_vote {
        return Ok(ledger);
    }
    if ledger.c == 0 {
        return Err(Error::Accounting(
            "per-vote ledger undefined: no votes were conveyed".into(),
        ));
    }
    let n = ledger.c;
    if !ledger.q.is_multiple_of(n) || !ledger.b.is_multiple_of(n) {
        return Err(Error::Accounting(format!(
            "per-vote ledger is not integral: totals c={} q={} b={}",
            ledger.c, ledger.q, ledger.b
        )));
    }
    Ok(ResourceLedger::new(1, ledger.q / n, ledger.b / n))
}
