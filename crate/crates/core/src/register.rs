//! Qubit bookkeeping for protocol runs.
//!
//! Protocol parties hold *handles* to qubits; the arena tracks which dense
//! register each handle currently lives in. Measuring a subset of handles
//! merges registers as needed, collapses the joint state and retires the
//! measured handles, so entanglement between transmitted qubits and qubits
//! that stayed home is carried faithfully — including through adversarial
//! interception.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::{
    measure, outcome_distribution, partial_trace, to_density, DensityMatrix, MeasurementBasis,
    StateVector, UnitaryMatrix,
};

/// Stable handle to one qubit for the duration of a protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(u32);

#[derive(Debug, Clone)]
struct Register {
    state: StateVector,
    qubits: Vec<QubitId>,
}

/// Result of an arena measurement.
#[derive(Debug, Clone)]
pub struct MeasuredOutcome {
    pub label: &'static str,
    pub outcome: usize,
    pub probability: f64,
}

#[derive(Debug, Default)]
pub struct Arena {
    registers: Vec<Option<Register>>,
    locations: HashMap<QubitId, usize>,
    next_id: u32,
}

impl Arena {
    pub fn new() -> Self {
        Arena::default()
    }

    /// Bring a state in as a fresh register; returns one handle per qubit in
    /// the state's qubit order.
    pub fn alloc(&mut self, state: StateVector) -> Vec<QubitId> {
        let qubits: Vec<QubitId> = (0..state.num_qubits())
            .map(|_| {
                let id = QubitId(self.next_id);
                self.next_id += 1;
                id
            })
            .collect();
        let slot = self.registers.len();
        for &q in &qubits {
            self.locations.insert(q, slot);
        }
        self.registers.push(Some(Register {
            state,
            qubits: qubits.clone(),
        }));
        qubits
    }

    pub fn alloc_single(&mut self, state: StateVector) -> Result<QubitId> {
        if state.num_qubits() != 1 {
            return Err(Error::Validation(format!(
                "alloc_single expects 1 qubit, got {}",
                state.num_qubits()
            )));
        }
        Ok(self.alloc(state)[0])
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.locations.contains_key(&q)
    }

    fn slot_of(&self, q: QubitId) -> Result<usize> {
        self.locations
            .get(&q)
            .copied()
            .ok_or_else(|| Error::Contract(format!("qubit {q:?} is no longer live")))
    }

    /// Ensure all handles share one register (tensoring registers together
    /// if needed) and return its slot.
    fn co_locate(&mut self, qubits: &[QubitId]) -> Result<usize> {
        let mut slots: Vec<usize> = Vec::new();
        for &q in qubits {
            let s = self.slot_of(q)?;
            if !slots.contains(&s) {
                slots.push(s);
            }
        }
        let target = slots[0];
        for &other in &slots[1..] {
            let right = self.registers[other]
                .take()
                .expect("live slot holds a register");
            let left = self.registers[target]
                .take()
                .expect("live slot holds a register");
            let state = left.state.tensor(&right.state)?;
            let mut merged_qubits = left.qubits;
            merged_qubits.extend(right.qubits);
            for &q in &merged_qubits {
                self.locations.insert(q, target);
            }
            self.registers[target] = Some(Register {
                state,
                qubits: merged_qubits,
            });
        }
        Ok(target)
    }

    fn positions_in(&self, slot: usize, qubits: &[QubitId]) -> Result<Vec<usize>> {
        let reg = self.registers[slot].as_ref().expect("live register");
        qubits
            .iter()
            .map(|q| {
                reg.qubits
                    .iter()
                    .position(|r| r == q)
                    .ok_or_else(|| Error::Contract(format!("qubit {q:?} not in register")))
            })
            .collect()
    }

    /// Apply a gate to the listed qubits (merging registers if they are
    /// currently separate).
    pub fn apply(&mut self, u: &UnitaryMatrix, qubits: &[QubitId]) -> Result<()> {
        let slot = self.co_locate(qubits)?;
        let targets = self.positions_in(slot, qubits)?;
        let reg = self.registers[slot].as_mut().expect("live register");
        reg.state = reg.state.apply_unitary(u, &targets)?;
        Ok(())
    }

    /// Measure the listed qubits in `basis` and retire them. Remaining
    /// qubits of the affected register keep their (possibly collapsed)
    /// joint state.
    pub fn measure_out<R: Rng + ?Sized>(
        &mut self,
        qubits: &[QubitId],
        basis: &MeasurementBasis,
        rng: &mut R,
    ) -> Result<MeasuredOutcome> {
        let slot = self.co_locate(qubits)?;
        let targets = self.positions_in(slot, qubits)?;
        let reg = self.registers[slot].as_mut().expect("live register");
        let record = measure(&reg.state, basis, &targets, rng)?;

        let survivors: Vec<QubitId> = reg
            .qubits
            .iter()
            .copied()
            .filter(|q| !qubits.contains(q))
            .collect();
        for &q in qubits {
            self.locations.remove(&q);
        }
        if survivors.is_empty() {
            self.registers[slot] = None;
        } else {
            *reg = Register {
                state: record.post_state.clone(),
                qubits: survivors,
            };
        }
        Ok(MeasuredOutcome {
            label: record.label,
            outcome: record.outcome,
            probability: record.probability,
        })
    }

    /// Exact outcome distribution of a hypothetical measurement; does not
    /// collapse anything (registers may still get merged).
    pub fn distribution(
        &mut self,
        qubits: &[QubitId],
        basis: &MeasurementBasis,
    ) -> Result<Vec<(&'static str, f64)>> {
        let slot = self.co_locate(qubits)?;
        let targets = self.positions_in(slot, qubits)?;
        let reg = self.registers[slot].as_ref().expect("live register");
        outcome_distribution(&reg.state, basis, &targets)
    }

    /// Reduced density matrix of the listed qubits, in the listed order's
    /// sorted positions, tracing out the rest of their (merged) register.
    pub fn density(&mut self, qubits: &[QubitId]) -> Result<DensityMatrix> {
        let slot = self.co_locate(qubits)?;
        let targets = self.positions_in(slot, qubits)?;
        let reg = self.registers[slot].as_ref().expect("live register");
        partial_trace(&to_density(&reg.state), &targets)
    }

    /// Number of live qubits (diagnostics).
    pub fn live_qubits(&self) -> usize {
        self.locations.len()
    }
}
