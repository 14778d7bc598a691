//! Constructors and label algebra for the named entangled states: Bell
//! pairs, GHZ states, the 4-qubit voting channel, the GHZ-like channel with
//! a controller qubit, the Pauli encoding operators and the Bell-state
//! transition table used for decoding.
//!
//! Label algebra is quotiented by global phase throughout; `iY` transitions
//! produce sign factors that the labels deliberately ignore.
//!
//! Other controller resources that appear in the wider CDSQC literature
//! (W states, cluster states, Q4/Q5, Brown states) are not constructed here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::qstate::{BasisName, MeasurementBasis, StateVector, UnitaryMatrix};

/// The four Bell states in this paper family's naming:
/// `psi± = (|00⟩ ± |11⟩)/√2`, `phi± = (|01⟩ ± |10⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    /// Index matching the Bell measurement basis outcome order.
    pub fn index(self) -> usize {
        match self {
            BellLabel::PsiPlus => 0,
            BellLabel::PsiMinus => 1,
            BellLabel::PhiPlus => 2,
            BellLabel::PhiMinus => 3,
        }
    }

    pub fn from_index(index: usize) -> Result<Self> {
        BellLabel::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::Validation(format!("bell outcome index {index} out of range")))
    }

    pub fn label(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        BellLabel::ALL
            .into_iter()
            .find(|b| b.label() == label)
            .ok_or_else(|| Error::Validation(format!("unknown bell label `{label}`")))
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The exact 2-qubit state for a Bell label.
pub fn bell(label: BellLabel) -> StateVector {
    MeasurementBasis::bell().vector(label.index()).clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// A 3-qubit GHZ label `GHZa± = (|ijk⟩ ± |īj̄k̄⟩)/√2` where `a ∈ 0..=3` is
/// the decimal value of `ijk` with leading bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GhzLabel {
    pub a: u8,
    pub sign: Sign,
}

impl GhzLabel {
    pub fn new(a: u8, sign: Sign) -> Result<Self> {
        if a > 3 {
            return Err(Error::Validation(format!(
                "GHZ label index {a} out of range 0..=3"
            )));
        }
        Ok(GhzLabel { a, sign })
    }

    pub const ALL: [GhzLabel; 8] = [
        GhzLabel {
            a: 0,
            sign: Sign::Plus,
        },
        GhzLabel {
            a: 0,
            sign: Sign::Minus,
        },
        GhzLabel {
            a: 1,
            sign: Sign::Plus,
        },
        GhzLabel {
            a: 1,
            sign: Sign::Minus,
        },
        GhzLabel {
            a: 2,
            sign: Sign::Plus,
        },
        GhzLabel {
            a: 2,
            sign: Sign::Minus,
        },
        GhzLabel {
            a: 3,
            sign: Sign::Plus,
        },
        GhzLabel {
            a: 3,
            sign: Sign::Minus,
        },
    ];

    /// Index matching the GHZ measurement basis outcome order.
    pub fn index(self) -> usize {
        2 * self.a as usize + usize::from(self.sign == Sign::Minus)
    }

    pub fn from_index(index: usize) -> Result<Self> {
        GhzLabel::ALL
            .get(index)
            .copied()
            .ok_or_else(|| Error::Validation(format!("GHZ outcome index {index} out of range")))
    }

    pub fn label(self) -> &'static str {
        MeasurementBasis::ghz().label(self.index())
    }

    pub fn from_label(label: &str) -> Result<Self> {
        MeasurementBasis::ghz()
            .outcome_of_label(label)
            .map(|i| GhzLabel::ALL[i])
            .ok_or_else(|| Error::Validation(format!("unknown GHZ label `{label}`")))
    }
}

impl fmt::Display for GhzLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The exact 3-qubit state for a GHZ label.
pub fn ghz(label: GhzLabel) -> StateVector {
    MeasurementBasis::ghz().vector(label.index()).clone()
}

/// The encoding operators: identity and the Pauli gates, with `iY` taken in
/// its real form `[[0, 1], [−1, 0]]` so that all encodings are real matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    IY,
    Z,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::IY, PauliOp::Z];

    pub fn matrix(self) -> UnitaryMatrix {
        let c = |re: f64| Complex64::new(re, 0.0);
        let entries = match self {
            PauliOp::I => vec![c(1.), c(0.), c(0.), c(1.)],
            PauliOp::X => vec![c(0.), c(1.), c(1.), c(0.)],
            PauliOp::IY => vec![c(0.), c(1.), c(-1.), c(0.)],
            PauliOp::Z => vec![c(1.), c(0.), c(0.), c(-1.)],
        };
        UnitaryMatrix::new(2, entries).expect("pauli matrices are unitary")
    }

    pub fn label(self) -> &'static str {
        match self {
            PauliOp::I => "I",
            PauliOp::X => "X",
            PauliOp::IY => "iY",
            PauliOp::Z => "Z",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        PauliOp::ALL
            .into_iter()
            .find(|p| p.label() == label)
            .ok_or_else(|| Error::Validation(format!("unknown Pauli label `{label}`")))
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The 4-qubit voting channel `(|GHZ0+⟩|0⟩ + |GHZ1+⟩|1⟩)/√2` with qubit
/// order (A1, A2, B, C): amplitude 1/2 on each of |0000⟩, |1110⟩, |0011⟩
/// and |1101⟩.
pub fn tzl_channel() -> StateVector {
    let mut amps = vec![Complex64::ZERO; 16];
    for idx in [0b0000, 0b1110, 0b0011, 0b1101] {
        amps[idx] = Complex64::new(0.5, 0.0);
    }
    StateVector::from_amplitudes(amps).expect("fixed channel state")
}

/// Which basis the controller's qubit is keyed to in the GHZ-like channel.
/// The diagonal choice turns the channel into a plain GHZ state while
/// keeping the same control semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ControllerBasis {
    #[default]
    Computational,
    Diagonal,
}

impl ControllerBasis {
    pub fn measurement_basis(self) -> MeasurementBasis {
        match self {
            ControllerBasis::Computational => MeasurementBasis::computational(),
            ControllerBasis::Diagonal => MeasurementBasis::diagonal(),
        }
    }

    pub fn name(self) -> BasisName {
        match self {
            ControllerBasis::Computational => BasisName::Computational,
            ControllerBasis::Diagonal => BasisName::Diagonal,
        }
    }
}

/// Specification of the 3-qubit GHZ-like channel
/// `(|ψ1⟩|a⟩ + |ψ2⟩|b⟩)/√2` with qubit order (voter, tallyman, controller),
/// where {|a⟩, |b⟩} is the controller basis. The two Bell branches must
/// differ or the controller's outcome carries no information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhzLikeSpec {
    pub psi1: BellLabel,
    pub psi2: BellLabel,
    pub controller_basis: ControllerBasis,
}

impl GhzLikeSpec {
    pub fn new(psi1: BellLabel, psi2: BellLabel) -> Result<Self> {
        if psi1 == psi2 {
            return Err(Error::Validation(
                "GHZ-like channel branches must be distinct Bell states".into(),
            ));
        }
        Ok(GhzLikeSpec {
            psi1,
            psi2,
            controller_basis: ControllerBasis::Computational,
        })
    }

    pub fn with_controller_basis(mut self, basis: ControllerBasis) -> Self {
        self.controller_basis = basis;
        self
    }

    /// The Bell pair shared by voter and tallyman once the controller has
    /// announced outcome index `outcome` in the controller basis.
    pub fn branch(&self, outcome: usize) -> BellLabel {
        if outcome == 0 {
            self.psi1
        } else {
            self.psi2
        }
    }
}

impl Default for GhzLikeSpec {
    fn default() -> Self {
        GhzLikeSpec {
            psi1: BellLabel::PsiPlus,
            psi2: BellLabel::PhiPlus,
            controller_basis: ControllerBasis::Computational,
        }
    }
}

impl fmt::Display for GhzLikeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = match self.controller_basis {
            ControllerBasis::Computational => "computational",
            ControllerBasis::Diagonal => "diagonal",
        };
        write!(f, "({},{};{basis})", self.psi1, self.psi2)
    }
}

/// Build the GHZ-like channel state for a spec.
pub fn ghz_like(spec: &GhzLikeSpec) -> Result<StateVector> {
    if spec.psi1 == spec.psi2 {
        return Err(Error::Validation(
            "GHZ-like channel branches must be distinct Bell states".into(),
        ));
    }
    let controller = spec.controller_basis.measurement_basis();
    let b1 = bell(spec.psi1).tensor(controller.vector(0))?;
    let b2 = bell(spec.psi2).tensor(controller.vector(1))?;
    let amps: Vec<Complex64> = b1
        .amplitudes()
        .iter()
        .zip(b2.amplitudes())
        .map(|(x, y)| (x + y) * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    StateVector::from_amplitudes(amps)
}

/// The Bell label of `(op ⊗ I)|initial⟩` up to global phase. For each fixed
/// initial label this is a bijection from the four encoding operators onto
/// the four Bell labels; the inverse is the vote decoder.
///
/// The table is hardcoded from the two-term expansion of each Bell state;
/// the kernel recomputes and cross-checks all 16 entries in the tests.
pub fn bell_transition(initial: BellLabel, op: PauliOp) -> BellLabel {
    use BellLabel::*;
    use PauliOp::*;
    match (initial, op) {
        (PsiPlus, I) => PsiPlus,
        (PsiPlus, X) => PhiPlus,
        (PsiPlus, IY) => PhiMinus,
        (PsiPlus, Z) => PsiMinus,
        (PsiMinus, I) => PsiMinus,
        (PsiMinus, X) => PhiMinus,
        (PsiMinus, IY) => PhiPlus,
        (PsiMinus, Z) => PsiPlus,
        (PhiPlus, I) => PhiPlus,
        (PhiPlus, X) => PsiPlus,
        (PhiPlus, IY) => PsiMinus,
        (PhiPlus, Z) => PhiMinus,
        (PhiMinus, I) => PhiMinus,
        (PhiMinus, X) => PsiMinus,
        (PhiMinus, IY) => PsiPlus,
        (PhiMinus, Z) => PhiPlus,
    }
}

/// The unique operator with `bell_transition(initial, op) == observed`.
pub fn bell_transition_inverse(initial: BellLabel, observed: BellLabel) -> PauliOp {
    PauliOp::ALL
        .into_iter()
        .find(|&op| bell_transition(initial, op) == observed)
        .expect("bell_transition is a bijection in op")
}
