use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::state::{StateVector, NORM_TOL};

/// The named measurement bases used by the protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisName {
    Computational,
    Diagonal,
    Bell,
    Ghz,
}

/// An orthonormal measurement basis with labeled outcomes.
///
/// Outcome order is fixed per basis so outcome indices are stable:
/// computational `0,1`; diagonal `+,−`; Bell `psi+,psi-,phi+,phi-` with
/// `psi± = (|00⟩±|11⟩)/√2`, `phi± = (|01⟩±|10⟩)/√2`; GHZ
/// `GHZ0+,GHZ0-,...,GHZ3-` with `GHZa± = (|ijk⟩ ± |īj̄k̄⟩)/√2` and `a` the
/// decimal value of `ijk` (leading bit 0).
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    name: BasisName,
    arity: usize,
    vectors: Vec<StateVector>,
    labels: Vec<&'static str>,
}

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn two_term(num_qubits: usize, hi: usize, lo: usize, sign: f64) -> StateVector {
    let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
    amps[hi] = Complex64::new(R, 0.0);
    amps[lo] = Complex64::new(sign * R, 0.0);
    StateVector::from_raw_unchecked(num_qubits, amps)
}

impl MeasurementBasis {
    pub fn computational() -> Self {
        MeasurementBasis {
            name: BasisName::Computational,
            arity: 1,
            vectors: vec![StateVector::zero(), StateVector::one()],
            labels: vec!["0", "1"],
        }
    }

    pub fn diagonal() -> Self {
        MeasurementBasis {
            name: BasisName::Diagonal,
            arity: 1,
            vectors: vec![StateVector::plus(), StateVector::minus()],
            labels: vec!["+", "-"],
        }
    }

    pub fn bell() -> Self {
        MeasurementBasis {
            name: BasisName::Bell,
            arity: 2,
            vectors: vec![
                two_term(2, 0b00, 0b11, 1.0),  // psi+
                two_term(2, 0b00, 0b11, -1.0), // psi-
                two_term(2, 0b01, 0b10, 1.0),  // phi+
                two_term(2, 0b01, 0b10, -1.0), // phi-
            ],
            labels: vec!["psi+", "psi-", "phi+", "phi-"],
        }
    }

    pub fn ghz() -> Self {
        let mut vectors = Vec::with_capacity(8);
        let mut labels = Vec::with_capacity(8);
        const GHZ_LABELS: [[&str; 2]; 4] = [
            ["GHZ0+", "GHZ0-"],
            ["GHZ1+", "GHZ1-"],
            ["GHZ2+", "GHZ2-"],
            ["GHZ3+", "GHZ3-"],
        ];
        for (a, label_pair) in GHZ_LABELS.iter().enumerate() {
            for (s, sign) in [(0usize, 1.0), (1, -1.0)] {
                vectors.push(two_term(3, a, 7 - a, sign));
                labels.push(label_pair[s]);
            }
        }
        MeasurementBasis {
            name: BasisName::Ghz,
            arity: 3,
            vectors,
            labels,
        }
    }

    pub fn named(name: BasisName) -> Self {
        match name {
            BasisName::Computational => Self::computational(),
            BasisName::Diagonal => Self::diagonal(),
            BasisName::Bell => Self::bell(),
            BasisName::Ghz => Self::ghz(),
        }
    }

    pub fn name(&self) -> BasisName {
        self.name
    }

    /// Number of qubits a measurement in this basis consumes.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, outcome: usize) -> &StateVector {
        &self.vectors[outcome]
    }

    pub fn label(&self, outcome: usize) -> &'static str {
        self.labels[outcome]
    }

    pub fn labels(&self) -> &[&'static str] {
        &self.labels
    }

    pub fn outcome_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    /// Check completeness and pairwise orthonormality:
    /// `|⟨v_i|v_j⟩ − δ_ij| < 1e-12`.
    pub fn validate(&self) -> Result<()> {
        if self.vectors.len() != 1 << self.arity {
            return Err(Error::Validation(format!(
                "basis has {} vectors, expected {}",
                self.vectors.len(),
                1 << self.arity
            )));
        }
        for (i, vi) in self.vectors.iter().enumerate() {
            for (j, vj) in self.vectors.iter().enumerate() {
                let overlap = vi.inner(vj)?;
                let expected = if i == j { 1.0 } else { 0.0 };
                if (overlap.norm() - expected).abs() > NORM_TOL {
                    return Err(Error::Validation(format!(
                        "basis vectors {i} and {j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(())
    }
}
