use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense kernel will represent. The biggest state any
/// protocol here needs is a teleportee plus the 4-qubit channel (5 qubits);
/// one spare is kept for adversarial merges.
pub const MAX_QUBITS: usize = 6;

/// Tolerance used for internal renormalization and exact-structure checks.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance used for assertions on derived quantities.
pub const ASSERT_TOL: f64 = 1e-9;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A normalized pure state over `num_qubits` qubits.
///
/// Qubit ordering is big-endian by position: qubit 0 is the most significant
/// bit of an amplitude index, so `|q0 q1 ... q(n-1)⟩` sits at index
/// `q0·2^(n-1) + ... + q(n-1)`. Every module in this crate uses this one
/// convention.
///
/// A zero-qubit state (a single unit-modulus amplitude) is permitted as the
/// residual of measuring out an entire register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Build a state from raw amplitudes. The length must be `2^n` for some
    /// `n ≤ 6` and the norm must already be 1 within `1e-9`; tiny drift is
    /// renormalized away.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Validation(format!(
                "amplitude vector length {dim} is not a power of two"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut state = StateVector { num_qubits, amps };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "state is not normalized: |ψ|² = {norm_sqr}"
            )));
        }
        state.renormalize();
        Ok(state)
    }

    /// Computational basis state `|index⟩` of an `n`-qubit register.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::QubitIndex { index, num_qubits });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(StateVector { num_qubits, amps })
    }

    /// Single-qubit state `a|0⟩ + b|1⟩` (renormalization applied).
    pub fn single(a: Complex64, b: Complex64) -> Result<Self> {
        StateVector::from_amplitudes(vec![a, b])
    }

    /// `|0⟩`
    pub fn zero() -> Self {
        StateVector::basis_state(1, 0).expect("1-qubit state")
    }

    /// `|1⟩`
    pub fn one() -> Self {
        StateVector::basis_state(1, 1).expect("1-qubit state")
    }

    /// `|+⟩ = (|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        StateVector {
            num_qubits: 1,
            amps: vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
        }
    }

    /// `|−⟩ = (|0⟩ − |1⟩)/√2`
    pub fn minus() -> Self {
        StateVector {
            num_qubits: 1,
            amps: vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(-FRAC_1_SQRT_2, 0.0),
            ],
        }
    }

    /// The unique zero-qubit state (used as the residual of measuring out a
    /// whole register; its single amplitude carries the leftover phase).
    pub(crate) fn scalar(phase: Complex64) -> Self {
        StateVector {
            num_qubits: 0,
            amps: vec![phase],
        }
    }

    pub(crate) fn from_raw_unchecked(num_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        StateVector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub(crate) fn renormalize(&mut self) {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            let inv = 1.0 / norm_sqr.sqrt();
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    /// Value of `qubit`'s bit inside amplitude index `index`.
    #[cfg(test)]
    pub(crate) fn bit(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.num_qubits - 1 - qubit)) & 1
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Validation(format!(
                "inner product size mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product; `self`'s qubits come first (most significant).
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: n,
                max: MAX_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut state = StateVector {
            num_qubits: n,
            amps,
        };
        state.renormalize();
        Ok(state)
    }

    /// Apply a small unitary to the listed target qubits (in the listed
    /// order: the first target is the most significant index bit of `u`).
    /// The state's norm is preserved; targets must be distinct and in range.
    pub fn apply_unitary(&self, u: &UnitaryMatrix, targets: &[usize]) -> Result<StateVector> {
        let k = u.arity();
        if targets.len() != k {
            return Err(Error::Validation(format!(
                "unitary acts on {k} qubits but {} targets given",
                targets.len()
            )));
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(Error::QubitIndex {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..i].contains(&t) {
                return Err(Error::Validation(format!("duplicate target qubit {t}")));
            }
        }

        let subdim = 1usize << k;
        let mut out = vec![Complex64::ZERO; self.dim()];
        // Masks of the target bit positions, most significant target first.
        let masks: Vec<usize> = targets
            .iter()
            .map(|&t| 1usize << (self.num_qubits - 1 - t))
            .collect();
        let all_mask: usize = masks.iter().sum();

        for base in 0..self.dim() {
            if base & all_mask != 0 {
                continue; // visit each target-cleared block once
            }
            // Gather the 2^k amplitudes of this block.
            let mut block = [Complex64::ZERO; 4];
            for (sub, slot) in block.iter_mut().enumerate().take(subdim) {
                let mut idx = base;
                for (j, mask) in masks.iter().enumerate() {
                    if (sub >> (k - 1 - j)) & 1 == 1 {
                        idx |= mask;
                    }
                }
                *slot = self.amps[idx];
            }
            for row in 0..subdim {
                let mut acc = Complex64::ZERO;
                for (col, amp) in block.iter().enumerate().take(subdim) {
                    acc += u.entry(row, col) * amp;
                }
                let mut idx = base;
                for (j, mask) in masks.iter().enumerate() {
                    if (row >> (k - 1 - j)) & 1 == 1 {
                        idx |= mask;
                    }
                }
                out[idx] = acc;
            }
        }
        let mut state = StateVector {
            num_qubits: self.num_qubits,
            amps: out,
        };
        state.renormalize();
        Ok(state)
    }
}

/// `true` iff the two states coincide up to an overall phase:
/// `|⟨a|b⟩| ≥ 1 − tol`.
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    let overlap = a.inner(b)?;
    Ok(overlap.norm() >= 1.0 - tol)
}

/// A dense 2×2 or 4×4 unitary, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl UnitaryMatrix {
    /// Validate `U†U = I` within `1e-12` and wrap the matrix.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::Validation(format!(
                "only 2x2 and 4x4 unitaries are supported, got {dim}x{dim}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::Validation(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let u = UnitaryMatrix { dim, entries };
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::ZERO;
                for k in 0..dim {
                    acc += u.entry(k, i).conj() * u.entry(k, j);
                }
                let expected = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                if (acc - expected).norm() > NORM_TOL {
                    return Err(Error::Validation(
                        "matrix is not unitary within 1e-12".into(),
                    ));
                }
            }
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits the matrix acts on (1 or 2).
    pub fn arity(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }
}
