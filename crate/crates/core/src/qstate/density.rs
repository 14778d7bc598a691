use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::state::{StateVector, UnitaryMatrix, NORM_TOL};

/// A density operator on `num_qubits` qubits, stored dense row-major.
/// Hermitian with unit trace; used by the flaw analyses for partial-trace
/// arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    /// Hermiticity and unit trace within `1e-12`. Positivity is a structural
    /// consequence of how all matrices here are built (mixtures of pure
    /// projectors) and is exercised by property tests.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if (self.entry(i, j) - self.entry(j, i).conj()).norm() > NORM_TOL {
                    return Err(Error::Validation(
                        "density matrix is not Hermitian within 1e-12".into(),
                    ));
                }
            }
        }
        if (self.trace() - Complex64::ONE).norm() > NORM_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace is {} instead of 1",
                self.trace()
            )));
        }
        Ok(())
    }

    /// `tr(ρ²)`; 1 for pure states, `1/2^n` for the maximally mixed state.
    pub fn purity(&self) -> f64 {
        let dim = self.dim();
        let mut acc = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                // tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² by hermiticity
                acc += (self.entry(i, j) * self.entry(j, i)).re;
            }
        }
        acc
    }

    /// `⟨q|ρ|q⟩` as a quadratic form, used by the positivity property tests.
    pub fn expectation(&self, q: &StateVector) -> Result<f64> {
        if q.num_qubits() != self.num_qubits {
            return Err(Error::Validation(format!(
                "expectation size mismatch: {} vs {} qubits",
                q.num_qubits(),
                self.num_qubits
            )));
        }
        let dim = self.dim();
        let mut acc = Complex64::ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += q.amplitude(i).conj() * self.entry(i, j) * q.amplitude(j);
            }
        }
        Ok(acc.re)
    }

    /// `U ρ U†` with `u` embedded on the listed target qubits.
    pub fn apply_unitary(&self, u: &UnitaryMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        let dim = self.dim();
        // Columns of ρ transform like kets under U; rows like bras.
        let mut cols = vec![Complex64::ZERO; dim * dim];
        for col in 0..dim {
            let column: Vec<Complex64> = (0..dim).map(|row| self.entry(row, col)).collect();
            let transformed = apply_to_vector(&column, self.num_qubits, u, targets)?;
            for (row, v) in transformed.into_iter().enumerate() {
                cols[row * dim + col] = v;
            }
        }
        let mut out = vec![Complex64::ZERO; dim * dim];
        for row in 0..dim {
            let row_vec: Vec<Complex64> =
                (0..dim).map(|col| cols[row * dim + col].conj()).collect();
            let transformed = apply_to_vector(&row_vec, self.num_qubits, u, targets)?;
            for (col, v) in transformed.into_iter().enumerate() {
                out[row * dim + col] = v.conj();
            }
        }
        Ok(DensityMatrix {
            num_qubits: self.num_qubits,
            entries: out,
        })
    }
}

fn apply_to_vector(
    amps: &[Complex64],
    num_qubits: usize,
    u: &UnitaryMatrix,
    targets: &[usize],
) -> Result<Vec<Complex64>> {
    // Reuse the state-vector kernel; the vector need not be normalized, so
    // scale through a temporary unit vector.
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr < 1e-300 {
        return Ok(vec![Complex64::ZERO; amps.len()]);
    }
    let scale = norm_sqr.sqrt();
    let unit: Vec<Complex64> = amps.iter().map(|a| a / scale).collect();
    let state = StateVector::from_raw_unchecked(num_qubits, unit);
    let out = state.apply_unitary(u, targets)?;
    Ok(out.amplitudes().iter().map(|a| a * scale).collect())
}

/// `|ψ⟩⟨ψ|`
pub fn to_density(state: &StateVector) -> DensityMatrix {
    let dim = state.dim();
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            entries[i * dim + j] = state.amplitude(i) * state.amplitude(j).conj();
        }
    }
    DensityMatrix {
        num_qubits: state.num_qubits(),
        entries,
    }
}

/// Trace out every qubit not in `keep`. The kept qubits retain their
/// relative order. `keep` must be a nonempty set of in-range indices.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if keep.is_empty() {
        return Err(Error::Validation("empty keep set in partial trace".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::Validation("duplicate qubit in keep set".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::QubitIndex {
            index: bad,
            num_qubits: n,
        });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let k = kept.len();
    let m = traced.len();
    let kept_masks: Vec<usize> = kept.iter().map(|&q| 1usize << (n - 1 - q)).collect();
    let traced_masks: Vec<usize> = traced.iter().map(|&q| 1usize << (n - 1 - q)).collect();

    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (j, mask) in kept_masks.iter().enumerate() {
            if (kept_bits >> (k - 1 - j)) & 1 == 1 {
                idx |= mask;
            }
        }
        for (j, mask) in traced_masks.iter().enumerate() {
            if (traced_bits >> (m - 1 - j)) & 1 == 1 {
                idx |= mask;
            }
        }
        idx
    };

    let out_dim = 1usize << k;
    let mut entries = vec![Complex64::ZERO; out_dim * out_dim];
    for a in 0..out_dim {
        for b in 0..out_dim {
            let mut acc = Complex64::ZERO;
            for t in 0..(1usize << m) {
                acc += rho.entry(compose(a, t), compose(b, t));
            }
            entries[a * out_dim + b] = acc;
        }
    }
    Ok(DensityMatrix {
        num_qubits: k,
        entries,
    })
}

/// `tr(ρ²)` as a free function mirroring the purity method.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// `⟨target|ρ|target⟩`, clamped into [0, 1] against rounding.
pub fn fidelity_pure(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    Ok(rho.expectation(target)?.clamp(0.0, 1.0))
}

/// Trace distance `½ tr|ρ − σ|` specialised to single-qubit operators, where
/// the eigenvalues of the (traceless Hermitian) difference come from a closed
/// form. Used by the controller-irrelevance analysis.
pub fn trace_distance_1q(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 1 || sigma.num_qubits() != 1 {
        return Err(Error::Validation(
            "trace_distance_1q expects single-qubit operators".into(),
        ));
    }
    let d00 = rho.entry(0, 0) - sigma.entry(0, 0);
    let d01 = rho.entry(0, 1) - sigma.entry(0, 1);
    let d10 = rho.entry(1, 0) - sigma.entry(1, 0);
    let d11 = rho.entry(1, 1) - sigma.entry(1, 1);
    // Eigenvalues of [[a, b], [b*, -a]] are ±√(a² + |b|²) up to the traceless
    // approximation; keep the general 2x2 form for safety.
    let tr = d00 + d11;
    let det = d00 * d11 - d01 * d10;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    Ok(0.5 * (l1.norm() + l2.norm()))
}
