use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::basis::MeasurementBasis;
use crate::qstate::state::StateVector;

/// Outcomes with probability below this are treated as exactly zero: they
/// are never sampled and carry no residual.
const ZERO_PROB: f64 = 1e-15;

/// One projective measurement outcome: its label, Born probability and the
/// renormalized residual state on the unmeasured qubits. When the whole
/// register was measured the residual is the zero-qubit state whose single
/// amplitude carries the projection phase.
#[derive(Debug, Clone)]
pub struct OutcomeRecord {
    pub label: &'static str,
    pub outcome: usize,
    pub probability: f64,
    pub post_state: StateVector,
}

fn check_targets(state: &StateVector, basis: &MeasurementBasis, targets: &[usize]) -> Result<()> {
    if basis.arity() != targets.len() {
        return Err(Error::Validation(format!(
            "basis arity {} does not match {} targets",
            basis.arity(),
            targets.len()
        )));
    }
    if targets.len() > state.num_qubits() {
        return Err(Error::Validation(format!(
            "cannot measure {} qubits of a {}-qubit state",
            targets.len(),
            state.num_qubits()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= state.num_qubits() {
            return Err(Error::QubitIndex {
                index: t,
                num_qubits: state.num_qubits(),
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::Validation(format!("duplicate target qubit {t}")));
        }
    }
    Ok(())
}

/// Unnormalized residual `⟨v|ψ⟩` over the complement of `targets`, with the
/// basis vector's qubit j matched to `targets[j]`. Its squared norm is the
/// Born probability of the outcome.
fn raw_residual(
    state: &StateVector,
    vector: &StateVector,
    targets: &[usize],
) -> (Vec<Complex64>, f64) {
    let n = state.num_qubits();
    let k = targets.len();
    let rest: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let m = rest.len();

    let target_masks: Vec<usize> = targets.iter().map(|&t| 1usize << (n - 1 - t)).collect();
    let rest_masks: Vec<usize> = rest.iter().map(|&q| 1usize << (n - 1 - q)).collect();

    let mut residual = vec![Complex64::ZERO; 1 << m];
    for (r, res) in residual.iter_mut().enumerate() {
        let mut base = 0usize;
        for (j, mask) in rest_masks.iter().enumerate() {
            if (r >> (m - 1 - j)) & 1 == 1 {
                base |= mask;
            }
        }
        let mut acc = Complex64::ZERO;
        for t in 0..(1usize << k) {
            let mut idx = base;
            for (j, mask) in target_masks.iter().enumerate() {
                if (t >> (k - 1 - j)) & 1 == 1 {
                    idx |= mask;
                }
            }
            acc += vector.amplitude(t).conj() * state.amplitude(idx);
        }
        *res = acc;
    }
    let probability: f64 = residual.iter().map(|a| a.norm_sqr()).sum();
    (residual, probability)
}

/// Project onto one particular outcome. Returns `None` when the outcome has
/// zero probability (no residual exists).
pub fn project_outcome(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[usize],
    outcome: usize,
) -> Result<Option<OutcomeRecord>> {
    check_targets(state, basis, targets)?;
    if outcome >= basis.len() {
        return Err(Error::Validation(format!(
            "outcome index {outcome} out of range for basis of {} outcomes",
            basis.len()
        )));
    }
    let (mut residual, probability) = raw_residual(state, basis.vector(outcome), targets);
    if probability < ZERO_PROB {
        return Ok(None);
    }
    let inv = 1.0 / probability.sqrt();
    for a in &mut residual {
        *a *= inv;
    }
    let m = state.num_qubits() - targets.len();
    let post_state = if m == 0 {
        StateVector::scalar(residual[0])
    } else {
        StateVector::from_raw_unchecked(m, residual)
    };
    Ok(Some(OutcomeRecord {
        label: basis.label(outcome),
        outcome,
        probability,
        post_state,
    }))
}

/// Exact Born probabilities of every outcome; they sum to 1 within 1e-12.
/// This is the exhaustive branch oracle the tests and the flaw analyses are
/// built on.
pub fn outcome_distribution(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[usize],
) -> Result<Vec<(&'static str, f64)>> {
    check_targets(state, basis, targets)?;
    Ok((0..basis.len())
        .map(|outcome| {
            let (_, p) = raw_residual(state, basis.vector(outcome), targets);
            (basis.label(outcome), p)
        })
        .collect())
}

/// Sample one outcome with Born probabilities and collapse. Outcomes of zero
/// probability are never produced.
pub fn measure<R: Rng + ?Sized>(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[usize],
    rng: &mut R,
) -> Result<OutcomeRecord> {
    check_targets(state, basis, targets)?;
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_nonzero = None;
    for outcome in 0..basis.len() {
        let (_, p) = raw_residual(state, basis.vector(outcome), targets);
        if p < ZERO_PROB {
            continue;
        }
        acc += p;
        last_nonzero = Some(outcome);
        if draw < acc {
            break;
        }
    }
    let outcome = last_nonzero.ok_or_else(|| {
        Error::Consistency("measurement found no outcome with positive probability".into())
    })?;
    project_outcome(state, basis, targets, outcome)?
        .ok_or_else(|| Error::Consistency("sampled outcome lost its residual".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::state::{equal_up_to_global_phase, NORM_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plus_in_computational_basis_is_even() {
        let dist = outcome_distribution(
            &StateVector::plus(),
            &MeasurementBasis::computational(),
            &[0],
        )
        .unwrap();
        assert_eq!(dist[0].0, "0");
        assert!((dist[0].1 - 0.5).abs() < NORM_TOL);
        assert!((dist[1].1 - 0.5).abs() < NORM_TOL);
    }

    #[test]
    fn zero_state_distribution_is_deterministic() {
        let dist = outcome_distribution(
            &StateVector::zero(),
            &MeasurementBasis::computational(),
            &[0],
        )
        .unwrap();
        assert_eq!(dist, vec![("0", 1.0), ("1", 0.0)]);
    }

    #[test]
    fn bell_eigenstate_measures_to_itself() {
        let bell = MeasurementBasis::bell();
        let psi_plus = bell.vector(0).clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..16 {
            let rec = measure(&psi_plus, &bell, &[0, 1], &mut rng).unwrap();
            assert_eq!(rec.label, "psi+");
            assert!((rec.probability - 1.0).abs() < NORM_TOL);
            assert_eq!(rec.post_state.num_qubits(), 0);
        }
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let err = measure(
            &StateVector::plus(),
            &MeasurementBasis::bell(),
            &[0],
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert!(err.is_err());
    }

    #[test]
    fn x_on_bell_pair_moves_to_phi_plus() {
        // (X ⊗ I)(|00⟩+|11⟩)/√2 = (|10⟩+|01⟩)/√2 = phi+
        let bell = MeasurementBasis::bell();
        let x = crate::states::PauliOp::X.matrix();
        let state = bell.vector(0).apply_unitary(&x, &[0]).unwrap();
        let dist = outcome_distribution(&state, &bell, &[0, 1]).unwrap();
        for (label, p) in dist {
            let expected = if label == "phi+" { 1.0 } else { 0.0 };
            assert!((p - expected).abs() < NORM_TOL, "{label}: {p}");
        }
    }

    #[test]
    fn residual_of_partial_measurement_is_renormalized() {
        // Measure qubit 0 of (|00⟩+|10⟩)/√2 = |+⟩⊗|0⟩: outcome uniform,
        // residual always |0⟩.
        let state = StateVector::plus().tensor(&StateVector::zero()).unwrap();
        for outcome in 0..2 {
            let rec = project_outcome(&state, &MeasurementBasis::computational(), &[0], outcome)
                .unwrap()
                .unwrap();
            assert!((rec.probability - 0.5).abs() < NORM_TOL);
            assert!(
                equal_up_to_global_phase(&rec.post_state, &StateVector::zero(), NORM_TOL).unwrap()
            );
        }
    }

    #[test]
    fn sampled_frequencies_match_distribution() {
        // Seeded sampling of |+⟩ in the computational basis: 10^4 draws stay
        // within 3σ of p = 1/2.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let basis = MeasurementBasis::computational();
        let plus = StateVector::plus();
        let n = 10_000;
        let mut ones = 0u32;
        for _ in 0..n {
            let rec = measure(&plus, &basis, &[0], &mut rng).unwrap();
            if rec.label == "1" {
                ones += 1;
            }
        }
        let sigma = (0.25 * n as f64).sqrt();
        assert!(((ones as f64) - 0.5 * n as f64).abs() < 3.0 * sigma);
    }
}
