//! Property tests over the state-vector kernel: norm preservation under
//! random unitaries, Born completeness across every basis, agreement of
//! sampled frequencies with the exact distribution, and purity behavior of
//! partial traces.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qvote_core::qstate::{
    measure, outcome_distribution, partial_trace, to_density, BasisName, MeasurementBasis,
    StateVector, UnitaryMatrix,
};
use qvote_core::states::{bell, BellLabel, PauliOp};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hadamard() -> UnitaryMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    UnitaryMatrix::new(2, vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)]).unwrap()
}

fn phase_gate() -> UnitaryMatrix {
    UnitaryMatrix::new(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)]).unwrap()
}

fn single_qubit_gates() -> Vec<UnitaryMatrix> {
    let mut gates: Vec<UnitaryMatrix> = PauliOp::ALL.iter().map(|p| p.matrix()).collect();
    gates.push(hadamard());
    gates.push(phase_gate());
    gates
}

fn arb_state(num_qubits: usize) -> impl Strategy<Value = StateVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << num_qubits).prop_filter_map(
        "state must have usable norm",
        |parts| {
            let amps: Vec<Complex64> = parts.iter().map(|&(re, im)| c(re, im)).collect();
            let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if norm_sqr < 1e-3 {
                return None;
            }
            let scale = norm_sqr.sqrt();
            StateVector::from_amplitudes(amps.into_iter().map(|a| a / scale).collect()).ok()
        },
    )
}

proptest! {
    #[test]
    fn unitaries_preserve_the_norm(
        state in arb_state(3),
        gate_index in 0usize..6,
        target in 0usize..3,
    ) {
        let gates = single_qubit_gates();
        let out = state.apply_unitary(&gates[gate_index], &[target]).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_probabilities_are_complete(state in arb_state(3)) {
        for (basis, targets) in [
            (MeasurementBasis::named(BasisName::Computational), vec![1]),
            (MeasurementBasis::named(BasisName::Diagonal), vec![2]),
            (MeasurementBasis::named(BasisName::Bell), vec![0, 2]),
            (MeasurementBasis::named(BasisName::Ghz), vec![0, 1, 2]),
        ] {
            let dist = outcome_distribution(&state, &basis, &targets).unwrap();
            let total: f64 = dist.iter().map(|(_, p)| p).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(dist.iter().all(|(_, p)| *p >= -1e-15));
        }
    }

    #[test]
    fn product_states_trace_to_pure_factors(left in arb_state(1), right in arb_state(2)) {
        let product = left.tensor(&right).unwrap();
        let rho = partial_trace(&to_density(&product), &[0]).unwrap();
        prop_assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_quadratic_forms_are_nonnegative(
        state in arb_state(2),
        probe in arb_state(1),
    ) {
        // Positivity of reduced density operators, probed with random kets.
        let rho = partial_trace(&to_density(&state), &[1]).unwrap();
        prop_assert!(rho.expectation(&probe).unwrap() >= -1e-10);
    }
}

#[test]
fn bell_halves_are_maximally_mixed() {
    for label in BellLabel::ALL {
        let rho = partial_trace(&to_density(&bell(label)), &[1]).unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-12, "{label}");
    }
}

#[test]
fn sampled_frequencies_match_the_exact_distribution() {
    // 10^4 seeded samples of a 2-qubit state in the Bell basis against the
    // exact probabilities, within 3σ binomial bounds per outcome.
    let raw = [c(0.7, 0.1), c(0.1, -0.3), c(-0.2, 0.4), c(0.35, 0.25)];
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let state = StateVector::from_amplitudes(raw.iter().map(|a| a / norm).collect()).unwrap();
    let basis = MeasurementBasis::bell();
    let exact = outcome_distribution(&state, &basis, &[0, 1]).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let samples = 10_000usize;
    let mut counts = [0u32; 4];
    for _ in 0..samples {
        let rec = measure(&state, &basis, &[0, 1], &mut rng).unwrap();
        counts[rec.outcome] += 1;
    }
    for (outcome, (label, p)) in exact.iter().enumerate() {
        let observed = f64::from(counts[outcome]) / samples as f64;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt().max(1e-9);
        assert!(
            (observed - p).abs() < 3.0 * sigma + 1e-9,
            "{label}: observed {observed}, exact {p}"
        );
    }
}
