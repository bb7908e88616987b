//! The precompiled cycle instrument against step-by-step ten-qubit
//! simulation with every ancilla outcome enumerated.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringqec::circuit::{five_qubit_cycle, CycleOptions, FIVE_QUBIT_ANCILLAS, FIVE_QUBIT_DATA, RING_QUBITS};
use ringqec::compile::{CompileOptions, GateLibrary, Program, Step};
use ringqec::instrument::{CycleInstrument, DATA_DIM, OUTCOMES};
use ringqec::noise::{MeasurementErrorTable, NoiseParams};
use ringqec::parallel::Parallelism;
use ringqec::pauli::{PauliState, StateVector};

fn random_state(rng: &mut ChaCha8Rng) -> PauliState {
    let amps: Vec<Complex64> = (0..32)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let psi = StateVector::from_amplitudes(5, amps.iter().map(|a| a / norm).collect()).unwrap();
    psi.to_pauli_state().unwrap()
}

/// Unnormalized data states after projecting the ancillas onto every true
/// outcome pattern `o` (bit `t` set: ancilla `t` found in `|1>`).
fn projected_images(program: &Program, data: &PauliState) -> Vec<Vec<f64>> {
    let order: Vec<usize> = program
        .steps()
        .iter()
        .filter_map(|s| match s {
            Step::Measure(q) => Some(FIVE_QUBIT_ANCILLAS.iter().position(|a| a == q).unwrap()),
            _ => None,
        })
        .collect();
    (0..OUTCOMES)
        .map(|o| {
            let mut state = data.embed(&FIVE_QUBIT_DATA, RING_QUBITS).unwrap();
            let outcomes: Vec<u8> = order.iter().map(|&t| (o >> t & 1) as u8).collect();
            let p = program.run_projected(&mut state, &outcomes).unwrap_or(0.0);
            let reduced = state.reduce(&FIVE_QUBIT_DATA).unwrap();
            reduced.coeffs().iter().map(|c| c * p).collect()
        })
        .collect()
}

fn compare(params: NoiseParams, table: MeasurementErrorTable, seed: u64) {
    let cycle = five_qubit_cycle(&params, &CycleOptions::default()).unwrap();
    let mut lib = GateLibrary::new(params, false).unwrap();
    let inst = CycleInstrument::build(&cycle, &mut lib, &table, Parallelism::Auto).unwrap();
    let program = Program::compile(&cycle, &mut lib, CompileOptions::default()).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = random_state(&mut rng);
    let images = projected_images(&program, &data);
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    for r in 0..OUTCOMES {
        let mut expect = vec![0.0; DATA_DIM];
        for (o, image) in images.iter().enumerate() {
            let w: f64 = (0..5)
                .map(|t| {
                    let result = if r >> t & 1 == 1 { -1 } else { 1 };
                    table.result_probability((o >> t & 1) as u8, result)
                })
                .product();
            for (e, x) in expect.iter_mut().zip(image) {
                *e += w * x;
            }
        }
        let got: Vec<f64> = inst
            .map(r)
            .chunks_exact(DATA_DIM)
            .map(|row| row.iter().zip(data.coeffs()).map(|(a, b)| a * b).sum())
            .collect();
        total += got[0];
        for (a, b) in got.iter().zip(&expect) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst < 1e-10, "largest deviation {worst:e}");
    assert!((total - 1.0).abs() < 1e-10, "outcome probabilities sum to {total}");
}

#[test]
fn default_noise_with_ideal_readout() {
    compare(NoiseParams::default(), MeasurementErrorTable::ideal(), 1);
}

#[test]
fn default_noise_with_readout_errors() {
    compare(NoiseParams::default(), MeasurementErrorTable::default(), 2);
}
