//! Statistical behaviour of the memory experiment at the default noise level.

use std::sync::OnceLock;

use ringqec::analysis::{bootstrap_error_rate, fit_error_rate};
use ringqec::circuit::PrepGate;
use ringqec::io::DatasetRecord;
use ringqec::noise::NoiseModel;
use ringqec::parallel::Parallelism;
use ringqec::runner::{trajectory_rng, EnsembleSummary, FiveQubitSimulator, InitialState, SimulatorOptions};

fn sim() -> &'static FiveQubitSimulator {
    static SIM: OnceLock<FiveQubitSimulator> = OnceLock::new();
    SIM.get_or_init(|| FiveQubitSimulator::new(NoiseModel::default(), SimulatorOptions::default()).unwrap())
}

fn ensemble(init: InitialState, runs: usize, k: usize, seed: u64) -> EnsembleSummary {
    sim().run_ensemble(&init, runs, k, seed, Parallelism::Auto).unwrap()
}

#[test]
fn seeded_records_repeat() {
    let init = InitialState::Cardinal(PrepGate::I);
    let a = sim().run_trajectory(&init, 1, true, &mut trajectory_rng(3, 0)).unwrap();
    let b = sim().run_trajectory(&init, 1, true, &mut trajectory_rng(3, 0)).unwrap();
    assert_eq!(a, b);
    let differs = (1..20).any(|i| {
        sim().run_trajectory(&init, 4, true, &mut trajectory_rng(3, i)).unwrap().ancilla_bits
            != sim().run_trajectory(&init, 4, true, &mut trajectory_rng(3, 0)).unwrap().ancilla_bits
    });
    assert!(differs);
}

#[test]
fn fidelity_does_not_grow() {
    let s = ensemble(InitialState::Cardinal(PrepGate::H), 300, 16, 8);
    for w in s.rows.windows(2) {
        let slack = 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        assert!(w[1].mean_fidelity <= w[0].mean_fidelity + slack, "{:?}", w);
    }
    let first = &s.rows[0];
    let last = &s.rows[15];
    assert!(last.mean_fidelity < first.mean_fidelity);
}

/// Residual of the cycle-1 point, in its standard errors, against a fit of
/// the later cycles.
fn first_cycle_residual(init: InitialState) -> f64 {
    let s = ensemble(init, 400, 16, 31);
    let t: Vec<f64> = s.rows.iter().map(|r| r.time_us).collect();
    let f: Vec<f64> = s.rows.iter().map(|r| r.mean_fidelity).collect();
    let w: Vec<f64> = s.rows.iter().map(|r| r.stderr.powi(-2)).collect();
    let fit = fit_error_rate(&t, &f, Some(&w), true).unwrap();
    (f[0] - fit.predict(t[0])) / s.rows[0].stderr
}

#[test]
fn product_state_preparation_stands_out_in_the_first_cycle() {
    let prepared = first_cycle_residual(InitialState::Cardinal(PrepGate::I));
    let exact = first_cycle_residual(InitialState::Exact(false));
    assert!(prepared > 3.0, "prepared |0>: {prepared:.2} sigma");
    assert!(exact.abs() < 3.0, "exact |0>_L: {exact:.2} sigma");
}

#[test]
fn logical_flips_accumulate() {
    let init = InitialState::Cardinal(PrepGate::I);
    let flipped = |k: usize| -> f64 {
        let records = sim().run_records(&init, 800, k, 77, true, Parallelism::Auto).unwrap();
        let minus = records
            .iter()
            .map(|r| DatasetRecord::try_from(r).unwrap())
            .filter(|d| d.logical_readouts["Z_L"] == -1)
            .count();
        minus as f64 / records.len() as f64
    };
    let (early, late) = (flipped(2), flipped(20));
    let se = (early * (1.0 - early) / 800.0 + late * (1.0 - late) / 800.0).sqrt();
    assert!(late - early > 3.0 * se, "k=2: {early:.3}, k=20: {late:.3}");
}

/// The six cardinal states decay alike. Fifteen pairs are compared, so the
/// threshold is four combined bootstrap errors rather than three.
#[test]
fn cardinal_states_decay_alike() {
    let t: Vec<f64> = (1..=24).map(|k| k as f64 * sim().cycle_time_us()).collect();
    let fits: Vec<(f64, f64)> = PrepGate::ALL
        .iter()
        .map(|&g| {
            let curves = sim()
                .run_fidelity_curves(&InitialState::Cardinal(g), 300, 24, 100 + g as u64, Parallelism::Auto)
                .unwrap();
            // Curves share trajectories across k, so errors come from resampling.
            let b = bootstrap_error_rate(&t, &curves, true, 200, 1).unwrap();
            (b.fit.epsilon, b.epsilon_stderr)
        })
        .collect();
    for (i, a) in fits.iter().enumerate() {
        assert!(a.1 > 0.0 && a.1 < 0.2 * a.0, "{fits:?}");
        for b in &fits[i + 1..] {
            let combined = (a.1 * a.1 + b.1 * b.1).sqrt();
            assert!((a.0 - b.0).abs() < 4.0 * combined, "{fits:?}");
        }
    }
}
