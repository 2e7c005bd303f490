use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qmetro_core::correlations::{
    classical_fisher, qfi_pure, suggested_cutoff, table_row, Generator, OracleCheck, ProbeStatistics, StateId,
    CAUCHY_SCHWARZ_TOL,
};
use qmetro_core::fock::{make_squeezed_vacuum, Expectation, FockState, Modes, PhaseConvention, PureState};
use qmetro_core::gaussian::{loss_map, rotation_map, squeeze_map, MomentVector};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, ..ProptestConfig::default() }
}

fn amplitudes(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn two_mode_state() -> impl Strategy<Value = PureState> {
    (1usize..=6).prop_flat_map(|cutoff| {
        let d = cutoff + 1;
        amplitudes(d * d).prop_map(move |amps| PureState::normalized(Modes::Two, cutoff, amps).unwrap())
    })
}

/// Two-mode states invariant under exchanging the arms.
fn symmetric_state() -> impl Strategy<Value = PureState> {
    two_mode_state().prop_map(|s| {
        let d = s.cutoff() + 1;
        let mut amps = s.amplitudes().to_vec();
        for a in 0..d {
            for b in 0..a {
                let avg = (amps[a * d + b] + amps[b * d + a]) * 0.5;
                amps[a * d + b] = avg;
                amps[b * d + a] = avg;
            }
        }
        PureState::normalized(Modes::Two, s.cutoff(), amps).unwrap()
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn squeezed_vacuum_has_even_parity(r in 0.0f64..1.2, theta in -PI..PI) {
        let s = make_squeezed_vacuum(r, theta, 120).unwrap();
        for (n, a) in s.amplitudes().iter().enumerate().skip(1).step_by(2) {
            prop_assert!(a.norm() < 1e-14, "level {n}: {a}");
        }
    }

    #[test]
    fn kraus_loss_preserves_trace(psi in two_mode_state(), eta in 0.0f64..=1.0, mode in 0usize..2) {
        let rho = psi.apply_loss(eta, mode).unwrap();
        prop_assert!((rho.trace() - psi.norm_sqr()).abs() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-14);
        prop_assert!(rho.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn relative_phase_round_trip(psi in two_mode_state(), phi in -PI..PI) {
        let back = psi
            .apply_phase(phi, PhaseConvention::RelativeHalf)
            .and_then(|s| s.apply_phase(-phi, PhaseConvention::RelativeHalf))
            .unwrap();
        prop_assert!(1.0 - psi.fidelity(&back).unwrap() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz_bound(psi in two_mode_state()) {
        let stats = ProbeStatistics::from_state(&psi).unwrap();
        if let Some(j) = stats.j {
            prop_assert!(j.abs() <= 1.0 + CAUCHY_SCHWARZ_TOL, "J = {j}");
        }
    }

    #[test]
    fn path_symmetric_fisher_information(psi in symmetric_state()) {
        let stats = ProbeStatistics::from_state(&psi).unwrap();
        prop_assume!(stats.q_a.is_some() && stats.j.is_some());
        prop_assert!(stats.is_path_symmetric(1e-10));
        let short = stats.qfi_path_symmetric().unwrap();
        prop_assert!((short - stats.qfi).abs() <= 1e-8 * stats.qfi.abs().max(1.0));
        // Var(n_a − n_b) is the Fisher information of the half-difference generator
        let direct = qfi_pure(&psi, Generator::HalfDifference).unwrap();
        prop_assert!((direct - stats.qfi).abs() <= 1e-10 * stats.qfi.abs().max(1.0));
    }

    #[test]
    fn moment_maps_keep_states_physical(
        r in -1.0f64..1.0,
        phi in -PI..PI,
        eta in 0.0f64..=1.0,
        r0 in -1.0f64..1.0,
    ) {
        let start = MomentVector::squeezed_vacuum(r0);
        let map = squeeze_map(r).then(&rotation_map(phi)).then(&loss_map(eta).unwrap());
        let out = map.apply(&start);
        prop_assert!(out.check_physical().is_ok(), "{out:?}");
        prop_assert!(map.conjugation_error() < 1e-12);
        // undoing the squeeze and rotation after a lossless pass
        let undo = squeeze_map(r).then(&rotation_map(phi)).then(&rotation_map(-phi)).then(&squeeze_map(-r));
        prop_assert!(undo.apply(&start).max_abs_diff(&start) < 1e-9 * (1.0 + start.m_n));
    }
}

/// The intensity-difference detector after a balanced beam splitter never
/// beats the quantum bound.
#[test]
fn classical_fisher_is_bounded_by_the_quantum_one() {
    for id in StateId::ALL.into_iter().filter(|id| id.has_oracle() && *id != StateId::Ecs) {
        for n in [2.0, 4.0] {
            let cutoff = suggested_cutoff(id, n).unwrap();
            let Ok(check) = OracleCheck::run(id, n, cutoff) else { continue };
            let state = qmetro_core::correlations::oracle_state(id, n, cutoff).unwrap();
            let qfi = qfi_pure(&state, Generator::HalfDifference).unwrap();
            assert!((qfi - check.stats.qfi).abs() <= 1e-8 * qfi.max(1.0));
            for phi in [0.3, 1.1] {
                let curve = |p: f64| {
                    let out = state.apply_phase(p, PhaseConvention::RelativeHalf)?.apply_beam_splitter()?;
                    Ok(out.populations())
                };
                let f = classical_fisher(curve, phi, 1e-4).unwrap();
                assert!(f.value <= qfi + 1e-6, "{id} n={n} phi={phi}: {} > {qfi}", f.value);
            }
        }
    }
}

#[test]
fn table_rows_are_deterministic() {
    for id in StateId::ALL {
        let a = table_row(id, 30.0).unwrap();
        let b = table_row(id, 30.0).unwrap();
        assert_eq!(a, b);
        assert!(id.name().parse::<StateId>().unwrap() == id);
    }
    let s = make_squeezed_vacuum(0.3, 0.0, 40).unwrap();
    let n = s.expectation(qmetro_core::fock::Observable::Number, 0).unwrap().re;
    assert!((n - 0.3f64.sinh().powi(2)).abs() < 1e-12);
}
