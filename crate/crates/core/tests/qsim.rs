mod common;

use annealdiag::diagnostics::classical_gibbs;
use annealdiag::model::SpinConfig;
use annealdiag::qsim::{
    evolve_with, natural_time, quantum_gibbs_diag, PauseHamiltonian, PropagationSettings, Propagator, StateVector,
};
use proptest::prelude::*;

fn settings(method: Propagator) -> PropagationSettings {
    PropagationSettings { method, ..PropagationSettings::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evolution_is_unitary(
        inst in common::instance(2..=3),
        a in 0.0f64..2.0,
        b in 0.1f64..5.0,
        t_us in 0.0f64..0.01,
        bits in any::<usize>(),
        krylov in any::<bool>(),
    ) {
        let h = PauseHamiltonian::new(&inst, a, b, 14).unwrap();
        let start = StateVector::basis(&SpinConfig::from_index(bits % (1 << inst.n), inst.n));
        let method = if krylov { Propagator::Krylov } else { Propagator::Chebyshev };
        let (psi, _) = evolve_with(&h, &start, natural_time(t_us), &settings(method)).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_conserves_energy(
        inst in common::instance(2..=4),
        a in 0.1f64..2.0,
        b in 0.5f64..5.0,
        t_us in 0.0f64..0.05,
        bits in any::<usize>(),
    ) {
        let h = PauseHamiltonian::new(&inst, a, b, 14).unwrap();
        let start = StateVector::basis(&SpinConfig::from_index(bits % (1 << inst.n), inst.n));
        let e0 = h.expectation(start.amplitudes());
        for method in [Propagator::Chebyshev, Propagator::Krylov] {
            let (psi, _) = evolve_with(&h, &start, natural_time(t_us), &settings(method)).unwrap();
            let e1 = h.expectation(psi.amplitudes());
            prop_assert!((e1 - e0).abs() <= 1e-6 * e0.abs().max(1.0), "{e0} -> {e1}");
        }
    }

    #[test]
    fn classical_limit_of_quantum_gibbs(inst in common::instance(2..=4), beta in 0.0f64..8.0, b in 0.5f64..5.0) {
        let h = PauseHamiltonian::new(&inst, 0.0, b, 14).unwrap();
        // the diagonal carries B/2, so the matching classical temperature is beta B/2
        let quantum = quantum_gibbs_diag(&h, beta).unwrap();
        let classical = classical_gibbs(&inst, beta * b / 2.0).unwrap();
        for (q, c) in quantum.iter().zip(&classical) {
            prop_assert!((q - c).abs() < 1e-12);
        }
    }
}
