mod common;

use annealdiag::diagnostics::{classical_gibbs, tvd_slices, SubsystemDistribution};
use annealdiag::model::{InstanceParams, SpinConfig};
use annealdiag::samplers::{
    glauber_acceptance, glauber_sample, parallel_tempering_sample, svmc_sample, PtSettings, SamplerRequest,
    SvmcSettings,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Every single-site heat-bath move satisfies detailed balance exactly,
    // so any sweep order leaves the Gibbs distribution stationary.
    #[test]
    fn glauber_moves_satisfy_detailed_balance(
        seed in 0u64..1000,
        lambda in 0.0f64..=1.0,
        disorder in 0.0f64..=1.0,
        frustration in 0.0f64..=1.0,
        beta in 0.0f64..=2.0,
    ) {
        let inst = InstanceParams { n: 4, subsystem_size: 2, lambda, disorder, frustration, seed }.generate().unwrap();
        let adj = inst.adjacency();
        let pi = classical_gibbs(&inst, beta).unwrap();
        for idx in 0..16 {
            let spins = SpinConfig::from_index(idx, 4);
            for k in 0..4 {
                let forward = pi[idx] * glauber_acceptance(beta, adj.flip_delta(spins.spins(), k));
                let flipped = SpinConfig::from_index(idx ^ 1 << k, 4);
                let backward = pi[idx ^ 1 << k] * glauber_acceptance(beta, adj.flip_delta(flipped.spins(), k));
                prop_assert!((forward - backward).abs() <= 1e-12 * forward.max(backward).max(1e-300));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    // Empirical check at 10^6 sweeps. Above beta ~ 1 the aligned states of
    // a strongly coupled K4 switch too rarely for this budget.
    #[test]
    fn glauber_samples_the_gibbs_distribution(
        seed in 0u64..1000,
        lambda in 0.0f64..=1.0,
        disorder in 0.0f64..=1.0,
        frustration in 0.0f64..=1.0,
        beta in 0.0f64..=1.0,
    ) {
        let inst = InstanceParams { n: 4, subsystem_size: 2, lambda, disorder, frustration, seed }.generate().unwrap();
        let req = SamplerRequest::new(inst.clone(), beta, SpinConfig::all_up(4), 1_000_000, 1_000_000, seed);
        let reads = glauber_sample(&req).unwrap();
        let all: Vec<usize> = (0..4).collect();
        let empirical = SubsystemDistribution::from_reads(all, &reads.reads).unwrap();
        let exact = classical_gibbs(&inst, beta).unwrap();
        prop_assert!(tvd_slices(empirical.probs(), &exact).unwrap() < 0.02);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn samplers_are_deterministic(inst in common::instance(2..=8), beta in 0.0f64..8.0, seed in any::<u64>(), bits in any::<usize>()) {
        let init = SpinConfig::from_index(bits % (1 << inst.n.min(20)), inst.n);
        let req = SamplerRequest::new(inst, beta, init, 200, 50, seed);
        let pt = PtSettings { n_replicas: 4, t_max_ratio: 5.0 };
        let svmc = SvmcSettings::default();
        prop_assert_eq!(
            serde_json::to_string(&glauber_sample(&req).unwrap()).unwrap(),
            serde_json::to_string(&glauber_sample(&req).unwrap()).unwrap()
        );
        prop_assert_eq!(
            serde_json::to_string(&parallel_tempering_sample(&req, &pt).unwrap()).unwrap(),
            serde_json::to_string(&parallel_tempering_sample(&req, &pt).unwrap()).unwrap()
        );
        prop_assert_eq!(
            serde_json::to_string(&svmc_sample(&req, &svmc).unwrap()).unwrap(),
            serde_json::to_string(&svmc_sample(&req, &svmc).unwrap()).unwrap()
        );
    }

    #[test]
    fn single_replica_tempering_is_glauber(inst in common::instance(2..=8), beta in 0.0f64..8.0, seed in any::<u64>()) {
        let req = SamplerRequest::new(inst.clone(), beta, SpinConfig::all_up(inst.n), 300, 30, seed);
        let pt = parallel_tempering_sample(&req, &PtSettings { n_replicas: 1, t_max_ratio: 10.0 }).unwrap();
        prop_assert_eq!(pt.reads, glauber_sample(&req).unwrap().reads);
    }

    #[test]
    fn clamped_environment_never_moves(inst in common::instance(2..=8), seed in any::<u64>(), bits in any::<usize>()) {
        let init = SpinConfig::from_index(bits % (1 << inst.n.min(20)), inst.n);
        let mut req = SamplerRequest::new(inst.clone(), 0.5, init.clone(), 100, 20, seed);
        req.clamp_environment = true;
        let env = inst.environment();
        for set in [glauber_sample(&req).unwrap(), parallel_tempering_sample(&req, &PtSettings::default()).unwrap()] {
            for r in &set.reads {
                prop_assert_eq!(r.restrict(&env), init.restrict(&env));
            }
        }
    }
}

#[test]
fn acceptance_values() {
    assert_eq!(glauber_acceptance(7.219, 0.0), 0.5);
    let p = glauber_acceptance(7.219, 1.93);
    assert!((p - 1.0 / (1.0 + (7.219f64 * 1.93).exp())).abs() < 1e-20);
    assert!((p - 8.9e-7).abs() < 0.05e-7);
}

#[test]
fn lone_svmc_spin_is_unbiased() {
    let inst = annealdiag::IsingInstance::from_json(
        r#"{"n":1,"edges":[],"fields":[0.0],"subsystem":[0],"meta":{"seed":0,"W":0.0,"p_S":0.0,"lambda":0.0,"family":"custom"}}"#,
    )
    .unwrap();
    let req = SamplerRequest::new(inst, 7.22, SpinConfig::all_up(1), 20_000, 20_000, 11);
    let set = svmc_sample(&req, &SvmcSettings::default()).unwrap();
    let up = set.reads.iter().filter(|r| r.get(0) == 1).count() as f64;
    let n = set.reads.len() as f64;
    // uniform proposals make consecutive sweeps independent for a free spin
    assert!((up / n - 0.5).abs() < 3.0 * (0.25 / n).sqrt(), "{up} of {n}");
}
