mod common;

use annealdiag::diagnostics::{
    classify_default, conditional_gibbs_reference, estimate_beta_from_frequencies, expected_probe_counts,
    memory_order_parameter, tvd_slices, SubsystemDistribution,
};
use annealdiag::model::{InstanceParams, SpinConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn tvd_triangle_inequality(p in common::distribution(3), q in common::distribution(3), r in common::distribution(3)) {
        let pq = tvd_slices(&p, &q).unwrap();
        let qr = tvd_slices(&q, &r).unwrap();
        let pr = tvd_slices(&p, &r).unwrap();
        prop_assert!(pr <= pq + qr + 1e-12);
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert_eq!(pq, tvd_slices(&q, &p).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn memory_ignores_preparation_order(
        dists in prop::collection::vec(common::distribution(2), 2..6),
        perm_seed in any::<u64>(),
    ) {
        let s = vec![0, 1];
        let d: Vec<SubsystemDistribution> =
            dists.iter().map(|p| SubsystemDistribution::new(s.clone(), p.clone(), 0).unwrap()).collect();
        let mut shuffled = d.clone();
        let len = shuffled.len();
        shuffled.rotate_left((perm_seed as usize) % len);
        shuffled.swap(0, (perm_seed as usize / 7) % len);
        let a = memory_order_parameter(&d, None, 0, 0).unwrap().m;
        let b = memory_order_parameter(&shuffled, None, 0, 0).unwrap().m;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reference_is_z2_covariant(p in common::params(2..=10), beta in 0.0f64..8.0, bits in any::<usize>()) {
        let inst = InstanceParams { disorder: 0.0, ..p }.generate().unwrap();
        let m = inst.n - inst.subsystem.len();
        let env = SpinConfig::from_index(bits % (1 << m), m);
        let up = conditional_gibbs_reference(&inst, beta, &env).unwrap();
        let down = conditional_gibbs_reference(&inst, beta, &env.flipped()).unwrap();
        let k = up.len();
        for idx in 0..k {
            // flipping every S spin complements the packed index
            prop_assert!((up.probs()[idx] - down.probs()[k - 1 - idx]).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_estimator_inverts_expected_counts(beta in 0.01f64..20.0, h in prop::sample::select(vec![0.05, 0.25, 0.5, 1.0, -0.5]), probes in 1usize..5) {
        let counts: Vec<(f64, f64)> = (0..probes).map(|_| expected_probe_counts(beta, h, 5000.0)).collect();
        let est = estimate_beta_from_frequencies(&counts, h).unwrap();
        prop_assert!((est.beta - beta).abs() <= 1e-12 * beta.max(1.0));
    }
}

#[test]
fn classification_boundaries() {
    use annealdiag::diagnostics::Classification::*;
    assert_eq!(classify_default(0.05, 0.049), RelaxedThermal);
    assert_eq!(classify_default(0.05, 0.05), RelaxedTrapped);
    assert_eq!(classify_default(0.051, 0.01), MemoryRetainingAliased);
    assert_eq!(classify_default(0.9, 0.35), MemoryRetaining);
}
