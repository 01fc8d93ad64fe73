// Shared strategies for the property suites.
#![allow(dead_code)]

use annealdiag::model::{InstanceParams, IsingInstance};
use proptest::prelude::*;

pub fn params(n_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = InstanceParams> {
    (n_range, 0u64..1_000, 0.0f64..=1.0, 0.0f64..=1.5, 0.0f64..=1.0).prop_flat_map(
        |(half, seed, lambda, disorder, frustration)| {
            let n = 2 * half;
            (1..=n.min(6)).prop_map(move |subsystem_size| InstanceParams {
                n,
                subsystem_size,
                lambda,
                disorder,
                frustration,
                seed,
            })
        },
    )
}

pub fn instance(n_half: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = IsingInstance> {
    params(n_half).prop_map(|p| p.generate().expect("valid parameters"))
}

pub fn distribution(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1 << k).prop_map(|w| {
        let total: f64 = w.iter().sum::<f64>() + 1e-300;
        if total < 1e-9 {
            let mut d = vec![0.0; w.len()];
            d[0] = 1.0;
            d
        } else {
            w.iter().map(|x| x / total).collect()
        }
    })
}
