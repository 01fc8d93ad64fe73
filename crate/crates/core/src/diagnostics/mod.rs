//! Memory order parameter, conditional-Boltzmann reference distances and
//! the four-way classification built on them.

mod beta;
mod classify;
mod distribution;
mod memory;
mod reference;

pub use beta::{
    beta_standard_error, estimate_beta_eff, estimate_beta_from_frequencies, expected_probe_counts,
    probe_up_probability, sample_probe_counts, BetaEstimate,
};
pub use classify::{
    classify, classify_default, Classification, PreparationDistance, ThermalComparison, D_THRESHOLD,
    M_THRESHOLD,
};
pub(crate) use distribution::{check_indices, pack};
pub use distribution::{tvd, tvd_slices, SubsystemDistribution, NORMALIZATION_TOLERANCE};
pub use memory::{memory_order_parameter, MemoryResult, DEFAULT_RESAMPLES};
pub use reference::{
    arrhenius_factor, beta_sensitivity_sweep, boltzmann_over, conditional_energies,
    conditional_gibbs_reference, log_grid, sampling_floor, SensitivityPoint, MAX_REFERENCE_SUBSYSTEM,
    SENSITIVITY_POINTS,
};

/// Boltzmann vector over all `2^n` configurations of an instance.
pub fn classical_gibbs(instance: &crate::IsingInstance, beta: f64) -> crate::Result<Vec<f64>> {
    Ok(crate::landscape::enumerate(instance)?.boltzmann(beta))
}
