//! The diagnostic pipeline shared by simulated and replayed conditions.

use crate::diagnostics::{
    beta_sensitivity_sweep, classify_default, conditional_gibbs_reference, memory_order_parameter,
    sampling_floor, tvd, MemoryResult, PreparationDistance, SensitivityPoint, SubsystemDistribution,
    ThermalComparison, SENSITIVITY_POINTS,
};
use crate::error::Result;
use crate::model::{IsingInstance, SpinConfig};
use crate::qsim::{self, PauseHamiltonian, MAX_GIBBS_QUBITS};

pub(crate) struct AnalysisSettings {
    pub beta_reference: f64,
    pub resamples: usize,
    pub bootstrap_seed: u64,
    /// `(A, B)` in GHz for the quantum reference.
    pub quantum: Option<(f64, f64)>,
    pub sensitivity: bool,
}

pub(crate) struct Analysis {
    pub memory: MemoryResult,
    pub thermal: ThermalComparison,
    pub sensitivity: Option<Vec<SensitivityPoint>>,
}

/// `labels[a]` names `dists[a]`; `raw[a]` holds its per-read subsystem
/// indices when the distribution is empirical.
pub(crate) fn analyze(
    instance: &IsingInstance,
    env: &SpinConfig,
    labels: &[String],
    dists: &[SubsystemDistribution],
    raw: Option<&[Vec<usize>]>,
    settings: &AnalysisSettings,
) -> Result<Analysis> {
    let memory = memory_order_parameter(dists, raw, settings.resamples, settings.bootstrap_seed)?;
    let reference = conditional_gibbs_reference(instance, settings.beta_reference, env)?;
    let pooled = SubsystemDistribution::pooled(dists)?;
    let d_tv_classical = tvd(&pooled, &reference)?;
    let per_preparation = labels
        .iter()
        .zip(dists)
        .map(|(label, d)| Ok(PreparationDistance { preparation: label.clone(), d_tv: tvd(d, &reference)? }))
        .collect::<Result<Vec<_>>>()?;

    let (mut d_q_cond, mut d_q_uncond) = (None, None);
    if let Some((a, b)) = settings.quantum {
        if instance.n <= MAX_GIBBS_QUBITS {
            let h = PauseHamiltonian::new(instance, a, b, MAX_GIBBS_QUBITS)?;
            let diag = qsim::quantum_gibbs_diag(&h, qsim::bath_beta(settings.beta_reference, b))?;
            let cond = qsim::conditional_quantum_marginal(&diag, &instance.subsystem, env)?;
            let uncond = qsim::unconditional_quantum_marginal(&diag, &instance.subsystem)?;
            d_q_cond = Some(tvd(&pooled, &cond)?);
            d_q_uncond = Some(tvd(&pooled, &uncond)?);
        }
    }
    let floor = if pooled.n_reads > 0 { sampling_floor(pooled.len(), pooled.n_reads) } else { 0.0 };
    let sensitivity = if settings.sensitivity && settings.beta_reference > 0.0 {
        Some(beta_sensitivity_sweep(&pooled, instance, env, settings.beta_reference, SENSITIVITY_POINTS)?)
    } else {
        None
    };
    let thermal = ThermalComparison {
        d_tv_classical,
        per_preparation,
        d_tv_quantum_conditional: d_q_cond,
        d_tv_quantum_unconditional: d_q_uncond,
        beta_used: settings.beta_reference,
        sampling_floor: floor,
        classification: classify_default(memory.m, d_tv_classical),
        pooled,
        reference,
    };
    Ok(Analysis { memory, thermal, sensitivity })
}
