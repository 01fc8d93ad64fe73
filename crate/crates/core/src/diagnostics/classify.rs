use serde::{Deserialize, Serialize};

use super::distribution::SubsystemDistribution;

pub const M_THRESHOLD: f64 = 0.05;
pub const D_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    RelaxedThermal,
    RelaxedTrapped,
    MemoryRetaining,
    /// Memory is retained but the pooled readout happens to sit near the
    /// reference.
    MemoryRetainingAliased,
}

impl Classification {
    pub const ALL: [Classification; 4] = [
        Classification::RelaxedThermal,
        Classification::RelaxedTrapped,
        Classification::MemoryRetaining,
        Classification::MemoryRetainingAliased,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Classification::RelaxedThermal => "relaxed-thermal",
            Classification::RelaxedTrapped => "relaxed-trapped",
            Classification::MemoryRetaining => "memory-retaining",
            Classification::MemoryRetainingAliased => "memory-retaining-aliased",
        }
    }

    pub fn is_relaxed(self) -> bool {
        matches!(self, Classification::RelaxedThermal | Classification::RelaxedTrapped)
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify(m: f64, d_tv: f64, m_threshold: f64, d_threshold: f64) -> Classification {
    match (m <= m_threshold, d_tv < d_threshold) {
        (true, true) => Classification::RelaxedThermal,
        (true, false) => Classification::RelaxedTrapped,
        (false, true) => Classification::MemoryRetainingAliased,
        (false, false) => Classification::MemoryRetaining,
    }
}

pub fn classify_default(m: f64, d_tv: f64) -> Classification {
    classify(m, d_tv, M_THRESHOLD, D_THRESHOLD)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationDistance {
    pub preparation: String,
    pub d_tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalComparison {
    /// Distance from the pooled marginal to the conditional classical reference.
    pub d_tv_classical: f64,
    pub per_preparation: Vec<PreparationDistance>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_tv_quantum_conditional: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_tv_quantum_unconditional: Option<f64>,
    pub beta_used: f64,
    pub sampling_floor: f64,
    pub classification: Classification,
    pub pooled: SubsystemDistribution,
    pub reference: SubsystemDistribution,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(classify_default(0.01, 0.001), Classification::RelaxedThermal);
        assert_eq!(classify_default(0.01, 0.95), Classification::RelaxedTrapped);
        assert_eq!(classify_default(0.5, 0.35), Classification::MemoryRetaining);
        assert_eq!(classify_default(0.5, 0.01), Classification::MemoryRetainingAliased);
    }

    #[test]
    fn boundaries() {
        assert_eq!(classify_default(0.05, 0.0499), Classification::RelaxedThermal);
        assert_eq!(classify_default(0.05, 0.05), Classification::RelaxedTrapped);
        assert_eq!(classify_default(0.0501, 0.05), Classification::MemoryRetaining);
    }

    #[test]
    fn labels_round_trip() {
        for c in Classification::ALL {
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.label()));
            assert_eq!(serde_json::from_str::<Classification>(&json).unwrap(), c);
        }
    }
}
